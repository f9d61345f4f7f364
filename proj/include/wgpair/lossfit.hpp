#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wgpair {

struct CutbackEntry {
  double lambda_nm = 0.0;
  double length_mm = 0.0;
  double loss_db = 0.0;
};

struct CutbackDataset {
  std::vector<CutbackEntry> entries;
  std::string polarization;
  std::string cladding;
};

// CSV with header lambda_nm,length_mm,loss_db (any column order).
CutbackDataset parse_cutback_csv(std::string_view text, std::string_view source = "<string>");
CutbackDataset load_cutback_csv(const std::filesystem::path& file);

// Distinct wavelengths present in the dataset, ascending.
std::vector<double> dataset_wavelengths(const CutbackDataset& data);

struct CutbackResult {
  double lambda_nm = 0.0;
  double propagation_db_per_cm = 0.0;
  double propagation_sigma = 0.0;
  double coupling_db = 0.0;  // both couplers
  double coupling_sigma = 0.0;
  double per_coupler_db = 0.0;
  int points = 0;
};

// OLS of insertion loss against length at one wavelength. Throws FitError
// with fewer than two distinct lengths.
CutbackResult cutback_regression(const CutbackDataset& data, double lambda_nm);

struct LossSample {
  double lambda_nm = 0.0;
  double loss_db_per_cm = 0.0;
};

std::vector<LossSample> loss_spectrum(const CutbackDataset& data);

struct VoigtParams {
  double center_nm = 0.0;
  double sigma_nm = 0.0;  // Gaussian standard deviation
  double gamma_nm = 0.0;  // Lorentzian half width at half maximum
  double amplitude = 0.0; // peak value
};

// Peak-normalized Voigt profile. Uses the Weideman rational approximation of
// the Faddeeva function; the pure Gaussian and Lorentzian limits are exact.
// Throws DomainError when both widths are zero.
double voigt(double lambda_nm, const VoigtParams& p);

// Faddeeva function w(z) real and imaginary parts for Im z >= 0.
std::array<double, 2> faddeeva(double x, double y);

struct DecomposeOptions {
  std::optional<double> center_guess_nm;  // default: steepest descent of the residual
  double width_guess_nm = 10.0;
  int max_evaluations = 20000;  // per simplex run
  int restarts = 6;
  int max_passes = 60;          // baseline / Voigt alternations
  double tolerance = 1e-12;     // relative, on the objective and parameters
};

struct LossDecomposition {
  double scattering_a = 0.0;  // dB/cm nm^4
  VoigtParams voigt;
  double residual_rms = 0.0;  // dB/cm
  std::array<double, 4> anchors_nm{};
  int passes = 0;
  int evaluations = 0;

  double baseline(double lambda_nm) const;
  double model(double lambda_nm) const;
};

// Two-stage decomposition: A lambda^-4 from the four longest wavelengths, then
// a Voigt fit to the remainder by restarted Nelder-Mead; the two stages are
// alternated to a fixed point. Throws FitError if the simplex stalls.
LossDecomposition decompose_spectrum(std::vector<LossSample> spectrum, const DecomposeOptions& options = {});

// Longest wavelength in [lo, hi] where the model reaches twice the
// scattering baseline; nullopt if it never does.
std::optional<double> absorption_onset(const LossDecomposition& fit, double lo_nm, double hi_nm);

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead minimizer; after convergence it restarts from the best vertex
// until a restart no longer improves the value.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& steps, int max_evaluations, int restarts,
                          double tolerance);

}  // namespace wgpair
