#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wgpair/grid.hpp"
#include "wgpair/materials.hpp"
#include "wgpair/modesolver.hpp"

namespace wgpair {

struct PhaseMatchOptions {
  double scan_step_nm = 5.0;
  double tolerance = 1e-6;  // on |delta n_eff| at the reported root
  int max_iterations = 80;
  int threads = 1;
  ResolutionPolicy policy{};
  SolverOptions solver{};
};

// One row of a mismatch scan: TE00 at lambda against TM00 at lambda / 2.
struct MismatchSample {
  double lambda_nm = 0.0;
  double n_te = 0.0;
  double n_tm_half = 0.0;
  double delta = 0.0;  // n_tm_half - n_te
};

struct PhaseMatchResult {
  double lambda_pump_nm = 0.0;
  double delta_n = 0.0;
  double n_eff_match = 0.0;  // TE00 index at the fundamental wavelength
  double n_eff_sh = 0.0;     // TM00 index at the second harmonic
  double bracket_lo_nm = 0.0;
  double bracket_hi_nm = 0.0;
  int iterations = 0;
};

struct PhaseMatchSearch {
  std::vector<MismatchSample> scan;
  std::optional<PhaseMatchResult> match;  // empty when the window has no sign change
};

// Evaluates the FH/SH mismatch on one λ-independent mesh of the stack.
class MismatchEvaluator {
 public:
  MismatchEvaluator(const LayerStack& stack, const MaterialLibrary& library,
                    const PhaseMatchOptions& options = {});

  MismatchSample operator()(double lambda_nm) const;
  std::vector<MismatchSample> scan(const std::vector<double>& lambdas_nm) const;

  ModeSolution fundamental_mode(double lambda_nm) const;     // TE00
  ModeSolution second_harmonic_mode(double lambda_nm) const; // TM00 at lambda_nm (already halved)
  const CrossSectionGrid& mesh() const { return base_; }
  const MaterialLibrary& library() const { return library_; }

 private:
  const MaterialLibrary& library_;
  PhaseMatchOptions options_;
  CrossSectionGrid base_;
};

// Coarse scan at options.scan_step_nm, then bisection/secant refinement of
// the first sign change until |delta n| <= options.tolerance.
PhaseMatchSearch find_phase_matching(const LayerStack& stack, const MaterialLibrary& library,
                                     double window_lo_nm, double window_hi_nm,
                                     const PhaseMatchOptions& options = {});

// Root refinement on any mismatch function (exposed for tests).
PhaseMatchSearch find_root_in_window(const std::function<MismatchSample(double)>& mismatch,
                                     double window_lo_nm, double window_hi_nm,
                                     const PhaseMatchOptions& options = {});

// beta2 in s^2/m from a five-point central difference of
// beta(omega) = n_eff(omega) omega / c0 with step rel_step * omega.
double gvd_from_index(const std::function<double(double lambda_nm)>& n_eff, double lambda_nm,
                      double rel_step = 5e-3);

// GVD of the fundamental mode of `polarization` at lambda.
double gvd_at(const LayerStack& stack, const MaterialLibrary& library, double lambda_nm,
              Polarization polarization, const PhaseMatchOptions& options = {});

// Root of sinc^2(x) = 1/2, x ~ 1.3916.
double sinc2_half_point();

// Biphoton FWHM times sqrt(L) in THz mm^1/2 for the leading beta2 term.
// Throws DomainError for beta2 == 0.
double bandwidth_law(double beta2_s2_per_m);

// FWHM in THz of the biphoton spectrum for a bandwidth coefficient and length.
double bandwidth_at_length(double coefficient_thz_sqrt_mm, double length_mm);

}  // namespace wgpair
