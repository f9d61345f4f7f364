#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wgpair/materials.hpp"
#include "wgpair/modesolver.hpp"
#include "wgpair/phasematch.hpp"

namespace wgpair {

struct OverlapResult {
  double gamma_per_volt = 0.0;
  // Signed contribution of each chi(2) material to gamma (1/V); only filled
  // when the overlap is computed from a material library.
  std::map<std::string, double> contributions;
};

// Normalized nonlinear overlap between the FH TE00 field squared and the SH
// TM00 field, weighted by d36 (pm/V per cell). Independent of the field
// normalization. Throws GridError on mesh mismatch and ConfigError on wrong
// polarizations.
OverlapResult overlap_gamma(const ModeSolution& fh, const ModeSolution& sh,
                            std::span<const double> d36_pm_per_volt);
OverlapResult overlap_gamma(const ModeSolution& fh, const ModeSolution& sh,
                            const MaterialLibrary& library);

// Normalized SHG efficiency P_sh / (P_p^2 L^2) in %/W/mm^2:
//   8 pi^2 gamma^2 / (c0 eps0 n_eff^3 lambda_p^2)
double shg_efficiency(double gamma_per_volt, double lambda_p_nm, double n_eff);

struct SpdcEfficiency {
  double normalized_per_mm32 = 0.0;  // pairs per pump photon per mm^(3/2)
  double total = 0.0;                // pairs per pump photon at the given length
};

// eta_spdc = eta_shg * h nu_si * (bandwidth coefficient), times L^(3/2).
SpdcEfficiency spdc_efficiency(double eta_shg_percent_per_w_mm2, double lambda_si_nm,
                               double bandwidth_coefficient_thz_sqrt_mm, double length_mm);

struct PropagationLoss {
  double fh_db_per_cm = 0.0;
  double sh_db_per_cm = 0.0;
};

// Lossy-to-lossless SHG peak power ratio for a section of `length_mm`.
double shg_loss_factor(const PropagationLoss& loss, double length_mm);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct DetuningCurve {
  std::vector<CurvePoint> points;  // (lambda_nm, relative SHG power, peak 1)
  double amplitude = 1.0;          // loss factor applied to the whole curve
};

// sinc^2(dk L / 2) with dk = 4 pi delta_n / lambda.
DetuningCurve detuning_curve(std::span<const MismatchSample> samples, double length_mm,
                             const PropagationLoss& loss = {});

// Full width at half maximum of a sampled single-peaked curve, by linear
// interpolation of the half-maximum crossings. Returns 0 when a side never
// drops below half.
double curve_fwhm(std::span<const CurvePoint> curve);

struct SpectrumPoint {
  double detuning_thz = 0.0;  // nu - nu_p / 2
  double frequency_thz = 0.0;
  double lambda_nm = 0.0;
  double density = 0.0;  // peak-normalized
};

struct BiphotonSpectrum {
  std::vector<SpectrumPoint> points;
  double center_thz = 0.0;
  double center_nm = 0.0;
  double fwhm_thz = 0.0;
  double fwhm_nm = 0.0;
  // Fraction of the total emission inside the FWHM band.
  double band_fraction = 0.0;
};

// Wavelength width (nm) of a band of `width_thz` centred on `center_nm`.
double frequency_width_to_nm(double width_thz, double center_nm);

// Integral of sinc^2(t^2) over [0, upper]; upper may be +infinity.
double sinc2_quartic_integral(double upper);

// Degenerate CW biphoton spectrum sinc^2(beta2 Omega^2 L / 2) around the FH
// wavelength. `span_fwhm` sets the sampled range in units of the FWHM.
BiphotonSpectrum biphoton_spectrum(double beta2_s2_per_m, double length_mm, double lambda_fh_nm,
                                   int samples = 801, double span_fwhm = 4.0);

}  // namespace wgpair
