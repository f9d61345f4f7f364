#include "wgpair/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wgpair/error.hpp"
#include "wgpair/units.hpp"

namespace wgpair {

namespace u = units;

namespace {

constexpr double kPi = std::numbers::pi;

void check_pair(const ModeSolution& fh, const ModeSolution& sh) {
  if (!fh.grid || !sh.grid || !fh.grid->same_mesh(*sh.grid)) {
    throw GridError("overlap_gamma: FH and SH modes are on different meshes");
  }
  if (fh.polarization != Polarization::kTE || sh.polarization != Polarization::kTM) {
    throw ConfigError("overlap_gamma: expects a TE-like FH mode and a TM-like SH mode");
  }
}

struct OverlapSums {
  double fh_power = 0.0;
  double sh_power = 0.0;
};

OverlapSums powers(const ModeSolution& fh, const ModeSolution& sh) {
  const auto& g = *fh.grid;
  OverlapSums s;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int c = g.flat(i, j);
      const double da = g.area(i, j);
      s.fh_power += (fh.ex[c] * fh.ex[c] + fh.ey[c] * fh.ey[c]) * da;
      s.sh_power += (sh.ex[c] * sh.ex[c] + sh.ey[c] * sh.ey[c]) * da;
    }
  }
  return s;
}

// (pm/V) / nm -> 1/V
constexpr double kGammaUnit = 1e-12 / 1e-9;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

OverlapResult overlap_gamma(const ModeSolution& fh, const ModeSolution& sh,
                            std::span<const double> d36) {
  check_pair(fh, sh);
  const auto& g = *fh.grid;
  if (static_cast<int>(d36.size()) != g.size()) throw GridError("overlap_gamma: d36 map size mismatch");
  const OverlapSums p = powers(fh, sh);
  double num = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int c = g.flat(i, j);
      if (d36[c] == 0.0) continue;
      num += d36[c] * fh.ex[c] * fh.ex[c] * sh.ey[c] * g.area(i, j);
    }
  }
  OverlapResult r;
  r.gamma_per_volt = num / (p.fh_power * std::sqrt(p.sh_power)) * kGammaUnit;
  return r;
}

OverlapResult overlap_gamma(const ModeSolution& fh, const ModeSolution& sh,
                            const MaterialLibrary& library) {
  check_pair(fh, sh);
  const auto& g = *fh.grid;
  if (!g.has_composition()) throw GridError("overlap_gamma: mesh carries no material composition");
  std::vector<double> d36_of;
  for (const auto& name : g.material_names()) d36_of.push_back(library.find(name).d36_pm_per_volt);

  const OverlapSums p = powers(fh, sh);
  const double norm = kGammaUnit / (p.fh_power * std::sqrt(p.sh_power));
  std::vector<double> per_material(d36_of.size(), 0.0);
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int c = g.flat(i, j);
      const double kernel = fh.ex[c] * fh.ex[c] * sh.ey[c] * g.area(i, j);
      for (const auto& f : g.composition(c)) {
        per_material[f.material] += f.fraction * d36_of[f.material] * kernel;
      }
    }
  }
  OverlapResult r;
  for (std::size_t m = 0; m < per_material.size(); ++m) {
    if (d36_of[m] == 0.0) continue;
    r.contributions[g.material_names()[m]] = per_material[m] * norm;
    r.gamma_per_volt += per_material[m] * norm;
  }
  return r;
}

double shg_efficiency(double gamma_per_volt, double lambda_p_nm, double n_eff) {
  if (!(n_eff > 0.0)) throw DomainError("shg_efficiency: n_eff must be positive");
  if (!(lambda_p_nm > 0.0)) throw DomainError("shg_efficiency: wavelength must be positive");
  const u::InverseVoltage gamma{gamma_per_volt};
  const u::Length lambda = lambda_p_nm * u::nanometer;
  const auto eta = 8.0 * kPi * kPi * u::square(gamma) /
                   (u::speed_of_light * u::vacuum_permittivity * std::pow(n_eff, 3) *
                    u::square(lambda));
  static_assert(std::is_same_v<std::remove_const_t<decltype(eta)>, u::NormalizedShgEfficiency>,
                "SHG efficiency must come out in 1/(W m^2)");
  const u::NormalizedShgEfficiency percent_per_w_mm2 =
      0.01 / (u::watt * u::square(u::millimeter));
  return eta.in(percent_per_w_mm2);
}

SpdcEfficiency spdc_efficiency(double eta_shg_percent, double lambda_si_nm, double coefficient,
                               double length_mm) {
  if (eta_shg_percent < 0.0 || !(lambda_si_nm > 0.0) || !(coefficient > 0.0) || !(length_mm > 0.0)) {
    throw DomainError("spdc_efficiency: inputs must be positive");
  }
  const auto eta_shg = eta_shg_percent * (0.01 / (u::watt * u::square(u::millimeter)));
  const u::Energy photon = u::planck * u::speed_of_light / (lambda_si_nm * u::nanometer);
  const u::BandwidthCoefficient bw =
      coefficient * (u::terahertz * u::SqrtLength{std::sqrt(1e-3)});
  const auto eta = eta_shg * photon * bw;
  static_assert(std::is_same_v<std::remove_const_t<decltype(eta)>, u::NormalizedSpdcEfficiency>,
                "SPDC efficiency must come out in m^(-3/2)");
  const u::NormalizedSpdcEfficiency per_mm32 = 1.0 / (u::millimeter * u::SqrtLength{std::sqrt(1e-3)});
  SpdcEfficiency r;
  r.normalized_per_mm32 = eta.in(per_mm32);
  r.total = r.normalized_per_mm32 * std::pow(length_mm, 1.5);
  return r;
}

double shg_loss_factor(const PropagationLoss& loss, double length_mm) {
  // dB/cm -> 1/m (power)
  const double to_np = std::log(10.0) / 10.0 * 100.0;
  const double a_fh = loss.fh_db_per_cm * to_np;
  const double a_sh = loss.sh_db_per_cm * to_np;
  const double l = length_mm * 1e-3;
  const double g = a_fh - 0.5 * a_sh;
  const double growth = std::abs(g * l) < 1e-12 ? 1.0 : (1.0 - std::exp(-g * l)) / (g * l);
  return std::exp(-a_sh * l) * growth * growth;
}

DetuningCurve detuning_curve(std::span<const MismatchSample> samples, double length_mm,
                             const PropagationLoss& loss) {
  DetuningCurve curve;
  const double length_nm = length_mm * 1e6;
  for (const auto& s : samples) {
    const double dk = 4.0 * kPi * s.delta / s.lambda_nm;
    const double v = sinc(0.5 * dk * length_nm);
    curve.points.push_back({s.lambda_nm, v * v});
  }
  curve.amplitude = shg_loss_factor(loss, length_mm);
  return curve;
}

double curve_fwhm(std::span<const CurvePoint> curve) {
  if (curve.size() < 3) return 0.0;
  std::size_t peak = 0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    if (curve[k].y > curve[peak].y) peak = k;
  }
  const double half = 0.5 * curve[peak].y;
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const auto& a = curve[inside];
    const auto& b = curve[outside];
    return a.x + (half - a.y) * (b.x - a.x) / (b.y - a.y);
  };
  double left = 0.0;
  double right = 0.0;
  bool found_left = false;
  bool found_right = false;
  for (std::size_t k = peak; k > 0; --k) {
    if (curve[k - 1].y <= half) {
      left = crossing(k, k - 1);
      found_left = true;
      break;
    }
  }
  for (std::size_t k = peak; k + 1 < curve.size(); ++k) {
    if (curve[k + 1].y <= half) {
      right = crossing(k, k + 1);
      found_right = true;
      break;
    }
  }
  return found_left && found_right ? std::abs(right - left) : 0.0;
}

double frequency_width_to_nm(double width_thz, double center_nm) {
  if (!(center_nm > 0.0) || width_thz < 0.0) throw DomainError("frequency_width_to_nm: bad band");
  const double c0 = u::speed_of_light.value;
  const double nu0 = c0 / (center_nm * 1e-9);
  const double half = 0.5 * width_thz * 1e12;
  if (half >= nu0) throw DomainError("frequency_width_to_nm: band wider than its centre frequency");
  return (c0 / (nu0 - half) - c0 / (nu0 + half)) * 1e9;
}

double sinc2_quartic_integral(double upper) {
  if (!(upper >= 0.0)) throw DomainError("sinc2_quartic_integral: upper limit must be >= 0");
  // Composite Simpson on [0, min(upper, T)]; beyond T the integrand averages
  // to 1 / (2 t^4), which leaves 1 / (6 T^3).
  constexpr double kTail = 60.0;
  const double top = std::min(upper, kTail);
  const int n = std::max(2, static_cast<int>(std::ceil(top * 400.0))) * 2;
  const double h = top / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double s = sinc(t * t);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * s * s;
  }
  acc *= h / 3.0;
  if (upper > kTail) {
    acc += std::isinf(upper) ? 1.0 / (6.0 * kTail * kTail * kTail)
                             : (1.0 / (kTail * kTail * kTail) - 1.0 / (upper * upper * upper)) / 6.0;
  }
  return acc;
}

BiphotonSpectrum biphoton_spectrum(double beta2, double length_mm, double lambda_fh_nm,
                                   int samples, double span_fwhm) {
  if (beta2 == 0.0) throw DomainError("biphoton_spectrum: beta2 == 0");
  if (!(length_mm > 0.0) || !(lambda_fh_nm > 0.0) || samples < 3) {
    throw DomainError("biphoton_spectrum: bad length, wavelength or sample count");
  }
  const double c0 = u::speed_of_light.value;
  const double length = length_mm * 1e-3;
  const double x_half = sinc2_half_point();
  // Half width in angular frequency: beta2 Omega^2 L / 2 = x_half.
  const double omega_half = std::sqrt(2.0 * x_half / (std::abs(beta2) * length));

  BiphotonSpectrum out;
  out.center_thz = c0 / (lambda_fh_nm * 1e-9) * 1e-12;
  out.center_nm = lambda_fh_nm;
  out.fwhm_thz = omega_half / kPi * 1e-12;
  out.fwhm_nm = frequency_width_to_nm(out.fwhm_thz, lambda_fh_nm);

  const double span = span_fwhm * out.fwhm_thz;
  for (int k = 0; k < samples; ++k) {
    const double nu = -0.5 * span + span * k / (samples - 1);
    const double omega = 2.0 * kPi * nu * 1e12;
    const double s = sinc(0.5 * beta2 * omega * omega * length);
    SpectrumPoint p;
    p.detuning_thz = nu;
    p.frequency_thz = out.center_thz + nu;
    p.lambda_nm = c0 / (p.frequency_thz * 1e12) * 1e9;
    p.density = s * s;
    out.points.push_back(p);
  }

  // In the scaled variable t = Omega sqrt(|beta2| L / 2) the density is
  // sinc^2(t^2) and the band edge sits at t = sqrt(x_half).
  out.band_fraction = sinc2_quartic_integral(std::sqrt(x_half)) /
                      sinc2_quartic_integral(std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace wgpair
