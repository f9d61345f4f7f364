#include "wgpair/qkdbudget.hpp"

#include <cmath>
#include <limits>

#include "wgpair/conversion.hpp"
#include "wgpair/error.hpp"
#include "wgpair/phasematch.hpp"
#include "wgpair/units.hpp"

namespace wgpair {

namespace u = units;

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("budget: ") + name + " must be positive");
}

constexpr double kC0 = 299792458.0;

}  // namespace

ChannelGrid plan_channels(double fwhm_thz, double spacing_ghz, double passband_ghz, double center_thz) {
  require_positive(fwhm_thz, "spectrum FWHM");
  require_positive(spacing_ghz, "channel spacing");
  if (passband_ghz < 0.0 || passband_ghz > spacing_ghz) {
    throw DomainError("budget: passband must lie in [0, spacing]");
  }
  ChannelGrid g;
  g.spacing_ghz = spacing_ghz;
  g.passband_ghz = passband_ghz;
  g.center_thz = center_thz;
  g.spectrum_fwhm_thz = fwhm_thz;
  const double ratio = fwhm_thz * 1e3 / spacing_ghz;
  auto nm_of = [](double thz) { return thz > 0.0 ? kC0 / (thz * 1e12) * 1e9 : 0.0; };
  if (ratio <= 1.0) {
    g.degenerate = true;
    g.channels = 1;
    g.pair_channels = 0;
    g.list.push_back({0, center_thz, nm_of(center_thz)});
    return g;
  }
  int n = static_cast<int>(std::floor(ratio + 1e-9));
  n -= n % 2;
  g.channels = n;
  g.pair_channels = n / 2;
  for (int k = 1; k <= g.pair_channels; ++k) {
    const double offset = (k - 0.5) * spacing_ghz * 1e-3;
    g.list.push_back({k, center_thz + offset, nm_of(center_thz + offset)});
    g.list.push_back({-k, center_thz - offset, nm_of(center_thz - offset)});
  }
  return g;
}

double pump_power_for_mu(double mu, double t_res_ps, double dnu_si_thz, double dnu_ch_ghz, double rate_per_mw) {
  if (mu < 0.0) throw DomainError("budget: mu must be >= 0");
  require_positive(t_res_ps, "T_res");
  require_positive(dnu_si_thz, "biphoton bandwidth");
  require_positive(dnu_ch_ghz, "channel passband");
  require_positive(rate_per_mw, "pair rate per mW");
  const u::Time t_res = t_res_ps * u::picosecond;
  const u::Frequency dnu_si = dnu_si_thz * u::terahertz;
  const u::Frequency dnu_ch = dnu_ch_ghz * u::gigahertz;
  const u::RatePerPower rate = rate_per_mw * (u::hertz / u::milliwatt);
  const auto power = (mu / t_res) * (dnu_si / dnu_ch) / rate;
  static_assert(std::is_same_v<std::remove_const_t<decltype(power)>, u::Power>, "pump budget must be a power");
  return power.in(u::milliwatt);
}

double mu_for_pump_power(double pump_mw, double t_res_ps, double dnu_si_thz, double dnu_ch_ghz, double rate_per_mw) {
  if (pump_mw < 0.0) throw DomainError("budget: pump power must be >= 0");
  require_positive(dnu_si_thz, "biphoton bandwidth");
  return pump_mw * rate_per_mw * (t_res_ps * 1e-12) * (dnu_ch_ghz * 1e9) / (dnu_si_thz * 1e12);
}

double saturation_rate(double rate_per_mw) {
  require_positive(rate_per_mw, "pair rate per mW");
  return (rate_per_mw * (u::hertz / u::milliwatt)).in(u::gigahertz / u::milliwatt);
}

BudgetResult compute_budget(const BudgetInputs& in) {
  require_positive(in.center_nm, "centre wavelength");
  BudgetResult r;
  r.required_pump_mw = pump_power_for_mu(in.mu, in.t_res_ps, in.spectrum_fwhm_thz, in.passband_ghz, in.rate_per_mw);
  r.mu = mu_for_pump_power(r.required_pump_mw, in.t_res_ps, in.spectrum_fwhm_thz, in.passband_ghz, in.rate_per_mw);
  if (std::abs(r.mu - in.mu) > 1e-12 * std::max(1.0, in.mu)) {
    throw SolverError("budget: mu round trip drifted", 0, std::abs(r.mu - in.mu));
  }
  r.total_rate_hz = r.required_pump_mw * in.rate_per_mw;
  r.per_channel_rate_hz = r.total_rate_hz * (in.passband_ghz * 1e-3) / in.spectrum_fwhm_thz;
  r.saturation_ghz_per_mw = saturation_rate(in.rate_per_mw);

  const double center_thz = kC0 / (in.center_nm * 1e-9) * 1e-12;
  r.grid = plan_channels(in.spectrum_fwhm_thz, in.spacing_ghz, in.passband_ghz, center_thz);

  // sinc^2(x_half (2 nu / FWHM)^2): in t = sqrt(x_half) 2 nu / FWHM the
  // density is sinc^2(t^2). Both sidebands share one normalization.
  const double scale = std::sqrt(sinc2_half_point()) * 2.0 / in.spectrum_fwhm_thz;
  const double whole = 2.0 * sinc2_quartic_integral(std::numeric_limits<double>::infinity());
  // The flat model puts every pair inside the FWHM; scale up to the full emission.
  const double emitted = r.total_rate_hz * whole / (2.0 * sinc2_quartic_integral(std::sqrt(sinc2_half_point())));
  auto band = [&](double lo_thz, double hi_thz) {
    auto signed_integral = [&](double nu) {
      const double t = std::abs(nu) * scale;
      return std::copysign(sinc2_quartic_integral(t), nu);
    };
    return (signed_integral(hi_thz) - signed_integral(lo_thz)) / whole;
  };
  for (const auto& ch : r.grid.list) {
    ChannelBudget cb;
    cb.channel = ch;
    cb.flat_rate_hz = r.per_channel_rate_hz;
    const double d = ch.center_thz - center_thz;
    const double half = 0.5 * in.passband_ghz * 1e-3;
    cb.weighted_rate_hz = emitted * band(d - half, d + half);
    r.channels.push_back(cb);
    r.usable_rate_hz += cb.flat_rate_hz;
  }
  return r;
}

}  // namespace wgpair
