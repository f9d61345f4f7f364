#pragma once

#include <vector>

namespace wgpair {

struct Channel {
  int index = 0;  // +k signal side, -k idler side
  double center_thz = 0.0;
  double center_nm = 0.0;
};

struct ChannelGrid {
  double spacing_ghz = 0.0;
  double passband_ghz = 0.0;  // FWHM of each passband
  double center_thz = 0.0;    // degeneracy frequency
  double spectrum_fwhm_thz = 0.0;
  int channels = 0;       // signal and idler channels together
  int pair_channels = 0;  // signal/idler pairs
  bool degenerate = false;  // FWHM <= spacing: one channel at degeneracy
  std::vector<Channel> list;
};

// Channels inside the biphoton FWHM: floor(FWHM / spacing) rounded down to
// an even count, placed pairwise at +-(k - 1/2) spacing around degeneracy.
ChannelGrid plan_channels(double spectrum_fwhm_thz, double spacing_ghz, double passband_ghz = 0.0,
                          double center_thz = 0.0);

// Internal pump power (mW) giving mu pairs per resolvable time bin per
// channel: P = (mu / T_res) (dnu_si / dnu_ch) / rate_per_mw.
double pump_power_for_mu(double mu, double t_res_ps, double dnu_si_thz, double dnu_ch_ghz, double rate_per_mw);

// Inverse of pump_power_for_mu.
double mu_for_pump_power(double pump_mw, double t_res_ps, double dnu_si_thz, double dnu_ch_ghz,
                         double rate_per_mw);

// pairs/s/mW -> GHz/mW
double saturation_rate(double rate_per_mw);

struct BudgetInputs {
  double mu = 0.05;
  double t_res_ps = 150.0;
  double spectrum_fwhm_thz = 7.1;
  double passband_ghz = 54.0;
  double spacing_ghz = 100.0;
  double rate_per_mw = 2.6e10;
  double center_nm = 1608.0;
};

struct ChannelBudget {
  Channel channel;
  double flat_rate_hz = 0.0;
  // Same total rate redistributed by the sinc^2 spectrum over each passband.
  double weighted_rate_hz = 0.0;
};

struct BudgetResult {
  double required_pump_mw = 0.0;
  double mu = 0.0;  // recomputed from the required pump power
  double per_channel_rate_hz = 0.0;
  double total_rate_hz = 0.0;   // generated inside the biphoton FWHM
  double usable_rate_hz = 0.0;  // summed over the planned channels
  double saturation_ghz_per_mw = 0.0;
  ChannelGrid grid;
  std::vector<ChannelBudget> channels;
};

BudgetResult compute_budget(const BudgetInputs& in);

}  // namespace wgpair
