#include "wgpair/pairstats.hpp"

#include <cmath>
#include <numbers>

#include "timetags.hpp"
#include "wgpair/error.hpp"
#include "wgpair/units.hpp"

namespace wgpair {

namespace {

void check_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("detection setup: ") + name + " must lie in [0, 1]");
}

struct ShardTags {
  std::vector<double> t1;
  std::vector<double> t2;
};

ShardTags simulate_shard(const DetectionSetup& s, double duration_ps, int shard) {
  auto rng = detail::shard_engine(s.rng_seed, shard);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, detail::detector_sigma_ps(s.t_res_ps));
  ShardTags tags;

  const double rate_per_ps = s.pair_rate_hz() * 1e-12;
  const double a1 = s.arm_transmission(1);
  const double a2 = s.arm_transmission(2);
  if (rate_per_ps > 0.0) {
    std::exponential_distribution<double> gap(rate_per_ps);
    for (double t = gap(rng); t < duration_ps; t += gap(rng)) {
      for (int member = 0; member < 2; ++member) {
        int arm = 0;
        if (s.split == SplitModel::kProbabilistic) {
          arm = uni(rng) < s.splitter_ratio ? 1 : 2;
        } else {
          arm = member + 1;
        }
        if (uni(rng) >= (arm == 1 ? a1 : a2)) continue;
        (arm == 1 ? tags.t1 : tags.t2).push_back(t + jitter(rng));
      }
    }
  }
  detail::add_dark_counts(tags.t1, s.dark_rate1_hz, duration_ps, rng);
  detail::add_dark_counts(tags.t2, s.dark_rate2_hz, duration_ps, rng);
  std::sort(tags.t1.begin(), tags.t1.end());
  std::sort(tags.t2.begin(), tags.t2.end());
  return tags;
}

struct ShardResult {
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  detail::CorrelationCounts corr;
};

double capture_fraction(double half_window_ps, double t_res_ps) {
  const double sigma = t_res_ps * detail::kFwhmToSigma;
  return std::erf(half_window_ps / (sigma * std::numbers::sqrt2));
}

}  // namespace

double DetectionSetup::arm_transmission(int arm) const {
  const double det = arm == 1 ? eta_det1 : eta_det2;
  return filter_transmission * biphoton_coupling * det;
}

void DetectionSetup::validate() const {
  check_fraction(filter_transmission, "filter_transmission");
  check_fraction(splitter_ratio, "splitter_ratio");
  check_fraction(eta_det1, "eta_det1");
  check_fraction(eta_det2, "eta_det2");
  check_fraction(biphoton_coupling, "biphoton_coupling");
  if (!(pump_power_internal_mw >= 0.0) || !(pair_rate_per_mw >= 0.0)) {
    throw ConfigError("detection setup: pump power and pair rate must be >= 0");
  }
  if (!(dark_rate1_hz >= 0.0) || !(dark_rate2_hz >= 0.0)) throw ConfigError("detection setup: dark rates must be >= 0");
  if (!(t_res_ps > 0.0)) throw ConfigError("detection setup: t_res_ps must be positive");
  if (!(duration_s > 0.0)) throw ConfigError("detection setup: duration_s must be positive");
  if (!(coincidence_half_window > 0.0)) throw ConfigError("detection setup: coincidence window must be positive");
  if (!(histogram_half_range_ps >= t_res_ps)) throw ConfigError("detection setup: histogram range below t_res");
  if (shards < 1 || threads < 1) throw ConfigError("detection setup: shards and threads must be >= 1");
}

ExpectedCounts expected_counts(const DetectionSetup& s) {
  s.validate();
  const double r = s.pair_rate_hz();
  const double a1 = s.arm_transmission(1);
  const double a2 = s.arm_transmission(2);
  ExpectedCounts e;
  if (s.split == SplitModel::kProbabilistic) {
    const double p = s.splitter_ratio;
    e.s1_hz = 2.0 * r * p * a1;
    e.s2_hz = 2.0 * r * (1.0 - p) * a2;
    e.rcc_hz = 2.0 * r * p * (1.0 - p) * a1 * a2;
  } else {
    e.s1_hz = r * a1;
    e.s2_hz = r * a2;
    e.rcc_hz = r * a1 * a2;
  }
  e.s1_hz += s.dark_rate1_hz;
  e.s2_hz += s.dark_rate2_hz;
  const double bin_s = s.t_res_ps * 1e-12;
  const double f = capture_fraction(0.5 * s.t_res_ps, s.t_res_ps);
  e.g2_zero = e.s1_hz > 0.0 && e.s2_hz > 0.0 ? 1.0 + f * e.rcc_hz / (e.s1_hz * e.s2_hz * bin_s) : 1.0;
  return e;
}

PairSimulation simulate_counts(const DetectionSetup& s) {
  s.validate();
  PairSimulation out;
  if (s.arm_transmission(1) == 0.0 && s.arm_transmission(2) == 0.0) {
    out.warnings.push_back("degenerate setup: both arms have zero detection efficiency");
  }
  const ExpectedCounts expect = expected_counts(s);
  if (expect.rcc_hz * s.duration_s < 1e4) {
    out.warnings.push_back("low statistics: fewer than 1e4 expected coincidences");
  }

  const double shard_ps = s.duration_s * 1e12 / s.shards;
  const double half_window = s.coincidence_half_window * s.t_res_ps;
  detail::DelayBins bins{s.t_res_ps, static_cast<int>(std::floor(s.histogram_half_range_ps / s.t_res_ps - 0.5))};
  const std::vector<double> centers{0.0};

  auto shard_results = detail::run_shards(s.shards, s.threads, [&](int shard) {
    const ShardTags tags = simulate_shard(s, shard_ps, shard);
    ShardResult r;
    r.n1 = tags.t1.size();
    r.n2 = tags.t2.size();
    r.corr = detail::correlate(tags.t1, tags.t2, centers, half_window, bins, nullptr);
    return r;
  });

  std::vector<std::uint64_t> hist(bins.count(), 0);
  CountsRecord& c = out.counts;
  for (const auto& r : shard_results) {
    c.singles1 += r.n1;
    c.singles2 += r.n2;
    c.raw_coincidences += r.corr.in_window;
    for (int b = 0; b < bins.count(); ++b) hist[b] += r.corr.histogram[b];
  }

  const double t = s.duration_s;
  c.duration_s = t;
  c.s1_hz = c.singles1 / t;
  c.s2_hz = c.singles2 / t;
  c.s1_sigma = std::sqrt(static_cast<double>(c.singles1)) / t;
  c.s2_sigma = std::sqrt(static_cast<double>(c.singles2)) / t;
  c.raw_coincidence_hz = c.raw_coincidences / t;
  c.accidentals_hz = c.s1_hz * c.s2_hz * 2.0 * half_window * 1e-12;
  c.rcc_hz = c.raw_coincidence_hz - c.accidentals_hz;
  c.rcc_sigma = std::sqrt(static_cast<double>(c.raw_coincidences)) / t;

  G2Histogram& h = out.histogram;
  h.bin_edges_ps = bins.edges();
  h.counts = hist;
  // Uncorrelated expectation per bin.
  const double flat = c.s1_hz * c.s2_hz * bins.width * 1e-12 * t;
  h.g2.resize(hist.size());
  for (std::size_t b = 0; b < hist.size(); ++b) h.g2[b] = flat > 0.0 ? hist[b] / flat : 0.0;
  if (flat > 0.0) {
    h.g2_zero = h.g2[bins.half];
    h.g2_zero_sigma = std::sqrt(static_cast<double>(hist[bins.half])) / flat;
    std::uint64_t tail = 0;
    int tail_bins = 0;
    for (int b = 0; b < bins.count(); ++b) {
      if (std::abs(b - bins.half) > 10) {
        tail += hist[b];
        ++tail_bins;
      }
    }
    if (tail_bins > 0) {
      h.g2_tail = tail / (flat * tail_bins);
      h.g2_tail_sigma = std::sqrt(static_cast<double>(tail)) / (flat * tail_bins);
    }
  } else {
    out.warnings.push_back("no singles on at least one arm; g2 undefined");
  }
  return out;
}

RateReconstruction reconstruct_internal_rate(const CountsRecord& counts, double pump_internal_mw,
                                             double lambda_pump_nm, SplitCorrection correction) {
  if (!(counts.rcc_hz > 0.0)) throw DomainError("reconstruct_internal_rate: R_cc must be positive");
  if (!(pump_internal_mw > 0.0) || !(lambda_pump_nm > 0.0)) {
    throw DomainError("reconstruct_internal_rate: pump power and wavelength must be positive");
  }
  RateReconstruction r;
  r.generated_rate_hz = counts.s1_hz * counts.s2_hz / counts.rcc_hz;
  if (correction == SplitCorrection::kProbabilisticSplit) r.generated_rate_hz *= 0.5;
  // The coincidence count dominates the relative error.
  r.generated_rate_sigma = r.generated_rate_hz * counts.rcc_sigma / counts.rcc_hz;

  namespace u = units;
  const u::Energy photon = u::planck * u::speed_of_light / (lambda_pump_nm * u::nanometer);
  const u::Power pump = pump_internal_mw * u::milliwatt;
  const double photons_per_s = (pump / photon).in(u::hertz);
  r.eta_internal = r.generated_rate_hz / photons_per_s;
  r.rate_per_mw = r.generated_rate_hz / pump_internal_mw;
  return r;
}

HeraldingEfficiency heralding_efficiency(const CountsRecord& counts, int herald_arm,
                                         const std::vector<double>& corrections) {
  if (herald_arm != 1 && herald_arm != 2) throw ConfigError("heralding_efficiency: herald arm must be 1 or 2");
  const double herald = herald_arm == 1 ? counts.s1_hz : counts.s2_hz;
  if (!(herald > 0.0)) throw DomainError("heralding_efficiency: herald singles rate must be positive");
  double product = 1.0;
  for (double f : corrections) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("heralding_efficiency: correction fractions must lie in (0, 1]");
    product *= f;
  }
  HeraldingEfficiency h;
  h.raw = counts.rcc_hz / herald;
  h.corrected = h.raw / product;
  return h;
}

}  // namespace wgpair
