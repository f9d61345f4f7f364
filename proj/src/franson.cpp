#include <cmath>
#include <numbers>

#include "timetags.hpp"
#include "wgpair/error.hpp"
#include "wgpair/pairstats.hpp"

namespace wgpair {

namespace {

struct FransonTags {
  std::vector<double> t1;
  std::vector<double> t2;
};

// Interferometer outcomes for a pair whose members both reach the AMZIs.
// Each photon leaves the monitored port with probability 1/2 overall; the
// centre peak carries the two-photon interference term.
FransonTags simulate_setting(const FransonSetup& f, double visibility, double phase,
                             double duration_ps, int stream) {
  const DetectionSetup& s = f.detection;
  auto rng = detail::shard_engine(s.rng_seed, stream);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, detail::detector_sigma_ps(s.t_res_ps));
  FransonTags tags;

  const double vc = visibility * std::cos(phase);
  const double p_side = 1.0 / 16.0;
  const double p_center = (1.0 + vc) / 8.0;
  const double p_only = 0.25 - vc / 8.0;
  const double a1 = s.arm_transmission(1);
  const double a2 = s.arm_transmission(2);
  const double rate_per_ps = s.pair_rate_hz() * 1e-12;
  auto path = [&] { return uni(rng) < 0.5 ? 0.0 : f.delay_ps; };

  if (rate_per_ps > 0.0) {
    std::exponential_distribution<double> gap(rate_per_ps);
    for (double t = gap(rng); t < duration_ps; t += gap(rng)) {
      const bool in1 = uni(rng) < a1;
      const bool in2 = uni(rng) < a2;
      if (in1 && in2) {
        double u = uni(rng);
        if ((u -= p_side) < 0.0) {  // short-long
          tags.t1.push_back(t + jitter(rng));
          tags.t2.push_back(t + f.delay_ps + jitter(rng));
        } else if ((u -= p_side) < 0.0) {  // long-short
          tags.t1.push_back(t + f.delay_ps + jitter(rng));
          tags.t2.push_back(t + jitter(rng));
        } else if ((u -= p_center) < 0.0) {  // short-short or long-long
          const double d = path();
          tags.t1.push_back(t + d + jitter(rng));
          tags.t2.push_back(t + d + jitter(rng));
        } else if ((u -= p_only) < 0.0) {
          tags.t1.push_back(t + path() + jitter(rng));
        } else if ((u -= p_only) < 0.0) {
          tags.t2.push_back(t + path() + jitter(rng));
        }
      } else if (in1 || in2) {
        if (uni(rng) < 0.5) (in1 ? tags.t1 : tags.t2).push_back(t + path() + jitter(rng));
      }
    }
  }
  detail::add_dark_counts(tags.t1, s.dark_rate1_hz, duration_ps, rng);
  detail::add_dark_counts(tags.t2, s.dark_rate2_hz, duration_ps, rng);
  std::sort(tags.t1.begin(), tags.t1.end());
  std::sort(tags.t2.begin(), tags.t2.end());
  return tags;
}

}  // namespace

double franson_intrinsic_visibility(double filter_bandwidth_pm, double center_nm, double mismatch_ps) {
  if (!(filter_bandwidth_pm > 0.0) || !(center_nm > 0.0)) {
    throw DomainError("franson: filter bandwidth and centre wavelength must be positive");
  }
  const double c0 = 299792458.0;
  const double dnu = c0 * filter_bandwidth_pm * 1e-12 / std::pow(center_nm * 1e-9, 2);
  const double d = mismatch_ps * 1e-12;
  const double pi = std::numbers::pi;
  return std::exp(-pi * pi * dnu * dnu * d * d / (4.0 * std::log(2.0)));
}

namespace {

struct FloorTerms {
  double center = 0.0;  // mean centre-peak rate, Hz
  double x1 = 0.0;      // pair-driven singles, Hz
  double x2 = 0.0;
  double window_s = 0.0;
};

FloorTerms floor_terms(const FransonSetup& f) {
  const DetectionSetup& s = f.detection;
  const double half_window = s.coincidence_half_window * s.t_res_ps;
  const double r = s.pair_rate_hz();
  const double a1 = s.arm_transmission(1);
  const double a2 = s.arm_transmission(2);
  const double capture = std::erf(half_window / (s.t_res_ps * detail::kFwhmToSigma * std::numbers::sqrt2));
  return {r * a1 * a2 * capture / 8.0, 0.5 * r * a1, 0.5 * r * a2, 2.0 * half_window * 1e-12};
}

}  // namespace

double franson_dark_rate_for_visibility(const FransonSetup& f, double target) {
  f.detection.validate();
  const double v0 = franson_intrinsic_visibility(f.filter_bandwidth_pm, f.center_nm, f.mismatch_ps);
  if (!(target > 0.0 && target < v0)) throw DomainError("franson: target visibility must lie in (0, V_model)");
  const FloorTerms t = floor_terms(f);
  if (!(t.center > 0.0)) throw DomainError("franson: no pairs reach both detectors");
  // (x1 + d)(x2 + d) window = center (v0 / target - 1)
  const double product = t.center * (v0 / target - 1.0) / t.window_s;
  const double base = t.x1 * t.x2;
  if (product < base) throw DomainError("franson: pair accidentals alone exceed the requested floor");
  const double sum = t.x1 + t.x2;
  return 0.5 * (-sum + std::sqrt(sum * sum + 4.0 * (product - base)));
}

FransonResult franson_scan(const FransonSetup& f) {
  const DetectionSetup& s = f.detection;
  s.validate();
  if (f.phi2.size() < 2) throw ConfigError("franson_scan: need at least two phase settings");
  if (!(f.delay_ps > 0.0)) throw ConfigError("franson_scan: delay_ps must be positive");

  FransonResult out;
  out.model_visibility = franson_intrinsic_visibility(f.filter_bandwidth_pm, f.center_nm, f.mismatch_ps);

  const double half_window = s.coincidence_half_window * s.t_res_ps;
  if (f.delay_ps < 2.0 * half_window + 2.0 * s.t_res_ps) {
    out.warnings.push_back("AMZI delay does not separate the three coincidence peaks");
  }
  const double coherence_ps = 1e12 / (299792458.0 * f.filter_bandwidth_pm * 1e-12 / std::pow(f.center_nm * 1e-9, 2));
  if (f.delay_ps < 10.0 * coherence_ps) {
    out.warnings.push_back("AMZI delay is not much longer than the filtered coherence time");
  }

  const detail::DelayBins bins{s.t_res_ps / 3.0,
                               static_cast<int>(std::ceil((f.delay_ps + 4.0 * s.t_res_ps) / (s.t_res_ps / 3.0)))};
  out.bin_edges_ps = bins.edges();
  const std::vector<double> centers{0.0, -f.delay_ps, f.delay_ps};

  std::uint64_t c_max = 0;
  std::uint64_t c_min = ~std::uint64_t{0};
  auto settings = detail::run_shards(static_cast<int>(f.phi2.size()), s.threads, [&](int k) {
    const double phase = f.phi1 + f.phi2[k];
    const FransonTags tags = simulate_setting(f, out.model_visibility, phase, s.duration_s * 1e12, k);
    std::vector<std::uint64_t> per_center;
    auto corr = detail::correlate(tags.t1, tags.t2, centers, half_window, bins, &per_center);
    FransonSetting setting;
    setting.phase = phase;
    setting.peaks = {per_center[1], per_center[0], per_center[2]};
    setting.histogram = std::move(corr.histogram);
    return setting;
  });
  for (const auto& st : settings) {
    c_max = std::max(c_max, st.peaks[1]);
    c_min = std::min(c_min, st.peaks[1]);
  }
  out.settings = std::move(settings);

  const double a = static_cast<double>(c_max);
  const double b = static_cast<double>(c_min);
  if (a + b > 0.0) {
    out.visibility = (a - b) / (a + b);
    out.visibility_sigma = 2.0 * std::sqrt(a * b / std::pow(a + b, 3));
  }

  // Accidental floor under the centre peak.
  const FloorTerms t = floor_terms(f);
  const double floor_rate = (t.x1 + s.dark_rate1_hz) * (t.x2 + s.dark_rate2_hz) * t.window_s;
  out.expected_visibility = t.center > 0.0 ? out.model_visibility * t.center / (t.center + floor_rate) : 0.0;

  out.exceeds_classical_bound = out.visibility > kFransonClassicalBound;
  out.loophole_free = out.visibility > kFransonLoopholeBound;
  return out;
}

}  // namespace wgpair
