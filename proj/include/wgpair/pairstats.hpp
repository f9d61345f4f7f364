#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wgpair {

// How pair members reach the two detectors.
enum class SplitModel {
  kProbabilistic,  // each photon independently takes arm 1 with probability r
  kDeterministic,  // one member per arm (e.g. a dichroic split)
};

struct DetectionSetup {
  double pump_power_internal_mw = 1e-3;
  double pair_rate_per_mw = 2.67e10;
  double filter_transmission = 1.0;
  double splitter_ratio = 0.5;  // arm 1 gets r, arm 2 gets 1 - r
  SplitModel split = SplitModel::kProbabilistic;
  double eta_det1 = 1.0;
  double eta_det2 = 1.0;
  double biphoton_coupling = 1.0;
  double t_res_ps = 150.0;  // FWHM of the relative timing jitter
  double dark_rate1_hz = 0.0;
  double dark_rate2_hz = 0.0;
  double duration_s = 1.0;
  std::uint64_t rng_seed = 1;

  // Coincidence window half-width in units of t_res; the g2 central bin is
  // always t_res wide.
  double coincidence_half_window = 2.0;
  double histogram_half_range_ps = 10000.0;
  int shards = 1;   // independent seeds; merged result depends only on this
  int threads = 1;  // how many shards run at once

  double pair_rate_hz() const { return pump_power_internal_mw * pair_rate_per_mw; }
  // Per-photon survival probability up to (and including) each detector.
  double arm_transmission(int arm) const;
  void validate() const;  // throws ConfigError
};

struct CountsRecord {
  double s1_hz = 0.0;
  double s2_hz = 0.0;
  double rcc_hz = 0.0;  // accidentals subtracted
  double raw_coincidence_hz = 0.0;
  double accidentals_hz = 0.0;
  double s1_sigma = 0.0;
  double s2_sigma = 0.0;
  double rcc_sigma = 0.0;
  double duration_s = 0.0;
  std::uint64_t singles1 = 0;
  std::uint64_t singles2 = 0;
  std::uint64_t raw_coincidences = 0;
};

struct G2Histogram {
  std::vector<double> bin_edges_ps;  // size = counts.size() + 1
  std::vector<std::uint64_t> counts;
  std::vector<double> g2;
  double g2_zero = 0.0;
  double g2_zero_sigma = 0.0;
  double g2_tail = 0.0;  // mean over bins beyond 10 t_res
  double g2_tail_sigma = 0.0;
};

struct PairSimulation {
  CountsRecord counts;
  G2Histogram histogram;
  std::vector<std::string> warnings;
};

PairSimulation simulate_counts(const DetectionSetup& setup);

// Closed-form expectations for the same chain (used as an oracle).
struct ExpectedCounts {
  double s1_hz = 0.0;
  double s2_hz = 0.0;
  double rcc_hz = 0.0;
  double g2_zero = 0.0;  // central bin of width t_res
};
ExpectedCounts expected_counts(const DetectionSetup& setup);

// With a probabilistic splitter and every photon counted, S1 S2 / R_cc is
// twice the generated rate; kProbabilisticSplit divides that out.
enum class SplitCorrection { kNone, kProbabilisticSplit };

struct RateReconstruction {
  double generated_rate_hz = 0.0;
  double generated_rate_sigma = 0.0;
  double eta_internal = 0.0;  // pairs per pump photon
  double rate_per_mw = 0.0;
};

RateReconstruction reconstruct_internal_rate(const CountsRecord& counts, double pump_internal_mw,
                                             double lambda_pump_nm,
                                             SplitCorrection correction = SplitCorrection::kNone);

struct HeraldingEfficiency {
  double raw = 0.0;
  double corrected = 0.0;
};

// herald_arm is 1 or 2; corrections are transmission fractions in (0, 1].
HeraldingEfficiency heralding_efficiency(const CountsRecord& counts, int herald_arm,
                                         const std::vector<double>& corrections);

struct FransonSetup {
  DetectionSetup detection;  // splitter fields unused: signal -> det 1, idler -> det 2
  double delay_ps = 1000.0;  // AMZI long-short imbalance
  double mismatch_ps = 0.0;  // difference of the two AMZI imbalances
  double filter_bandwidth_pm = 200.0;
  double center_nm = 1608.0;
  double phi1 = 0.0;
  std::vector<double> phi2;  // scanned phase settings
};

struct FransonSetting {
  double phase = 0.0;                  // phi1 + phi2
  std::vector<std::uint64_t> peaks;    // coincidences at -delay, 0, +delay
  std::vector<std::uint64_t> histogram;
};

struct FransonResult {
  std::vector<double> bin_edges_ps;
  std::vector<FransonSetting> settings;
  double visibility = 0.0;
  double visibility_sigma = 0.0;
  double model_visibility = 0.0;  // intrinsic, from bandwidth and mismatch
  double expected_visibility = 0.0;  // including the accidental floor
  bool exceeds_classical_bound = false;  // V > 1 / sqrt 2
  bool loophole_free = false;            // V > 0.946
  std::vector<std::string> warnings;
};

inline constexpr double kFransonClassicalBound = 0.70710678118654752;
inline constexpr double kFransonLoopholeBound = 0.946;

// Two-photon visibility from filtered coherence against interferometer
// mismatch (Gaussian spectrum of FWHM c dlambda / lambda^2).
double franson_intrinsic_visibility(double filter_bandwidth_pm, double center_nm, double mismatch_ps);

FransonResult franson_scan(const FransonSetup& setup);

// Equal dark rate on both detectors (Hz) whose accidental floor brings the
// expected visibility down to `target`. Throws DomainError if the pair
// accidentals alone already push it below the target.
double franson_dark_rate_for_visibility(const FransonSetup& setup, double target);

}  // namespace wgpair
