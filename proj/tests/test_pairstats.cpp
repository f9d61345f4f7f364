#include <doctest.h>

#include <cmath>
#include <random>

#include "wgpair/error.hpp"
#include "wgpair/pairstats.hpp"

using namespace wgpair;

namespace {

bool has_warning(const PairSimulation& s, const std::string& needle) {
  for (const auto& w : s.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

// |a - b| within k combined Poisson sigmas of a rate measured over t seconds
bool within(double measured, double expected, double t, double k = 4.0) {
  return std::abs(measured - expected) <= k * std::sqrt(expected / t) + 1e-9;
}

}  // namespace

TEST_CASE("lossless 50/50 probabilistic split") {
  DetectionSetup s;
  s.pair_rate_per_mw = 1e8;  // 1e5 pairs/s at 1 uW
  const auto sim = simulate_counts(s);
  const double ratio = sim.counts.rcc_hz / sim.counts.s1_hz;
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.02));
  CHECK(within(sim.counts.s1_hz, 1e5, 1.0));
  CHECK(within(sim.counts.s2_hz, 1e5, 1.0));
  // S1 S2 / Rcc counts every pair twice with this splitter
  const auto raw = reconstruct_internal_rate(sim.counts, 1e-3, 804.0);
  const auto fixed = reconstruct_internal_rate(sim.counts, 1e-3, 804.0, SplitCorrection::kProbabilisticSplit);
  CHECK(raw.generated_rate_hz == doctest::Approx(2e5).epsilon(0.02));
  CHECK(fixed.generated_rate_hz == doctest::Approx(1e5).epsilon(0.02));
}

TEST_CASE("dark counts alone give a flat g2") {
  DetectionSetup s;
  s.pair_rate_per_mw = 0.0;
  s.dark_rate1_hz = 1e6;
  s.dark_rate2_hz = 1e6;
  const auto sim = simulate_counts(s);
  const auto& h = sim.histogram;
  CHECK(std::abs(h.g2_zero - 1.0) <= 3.0 * h.g2_zero_sigma);
  CHECK(std::abs(h.g2_tail - 1.0) <= 3.0 * h.g2_tail_sigma);
  CHECK(std::abs(sim.counts.rcc_hz) <= 4.0 * sim.counts.rcc_sigma);
}

TEST_CASE("seeds: reproducible, and independent of the thread count") {
  DetectionSetup s;
  s.pair_rate_per_mw = 2e8;
  s.filter_transmission = 0.7;
  s.dark_rate1_hz = 300.0;
  s.duration_s = 0.2;
  s.shards = 4;
  const auto a = simulate_counts(s);
  const auto b = simulate_counts(s);
  s.threads = 3;
  const auto c = simulate_counts(s);
  CHECK(a.counts.singles1 == b.counts.singles1);
  CHECK(a.counts.raw_coincidences == b.counts.raw_coincidences);
  CHECK(a.histogram.counts == c.histogram.counts);
  CHECK(a.counts.singles2 == c.counts.singles2);
  s.rng_seed = 2;
  const auto d = simulate_counts(s);
  CHECK(a.counts.singles1 != d.counts.singles1);
}

TEST_CASE("Monte Carlo against the closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frac(0.3, 0.95), dark(0.0, 2000.0);
  for (SplitModel split : {SplitModel::kProbabilistic, SplitModel::kDeterministic}) {
    for (int k = 0; k < 3; ++k) {
      DetectionSetup s;
      s.split = split;
      s.pair_rate_per_mw = 3e8;
      s.filter_transmission = frac(rng);
      s.biphoton_coupling = frac(rng);
      s.eta_det1 = frac(rng);
      s.eta_det2 = frac(rng);
      s.splitter_ratio = frac(rng);
      s.dark_rate1_hz = dark(rng);
      s.dark_rate2_hz = dark(rng);
      s.duration_s = 0.2;
      s.rng_seed = rng();
      const auto sim = simulate_counts(s);
      const auto e = expected_counts(s);
      CHECK(within(sim.counts.s1_hz, e.s1_hz, s.duration_s));
      CHECK(within(sim.counts.s2_hz, e.s2_hz, s.duration_s));
      CHECK(std::abs(sim.counts.rcc_hz - e.rcc_hz) <= 4.0 * sim.counts.rcc_sigma);
      CHECK(std::abs(sim.histogram.g2_zero - e.g2_zero) <= 4.0 * sim.histogram.g2_zero_sigma);
      CHECK(std::abs(sim.histogram.g2_tail - 1.0) <= 4.0 * sim.histogram.g2_tail_sigma);

      const auto correction =
          split == SplitModel::kProbabilistic ? SplitCorrection::kProbabilisticSplit : SplitCorrection::kNone;
      const auto rec = reconstruct_internal_rate(sim.counts, s.pump_power_internal_mw, 804.0, correction);
      CHECK(std::abs(rec.generated_rate_hz - s.pair_rate_hz()) <= 4.0 * rec.generated_rate_sigma);
    }
  }
}

TEST_CASE("deterministic split closed form") {
  DetectionSetup s;
  s.split = SplitModel::kDeterministic;
  s.filter_transmission = 0.8;
  s.eta_det1 = 0.5;
  s.eta_det2 = 0.25;
  const auto e = expected_counts(s);
  const double r = s.pair_rate_hz();
  CHECK(e.s1_hz == doctest::Approx(r * 0.4));
  CHECK(e.s2_hz == doctest::Approx(r * 0.2));
  CHECK(e.rcc_hz == doctest::Approx(r * 0.08));
  CHECK(s.arm_transmission(1) == doctest::Approx(0.4));
}

TEST_CASE("Klyshko reconstruction of the measured rates") {
  CountsRecord c;
  c.s1_hz = 0.95e6;
  c.s2_hz = 1.35e6;
  c.rcc_hz = 48.1e3;
  c.rcc_sigma = 100.0;
  const auto r = reconstruct_internal_rate(c, 1e-3, 804.0);
  CHECK(r.generated_rate_hz == doctest::Approx(0.95e6 * 1.35e6 / 48.1e3));
  CHECK(r.rate_per_mw == doctest::Approx(2.666e10).epsilon(1e-3));
  const double photons = 1e-6 / (6.62607015e-34 * 299792458.0 / 804e-9);
  CHECK(r.eta_internal == doctest::Approx(r.generated_rate_hz / photons).epsilon(1e-9));
  CHECK(r.generated_rate_sigma == doctest::Approx(r.generated_rate_hz * 100.0 / 48.1e3));
  const auto half = reconstruct_internal_rate(c, 1e-3, 804.0, SplitCorrection::kProbabilisticSplit);
  CHECK(half.generated_rate_hz == doctest::Approx(0.5 * r.generated_rate_hz));

  CountsRecord zero = c;
  zero.rcc_hz = 0.0;
  CHECK_THROWS_AS(reconstruct_internal_rate(zero, 1e-3, 804.0), DomainError);
  CHECK_THROWS_AS(reconstruct_internal_rate(c, 0.0, 804.0), DomainError);
}

TEST_CASE("heralding efficiency") {
  CountsRecord c;
  c.s1_hz = 0.95e6;
  c.s2_hz = 1.35e6;
  c.rcc_hz = 48.1e3;
  const auto h1 = heralding_efficiency(c, 1, {});
  CHECK(h1.raw == doctest::Approx(0.0506).epsilon(2e-3));
  CHECK(h1.corrected == h1.raw);
  const auto h2 = heralding_efficiency(c, 2, {0.82, 0.85, 0.42});
  CHECK(h2.raw == doctest::Approx(0.03563).epsilon(1e-3));
  CHECK(h2.corrected == doctest::Approx(0.1217).epsilon(2e-3));
  CHECK_THROWS_AS(heralding_efficiency(c, 3, {}), ConfigError);
  CHECK_THROWS_AS(heralding_efficiency(c, 1, {0.0}), DomainError);
  CHECK_THROWS_AS(heralding_efficiency(c, 1, {1.2}), DomainError);
  CountsRecord none;
  CHECK_THROWS_AS(heralding_efficiency(none, 1, {}), DomainError);
}

TEST_CASE("setup validation") {
  auto bad = [](auto mutate) {
    DetectionSetup s;
    mutate(s);
    return s;
  };
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.filter_transmission = 1.1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.splitter_ratio = -0.1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.dark_rate2_hz = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.t_res_ps = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.duration_s = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.shards = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DetectionSetup& s) { s.histogram_half_range_ps = 10; }).validate(), ConfigError);
  CHECK_THROWS_AS(simulate_counts(bad([](DetectionSetup& s) { s.eta_det1 = 2; })), ConfigError);
  CHECK_NOTHROW(DetectionSetup{}.validate());
}

TEST_CASE("warnings") {
  DetectionSetup s;
  s.pair_rate_per_mw = 1e6;
  s.duration_s = 0.01;
  CHECK(has_warning(simulate_counts(s), "low statistics"));
  s.eta_det1 = 0.0;
  s.eta_det2 = 0.0;
  const auto dead = simulate_counts(s);
  CHECK(has_warning(dead, "degenerate"));
  CHECK(dead.counts.singles1 == 0);
}

TEST_CASE("histogram layout") {
  DetectionSetup s;
  s.pair_rate_per_mw = 1e8;
  s.duration_s = 0.05;
  const auto h = simulate_counts(s).histogram;
  REQUIRE(h.bin_edges_ps.size() == h.counts.size() + 1);
  CHECK(h.counts.size() % 2 == 1);
  const std::size_t mid = h.counts.size() / 2;
  CHECK(h.bin_edges_ps[mid] == doctest::Approx(-75.0));
  CHECK(h.bin_edges_ps[mid + 1] == doctest::Approx(75.0));
  for (std::size_t b = 0; b < h.counts.size(); ++b) CHECK(h.counts[b] <= h.counts[mid]);
}
