#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "wgpair/error.hpp"
#include "wgpair/lossfit.hpp"

using namespace wgpair;

namespace {

constexpr double kPi = std::numbers::pi;

CutbackDataset line_data(double lambda, double slope_db_per_mm, double coupling_db) {
  CutbackDataset d;
  for (double l : {0.5, 1.0, 1.44, 2.0, 3.0}) d.entries.push_back({lambda, l, coupling_db + slope_db_per_mm * l});
  return d;
}

// Gaussian convolved with a Lorentzian, integrated over the Lorentzian
// through t = x - gamma tan(theta).
double voigt_by_quadrature(double x, const VoigtParams& p) {
  const int n = 20000;
  const double a = -0.5 * kPi, b = 0.5 * kPi, h = (b - a) / n;
  auto gauss = [&](double t) { return std::exp(-0.5 * t * t / (p.sigma_nm * p.sigma_nm)); };
  auto profile = [&](double y) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double th = a + k * h;
      const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      const double c = std::cos(th);
      if (c < 1e-12) continue;
      acc += w * gauss(y - p.gamma_nm * std::tan(th));
    }
    return acc * h / 3.0;
  };
  return p.amplitude * profile(x - p.center_nm) / profile(0.0);
}

std::vector<LossSample> synthetic(const VoigtParams& v, double a, double noise, std::uint64_t seed, double step = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<LossSample> s;
  for (double l = 680.0; l <= 1100.0 + 1e-9; l += step) {
    const double y = a * std::pow(l, -4.0) + voigt(l, v);
    s.push_back({l, y * (1.0 + noise * g(rng))});
  }
  return s;
}

double worst_error(const LossDecomposition& f, const VoigtParams& v, double a) {
  return std::max({std::abs(f.scattering_a / a - 1), std::abs(f.voigt.center_nm / v.center_nm - 1),
                   std::abs(f.voigt.sigma_nm / v.sigma_nm - 1), std::abs(f.voigt.gamma_nm / v.gamma_nm - 1),
                   std::abs(f.voigt.amplitude / v.amplitude - 1)});
}

}  // namespace

TEST_CASE("cutback regression recovers an exact line") {
  const auto r = cutback_regression(line_data(900.0, 0.37, 4.2), 900.0);
  CHECK(r.propagation_db_per_cm == doctest::Approx(3.7).epsilon(1e-9));
  CHECK(r.coupling_db == doctest::Approx(4.2).epsilon(1e-9));
  CHECK(r.per_coupler_db == doctest::Approx(2.1).epsilon(1e-9));
  CHECK(r.propagation_sigma < 1e-9);
  CHECK(r.points == 5);

  const auto flat = cutback_regression(line_data(900.0, 0.0, 3.0), 900.0);
  CHECK(std::abs(flat.propagation_db_per_cm) < 1e-12);

  CutbackDataset single;
  single.entries = {{900.0, 1.0, 3.0}, {900.0, 1.0, 3.1}};
  CHECK_THROWS_AS(cutback_regression(single, 900.0), FitError);
  CHECK_THROWS_AS(cutback_regression(line_data(900.0, 0.1, 1.0), 905.0), FitError);
}

TEST_CASE("cutback uncertainty covers the truth") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.05);
  const int runs = 400;
  int hits = 0;
  for (int k = 0; k < runs; ++k) {
    CutbackDataset d;
    for (double l : {0.5, 0.8, 1.0, 1.2, 1.44, 1.7, 2.0, 2.5}) d.entries.push_back({800.0, l, 4.0 + 0.5 * l + g(rng)});
    const auto r = cutback_regression(d, 800.0);
    if (std::abs(r.propagation_db_per_cm - 5.0) <= 3.0 * r.propagation_sigma) ++hits;
  }
  CHECK(hits >= 0.95 * runs);
}

TEST_CASE("cutback CSV") {
  const auto d = parse_cutback_csv(
      "# polarization = TM\n# cladding = bare\nloss_db,lambda_nm,length_mm\n\n3.0, 800, 1.0\n4.0,800,2.0\n5,810,1\n");
  CHECK(d.polarization == "TM");
  CHECK(d.cladding == "bare");
  REQUIRE(d.entries.size() == 3);
  CHECK(d.entries[1].length_mm == 2.0);
  CHECK(d.entries[1].loss_db == 4.0);
  CHECK(dataset_wavelengths(d) == std::vector<double>{800.0, 810.0});

  CHECK_THROWS_AS(parse_cutback_csv("lambda_nm,length_mm,loss_db,notes\n"), ConfigError);
  CHECK_THROWS_AS(parse_cutback_csv("lambda_nm,length_mm\n"), ConfigError);
  CHECK_THROWS_AS(parse_cutback_csv("lambda_nm,length_mm,loss_db\n800,1\n"), ConfigError);
  CHECK_THROWS_AS(parse_cutback_csv("lambda_nm,length_mm,loss_db\n800,x,1\n"), ConfigError);
  CHECK_THROWS_AS(parse_cutback_csv("lambda_nm,length_mm,loss_db\n800,-1,1\n"), ConfigError);
  CHECK_THROWS_AS(parse_cutback_csv("# nothing\n"), ConfigError);
  CHECK_THROWS_AS(load_cutback_csv("/nonexistent/cutback.csv"), ConfigError);

  const auto shipped = load_cutback_csv(std::filesystem::path(WGPAIR_SOURCE_DIR) / "data/cutback/te_resist.csv");
  CHECK(shipped.polarization == "TE");
  CHECK(dataset_wavelengths(shipped).size() == 41);
  for (const auto& s : loss_spectrum(shipped)) CHECK(s.loss_db_per_cm > 0.0);
}

TEST_CASE("Faddeeva function") {
  auto near = [](std::array<double, 2> w, double re, double im) {
    return std::abs(w[0] - re) < 1e-12 && std::abs(w[1] - im) < 1e-12;
  };
  CHECK(near(faddeeva(1.0, 0.5), 0.35490033286757783, 0.3428717191311008));
  CHECK(near(faddeeva(3.0, 2.0), 0.09271076642644344, 0.1283169622282617));
  CHECK(near(faddeeva(20.0, 1.0), 0.0014122347663929663, 0.028173995667521986));
  for (double y : {0.1, 0.5, 1.0, 3.0, 8.0}) {
    const auto w = faddeeva(0.0, y);
    CHECK(w[0] == doctest::Approx(std::exp(y * y) * std::erfc(y)).epsilon(1e-12));
    CHECK(std::abs(w[1]) < 1e-14);
  }
  // w(-x + iy) = conj(w(x + iy))
  const auto a = faddeeva(1.3, 0.7), b = faddeeva(-1.3, 0.7);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
  CHECK(a[1] == doctest::Approx(-b[1]).epsilon(1e-14));
}

TEST_CASE("Voigt profile") {
  const VoigtParams p{760.0, 15.0, 10.0, 200.0};
  CHECK(voigt(760.0, p) == doctest::Approx(200.0).epsilon(1e-12));
  for (double x : {700.0, 740.0, 755.0, 771.3, 800.0, 900.0}) {
    CHECK(std::abs(voigt(x, p) - voigt_by_quadrature(x, p)) <= 1e-6 * p.amplitude);
    CHECK(voigt(760.0 - (x - 760.0), p) == doctest::Approx(voigt(x, p)).epsilon(1e-12));
  }
  const VoigtParams gauss{500.0, 4.0, 0.0, 2.0};
  CHECK(voigt(506.0, gauss) == doctest::Approx(2.0 * std::exp(-0.5 * 36.0 / 16.0)).epsilon(1e-14));
  const VoigtParams lorentz{500.0, 0.0, 3.0, 2.0};
  CHECK(voigt(506.0, lorentz) == doctest::Approx(2.0 * 9.0 / (36.0 + 9.0)).epsilon(1e-14));
  // a tiny Lorentzian part stays close to the Gaussian
  const VoigtParams almost{500.0, 4.0, 1e-6, 2.0};
  CHECK(voigt(506.0, almost) == doctest::Approx(voigt(506.0, gauss)).epsilon(1e-5));
  CHECK_THROWS_AS(voigt(1.0, VoigtParams{0, 0, 0, 1}), DomainError);
  CHECK_THROWS_AS(voigt(1.0, VoigtParams{0, -1, 1, 1}), DomainError);
}

TEST_CASE("Nelder-Mead on the Rosenbrock valley") {
  auto rosen = [](const std::vector<double>& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, {0.5, 0.5}, 20000, 4, 1e-14);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.value < 1e-10);
}

TEST_CASE("decomposition round trip on noisy data") {
  const VoigtParams truth{760.0, 15.0, 10.0, 200.0};
  for (std::uint64_t seed : {2u, 3u}) {
    const auto fit = decompose_spectrum(synthetic(truth, 3e12, 0.02, seed));
    CHECK(worst_error(fit, truth, 3e12) <= 0.05);
    CHECK(fit.anchors_nm == std::array<double, 4>{1098.5, 1099.0, 1099.5, 1100.0});
    CHECK(fit.voigt.center_nm < fit.anchors_nm[0]);
  }
}

TEST_CASE("noise-free data, fixed point and ordering") {
  const VoigtParams truth{780.0, 12.0, 6.0, 80.0};
  const auto clean = synthetic(truth, 2e12, 0.0, 1, 2.0);
  const auto fit = decompose_spectrum(clean);
  CHECK(worst_error(fit, truth, 2e12) <= 1e-3);

  // refitting the model's own curve reproduces it
  std::vector<LossSample> again;
  for (const auto& s : clean) again.push_back({s.lambda_nm, fit.model(s.lambda_nm)});
  const auto refit = decompose_spectrum(again);
  CHECK(worst_error(refit, fit.voigt, fit.scattering_a) <= 1e-6);

  auto shuffled = clean;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(9));
  const auto fs = decompose_spectrum(shuffled);
  CHECK(fs.scattering_a == doctest::Approx(fit.scattering_a).epsilon(1e-9));
  CHECK(fs.voigt.center_nm == doctest::Approx(fit.voigt.center_nm).epsilon(1e-9));
  CHECK(fs.anchors_nm == fit.anchors_nm);
}

TEST_CASE("decomposition errors") {
  std::vector<LossSample> few;
  for (int k = 0; k < 7; ++k) few.push_back({800.0 + 10 * k, 1.0});
  CHECK_THROWS_AS(decompose_spectrum(few), FitError);
  auto bad = synthetic({760, 15, 10, 200}, 3e12, 0.0, 1, 10.0);
  bad[3].loss_db_per_cm = std::nan("");
  CHECK_THROWS_AS(decompose_spectrum(bad), FitError);
}

TEST_CASE("absorption onset") {
  // truth chosen so that the resonance reaches twice the baseline near 795 nm
  const VoigtParams truth{750.0, 15.0, 10.0, 60.0};
  LossDecomposition exact;
  exact.scattering_a = 3e12;
  exact.voigt = truth;
  const auto t = absorption_onset(exact, 680.0, 1100.0);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(796.6).epsilon(2e-4));
  CHECK(exact.model(*t) == doctest::Approx(2.0 * exact.baseline(*t)).epsilon(1e-9));

  const auto fit = decompose_spectrum(synthetic(truth, 3e12, 0.02, 4));
  const auto onset = absorption_onset(fit, 680.0, 1100.0);
  REQUIRE(onset);
  CHECK(std::abs(*onset - *t) < 3.0);

  LossDecomposition weak = exact;
  weak.voigt.amplitude = 1e-3;
  CHECK_FALSE(absorption_onset(weak, 680.0, 1100.0).has_value());
}
