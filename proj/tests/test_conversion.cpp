#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "support.hpp"
#include "wgpair/conversion.hpp"
#include "wgpair/error.hpp"

using namespace wgpair;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kC0 = 299792458.0;
constexpr double kEps0 = 8.8541878128e-12;
constexpr double kPlanck = 6.62607015e-34;

// 5 x 4 grid with uneven cells and hand-made fields.
std::shared_ptr<const CrossSectionGrid> small_grid() {
  return std::make_shared<const CrossSectionGrid>(std::vector<double>{0, 10, 25, 30, 42, 50},
                                                  std::vector<double>{0, 5, 15, 18, 30},
                                                  std::vector<double>(20, 2.0), 1600.0);
}

ModeSolution field(std::shared_ptr<const CrossSectionGrid> g, Polarization pol, std::uint64_t seed) {
  ModeSolution m;
  m.grid = g;
  m.polarization = pol;
  m.n_eff = 1.8;
  m.ex.assign(g->size(), 0.0);
  m.ey.assign(g->size(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < g->size(); ++c) (pol == Polarization::kTE ? m.ex : m.ey)[c] = u(rng);
  return m;
}

double gamma_oracle(const ModeSolution& fh, const ModeSolution& sh, const std::vector<double>& d) {
  const auto& g = *fh.grid;
  double num = 0, pf = 0, ps = 0;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int c = g.flat(i, j);
      const double a = g.dx(i) * g.dy(j);
      num += d[c] * fh.ex[c] * fh.ex[c] * sh.ey[c] * a;
      pf += fh.ex[c] * fh.ex[c] * a;
      ps += sh.ey[c] * sh.ey[c] * a;
    }
  }
  return num / (pf * std::sqrt(ps)) * 1e-3;
}

std::vector<MismatchSample> linear_samples(double root, double slope, double lo, double hi, double step) {
  std::vector<MismatchSample> s;
  for (double l = lo; l <= hi + 1e-9; l += step) s.push_back({l, 2.0, 2.0, slope * (l - root)});
  return s;
}

}  // namespace

TEST_CASE("overlap on a synthetic grid matches the direct sum") {
  auto g = small_grid();
  const ModeSolution fh = field(g, Polarization::kTE, 3);
  const ModeSolution sh = field(g, Polarization::kTM, 4);
  std::vector<double> d(g->size());
  for (int c = 0; c < g->size(); ++c) d[c] = (c % 3 == 0) ? 0.0 : 100.0 + c;
  const double expect = gamma_oracle(fh, sh, d);
  CHECK(overlap_gamma(fh, sh, d).gamma_per_volt == doctest::Approx(expect).epsilon(1e-12));

  SUBCASE("field scaling and FH sign do not matter, SH sign flips it") {
    ModeSolution f2 = fh, s2 = sh;
    for (auto& v : f2.ex) v *= -3.7;
    for (auto& v : s2.ey) v *= 0.02;
    CHECK(overlap_gamma(f2, s2, d).gamma_per_volt == doctest::Approx(expect).epsilon(1e-12));
    for (auto& v : s2.ey) v = -v;
    CHECK(overlap_gamma(f2, s2, d).gamma_per_volt == doctest::Approx(-expect).epsilon(1e-12));
  }
  SUBCASE("zero d36") {
    CHECK(overlap_gamma(fh, sh, std::vector<double>(g->size(), 0.0)).gamma_per_volt == 0.0);
  }
  SUBCASE("odd SH field against an even FH field cancels") {
    auto sym = std::make_shared<const CrossSectionGrid>(std::vector<double>{0, 1}, std::vector<double>{-2, -1, 0, 1, 2},
                                                        std::vector<double>(4, 2.0), 1600.0);
    ModeSolution f = field(sym, Polarization::kTE, 1), s = field(sym, Polarization::kTM, 1);
    f.ex = {0.3, 1.0, 1.0, 0.3};
    s.ey = {-0.5, -0.8, 0.8, 0.5};
    CHECK(std::abs(overlap_gamma(f, s, std::vector<double>(4, 100.0)).gamma_per_volt) < 1e-18);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(overlap_gamma(fh, sh, std::vector<double>(3, 1.0)), GridError);
    CHECK_THROWS_AS(overlap_gamma(sh, fh, d), ConfigError);
    const ModeSolution other = field(testing::slab_grid(3.0, 1.5, 100, 100, 10, 1600), Polarization::kTM, 1);
    CHECK_THROWS_AS(overlap_gamma(fh, other, d), GridError);
    CHECK_THROWS_AS(overlap_gamma(fh, sh, testing::library()), GridError);  // no composition
  }
}

TEST_CASE("SHG efficiency formula") {
  const double gamma = 2.3e-13, lambda = 1608.0, n = 3.1;
  const double si = 8 * kPi * kPi * gamma * gamma / (kC0 * kEps0 * n * n * n * std::pow(lambda * 1e-9, 2));
  CHECK(shg_efficiency(gamma, lambda, n) == doctest::Approx(si * 100.0 * 1e-6).epsilon(1e-9));
  CHECK(shg_efficiency(2 * gamma, lambda, n) == doctest::Approx(4 * shg_efficiency(gamma, lambda, n)).epsilon(1e-12));
  CHECK(shg_efficiency(-gamma, lambda, n) == shg_efficiency(gamma, lambda, n));
  CHECK(shg_efficiency(0.0, lambda, n) == 0.0);
  CHECK_THROWS_AS(shg_efficiency(gamma, lambda, 0.0), DomainError);
  CHECK_THROWS_AS(shg_efficiency(gamma, -1.0, n), DomainError);
}

TEST_CASE("SPDC efficiency from SHG efficiency") {
  const auto e = spdc_efficiency(189.0, 1608.0, 8.5, 1.44);
  // SI: eta [1/(W m^2)] * h c / lambda [J] * coefficient [Hz m^0.5] -> m^-1.5
  const double si = 189.0 * 1e-2 / 1e-6 * (kPlanck * kC0 / 1608e-9) * (8.5e12 * std::sqrt(1e-3));
  CHECK(e.normalized_per_mm32 == doctest::Approx(si * std::pow(1e-3, 1.5)).epsilon(1e-9));
  CHECK(e.total == doctest::Approx(e.normalized_per_mm32 * std::pow(1.44, 1.5)).epsilon(1e-12));
  CHECK(e.normalized_per_mm32 == doctest::Approx(1.98e-6).epsilon(0.01));
  CHECK(spdc_efficiency(0.0, 1608.0, 8.5, 1.0).total == 0.0);
  CHECK_THROWS_AS(spdc_efficiency(-1.0, 1608.0, 8.5, 1.0), DomainError);
  CHECK_THROWS_AS(spdc_efficiency(1.0, 1608.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(spdc_efficiency(1.0, 1608.0, 8.5, 0.0), DomainError);
}

TEST_CASE("loss factor against a numerically integrated SH field") {
  const double ln10 = std::log(10.0);
  for (auto [fh, sh, len] : {std::tuple{3.0, 5.0, 1.44}, std::tuple{10.0, 0.0, 2.0}, std::tuple{0.0, 8.0, 4.0},
                             std::tuple{2.0, 4.0, 1.0}}) {
    const double a_fh = fh * ln10 / 10 * 100, a_sh = sh * ln10 / 10 * 100, l = len * 1e-3;
    const int n = 2000;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double z = l * k / n;
      const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      acc += w * std::exp(-a_fh * z - 0.5 * a_sh * (l - z));
    }
    acc *= l / n / 3;
    CHECK(shg_loss_factor({fh, sh}, len) == doctest::Approx(acc * acc / (l * l)).epsilon(1e-9));
  }
  CHECK(shg_loss_factor({}, 1.44) == 1.0);
  CHECK(shg_loss_factor({3.0, 5.0}, 1e-9) == doctest::Approx(1.0));
  double prev = 1.0;
  for (double len : {0.5, 1.0, 2.0, 4.0}) {
    const double f = shg_loss_factor({3.0, 5.0}, len);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("detuning curve") {
  const double root = 1631.0, slope = -1.5e-4, len = 1.44;
  const auto samples = linear_samples(root, slope, 1625.0, 1637.0, 0.01);
  const auto c = detuning_curve(samples, len);
  double peak = 0;
  for (const auto& p : c.points) peak = std::max(peak, p.y);
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.amplitude == 1.0);

  // first zero where dk L / 2 = pi, i.e. delta = lambda / (2 L)
  const std::vector<MismatchSample> exact{{1631.0, 2, 2, 1631.0 / (2 * len * 1e6)}};
  CHECK(detuning_curve(exact, len).points[0].y < 1e-28);

  // FWHM against the first-order estimate 2 x_half lambda / (2 pi |s| L)
  const double estimate = 2 * sinc2_half_point() * root / (2 * kPi * std::abs(slope) * len * 1e6);
  CHECK(curve_fwhm(c.points) == doctest::Approx(estimate).epsilon(2e-3));
  CHECK(detuning_curve(samples, len, {3.0, 5.0}).amplitude == shg_loss_factor({3.0, 5.0}, len));
}

TEST_CASE("curve_fwhm") {
  std::vector<CurvePoint> tri;
  for (int k = -10; k <= 10; ++k) tri.push_back({double(k), 1.0 - std::abs(k) / 10.0});
  CHECK(curve_fwhm(tri) == doctest::Approx(10.0));
  std::vector<CurvePoint> flat{{0, 1}, {1, 1}, {2, 1}};
  CHECK(curve_fwhm(flat) == 0.0);
  CHECK(curve_fwhm(std::vector<CurvePoint>{{0, 1}}) == 0.0);
}

TEST_CASE("sinc^2(t^2) integrals") {
  CHECK(sinc2_quartic_integral(std::numeric_limits<double>::infinity()) ==
        doctest::Approx(2.0 * std::sqrt(kPi) / 3.0).epsilon(1e-9));
  CHECK(sinc2_quartic_integral(std::sqrt(sinc2_half_point())) == doctest::Approx(1.04723988002034390).epsilon(1e-9));
  CHECK(sinc2_quartic_integral(0.0) == 0.0);
  CHECK(sinc2_quartic_integral(100.0) < sinc2_quartic_integral(std::numeric_limits<double>::infinity()));
  CHECK_THROWS_AS(sinc2_quartic_integral(-1.0), DomainError);
}

TEST_CASE("frequency width to wavelength width") {
  CHECK(frequency_width_to_nm(7.0833, 1608.0) == doctest::Approx(61.1).epsilon(2e-3));
  const double small = frequency_width_to_nm(0.001, 1550.0);
  CHECK(small == doctest::Approx(1550e-9 * 1550e-9 * 1e9 / kC0 * 1e9).epsilon(1e-6));
  CHECK_THROWS_AS(frequency_width_to_nm(1e6, 1550.0), DomainError);
  CHECK_THROWS_AS(frequency_width_to_nm(1.0, 0.0), DomainError);
}

TEST_CASE("biphoton spectrum") {
  const double b2 = 1.2e-24;
  const auto s = biphoton_spectrum(b2, 1.44, 1631.0, 801, 4.0);
  REQUIRE(s.points.size() == 801);
  CHECK(s.points[400].density == 1.0);
  for (std::size_t k = 0; k < 400; ++k) {
    CHECK(s.points[k].density == doctest::Approx(s.points[800 - k].density).epsilon(1e-12));
    CHECK(s.points[k].density <= 1.0);
  }
  CHECK(s.fwhm_thz == doctest::Approx(bandwidth_at_length(bandwidth_law(b2), 1.44)).epsilon(1e-12));
  std::vector<CurvePoint> c;
  for (const auto& p : s.points) c.push_back({p.detuning_thz, p.density});
  CHECK(curve_fwhm(c) == doctest::Approx(s.fwhm_thz).epsilon(1e-3));
  CHECK(s.band_fraction == doctest::Approx(0.8862627).epsilon(1e-6));
  CHECK(s.fwhm_nm == doctest::Approx(frequency_width_to_nm(s.fwhm_thz, 1631.0)));
  CHECK(s.points.front().lambda_nm > s.points.back().lambda_nm);
  // sign of beta2 does not change the density
  const auto neg = biphoton_spectrum(-b2, 1.44, 1631.0, 801, 4.0);
  CHECK(neg.points[123].density == doctest::Approx(s.points[123].density).epsilon(1e-12));
  CHECK_THROWS_AS(biphoton_spectrum(0.0, 1.44, 1631.0), DomainError);
  CHECK_THROWS_AS(biphoton_spectrum(b2, 0.0, 1631.0), DomainError);
}

TEST_CASE("device overlap: material contributions add up") {
  MismatchEvaluator ev(testing::device(), testing::library());
  const ModeSolution fh = ev.fundamental_mode(1631.0);
  const ModeSolution sh = ev.second_harmonic_mode(815.5);
  const OverlapResult o = overlap_gamma(fh, sh, testing::library());
  double sum = 0.0;
  for (const auto& [name, v] : o.contributions) sum += v;
  CHECK(sum == doctest::Approx(o.gamma_per_volt).epsilon(1e-12));
  CHECK(o.contributions.count("algaas20") == 1);
  CHECK(o.contributions.count("sio2") == 0);
  CHECK(std::abs(o.gamma_per_volt) > 0.0);
}
