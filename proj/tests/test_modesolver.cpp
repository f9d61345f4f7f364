#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "support.hpp"
#include "wgpair/error.hpp"
#include "wgpair/modesolver.hpp"

using namespace wgpair;
using testing::library;
using testing::slab_grid;

namespace {

// Independent slab oracle: the even-mode dispersion relation evaluated
// directly, so the solver's root is checked against its own defining equation.
double slab_relation(double n1, double n2, double d, double lambda, double n, Polarization p) {
  const double k0 = 2.0 * M_PI / lambda;
  const double kappa = k0 * std::sqrt(n1 * n1 - n * n);
  const double gamma = k0 * std::sqrt(n * n - n2 * n2);
  const double rho = p == Polarization::kTE ? 1.0 : (n1 * n1) / (n2 * n2);
  return std::tan(0.5 * kappa * d) - rho * gamma / kappa;
}

std::shared_ptr<const CrossSectionGrid> device_grid(double lambda) {
  return std::make_shared<const CrossSectionGrid>(build_grid(testing::device(), library(), lambda));
}

}  // namespace

TEST_CASE("analytic slab root satisfies the even-mode relation") {
  for (Polarization p : {Polarization::kTE, Polarization::kTM}) {
    const double n = analytic_slab_index(3.3, 1.45, 400.0, 1550.0, p);
    CHECK(n > 1.45);
    CHECK(n < 3.3);
    CHECK(std::abs(slab_relation(3.3, 1.45, 400.0, 1550.0, n, p)) < 1e-9);
  }
  CHECK(analytic_slab_index(3.3, 1.45, 400.0, 1550.0, Polarization::kTM) <
        analytic_slab_index(3.3, 1.45, 400.0, 1550.0, Polarization::kTE));
  CHECK_THROWS_AS(analytic_slab_index(3.3, 1.45, 100.0, 1550.0, Polarization::kTE, 3), DomainError);
}

TEST_CASE("slab oracle at fine grid and grid convergence") {
  for (Polarization p : {Polarization::kTE, Polarization::kTM}) {
    const double exact = analytic_slab_index(3.3, 1.45, 400.0, 1550.0, p);
    std::vector<double> n;
    for (double h : {20.0, 10.0, 5.0, 2.5}) {
      n.push_back(solve_fundamental(slab_grid(3.3, 1.45, 400.0, 2000.0, h, 1550.0), p).n_eff);
    }
    CAPTURE(to_string(p));
    CHECK(std::abs(n.back() - exact) <= 1e-3);
    // successive differences shrink by >= 3x per halving
    for (std::size_t k = 2; k < n.size(); ++k) {
      CHECK(std::abs(n[k] - n[k - 1]) * 3.0 <= std::abs(n[k - 1] - n[k - 2]));
    }
  }
}

TEST_CASE("uniform index: nothing guided") {
  auto g = std::make_shared<const CrossSectionGrid>(std::vector<double>{-1000, 0, 1000},
                                                    std::vector<double>{-1000, 0, 1000},
                                                    std::vector<double>(4, 1.5), 1550.0);
  CHECK(solve_modes(g, Polarization::kTE, 1).empty());
}

TEST_CASE("device fundamental modes: residual, normalization, sign, polarization") {
  // TE at the pump, TM at the second harmonic
  for (auto [p, lambda] : {std::pair{Polarization::kTE, 1608.0}, std::pair{Polarization::kTM, 804.0}}) {
    const auto g = device_grid(lambda);
    const ModeSolution m = solve_fundamental(g, p);
    CAPTURE(to_string(p));
    CHECK(m.polarization == p);
    CHECK(m.residual <= 1e-8);
    CHECK(m.dominant_fraction() >= 0.6);
    CHECK(m.n_eff > g->cladding_index());
    CHECK(m.n_eff < g->max_index());
    double power = 0.0;
    for (int i = 0; i < g->nx(); ++i) {
      for (int j = 0; j < g->ny(); ++j) {
        const int k = g->flat(i, j);
        power += (m.ex[k] * m.ex[k] + m.ey[k] * m.ey[k]) * g->area(i, j);
      }
    }
    CHECK(power == doctest::Approx(1.0).epsilon(1e-10));
    const auto& dom = m.dominant();
    const auto peak = std::max_element(dom.begin(), dom.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(*peak > 0.0);
    CHECK(field_overlap(m, m) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mirroring the grid in x leaves n_eff unchanged") {
  const auto g = device_grid(804.0);
  std::vector<double> xe(g->x_edges().rbegin(), g->x_edges().rend());
  for (double& x : xe) x = -x;
  std::vector<double> idx(g->size());
  for (int i = 0; i < g->nx(); ++i) {
    for (int j = 0; j < g->ny(); ++j) idx[g->flat(g->nx() - 1 - i, j)] = g->index(i, j);
  }
  auto mirrored = std::make_shared<const CrossSectionGrid>(xe, g->y_edges(), idx, g->lambda_nm());
  for (Polarization p : {Polarization::kTE, Polarization::kTM}) {
    CHECK(std::abs(solve_fundamental(g, p).n_eff - solve_fundamental(mirrored, p).n_eff) <= 1e-10);
  }
}

TEST_CASE("one TM fundamental below the core index at 804 nm") {
  const auto g = device_grid(804.0);
  const auto modes = solve_modes(g, Polarization::kTM, 1);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].n_eff < refractive_index(library().find("algaas20"), 804.0));
  CHECK(modes[0].n_eff > g->cladding_index());
}

TEST_CASE("tracked TE00 index decreases across 1550-1650 nm") {
  const std::vector<double> lambdas{1550.0, 1575.0, 1600.0, 1625.0, 1650.0};
  ModeSelector sel;
  sel.candidates = 2;
  const auto curve = n_eff_curve(testing::device(), library(), lambdas, sel);
  REQUIRE(curve.size() == lambdas.size());
  for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].n_eff < curve[k - 1].n_eff);
  const auto single = n_eff_curve(testing::device(), library(), {1600.0}, sel);
  REQUIRE(single.size() == 1);
  CHECK(single[0].n_eff == doctest::Approx(curve[2].n_eff).epsilon(1e-12));
}

TEST_CASE("mode-field CSV ordering matches the grid") {
  const auto g = testing::slab_grid(3.3, 1.45, 400.0, 1000.0, 20.0, 1550.0);
  const auto m = solve_fundamental(g, Polarization::kTE);
  CHECK(m.ex.size() == static_cast<std::size_t>(g->size()));
  CHECK(m.ey.size() == static_cast<std::size_t>(g->size()));
  for (double v : m.ey) CHECK(v == 0.0);
}
