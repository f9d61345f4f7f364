#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "wgpair/error.hpp"
#include "wgpair/grid.hpp"

using namespace wgpair;
using testing::library;

TEST_CASE("default policy puts at least 8 rows in the 110 nm core") {
  const CrossSectionGrid g = build_grid(testing::device(), library(), 1608.0);
  int rows = 0;
  for (int j = 0; j < g.ny(); ++j) {
    if (g.y_center(j) > 0.0 && g.y_center(j) < 110.0) ++rows;
  }
  CHECK(rows >= 8);
  // interfaces are cell edges
  for (double y : {0.0, 5.0, 105.0, 110.0}) {
    CHECK(std::find(g.y_edges().begin(), g.y_edges().end(), y) != g.y_edges().end());
  }
  for (double x : {-800.0, 800.0}) {
    CHECK(std::find(g.x_edges().begin(), g.x_edges().end(), x) != g.x_edges().end());
  }
}

TEST_CASE("uniform-index stack gives a constant index map") {
  LayerStack s;
  s.substrate = "sio2";
  s.superstrate = "sio2";
  s.layers = {{"sio2", 200.0, true}};
  s.rib_width_nm = 1000.0;
  const CrossSectionGrid g = build_grid(s, library(), 1550.0);
  const double n0 = g.index().front();
  for (double n : g.index()) CHECK(n == doctest::Approx(n0).epsilon(1e-14));
}

TEST_CASE("index maximum sits in the alloy core at 1608 nm") {
  const LayerStack s = testing::device();
  const CrossSectionGrid g = build_grid(s, library(), 1608.0);
  const auto it = std::max_element(g.index().begin(), g.index().end());
  const int cell = static_cast<int>(it - g.index().begin());
  const int i = cell / g.ny();
  const int j = cell % g.ny();
  CHECK(s.material_at(g.x_center(i), g.y_center(j)) == "algaas20");
  CHECK(*it == doctest::Approx(refractive_index(library().find("algaas20"), 1608.0)));
  CHECK(g.cladding_index() < *it);
}

TEST_CASE("policy that cannot resolve the thinnest layer") {
  ResolutionPolicy p;
  p.vertical_interface_step_nm = 8.0;  // InGaP layers are 5 nm
  CHECK_THROWS_AS(build_grid(testing::device(), library(), 1608.0, p), ConfigError);
  ResolutionPolicy q;
  q.min_lines_per_layer = 2;
  CHECK_THROWS_AS(build_grid(testing::device(), library(), 1608.0, q), ConfigError);
}

TEST_CASE("re-evaluating at another wavelength keeps the mesh") {
  const CrossSectionGrid g = build_grid(testing::device(), library(), 1608.0);
  const CrossSectionGrid h = at_wavelength(g, library(), 804.0);
  CHECK(g.same_mesh(h));
  CHECK(h.lambda_nm() == 804.0);
  CHECK(h.max_index() > g.max_index());
  const CrossSectionGrid direct = build_grid(testing::device(), library(), 804.0);
  REQUIRE(direct.size() == h.size());
  for (int k = 0; k < h.size(); ++k) CHECK(direct.index()[k] == doctest::Approx(h.index()[k]).epsilon(1e-14));
}

TEST_CASE("mesh is mirror symmetric about the rib centre") {
  const CrossSectionGrid g = build_grid(testing::device(), library(), 1608.0);
  const auto& x = g.x_edges();
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(-x[x.size() - 1 - k]).epsilon(1e-12));
}

TEST_CASE("graded edges") {
  const auto e = graded_edges(0.0, 1000.0, 2.0, 50.0, 1.25, 3);
  REQUIRE(e.size() >= 4);
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 1000.0);
  for (std::size_t k = 1; k < e.size(); ++k) {
    CHECK(e[k] > e[k - 1]);
    CHECK(e[k] - e[k - 1] <= 50.0 + 1e-9);
  }
  CHECK(e[1] - e[0] <= 2.0 + 1e-9);
  CHECK(e[e.size() - 1] - e[e.size() - 2] <= 2.0 + 1e-9);
  CHECK(graded_edges(0.0, 5.0, 2.0, 50.0, 1.25, 3).size() >= 4);
}

TEST_CASE("direct construction rejects malformed input") {
  CHECK_THROWS_AS(CrossSectionGrid({0.0, 1.0}, {0.0, 0.0}, {1.5}, 1550.0), GridError);
  CHECK_THROWS_AS(CrossSectionGrid({0.0, 1.0}, {0.0, 1.0}, {1.5, 1.5}, 1550.0), GridError);
  CHECK_THROWS_AS(CrossSectionGrid({0.0, 1.0}, {0.0, 1.0}, {0.5}, 1550.0), GridError);
  CHECK_THROWS_AS(d36_profile(CrossSectionGrid({0.0, 1.0}, {0.0, 1.0}, {1.5}, 1550.0), library()), GridError);
}
