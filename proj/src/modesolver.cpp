#include "wgpair/modesolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wgpair/error.hpp"

namespace wgpair {

const char* to_string(Polarization p) { return p == Polarization::kTE ? "TE" : "TM"; }

double ModeSolution::dominant_fraction() const {
  double dom = 0.0;
  double minor = 0.0;
  const auto& d = dominant();
  const auto& m = polarization == Polarization::kTE ? ey : ex;
  for (double v : d) dom += v * v;
  for (double v : m) minor += v * v;
  return dom + minor > 0.0 ? dom / (dom + minor) : 0.0;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Second derivative along one axis for the cell at `k`. When `weighted`,
// discretizes d/ds (1/n^2) d/ds (n^2 E): n^2 E and the flux are continuous
// across interfaces, so the flux between two cell centers is the jump in
// n^2 E divided by the integral of n^2 along the connecting segment.
template <typename Neighbour>
void axis_stencil(int k, int count, const std::vector<double>& edges, bool weighted,
                  const Neighbour& n2_at, double scale, double& diag,
                  std::vector<std::pair<int, double>>& off) {
  const double h = edges[k + 1] - edges[k];
  const double n2 = n2_at(k);
  for (int step : {-1, 1}) {
    const int kk = k + step;
    if (kk < 0 || kk >= count) {
      // Zero-field ghost cell of the same size.
      diag -= scale / (h * h);
      continue;
    }
    const double hh = edges[kk + 1] - edges[kk];
    if (weighted) {
      const double n2n = n2_at(kk);
      const double integral = 0.5 * (h * n2 + hh * n2n);
      off.emplace_back(kk, scale * n2n / (integral * h));
      diag -= scale * n2 / (integral * h);
    } else {
      const double dist = 0.5 * (h + hh);
      off.emplace_back(kk, scale / (dist * h));
      diag -= scale / (dist * h);
    }
  }
}

void normalize_and_orient(std::vector<double>& field, const CrossSectionGrid& grid) {
  double power = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const double v = field[grid.flat(i, j)];
      power += v * v * grid.area(i, j);
    }
  }
  const double scale = 1.0 / std::sqrt(power);
  std::size_t peak = 0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    if (std::abs(field[c]) > std::abs(field[peak])) peak = c;
  }
  const double sign = field[peak] < 0.0 ? -1.0 : 1.0;
  for (double& v : field) v *= sign * scale;
}

double boundary_energy_fraction(const std::vector<double>& field, const CrossSectionGrid& grid) {
  double total = 0.0;
  double edge = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const double e = field[grid.flat(i, j)] * field[grid.flat(i, j)] * grid.area(i, j);
      total += e;
      const bool on_frame = j == 0 || j == grid.ny() - 1 ||
                            (!grid.is_slab() && (i == 0 || i == grid.nx() - 1));
      if (on_frame) edge += e;
    }
  }
  return total > 0.0 ? edge / total : 1.0;
}

}  // namespace

SparseMatrix assemble_operator(const CrossSectionGrid& grid, Polarization polarization) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double k0 = 2.0 * std::numbers::pi / grid.lambda_nm();
  const double scale = 1.0 / (k0 * k0);
  const auto& idx = grid.index();

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(grid.size()) * 5);
  std::vector<std::pair<int, double>> off;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int row = grid.flat(i, j);
      const double n = idx[row];
      double diag = n * n;
      if (!grid.is_slab()) {
        off.clear();
        auto n2x = [&](int ii) { return idx[grid.flat(ii, j)] * idx[grid.flat(ii, j)]; };
        axis_stencil(i, nx, grid.x_edges(), polarization == Polarization::kTE, n2x, scale, diag, off);
        for (const auto& [ii, v] : off) triplets.emplace_back(row, grid.flat(ii, j), v);
      }
      off.clear();
      auto n2y = [&](int jj) { return idx[grid.flat(i, jj)] * idx[grid.flat(i, jj)]; };
      axis_stencil(j, ny, grid.y_edges(), polarization == Polarization::kTM, n2y, scale, diag, off);
      for (const auto& [jj, v] : off) triplets.emplace_back(row, grid.flat(i, jj), v);
      triplets.emplace_back(row, row, diag);
    }
  }
  SparseMatrix a(grid.size(), grid.size());
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

double slab_index_estimate(const CrossSectionGrid& grid, Polarization polarization,
                           const SolverOptions& options) {
  int best = 0;
  double best_n = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      if (grid.index(i, j) > best_n) {
        best_n = grid.index(i, j);
        best = i;
      }
    }
  }
  std::vector<double> column(grid.ny());
  for (int j = 0; j < grid.ny(); ++j) column[j] = grid.index(best, j);
  const std::vector<double> x_edges{grid.x_edges()[best], grid.x_edges()[best + 1]};
  CrossSectionGrid slab(x_edges, grid.y_edges(), std::move(column), grid.lambda_nm());
  const SparseMatrix a = assemble_operator(slab, polarization);
  const double top = best_n * best_n;
  const auto pairs = shift_invert_eigs(a, top, 1, options.eigen);
  return std::sqrt(std::max(pairs.front().value, 1.0));
}

std::vector<ModeSolution> solve_modes(std::shared_ptr<const CrossSectionGrid> grid,
                                      Polarization polarization, int n_modes, double n_eff_guess,
                                      const SolverOptions& options) {
  if (!grid) throw GridError("solve_modes: null grid");
  if (n_modes < 1) throw ConfigError("solve_modes: n_modes must be >= 1");
  const double n_max = grid->max_index();
  const double n_clad = grid->cladding_index();
  if (!(n_clad < n_max)) return {};  // nothing can be guided
  if (!(n_eff_guess > n_clad && n_eff_guess <= n_max * (1.0 + 1e-9))) {
    std::ostringstream msg;
    msg << "n_eff guess " << n_eff_guess << " outside guided bound (" << n_clad << ", " << n_max
        << "]";
    throw ConfigError(msg.str());
  }

  const SparseMatrix a = assemble_operator(*grid, polarization);
  const double shift = n_eff_guess * n_eff_guess * (1.0 + 1e-7);
  const auto pairs = shift_invert_eigs(a, shift, n_modes, options.eigen);

  std::vector<ModeSolution> modes;
  for (const auto& p : pairs) {
    if (!(p.value > 0.0)) continue;
    const double n_eff = std::sqrt(p.value);
    if (!(n_eff > n_clad && n_eff < n_max)) continue;

    ModeSolution m;
    m.n_eff = n_eff;
    m.polarization = polarization;
    m.lambda_nm = grid->lambda_nm();
    m.residual = p.residual;
    m.grid = grid;
    std::vector<double> field(p.vector.data(), p.vector.data() + p.vector.size());
    const double edge = boundary_energy_fraction(field, *grid);
    if (edge >= options.boundary_energy_limit) {
      std::ostringstream msg;
      msg << to_string(polarization) << " mode n_eff=" << n_eff << " at " << grid->lambda_nm()
          << " nm has boundary energy fraction " << edge << " (limit "
          << options.boundary_energy_limit << "); enlarge the grid margins";
      throw GridError(msg.str());
    }
    normalize_and_orient(field, *grid);
    m.power_normalized = true;
    std::vector<double> zeros(field.size(), 0.0);
    if (polarization == Polarization::kTE) {
      m.ex = std::move(field);
      m.ey = std::move(zeros);
    } else {
      m.ey = std::move(field);
      m.ex = std::move(zeros);
    }
    modes.push_back(std::move(m));
  }
  std::sort(modes.begin(), modes.end(),
            [](const ModeSolution& l, const ModeSolution& r) { return l.n_eff > r.n_eff; });
  return modes;
}

std::vector<ModeSolution> solve_modes(std::shared_ptr<const CrossSectionGrid> grid,
                                      Polarization polarization, int n_modes,
                                      const SolverOptions& options) {
  if (!grid) throw GridError("solve_modes: null grid");
  if (!(grid->cladding_index() < grid->max_index())) return {};
  const double guess = std::min(slab_index_estimate(*grid, polarization, options), grid->max_index());
  if (!(guess > grid->cladding_index())) return {};
  return solve_modes(std::move(grid), polarization, n_modes, guess, options);
}

ModeSolution solve_fundamental(std::shared_ptr<const CrossSectionGrid> grid,
                               Polarization polarization, const SolverOptions& options) {
  const double lambda = grid ? grid->lambda_nm() : 0.0;
  auto modes = solve_modes(std::move(grid), polarization, 1, options);
  if (modes.empty()) {
    std::ostringstream msg;
    msg << "no guided " << to_string(polarization) << " mode at " << lambda << " nm";
    throw Error(msg.str());
  }
  return std::move(modes.front());
}

double field_overlap(const ModeSolution& a, const ModeSolution& b) {
  if (!a.grid || !b.grid || !a.grid->same_mesh(*b.grid)) {
    throw GridError("field_overlap: modes live on different meshes");
  }
  const auto& g = *a.grid;
  const auto& fa = a.dominant();
  const auto& fb = b.dominant();
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int c = g.flat(i, j);
      const double w = g.area(i, j);
      ab += fa[c] * fb[c] * w;
      aa += fa[c] * fa[c] * w;
      bb += fb[c] * fb[c] * w;
    }
  }
  return std::abs(ab) / std::sqrt(aa * bb);
}

std::vector<NeffPoint> n_eff_curve(const LayerStack& stack, const MaterialLibrary& library,
                                   const std::vector<double>& lambdas_nm,
                                   const ModeSelector& selector, const ResolutionPolicy& policy,
                                   const SolverOptions& options) {
  if (lambdas_nm.empty()) return {};
  if (!std::is_sorted(lambdas_nm.begin(), lambdas_nm.end())) {
    throw ConfigError("n_eff_curve: wavelength list must be sorted");
  }
  const CrossSectionGrid base = build_grid(stack, library, lambdas_nm.front(), policy);

  std::vector<NeffPoint> out;
  ModeSolution previous;
  for (std::size_t k = 0; k < lambdas_nm.size(); ++k) {
    auto grid = std::make_shared<const CrossSectionGrid>(at_wavelength(base, library, lambdas_nm[k]));
    if (k == 0) {
      previous = solve_fundamental(grid, selector.polarization, options);
      out.push_back({lambdas_nm[k], previous.n_eff});
      continue;
    }
    const double guess = std::clamp(previous.n_eff, grid->cladding_index() * (1.0 + 1e-9),
                                    grid->max_index());
    auto modes = solve_modes(grid, selector.polarization, selector.candidates, guess, options);
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double ov = field_overlap(previous, modes[m]);
      if (ov > best) {
        best = ov;
        pick = m;
      }
    }
    if (modes.empty() || best < selector.min_overlap) {
      std::ostringstream msg;
      msg << "mode tracking lost at " << lambdas_nm[k] << " nm (best overlap " << best
          << " < " << selector.min_overlap << ")";
      throw TrackingError(msg.str());
    }
    previous = std::move(modes[pick]);
    out.push_back({lambdas_nm[k], previous.n_eff});
  }
  return out;
}

double analytic_slab_index(double n_core, double n_clad, double thickness_nm, double lambda_nm,
                           Polarization polarization, int order) {
  if (!(n_core > n_clad) || !(n_clad >= 1.0) || !(thickness_nm > 0.0) || !(lambda_nm > 0.0) || order < 0) {
    throw DomainError("analytic_slab_index: need n_core > n_clad >= 1 and positive sizes");
  }
  const double k0 = 2.0 * std::numbers::pi / lambda_nm;
  const double rho = polarization == Polarization::kTE ? 1.0 : (n_core * n_core) / (n_clad * n_clad);
  // kappa d = m pi + 2 atan(rho gamma / kappa), decreasing in n.
  auto f = [&](double n) {
    const double kappa = k0 * std::sqrt(std::max(n_core * n_core - n * n, 0.0));
    const double gamma = k0 * std::sqrt(std::max(n * n - n_clad * n_clad, 0.0));
    return kappa * thickness_nm - order * std::numbers::pi - 2.0 * std::atan2(rho * gamma, kappa);
  };
  if (f(n_clad) <= 0.0) throw DomainError("analytic_slab_index: mode is cut off");
  double lo = n_clad;
  double hi = n_core;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wgpair
