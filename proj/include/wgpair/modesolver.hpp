#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "wgpair/eigensolver.hpp"
#include "wgpair/grid.hpp"
#include "wgpair/materials.hpp"

namespace wgpair {

// TE-like modes carry Ex, TM-like modes carry Ey.
enum class Polarization { kTE, kTM };

const char* to_string(Polarization p);

struct ModeSolution {
  double n_eff = 0.0;
  // Per-cell transverse components, same layout as the grid. The
  // semi-vectorial scheme leaves the minor component at zero.
  std::vector<double> ex;
  std::vector<double> ey;
  Polarization polarization = Polarization::kTE;
  double lambda_nm = 0.0;
  // Sum |E|^2 dA == 1 with dA in nm^2.
  bool power_normalized = false;
  double residual = 0.0;  // ||A v - n_eff^2 v|| / ||v|| of the discrete operator
  std::shared_ptr<const CrossSectionGrid> grid;

  const std::vector<double>& dominant() const {
    return polarization == Polarization::kTE ? ex : ey;
  }
  // Fraction of the field energy in the dominant component.
  double dominant_fraction() const;
};

struct SolverOptions {
  EigenOptions eigen{};
  double boundary_energy_limit = 1e-4;
};

// Semi-vectorial finite-difference operator scaled by 1/k0^2, so its
// eigenvalues are n_eff^2. Interface-corrected in x for TE and in y for TM.
// Zero-field walls one cell beyond the outermost ring.
SparseMatrix assemble_operator(const CrossSectionGrid& grid, Polarization polarization);

// Effective index of the fundamental slab mode through the column with the
// highest index: an upper bound for the fundamental mode of the full grid.
double slab_index_estimate(const CrossSectionGrid& grid, Polarization polarization,
                           const SolverOptions& options = {});

// Guided modes nearest `n_eff_guess`, sorted by descending n_eff, unit power,
// dominant component positive at its maximum. Returns an empty list when the
// grid has no guiding region (cladding index >= max index). Throws GridError
// if a returned mode does not decay at the boundary and SolverError if the
// eigen-iteration stalls.
std::vector<ModeSolution> solve_modes(std::shared_ptr<const CrossSectionGrid> grid,
                                      Polarization polarization, int n_modes, double n_eff_guess,
                                      const SolverOptions& options = {});

// Same with the guess taken from slab_index_estimate.
std::vector<ModeSolution> solve_modes(std::shared_ptr<const CrossSectionGrid> grid,
                                      Polarization polarization, int n_modes,
                                      const SolverOptions& options = {});

// Fundamental mode or GridError/SolverError; throws Error when nothing is
// guided.
ModeSolution solve_fundamental(std::shared_ptr<const CrossSectionGrid> grid,
                               Polarization polarization, const SolverOptions& options = {});

// |<a, b>| / (|a| |b|) over the dominant components; both on the same mesh.
double field_overlap(const ModeSolution& a, const ModeSolution& b);

// Exact effective index of the order-m guided mode of a symmetric
// three-layer slab (core between two identical claddings). Throws DomainError
// when the mode is cut off.
double analytic_slab_index(double n_core, double n_clad, double thickness_nm, double lambda_nm,
                           Polarization polarization, int order = 0);

struct ModeSelector {
  Polarization polarization = Polarization::kTE;
  int candidates = 3;           // modes solved per wavelength for tracking
  double min_overlap = 0.5;     // below this the tracked mode is lost
};

struct NeffPoint {
  double lambda_nm = 0.0;
  double n_eff = 0.0;
};

// n_eff of one mode across a sorted wavelength list. Starts from the
// fundamental at the first wavelength and follows it by field overlap.
// Throws TrackingError when the best overlap drops below the selector
// threshold.
std::vector<NeffPoint> n_eff_curve(const LayerStack& stack, const MaterialLibrary& library,
                                   const std::vector<double>& lambdas_nm,
                                   const ModeSelector& selector = {},
                                   const ResolutionPolicy& policy = {},
                                   const SolverOptions& options = {});

}  // namespace wgpair
