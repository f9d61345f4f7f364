#pragma once

#include <span>
#include <string>
#include <vector>

#include "wgpair/materials.hpp"

namespace wgpair {

// Meshing knobs for build_grid. Steps are cell sizes in nm; cells start at
// the interface step next to every material boundary and grow geometrically
// towards the bulk step.
struct ResolutionPolicy {
  double vertical_interface_step_nm = 2.0;
  double vertical_bulk_step_nm = 50.0;
  double lateral_interface_step_nm = 10.0;
  double lateral_bulk_step_nm = 100.0;
  double growth = 1.25;
  int min_lines_per_layer = 3;
  double lateral_margin_nm = 2000.0;
  double bottom_margin_nm = 1500.0;
  double top_margin_nm = 1500.0;
  int subsamples = 4;  // per axis, for material fill fractions

  // Uniform refinement: divides every step by `factor`.
  ResolutionPolicy refined(double factor) const;
};

struct CellFraction {
  int material = 0;
  double fraction = 0.0;
};

// Cell-centered rectangular mesh with a refractive index per cell. Cells are
// stored x-major: flat index = i * ny + j. A grid with a single column is
// treated as x-invariant (slab problem) by the mode solver.
class CrossSectionGrid {
 public:
  CrossSectionGrid() = default;
  // Direct construction from edges and per-cell index. Throws GridError on
  // non-increasing edges, size mismatch or index < 1.
  CrossSectionGrid(std::vector<double> x_edges, std::vector<double> y_edges,
                   std::vector<double> index, double lambda_nm);

  int nx() const { return static_cast<int>(x_edges_.size()) - 1; }
  int ny() const { return static_cast<int>(y_edges_.size()) - 1; }
  int size() const { return nx() * ny(); }
  int flat(int i, int j) const { return i * ny() + j; }
  bool is_slab() const { return nx() == 1; }

  const std::vector<double>& x_edges() const { return x_edges_; }
  const std::vector<double>& y_edges() const { return y_edges_; }
  double x_center(int i) const { return 0.5 * (x_edges_[i] + x_edges_[i + 1]); }
  double y_center(int j) const { return 0.5 * (y_edges_[j] + y_edges_[j + 1]); }
  double dx(int i) const { return x_edges_[i + 1] - x_edges_[i]; }
  double dy(int j) const { return y_edges_[j + 1] - y_edges_[j]; }
  // Cell area in nm^2; slab grids use unit width.
  double area(int i, int j) const { return (is_slab() ? 1.0 : dx(i)) * dy(j); }

  double lambda_nm() const { return lambda_nm_; }
  const std::vector<double>& index() const { return index_; }
  double index(int i, int j) const { return index_[flat(i, j)]; }
  double max_index() const;
  // Upper bound for radiating fields: max index over non-core materials when
  // the grid was built from a stack, else max index on the outer frame.
  double cladding_index() const { return cladding_index_; }

  const std::vector<std::string>& material_names() const { return material_names_; }
  std::span<const CellFraction> composition(int cell) const;
  bool has_composition() const { return !offsets_.empty(); }

  bool same_mesh(const CrossSectionGrid& other) const;

 private:
  friend CrossSectionGrid build_grid(const LayerStack&, const MaterialLibrary&, double,
                                     const ResolutionPolicy&);
  friend CrossSectionGrid at_wavelength(const CrossSectionGrid&, const MaterialLibrary&, double);

  std::vector<double> x_edges_;
  std::vector<double> y_edges_;
  std::vector<double> index_;
  double lambda_nm_ = 0.0;
  double cladding_index_ = 1.0;

  std::vector<std::string> material_names_;
  std::vector<bool> material_is_core_;
  std::vector<CellFraction> fractions_;
  std::vector<int> offsets_;  // size() + 1 entries into fractions_
};

// Conforming mesh: every material boundary of the stack is a cell edge.
// Throws ConfigError when the policy cannot resolve the thinnest layer.
CrossSectionGrid build_grid(const LayerStack& stack, const MaterialLibrary& library,
                            double lambda_nm, const ResolutionPolicy& policy = {});

// Same mesh and composition, index map re-evaluated at another wavelength.
CrossSectionGrid at_wavelength(const CrossSectionGrid& grid, const MaterialLibrary& library,
                               double lambda_nm);

// Piecewise-constant d36 per cell in pm/V, fill-fraction weighted.
std::vector<double> d36_profile(const CrossSectionGrid& grid, const MaterialLibrary& library);

// Cell edges for [lo, hi] graded from both ends (exposed for tests).
std::vector<double> graded_edges(double lo, double hi, double fine, double coarse, double growth,
                                 int min_cells);

}  // namespace wgpair
