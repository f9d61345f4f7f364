#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "wgpair/acceptance.hpp"
#include "wgpair/config.hpp"
#include "wgpair/grid.hpp"
#include "wgpair/materials.hpp"
#include "wgpair/modesolver.hpp"

namespace testing {

inline const wgpair::MaterialLibrary& library() {
  static const wgpair::MaterialLibrary lib = wgpair::MaterialLibrary::load_directory(wgpair::default_materials_dir());
  return lib;
}

inline wgpair::LayerStack device() { return wgpair::reference_stack(wgpair::ReferenceCladding::kResist); }

inline double rel(double a, double b) { return std::abs(a / b - 1.0); }

// Symmetric slab, uniform cells of h nm, one column.
inline std::shared_ptr<const wgpair::CrossSectionGrid> slab_grid(double n_core, double n_clad, double core_nm,
                                                                 double clad_nm, double h, double lambda_nm) {
  const int nc = static_cast<int>(std::lround(clad_nm / h));
  const int nk = static_cast<int>(std::lround(core_nm / h));
  std::vector<double> y(2 * nc + nk + 1);
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = -clad_nm - 0.5 * core_nm + static_cast<double>(j) * h;
  std::vector<double> n(2 * nc + nk, n_clad);
  for (int j = nc; j < nc + nk; ++j) n[j] = n_core;
  return std::make_shared<const wgpair::CrossSectionGrid>(std::vector<double>{-0.5, 0.5}, std::move(y),
                                                          std::move(n), lambda_nm);
}

}  // namespace testing
