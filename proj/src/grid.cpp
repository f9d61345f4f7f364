#include "wgpair/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wgpair/error.hpp"

namespace wgpair {

ResolutionPolicy ResolutionPolicy::refined(double factor) const {
  ResolutionPolicy p = *this;
  p.vertical_interface_step_nm /= factor;
  p.vertical_bulk_step_nm /= factor;
  p.lateral_interface_step_nm /= factor;
  p.lateral_bulk_step_nm /= factor;
  p.min_lines_per_layer = static_cast<int>(std::ceil(min_lines_per_layer * factor));
  return p;
}

CrossSectionGrid::CrossSectionGrid(std::vector<double> x_edges, std::vector<double> y_edges,
                                   std::vector<double> index, double lambda_nm)
    : x_edges_(std::move(x_edges)),
      y_edges_(std::move(y_edges)),
      index_(std::move(index)),
      lambda_nm_(lambda_nm) {
  if (x_edges_.size() < 2 || y_edges_.size() < 2) throw GridError("grid needs at least one cell");
  for (const auto* edges : {&x_edges_, &y_edges_}) {
    for (std::size_t k = 1; k < edges->size(); ++k) {
      if (!((*edges)[k] > (*edges)[k - 1])) throw GridError("grid coordinates must increase strictly");
    }
  }
  if (static_cast<int>(index_.size()) != size()) throw GridError("index map size does not match grid");
  for (double n : index_) {
    if (!(n >= 1.0) || !std::isfinite(n)) throw GridError("index map values must be >= 1");
  }
  if (!(lambda_nm_ > 0.0)) throw GridError("wavelength must be positive");

  double frame = 1.0;
  for (int i = 0; i < nx(); ++i) {
    frame = std::max({frame, this->index(i, 0), this->index(i, ny() - 1)});
  }
  if (!is_slab()) {
    for (int j = 0; j < ny(); ++j) {
      frame = std::max({frame, this->index(0, j), this->index(nx() - 1, j)});
    }
  }
  cladding_index_ = frame;
}

double CrossSectionGrid::max_index() const {
  return *std::max_element(index_.begin(), index_.end());
}

std::span<const CellFraction> CrossSectionGrid::composition(int cell) const {
  if (offsets_.empty()) return {};
  return {fractions_.data() + offsets_[cell],
          static_cast<std::size_t>(offsets_[cell + 1] - offsets_[cell])};
}

bool CrossSectionGrid::same_mesh(const CrossSectionGrid& other) const {
  return x_edges_ == other.x_edges_ && y_edges_ == other.y_edges_;
}

std::vector<double> graded_edges(double lo, double hi, double fine, double coarse, double growth,
                                 int min_cells) {
  const double length = hi - lo;
  std::vector<double> half;
  double covered = 0.0;
  double h = fine;
  while (covered < 0.5 * length) {
    half.push_back(h);
    covered += h;
    h = std::min(h * growth, coarse);
  }
  std::vector<double> steps;
  if (half.empty()) {
    steps.assign(1, length);
  } else {
    // Shrink the half sequence to cover exactly half the segment, so no
    // step exceeds its nominal size.
    const double s = 0.5 * length / covered;
    for (double& v : half) v *= s;
    steps = half;
    steps.insert(steps.end(), half.rbegin(), half.rend());
  }
  if (static_cast<int>(steps.size()) < min_cells) {
    steps.assign(static_cast<std::size_t>(min_cells), length / min_cells);
  }
  std::vector<double> edges{lo};
  double pos = lo;
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    pos += steps[k];
    edges.push_back(pos);
  }
  edges.push_back(hi);
  return edges;
}

namespace {

std::vector<double> mesh_axis(std::vector<double> breaks, double fine, double coarse,
                              double growth, int min_cells) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               breaks.end());
  std::vector<double> edges{breaks.front()};
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const auto seg = graded_edges(breaks[k], breaks[k + 1], fine, coarse, growth, min_cells);
    edges.insert(edges.end(), seg.begin() + 1, seg.end());
  }
  return edges;
}

void evaluate_index(const std::vector<std::string>& names, const std::vector<bool>& is_core,
                    const std::vector<CellFraction>& fractions, const std::vector<int>& offsets,
                    const MaterialLibrary& library, double lambda_nm, std::vector<double>& index,
                    double& cladding_index) {
  std::vector<double> n2(names.size());
  cladding_index = 1.0;
  for (std::size_t m = 0; m < names.size(); ++m) {
    const double n = refractive_index(library.find(names[m]), lambda_nm);
    n2[m] = n * n;
    if (!is_core[m]) cladding_index = std::max(cladding_index, n);
  }
  const std::size_t cells = offsets.size() - 1;
  index.assign(cells, 1.0);
  for (std::size_t c = 0; c < cells; ++c) {
    double acc = 0.0;
    for (int k = offsets[c]; k < offsets[c + 1]; ++k) acc += fractions[k].fraction * n2[fractions[k].material];
    index[c] = std::sqrt(acc);
  }
}

}  // namespace

CrossSectionGrid build_grid(const LayerStack& stack, const MaterialLibrary& library,
                            double lambda_nm, const ResolutionPolicy& policy) {
  validate(stack, library);
  if (policy.min_lines_per_layer < 3) {
    throw ConfigError("resolution policy needs at least 3 grid lines per layer");
  }
  if (!(policy.growth >= 1.0) || policy.subsamples < 1) {
    throw ConfigError("resolution policy: growth must be >= 1 and subsamples >= 1");
  }
  const double thinnest = stack.thinnest_layer_nm();
  if (policy.vertical_interface_step_nm > thinnest) {
    std::ostringstream msg;
    msg << "resolution too coarse: vertical interface step " << policy.vertical_interface_step_nm
        << " nm exceeds thinnest layer " << thinnest << " nm";
    throw ConfigError(msg.str());
  }
  if (policy.vertical_interface_step_nm > policy.vertical_bulk_step_nm ||
      policy.lateral_interface_step_nm > policy.lateral_bulk_step_nm) {
    throw ConfigError("resolution policy: interface step larger than bulk step");
  }

  const double half = 0.5 * stack.rib_width_nm;
  const double top = stack.total_thickness_nm();
  double conformal = 0.0;
  std::vector<double> ys{0.0, top};
  double z = 0.0;
  for (const auto& l : stack.layers) {
    z += l.thickness_nm;
    ys.push_back(z);
  }
  if (stack.slab_thickness_nm > 0.0) ys.push_back(stack.slab_thickness_nm);
  if (stack.cladding) {
    const double t = stack.cladding->thickness_nm;
    if (stack.cladding->kind == CladdingKind::kPlanarizing) {
      ys.push_back(t);
    } else {
      conformal = t;
      ys.push_back(stack.slab_thickness_nm + t);
      ys.push_back(top + t);
    }
  }
  const double highest = *std::max_element(ys.begin(), ys.end());
  ys.push_back(-policy.bottom_margin_nm);
  ys.push_back(highest + policy.top_margin_nm);

  const double outer = half + conformal + policy.lateral_margin_nm;
  std::vector<double> xs{-outer, -half, half, outer};
  if (conformal > 0.0) {
    xs.push_back(-half - conformal);
    xs.push_back(half + conformal);
  }

  CrossSectionGrid g;
  g.x_edges_ = mesh_axis(xs, policy.lateral_interface_step_nm, policy.lateral_bulk_step_nm,
                         policy.growth, policy.min_lines_per_layer);
  g.y_edges_ = mesh_axis(ys, policy.vertical_interface_step_nm, policy.vertical_bulk_step_nm,
                         policy.growth, policy.min_lines_per_layer);
  g.lambda_nm_ = lambda_nm;

  // Material ids keyed by the addresses of the strings the stack hands out.
  std::map<const std::string*, int> ids;
  std::map<std::string, int> by_name;
  auto id_of = [&](const std::string& name) {
    if (auto it = ids.find(&name); it != ids.end()) return it->second;
    int id;
    if (auto it = by_name.find(name); it != by_name.end()) {
      id = it->second;
    } else {
      id = static_cast<int>(g.material_names_.size());
      g.material_names_.push_back(name);
      bool core = false;
      for (const auto& l : stack.layers) core = core || (l.core && l.material == name);
      g.material_is_core_.push_back(core);
      by_name.emplace(name, id);
    }
    ids.emplace(&name, id);
    return id;
  };

  const int ns = policy.subsamples;
  const double weight = 1.0 / (ns * ns);
  g.offsets_.reserve(static_cast<std::size_t>(g.size()) + 1);
  g.offsets_.push_back(0);
  std::vector<double> counts;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      counts.assign(g.material_names_.size() + 8, 0.0);
      std::vector<int> touched;
      for (int a = 0; a < ns; ++a) {
        const double x = g.x_edges_[i] + (a + 0.5) / ns * g.dx(i);
        for (int b = 0; b < ns; ++b) {
          const double y = g.y_edges_[j] + (b + 0.5) / ns * g.dy(j);
          const int id = id_of(stack.material_at(x, y));
          if (static_cast<std::size_t>(id) >= counts.size()) counts.resize(id + 1, 0.0);
          if (counts[id] == 0.0) touched.push_back(id);
          counts[id] += weight;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int id : touched) g.fractions_.push_back({id, counts[id]});
      g.offsets_.push_back(static_cast<int>(g.fractions_.size()));
    }
  }

  evaluate_index(g.material_names_, g.material_is_core_, g.fractions_, g.offsets_, library,
                 lambda_nm, g.index_, g.cladding_index_);
  return g;
}

CrossSectionGrid at_wavelength(const CrossSectionGrid& grid, const MaterialLibrary& library,
                               double lambda_nm) {
  if (!grid.has_composition()) {
    throw GridError("grid has no material composition; cannot re-evaluate at a new wavelength");
  }
  CrossSectionGrid g = grid;
  g.lambda_nm_ = lambda_nm;
  evaluate_index(g.material_names_, g.material_is_core_, g.fractions_, g.offsets_, library,
                 lambda_nm, g.index_, g.cladding_index_);
  return g;
}

std::vector<double> d36_profile(const CrossSectionGrid& grid, const MaterialLibrary& library) {
  if (!grid.has_composition()) throw GridError("d36_profile needs a grid built from a stack");
  std::vector<double> d36_of;
  for (const auto& name : grid.material_names()) d36_of.push_back(library.find(name).d36_pm_per_volt);
  std::vector<double> out(static_cast<std::size_t>(grid.size()), 0.0);
  for (int c = 0; c < grid.size(); ++c) {
    double acc = 0.0;
    for (const auto& f : grid.composition(c)) acc += f.fraction * d36_of[f.material];
    out[c] = acc;
  }
  return out;
}

}  // namespace wgpair
