#include "wgpair/materials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "wgpair/error.hpp"

namespace wgpair {

namespace {

// h*c in eV*nm
constexpr double kPhotonEnergyNumerator = 1239.8419843320026;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> parse_numbers(std::string_view value, std::string_view source,
                                  std::string_view key) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss{std::string(value)};
  while (std::getline(ss, token, ',')) {
    const std::string t = trim(token);
    if (t.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      throw ConfigError(std::string(source) + ": bad number '" + t + "' for key '" +
                        std::string(key) + "'");
    }
    out.push_back(v);
  }
  return out;
}

IndexModelKind parse_kind(std::string_view s, std::string_view source) {
  if (s == "constant") return IndexModelKind::kConstant;
  if (s == "sellmeier") return IndexModelKind::kSellmeier;
  if (s == "single_oscillator") return IndexModelKind::kSingleOscillator;
  if (s == "afromowitz") return IndexModelKind::kAfromowitz;
  throw ConfigError(std::string(source) + ": unknown model '" + std::string(s) + "'");
}

std::size_t expected_coefficients(IndexModelKind kind) {
  switch (kind) {
    case IndexModelKind::kConstant: return 1;
    case IndexModelKind::kSingleOscillator: return 2;
    case IndexModelKind::kAfromowitz: return 3;
    case IndexModelKind::kSellmeier: return 0;  // any even count
  }
  return 0;
}

double index_squared(const MaterialModel& m, double lambda_nm) {
  const auto& c = m.coefficients;
  switch (m.kind) {
    case IndexModelKind::kConstant:
      return c[0] * c[0];
    case IndexModelKind::kSellmeier: {
      const double l2 = (lambda_nm * 1e-3) * (lambda_nm * 1e-3);
      double n2 = 1.0;
      for (std::size_t i = 0; i + 1 < c.size(); i += 2) {
        n2 += c[i] * l2 / (l2 - c[i + 1] * c[i + 1]);
      }
      return n2;
    }
    case IndexModelKind::kSingleOscillator: {
      const double e = kPhotonEnergyNumerator / lambda_nm;
      const double e0 = c[0];
      const double ed = c[1];
      return 1.0 + e0 * ed / (e0 * e0 - e * e);
    }
    case IndexModelKind::kAfromowitz: {
      const double e = kPhotonEnergyNumerator / lambda_nm;
      const double e0 = c[0];
      const double ed = c[1];
      const double eg = c[2];
      const double eta = std::numbers::pi * ed / (2.0 * std::pow(e0, 3) * (e0 * e0 - eg * eg));
      const double e2 = e * e;
      return 1.0 + ed / e0 + ed * e2 / std::pow(e0, 3) +
             eta * e2 * e2 / std::numbers::pi *
                 std::log((2.0 * e0 * e0 - eg * eg - e2) / (eg * eg - e2));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string_view to_string(IndexModelKind kind) {
  switch (kind) {
    case IndexModelKind::kConstant: return "constant";
    case IndexModelKind::kSellmeier: return "sellmeier";
    case IndexModelKind::kSingleOscillator: return "single_oscillator";
    case IndexModelKind::kAfromowitz: return "afromowitz";
  }
  return "unknown";
}

double refractive_index(const MaterialModel& material, double lambda_nm) {
  if (!material.in_window(lambda_nm)) {
    std::ostringstream msg;
    msg << "material '" << material.name << "': wavelength " << lambda_nm
        << " nm outside validity window [" << material.window_min_nm << ", "
        << material.window_max_nm << "] nm";
    throw ValidityError(msg.str());
  }
  const double n2 = index_squared(material, lambda_nm);
  if (!(n2 >= 1.0) || !std::isfinite(n2)) {
    std::ostringstream msg;
    msg << "material '" << material.name << "': model gives n^2 = " << n2 << " at "
        << lambda_nm << " nm";
    throw ValidityError(msg.str());
  }
  return std::sqrt(n2);
}

MaterialModel parse_material(std::string_view text, std::string_view source) {
  MaterialModel m;
  std::set<std::string> seen;
  std::string line;
  std::stringstream in{std::string(text)};
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError(std::string(source) + ": duplicate key '" + key + "'");
    }
    if (key == "name") {
      m.name = value;
    } else if (key == "model") {
      m.kind = parse_kind(value, source);
    } else if (key == "coefficients") {
      m.coefficients = parse_numbers(value, source, key);
    } else if (key == "window_nm") {
      const auto w = parse_numbers(value, source, key);
      if (w.size() != 2 || !(w[0] < w[1])) {
        throw ConfigError(std::string(source) + ": window_nm needs 'min, max' with min < max");
      }
      m.window_min_nm = w[0];
      m.window_max_nm = w[1];
    } else if (key == "absorption_edge_nm") {
      const auto v = parse_numbers(value, source, key);
      if (v.size() != 1) throw ConfigError(std::string(source) + ": absorption_edge_nm");
      m.absorption_edge_nm = v[0];
    } else if (key == "d36_pm_per_volt") {
      const auto v = parse_numbers(value, source, key);
      if (v.size() != 1) throw ConfigError(std::string(source) + ": d36_pm_per_volt");
      m.d36_pm_per_volt = v[0];
    } else {
      throw ConfigError(std::string(source) + ": unknown key '" + key + "'");
    }
  }

  for (const char* required : {"name", "model", "coefficients", "window_nm"}) {
    if (!seen.contains(required)) {
      throw ConfigError(std::string(source) + ": missing key '" + required + "'");
    }
  }
  const std::size_t want = expected_coefficients(m.kind);
  const bool count_ok = m.kind == IndexModelKind::kSellmeier
                            ? (!m.coefficients.empty() && m.coefficients.size() % 2 == 0)
                            : m.coefficients.size() == want;
  if (!count_ok) {
    throw ConfigError(std::string(source) + ": wrong coefficient count for model '" +
                      std::string(to_string(m.kind)) + "'");
  }
  return m;
}

MaterialModel load_material(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open material file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_material(buffer.str(), file.string());
}

MaterialModel identity_material(std::string name) {
  MaterialModel m;
  m.name = std::move(name);
  m.kind = IndexModelKind::kConstant;
  m.coefficients = {1.0};
  m.window_min_nm = 0.0;
  m.window_max_nm = std::numeric_limits<double>::infinity();
  return m;
}

void MaterialLibrary::add(MaterialModel material) {
  if (materials_.contains(material.name)) {
    throw ConfigError("material '" + material.name + "' defined twice");
  }
  std::string key = material.name;
  materials_.emplace(std::move(key), std::move(material));
}

MaterialLibrary MaterialLibrary::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("material directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mat") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  MaterialLibrary lib;
  for (const auto& f : files) lib.add(load_material(f));
  return lib;
}

bool MaterialLibrary::contains(std::string_view name) const {
  return materials_.find(name) != materials_.end();
}

const MaterialModel& MaterialLibrary::find(std::string_view name) const {
  const auto it = materials_.find(name);
  if (it == materials_.end()) {
    throw ConfigError("unknown material '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::string> MaterialLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : materials_) out.push_back(k);
  return out;
}

double LayerStack::total_thickness_nm() const {
  double t = 0.0;
  for (const auto& l : layers) t += l.thickness_nm;
  return t;
}

double LayerStack::thinnest_layer_nm() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& l : layers) t = std::min(t, l.thickness_nm);
  if (slab_thickness_nm > 0.0) t = std::min(t, slab_thickness_nm);
  if (cladding) t = std::min(t, cladding->thickness_nm);
  return t;
}

const std::string& LayerStack::material_at(double x, double y) const {
  if (y < 0.0) return substrate;
  const double half = 0.5 * rib_width_nm;
  const double top = total_thickness_nm();
  const bool in_rib_column = std::abs(x) < half;
  const bool in_slab = y < slab_thickness_nm;
  if ((in_rib_column && y < top) || in_slab) {
    double z = 0.0;
    for (const auto& l : layers) {
      z += l.thickness_nm;
      if (y < z) return l.material;
    }
    return layers.back().material;
  }
  if (cladding) {
    const double t = cladding->thickness_nm;
    if (cladding->kind == CladdingKind::kPlanarizing) {
      if (y < t) return cladding->material;
    } else {
      const double floor = slab_thickness_nm;
      if (y < floor + t) return cladding->material;
      if (std::abs(x) < half + t && y < top + t) return cladding->material;
    }
  }
  return superstrate;
}

std::vector<std::string> LayerStack::referenced_materials() const {
  std::vector<std::string> out{substrate, superstrate};
  for (const auto& l : layers) out.push_back(l.material);
  if (cladding) out.push_back(cladding->material);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate(const LayerStack& stack, const MaterialLibrary& library) {
  if (stack.layers.empty()) throw ConfigError("stack has no layers");
  if (!(stack.rib_width_nm > 0.0)) throw ConfigError("rib_width_nm must be positive");
  if (stack.slab_thickness_nm < 0.0) throw ConfigError("slab_thickness_nm must be >= 0");
  if (stack.slab_thickness_nm >= stack.total_thickness_nm()) {
    throw ConfigError("slab_thickness_nm must be below the stack thickness");
  }
  for (const auto& l : stack.layers) {
    if (!(l.thickness_nm > 0.0)) {
      throw ConfigError("layer '" + l.material + "' has non-positive thickness");
    }
  }
  if (stack.cladding && !(stack.cladding->thickness_nm > 0.0)) {
    throw ConfigError("cladding thickness must be positive");
  }

  // Exactly one contiguous run of core layers.
  int groups = 0;
  bool prev = false;
  for (const auto& l : stack.layers) {
    if (l.core && !prev) ++groups;
    prev = l.core;
  }
  if (groups != 1) {
    throw ConfigError("stack must flag exactly one contiguous group of core layers (found " +
                      std::to_string(groups) + ")");
  }

  for (const auto& name : stack.referenced_materials()) {
    if (!library.contains(name)) throw ConfigError("stack references unknown material '" + name + "'");
  }
}

}  // namespace wgpair
