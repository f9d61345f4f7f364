#include "wgpair/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wgpair/error.hpp"

#ifndef WGPAIR_SOURCE_DIR
#define WGPAIR_SOURCE_DIR "."
#endif

namespace wgpair {

namespace {

using nlohmann::json;

// One JSON object; every key read is recorded so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(where(key) + ": must be finite");
  }
  void read(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    out = v.get<int>();
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }
  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = v.get<bool>();
  }
  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    out = v.get<std::string>();
  }
  void read(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Polarization parse_polarization(const std::string& s, const std::string& where) {
  if (s == "TE") return Polarization::kTE;
  if (s == "TM") return Polarization::kTM;
  throw ConfigError(where + ": polarization must be \"TE\" or \"TM\"");
}

LayerStack parse_stack(const json& j) {
  Section sec(j, "stack");
  LayerStack stack;
  sec.read("substrate", stack.substrate);
  sec.read("superstrate", stack.superstrate);
  sec.read("rib_width_nm", stack.rib_width_nm);
  sec.read("slab_thickness_nm", stack.slab_thickness_nm);
  if (!sec.has("layers") || !sec.at("layers").is_array()) throw ConfigError("stack.layers: expected an array");
  int k = 0;
  for (const auto& lj : sec.at("layers")) {
    Section ls(lj, "stack.layers[" + std::to_string(k++) + "]");
    Layer layer;
    ls.read("material", layer.material);
    ls.read("thickness_nm", layer.thickness_nm);
    ls.read("core", layer.core);
    ls.finish();
    stack.layers.push_back(layer);
  }
  if (sec.has("cladding") && !sec.at("cladding").is_null()) {
    Section cs(sec.at("cladding"), "stack.cladding");
    TopCladding c;
    std::string kind = "conformal";
    cs.read("material", c.material);
    cs.read("thickness_nm", c.thickness_nm);
    cs.read("kind", kind);
    cs.finish();
    if (kind == "conformal") c.kind = CladdingKind::kConformal;
    else if (kind == "planarizing") c.kind = CladdingKind::kPlanarizing;
    else throw ConfigError("stack.cladding.kind: expected \"conformal\" or \"planarizing\"");
    stack.cladding = c;
  }
  sec.finish();
  return stack;
}

ResolutionPolicy parse_mesh(const json& j) {
  Section sec(j, "mesh");
  ResolutionPolicy p;
  sec.read("vertical_interface_step_nm", p.vertical_interface_step_nm);
  sec.read("vertical_bulk_step_nm", p.vertical_bulk_step_nm);
  sec.read("lateral_interface_step_nm", p.lateral_interface_step_nm);
  sec.read("lateral_bulk_step_nm", p.lateral_bulk_step_nm);
  sec.read("growth", p.growth);
  sec.read("min_lines_per_layer", p.min_lines_per_layer);
  sec.read("lateral_margin_nm", p.lateral_margin_nm);
  sec.read("bottom_margin_nm", p.bottom_margin_nm);
  sec.read("top_margin_nm", p.top_margin_nm);
  sec.read("subsamples", p.subsamples);
  sec.finish();
  for (double v : {p.vertical_interface_step_nm, p.vertical_bulk_step_nm, p.lateral_interface_step_nm,
                   p.lateral_bulk_step_nm, p.lateral_margin_nm, p.bottom_margin_nm, p.top_margin_nm}) {
    positive(v, "mesh steps and margins");
  }
  if (!(p.growth >= 1.0)) throw ConfigError("mesh.growth must be >= 1");
  if (p.subsamples < 1) throw ConfigError("mesh.subsamples must be >= 1");
  return p;
}

DetectionSetup parse_detection(const json& j) {
  Section sec(j, "pairs.detection");
  DetectionSetup d;
  std::string split = "probabilistic";
  sec.read("pump_power_internal_mw", d.pump_power_internal_mw);
  sec.read("pair_rate_per_mw", d.pair_rate_per_mw);
  sec.read("filter_transmission", d.filter_transmission);
  sec.read("splitter_ratio", d.splitter_ratio);
  sec.read("split", split);
  sec.read("eta_det1", d.eta_det1);
  sec.read("eta_det2", d.eta_det2);
  sec.read("biphoton_coupling", d.biphoton_coupling);
  sec.read("t_res_ps", d.t_res_ps);
  sec.read("dark_rate1_hz", d.dark_rate1_hz);
  sec.read("dark_rate2_hz", d.dark_rate2_hz);
  sec.read("duration_s", d.duration_s);
  sec.read("coincidence_half_window", d.coincidence_half_window);
  sec.read("histogram_half_range_ps", d.histogram_half_range_ps);
  sec.read("shards", d.shards);
  sec.finish();
  if (split == "probabilistic") d.split = SplitModel::kProbabilistic;
  else if (split == "deterministic") d.split = SplitModel::kDeterministic;
  else throw ConfigError("pairs.detection.split: expected \"probabilistic\" or \"deterministic\"");
  d.validate();
  return d;
}

PairsSection parse_pairs(const json& j) {
  Section sec(j, "pairs");
  PairsSection p;
  if (sec.has("detection")) p.detection = parse_detection(sec.at("detection"));
  std::string correction = "none";
  sec.read("lambda_pump_nm", p.lambda_pump_nm);
  sec.read("correction", correction);
  sec.read("herald_arm", p.herald_arm);
  sec.read("herald_corrections", p.herald_corrections);
  if (sec.has("franson")) {
    Section fs(sec.at("franson"), "pairs.franson");
    FransonSetup f;
    f.detection = p.detection;
    f.detection.split = SplitModel::kDeterministic;
    fs.read("delay_ps", f.delay_ps);
    fs.read("mismatch_ps", f.mismatch_ps);
    fs.read("filter_bandwidth_pm", f.filter_bandwidth_pm);
    fs.read("center_nm", f.center_nm);
    fs.read("phi1", f.phi1);
    fs.read("phi2", f.phi2);
    fs.read("duration_s", f.detection.duration_s);
    fs.read("dark_rate1_hz", f.detection.dark_rate1_hz);
    fs.read("dark_rate2_hz", f.detection.dark_rate2_hz);
    fs.finish();
    positive(f.delay_ps, "pairs.franson.delay_ps");
    positive(f.filter_bandwidth_pm, "pairs.franson.filter_bandwidth_pm");
    if (f.phi2.size() < 2) throw ConfigError("pairs.franson.phi2: need at least two phase settings");
    f.detection.validate();
    p.franson = f;
  }
  sec.finish();
  if (correction == "none") p.correction = SplitCorrection::kNone;
  else if (correction == "probabilistic_split") p.correction = SplitCorrection::kProbabilisticSplit;
  else throw ConfigError("pairs.correction: expected \"none\" or \"probabilistic_split\"");
  positive(p.lambda_pump_nm, "pairs.lambda_pump_nm");
  if (p.herald_arm != 1 && p.herald_arm != 2) throw ConfigError("pairs.herald_arm must be 1 or 2");
  for (double c : p.herald_corrections) {
    if (!(c > 0.0 && c <= 1.0)) throw ConfigError("pairs.herald_corrections must lie in (0, 1]");
  }
  return p;
}

}  // namespace

void ProjectConfig::apply_runtime(std::uint64_t new_seed, int new_threads) {
  if (new_threads < 1) throw ConfigError("threads must be >= 1");
  seed = new_seed;
  threads = new_threads;
  pairs.detection.rng_seed = seed;
  pairs.detection.threads = threads;
  if (pairs.franson) {
    pairs.franson->detection.rng_seed = seed;
    pairs.franson->detection.threads = threads;
  }
}

PhaseMatchOptions ProjectConfig::phasematch_options() const {
  PhaseMatchOptions o;
  o.scan_step_nm = phasematch.scan_step_nm;
  o.tolerance = phasematch.tolerance;
  o.threads = threads;
  o.policy = mesh;
  return o;
}

const LayerStack& ProjectConfig::require_stack() const {
  if (!stack) throw ConfigError("config has no \"stack\" section");
  return *stack;
}

ProjectConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section sec(root, "config");
  ProjectConfig cfg;
  cfg.materials_dir = default_materials_dir();

  std::string materials_dir;
  std::string output_dir;
  sec.read("materials_dir", materials_dir);
  sec.read("output_dir", output_dir);
  sec.read("seed", cfg.seed);
  sec.read("threads", cfg.threads);
  if (!materials_dir.empty()) cfg.materials_dir = resolve(base_dir, materials_dir);
  if (!output_dir.empty()) cfg.output_dir = resolve(base_dir, output_dir);

  if (sec.has("stack")) cfg.stack = parse_stack(sec.at("stack"));
  if (sec.has("mesh")) cfg.mesh = parse_mesh(sec.at("mesh"));

  if (sec.has("modes")) {
    Section ms(sec.at("modes"), "modes");
    std::string pol = "TE";
    ms.read("lambda_nm", cfg.modes.lambda_nm);
    ms.read("polarization", pol);
    ms.read("count", cfg.modes.count);
    ms.finish();
    cfg.modes.polarization = parse_polarization(pol, "modes.polarization");
    positive(cfg.modes.lambda_nm, "modes.lambda_nm");
    if (cfg.modes.count < 1) throw ConfigError("modes.count must be >= 1");
  }

  if (sec.has("phasematch")) {
    Section ps(sec.at("phasematch"), "phasematch");
    std::vector<double> window{cfg.phasematch.window_lo_nm, cfg.phasematch.window_hi_nm};
    ps.read("window_nm", window);
    ps.read("scan_step_nm", cfg.phasematch.scan_step_nm);
    ps.read("tolerance", cfg.phasematch.tolerance);
    ps.finish();
    if (window.size() != 2 || !(window[1] > window[0]) || !(window[0] > 0.0)) {
      throw ConfigError("phasematch.window_nm: expected [lo, hi] with 0 < lo < hi");
    }
    cfg.phasematch.window_lo_nm = window[0];
    cfg.phasematch.window_hi_nm = window[1];
    positive(cfg.phasematch.scan_step_nm, "phasematch.scan_step_nm");
    positive(cfg.phasematch.tolerance, "phasematch.tolerance");
  }

  if (sec.has("conversion")) {
    Section cs(sec.at("conversion"), "conversion");
    auto& c = cfg.conversion;
    cs.read("length_mm", c.length_mm);
    cs.read("detuning_span_nm", c.detuning_span_nm);
    cs.read("detuning_step_nm", c.detuning_step_nm);
    cs.read("detuning_resample_nm", c.detuning_resample_nm);
    cs.read("spectrum_samples", c.spectrum_samples);
    cs.read("spectrum_span_fwhm", c.spectrum_span_fwhm);
    if (cs.has("loss")) {
      Section ls(cs.at("loss"), "conversion.loss");
      ls.read("fh_db_per_cm", c.loss.fh_db_per_cm);
      ls.read("sh_db_per_cm", c.loss.sh_db_per_cm);
      ls.finish();
      if (c.loss.fh_db_per_cm < 0.0 || c.loss.sh_db_per_cm < 0.0) throw ConfigError("conversion.loss must be >= 0");
    }
    cs.finish();
    positive(c.length_mm, "conversion.length_mm");
    positive(c.detuning_span_nm, "conversion.detuning_span_nm");
    positive(c.detuning_step_nm, "conversion.detuning_step_nm");
    positive(c.detuning_resample_nm, "conversion.detuning_resample_nm");
    positive(c.spectrum_span_fwhm, "conversion.spectrum_span_fwhm");
    if (c.spectrum_samples < 3) throw ConfigError("conversion.spectrum_samples must be >= 3");
  }

  if (sec.has("pairs")) cfg.pairs = parse_pairs(sec.at("pairs"));

  if (sec.has("lossfit")) {
    Section ls(sec.at("lossfit"), "lossfit");
    LossFitSection lf;
    std::string csv;
    ls.read("cutback_csv", csv);
    ls.read("width_guess_nm", lf.decompose.width_guess_nm);
    double center = 0.0;
    ls.read("center_guess_nm", center);
    if (center > 0.0) lf.decompose.center_guess_nm = center;
    ls.read("max_evaluations", lf.decompose.max_evaluations);
    ls.read("restarts", lf.decompose.restarts);
    ls.finish();
    if (csv.empty()) throw ConfigError("lossfit.cutback_csv is required");
    lf.cutback_csv = resolve(base_dir, csv);
    positive(lf.decompose.width_guess_nm, "lossfit.width_guess_nm");
    cfg.lossfit = lf;
  }

  if (sec.has("budget")) {
    Section bs(sec.at("budget"), "budget");
    auto& b = cfg.budget;
    bs.read("mu", b.mu);
    bs.read("t_res_ps", b.t_res_ps);
    bs.read("spectrum_fwhm_thz", b.spectrum_fwhm_thz);
    bs.read("passband_ghz", b.passband_ghz);
    bs.read("spacing_ghz", b.spacing_ghz);
    bs.read("rate_per_mw", b.rate_per_mw);
    bs.read("center_nm", b.center_nm);
    bs.finish();
    if (b.mu < 0.0) throw ConfigError("budget.mu must be >= 0");
    for (double v : {b.t_res_ps, b.spectrum_fwhm_thz, b.passband_ghz, b.spacing_ghz, b.rate_per_mw, b.center_nm}) {
      positive(v, "budget parameters");
    }
    if (b.passband_ghz > b.spacing_ghz) throw ConfigError("budget.passband_ghz exceeds spacing_ghz");
  }
  sec.finish();

  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  cfg.apply_runtime(cfg.seed, cfg.threads);

  if (cfg.stack) {
    MaterialLibrary lib = MaterialLibrary::load_directory(cfg.materials_dir);
    validate(*cfg.stack, lib);
  }
  return cfg;
}

ProjectConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ProjectConfig cfg = parse_config(ss.str(), file.parent_path().empty() ? "." : file.parent_path());
  cfg.source = file;
  return cfg;
}

std::filesystem::path resolve_config_path(const std::string& flag) {
  const char* env = std::getenv(kConfigDirEnv);
  const std::filesystem::path dir = env && *env ? std::filesystem::path(env) : std::filesystem::path();
  if (flag.empty()) {
    if (dir.empty()) {
      throw ConfigError(std::string("no --config given and ") + kConfigDirEnv + " is not set");
    }
    return dir / kDefaultConfigName;
  }
  std::filesystem::path p(flag);
  if (p.is_relative() && !std::filesystem::exists(p) && !dir.empty() && std::filesystem::exists(dir / p)) {
    return dir / p;
  }
  return p;
}

std::filesystem::path default_materials_dir() {
  return std::filesystem::path(WGPAIR_SOURCE_DIR) / "data" / "materials";
}

}  // namespace wgpair
