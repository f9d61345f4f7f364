// wgpair command-line front end. Every subcommand reads one JSON config and
// prints its result on stdout (JSON, or the main table as CSV).
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgpair/acceptance.hpp"
#include "wgpair/config.hpp"
#include "wgpair/conversion.hpp"
#include "wgpair/error.hpp"
#include "wgpair/grid.hpp"
#include "wgpair/lossfit.hpp"
#include "wgpair/modesolver.hpp"
#include "wgpair/pairstats.hpp"
#include "wgpair/phasematch.hpp"
#include "wgpair/qkdbudget.hpp"
#include "wgpair/report.hpp"

namespace fs = std::filesystem;
using namespace wgpair;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitMismatch = 4;

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "json";
  std::vector<int> only;
};

// One CSV artifact: file name under --out and the writer.
struct Table {
  std::string file;
  std::function<void(std::ostream&)> write;
};

struct Output {
  Json json;
  std::vector<Table> tables;  // the first one goes to stdout with --format csv
};

class Run {
 public:
  Run(const Flags& f, std::string sub) : flags_(f), sub_(std::move(sub)) {
    cfg_ = load_config(resolve_config_path(f.config));
    const std::uint64_t seed = f.seed ? f.seed : cfg_.seed;
    const int threads = f.threads ? f.threads : cfg_.threads;
    cfg_.apply_runtime(seed, threads);
  }

  const ProjectConfig& cfg() const { return cfg_; }
  const MaterialLibrary& library() {
    if (!lib_) lib_ = std::make_unique<MaterialLibrary>(MaterialLibrary::load_directory(cfg_.materials_dir));
    return *lib_;
  }

  Json header() const {
    Json j;
    j["metadata"] = metadata(sub_, cfg_.seed);
    j["config"] = cfg_.source.string();
    return j;
  }

  void emit(const Output& o) const {
    const fs::path dir = flags_.out.empty() ? cfg_.output_dir : fs::path(flags_.out);
    if (!dir.empty()) {
      fs::create_directories(dir);
      std::ofstream(dir / (sub_ + ".json")) << dump(o.json);
      for (const auto& t : o.tables) {
        std::ofstream f(dir / t.file);
        t.write(f);
      }
    }
    if (flags_.format == "csv" && !o.tables.empty()) {
      o.tables.front().write(std::cout);
    } else {
      std::cout << dump(o.json);
    }
  }

  PhaseMatchResult require_match(const PhaseMatchSearch& s) const {
    if (!s.match) {
      throw SolverError("no phase matching between " + format_number(cfg_.phasematch.window_lo_nm) + " and " +
                            format_number(cfg_.phasematch.window_hi_nm) + " nm",
                        0, 0.0);
    }
    return *s.match;
  }

  PhaseMatchSearch search() {
    const auto& pm = cfg_.phasematch;
    return find_phase_matching(cfg_.require_stack(), library(), pm.window_lo_nm, pm.window_hi_nm,
                               cfg_.phasematch_options());
  }

  const Flags& flags() const { return flags_; }

 private:
  Flags flags_;
  std::string sub_;
  ProjectConfig cfg_;
  std::unique_ptr<MaterialLibrary> lib_;
};

struct Device {
  PhaseMatchResult match;
  ModeSolution fh;
  ModeSolution sh;
  OverlapResult overlap;
  double eta_shg = 0.0;
};

Device device_at_match(Run& run) {
  Device d;
  d.match = run.require_match(run.search());
  MismatchEvaluator ev(run.cfg().require_stack(), run.library(), run.cfg().phasematch_options());
  d.fh = ev.fundamental_mode(d.match.lambda_pump_nm);
  d.sh = ev.second_harmonic_mode(0.5 * d.match.lambda_pump_nm);
  d.overlap = overlap_gamma(d.fh, d.sh, run.library());
  d.eta_shg = shg_efficiency(d.overlap.gamma_per_volt, d.match.lambda_pump_nm, d.fh.n_eff);
  return d;
}

Output cmd_modes(Run& run) {
  const auto& m = run.cfg().modes;
  auto grid = std::make_shared<const CrossSectionGrid>(
      build_grid(run.cfg().require_stack(), run.library(), m.lambda_nm, run.cfg().mesh));
  auto modes = std::make_shared<std::vector<ModeSolution>>(
      solve_modes(grid, m.polarization, m.count, SolverOptions{}));
  if (modes->empty()) throw SolverError("no guided mode at " + format_number(m.lambda_nm) + " nm", 0, 0.0);
  Output o{run.header(), {}};
  Json list = Json::array();
  for (std::size_t k = 0; k < modes->size(); ++k) {
    Json mj = to_json((*modes)[k]);
    const std::string file = std::string("fields_") + to_string(m.polarization) + std::to_string(k) + ".csv";
    mj["fields_csv"] = file;
    list.push_back(mj);
    o.tables.push_back({file, [modes, k](std::ostream& s) { write_fields_csv(s, (*modes)[k]); }});
  }
  o.json["grid"] = {{"nx", grid->nx()}, {"ny", grid->ny()}, {"lambda_nm", m.lambda_nm}};
  o.json["modes"] = list;
  return o;
}

Output cmd_phasematch(Run& run) {
  auto s = std::make_shared<PhaseMatchSearch>(run.search());
  Output o{run.header(), {}};
  o.json["phasematch"] = to_json(*s);
  o.tables.push_back({"scan.csv", [s](std::ostream& out) { write_scan_csv(out, s->scan); }});
  return o;
}

// Exact solves every detuning_step_nm, linearly resampled for the sinc^2.
std::vector<MismatchSample> detuning_samples(Run& run, double center_nm) {
  const auto& c = run.cfg().conversion;
  MismatchEvaluator ev(run.cfg().require_stack(), run.library(), run.cfg().phasematch_options());
  std::vector<double> lambdas;
  const int n = static_cast<int>(std::ceil(c.detuning_span_nm / c.detuning_step_nm - 1e-9));
  for (int k = -n; k <= n; ++k) lambdas.push_back(center_nm + k * c.detuning_step_nm);
  const auto coarse = ev.scan(lambdas);
  std::vector<MismatchSample> fine;
  const int m = static_cast<int>(std::llround((lambdas.back() - lambdas.front()) / c.detuning_resample_nm));
  std::size_t seg = 0;
  for (int k = 0; k <= m; ++k) {
    const double l = std::min(lambdas.front() + k * c.detuning_resample_nm, lambdas.back());
    while (seg + 2 < coarse.size() && l > coarse[seg + 1].lambda_nm) ++seg;
    const auto& a = coarse[seg];
    const auto& b = coarse[seg + 1];
    const double t = (l - a.lambda_nm) / (b.lambda_nm - a.lambda_nm);
    MismatchSample s;
    s.lambda_nm = l;
    s.n_te = a.n_te + t * (b.n_te - a.n_te);
    s.n_tm_half = a.n_tm_half + t * (b.n_tm_half - a.n_tm_half);
    s.delta = a.delta + t * (b.delta - a.delta);
    fine.push_back(s);
  }
  return fine;
}

Output cmd_shg(Run& run) {
  const Device d = device_at_match(run);
  const auto& c = run.cfg().conversion;
  auto curve = std::make_shared<DetuningCurve>(
      detuning_curve(detuning_samples(run, d.match.lambda_pump_nm), c.length_mm, c.loss));
  Output o{run.header(), {}};
  o.json["lambda_pump_nm"] = d.match.lambda_pump_nm;
  o.json["n_eff_fh"] = d.fh.n_eff;
  o.json["n_eff_sh"] = d.sh.n_eff;
  o.json["overlap"] = to_json(d.overlap);
  o.json["eta_shg_percent_per_w_mm2"] = d.eta_shg;
  o.json["length_mm"] = c.length_mm;
  o.json["loss_factor"] = curve->amplitude;
  o.json["detuning_fwhm_nm"] = curve_fwhm(curve->points);
  o.tables.push_back({"detuning.csv", [curve](std::ostream& s) {
                        write_curve_csv(s, curve->points, "lambda_nm", "relative_power");
                      }});
  return o;
}

Output cmd_spdc(Run& run) {
  const Device d = device_at_match(run);
  const auto& c = run.cfg().conversion;
  const double lp = d.match.lambda_pump_nm;
  const double beta2 = gvd_at(run.cfg().require_stack(), run.library(), lp, Polarization::kTE,
                              run.cfg().phasematch_options());
  const double coef = bandwidth_law(beta2);
  const SpdcEfficiency eff = spdc_efficiency(d.eta_shg, lp, coef, c.length_mm);
  auto spec = std::make_shared<BiphotonSpectrum>(
      biphoton_spectrum(beta2, c.length_mm, lp, c.spectrum_samples, c.spectrum_span_fwhm));
  Output o{run.header(), {}};
  o.json["lambda_pump_nm"] = lp;
  o.json["eta_shg_percent_per_w_mm2"] = d.eta_shg;
  o.json["beta2_s2_per_m"] = beta2;
  o.json["bandwidth_coefficient_thz_sqrt_mm"] = coef;
  o.json["length_mm"] = c.length_mm;
  o.json["efficiency"] = to_json(eff);
  o.json["spectrum"] = to_json(*spec);
  o.tables.push_back({"spectrum.csv", [spec](std::ostream& s) { write_spectrum_csv(s, *spec); }});
  return o;
}

Output cmd_pairs(Run& run) {
  const auto& p = run.cfg().pairs;
  auto sim = std::make_shared<PairSimulation>(simulate_counts(p.detection));
  Output o{run.header(), {}};
  o.json["setup"] = to_json(p.detection);
  o.json["counts"] = to_json(sim->counts);
  o.json["g2"] = to_json(sim->histogram);
  o.json["expected"] = to_json(expected_counts(p.detection));
  o.json["reconstruction"] = to_json(
      reconstruct_internal_rate(sim->counts, p.detection.pump_power_internal_mw, p.lambda_pump_nm, p.correction));
  o.json["reconstruction"]["true_generated_rate_hz"] = p.detection.pair_rate_hz();
  o.json["heralding"] = to_json(heralding_efficiency(sim->counts, p.herald_arm, p.herald_corrections));
  o.json["heralding"]["arm"] = p.herald_arm;
  o.json["warnings"] = sim->warnings;
  o.tables.push_back({"g2.csv", [sim](std::ostream& s) { write_g2_csv(s, sim->histogram); }});
  if (p.franson) {
    auto fr = std::make_shared<FransonResult>(franson_scan(*p.franson));
    o.json["franson"] = to_json(*fr);
    o.tables.push_back({"franson.csv", [fr](std::ostream& s) { write_franson_csv(s, *fr); }});
  }
  return o;
}

Output cmd_fit_loss(Run& run) {
  if (!run.cfg().lossfit) throw ConfigError("config has no \"lossfit\" section");
  const auto& lf = *run.cfg().lossfit;
  const CutbackDataset data = load_cutback_csv(lf.cutback_csv);
  auto rows = std::make_shared<std::vector<CutbackResult>>();
  for (double l : dataset_wavelengths(data)) rows->push_back(cutback_regression(data, l));
  Output o{run.header(), {}};
  o.json["polarization"] = data.polarization;
  o.json["cladding"] = data.cladding;
  Json table = Json::array();
  for (const auto& r : *rows) table.push_back(to_json(r));
  o.json["cutback"] = table;
  std::shared_ptr<LossDecomposition> fit;
  if (rows->size() >= 8) {
    fit = std::make_shared<LossDecomposition>(decompose_spectrum(loss_spectrum(data), lf.decompose));
    o.json["decomposition"] = to_json(*fit);
    const auto onset = absorption_onset(*fit, rows->front().lambda_nm, rows->back().lambda_nm);
    o.json["decomposition"]["absorption_onset_nm"] = onset ? Json(*onset) : Json(nullptr);
  } else {
    o.json["decomposition"] = nullptr;
  }
  o.tables.push_back({"loss.csv", [rows, fit](std::ostream& s) { write_loss_csv(s, *rows, fit.get()); }});
  return o;
}

Output cmd_budget(Run& run) {
  auto b = std::make_shared<BudgetResult>(compute_budget(run.cfg().budget));
  const auto& in = run.cfg().budget;
  Output o{run.header(), {}};
  o.json["inputs"] = {{"mu", in.mu},
                      {"t_res_ps", in.t_res_ps},
                      {"spectrum_fwhm_thz", in.spectrum_fwhm_thz},
                      {"passband_ghz", in.passband_ghz},
                      {"spacing_ghz", in.spacing_ghz},
                      {"rate_per_mw", in.rate_per_mw},
                      {"center_nm", in.center_nm}};
  o.json["budget"] = to_json(*b);
  o.tables.push_back({"channels.csv", [b](std::ostream& s) { write_channels_csv(s, *b); }});
  return o;
}

int cmd_repro(Run& run) {
  AcceptanceOptions ao;
  ao.materials_dir = run.cfg().materials_dir;
  ao.threads = run.cfg().threads;
  ao.seed = run.cfg().seed;
  ao.only.insert(run.flags().only.begin(), run.flags().only.end());
  ao.device_stack = run.cfg().stack;
  ao.mesh = run.cfg().mesh;
  ao.window_lo_nm = run.cfg().phasematch.window_lo_nm;
  ao.window_hi_nm = run.cfg().phasematch.window_hi_nm;
  auto results = std::make_shared<std::vector<CriterionResult>>();
  bool all = true;
  Output o{run.header(), {}};
  Json list = Json::array();
  Json timings = Json::object();
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!ao.only.empty() && !ao.only.count(id)) continue;
    results->push_back(run_criterion(id, ao));
    const auto& r = results->back();
    std::cerr << format_line(r) << std::endl;
    all = all && r.pass;
    Json values = Json::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"values", values}});
    timings[std::to_string(r.id)] = r.seconds;
  }
  o.json["metadata"]["seconds"] = timings;
  o.json["criteria"] = list;
  o.json["all_pass"] = all;
  o.tables.push_back({"acceptance.csv", [results](std::ostream& s) {
                        s << "id,pass,title,detail\n";
                        for (const auto& r : *results) {
                          s << r.id << ',' << (r.pass ? "PASS" : "FAIL") << ",\"" << r.title << "\",\"" << r.detail
                            << "\"\n";
                        }
                      }});
  run.emit(o);
  return all ? 0 : kExitMismatch;
}

int fail(const std::string& type, const std::string& message, int code) {
  std::cout << dump(error_json(type, message, code));
  std::cerr << "wgpair: " << message << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waveguide pair-source modelling: modes, phase matching, conversion, pair statistics, loss, budget"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config,
                 std::string("JSON config (default: $") + kConfigDirEnv + "/" + kDefaultConfigName + ")");
  app.add_option("--out", flags.out, "directory for the JSON report and CSV tables");
  app.add_option("--seed", flags.seed, "RNG seed override (0 keeps the config value)");
  app.add_option("--threads", flags.threads, "worker threads override")->check(CLI::NonNegativeNumber);
  app.add_option("--format", flags.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));

  using Handler = std::function<Output(Run&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> subs{
      {"modes", "solve guided modes and dump their fields", cmd_modes},
      {"phasematch", "scan the FH/SH index mismatch and locate the root", cmd_phasematch},
      {"shg", "SHG efficiency and detuning curve at phase matching", cmd_shg},
      {"spdc", "pair generation efficiency and biphoton spectrum", cmd_spdc},
      {"pairs", "Monte Carlo counting, g2 and rate reconstruction", cmd_pairs},
      {"fit-loss", "cutback regression and absorption decomposition", cmd_fit_loss},
      {"budget", "pump power and channel plan for a target mu", cmd_budget},
  };
  for (const auto& [name, help, fn] : subs) app.add_subcommand(name, help);
  auto* repro = app.add_subcommand("repro", "evaluate the acceptance table");
  repro->add_option("--only", flags.only, "criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitConfig);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Run run(flags, name);
    if (name == "repro") return cmd_repro(run);
    for (const auto& [sub, help, fn] : subs) {
      if (sub == name) run.emit(fn(run));
    }
    return 0;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const FitError& e) {
    return fail("fit", e.what(), kExitCompute);
  } catch (const SolverError& e) {
    return fail("solver", e.what(), kExitCompute);
  } catch (const std::exception& e) {
    return fail("computation", e.what(), kExitCompute);
  }
}
