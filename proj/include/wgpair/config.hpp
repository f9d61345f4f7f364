#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wgpair/conversion.hpp"
#include "wgpair/grid.hpp"
#include "wgpair/lossfit.hpp"
#include "wgpair/materials.hpp"
#include "wgpair/modesolver.hpp"
#include "wgpair/pairstats.hpp"
#include "wgpair/phasematch.hpp"
#include "wgpair/qkdbudget.hpp"

namespace wgpair {

// Environment variable naming the directory searched for configs.
inline constexpr const char* kConfigDirEnv = "WGPAIR_CONFIG_DIR";
inline constexpr const char* kDefaultConfigName = "device.json";

struct ModesSection {
  double lambda_nm = 1600.0;
  Polarization polarization = Polarization::kTE;
  int count = 1;
};

struct PhaseMatchSection {
  double window_lo_nm = 1500.0;
  double window_hi_nm = 1700.0;
  double scan_step_nm = 5.0;
  double tolerance = 1e-6;
};

struct ConversionSection {
  double length_mm = 1.44;
  double detuning_span_nm = 10.0;    // each side of the phase-matching point
  double detuning_step_nm = 1.0;     // spacing of exact mismatch solves
  double detuning_resample_nm = 0.01;
  PropagationLoss loss;
  int spectrum_samples = 801;
  double spectrum_span_fwhm = 4.0;
};

struct PairsSection {
  DetectionSetup detection;
  double lambda_pump_nm = 804.0;
  SplitCorrection correction = SplitCorrection::kNone;
  int herald_arm = 1;
  std::vector<double> herald_corrections;
  std::optional<FransonSetup> franson;
};

struct LossFitSection {
  std::filesystem::path cutback_csv;
  DecomposeOptions decompose;
};

struct ProjectConfig {
  std::filesystem::path source;  // config file, empty for in-memory text
  std::filesystem::path materials_dir;
  std::optional<LayerStack> stack;
  ResolutionPolicy mesh;
  ModesSection modes;
  PhaseMatchSection phasematch;
  ConversionSection conversion;
  PairsSection pairs;
  std::optional<LossFitSection> lossfit;
  BudgetInputs budget;
  std::filesystem::path output_dir;  // empty: no files unless --out is given
  std::uint64_t seed = 1;
  int threads = 1;

  // Applies seed and threads to the sections that use them.
  void apply_runtime(std::uint64_t new_seed, int new_threads);
  PhaseMatchOptions phasematch_options() const;
  const LayerStack& require_stack() const;  // ConfigError when absent
};

// JSON config; relative paths resolve against base_dir. Unknown keys and
// type mismatches raise ConfigError.
ProjectConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");
ProjectConfig load_config(const std::filesystem::path& file);

// --config value -> file: empty means <$WGPAIR_CONFIG_DIR>/device.json; a
// relative path that does not exist is retried inside that directory.
std::filesystem::path resolve_config_path(const std::string& flag);

// Materials shipped with the source tree.
std::filesystem::path default_materials_dir();

}  // namespace wgpair
