#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wgpair/grid.hpp"
#include "wgpair/materials.hpp"

namespace wgpair {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> values;
};

struct AcceptanceOptions {
  std::filesystem::path materials_dir;  // empty: shipped materials
  int threads = 1;
  std::uint64_t seed = 1;
  std::set<int> only;  // empty: all
  std::optional<LayerStack> device_stack;  // default: reference_stack(kResist)
  ResolutionPolicy mesh{};
  double window_lo_nm = 1500.0;
  double window_hi_nm = 1700.0;
};

enum class ReferenceCladding { kBare, kSio2_100, kSio2_200, kResist };

// InGaP / Al0.2GaAs / InGaP rib, 1.6 um wide, with one of the top claddings
// compared in the cladding study.
LayerStack reference_stack(ReferenceCladding cladding);

inline constexpr int kCriterionCount = 11;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

// "PASS  [ 3] title : detail"
std::string format_line(const CriterionResult& r);

}  // namespace wgpair
