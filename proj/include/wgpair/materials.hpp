#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wgpair {

enum class IndexModelKind {
  kConstant,         // n
  kSellmeier,        // n^2 = 1 + sum B_i lambda^2 / (lambda^2 - C_i^2), lambda in um
  kSingleOscillator, // n^2 = 1 + E0 Ed / (E0^2 - E^2), photon energy E in eV
  kAfromowitz,       // modified single oscillator with band-edge log term
};

std::string_view to_string(IndexModelKind kind);

struct MaterialModel {
  std::string name;
  IndexModelKind kind = IndexModelKind::kConstant;
  std::vector<double> coefficients;
  double window_min_nm = 0.0;
  double window_max_nm = 0.0;
  std::optional<double> absorption_edge_nm;
  double d36_pm_per_volt = 0.0;

  bool in_window(double lambda_nm) const {
    return lambda_nm >= window_min_nm && lambda_nm <= window_max_nm;
  }
};

// Throws ValidityError when lambda is outside the model's window.
double refractive_index(const MaterialModel& material, double lambda_nm);

// Parses the key = value material file format (see docs/formats.md).
// `source` is only used in error messages.
MaterialModel parse_material(std::string_view text, std::string_view source = "<string>");
MaterialModel load_material(const std::filesystem::path& file);

// A vacuum stand-in, n == 1 everywhere.
MaterialModel identity_material(std::string name = "vacuum");

class MaterialLibrary {
 public:
  void add(MaterialModel material);
  // Loads every *.mat file in `dir`.
  static MaterialLibrary load_directory(const std::filesystem::path& dir);

  bool contains(std::string_view name) const;
  const MaterialModel& find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, MaterialModel, std::less<>> materials_;
};

struct Layer {
  std::string material;
  double thickness_nm = 0.0;
  bool core = false;
};

enum class CladdingKind {
  kConformal,    // deposited film of uniform thickness around the rib
  kPlanarizing,  // spin-on film filling everything up to its thickness
};

struct TopCladding {
  std::string material;
  double thickness_nm = 0.0;
  CladdingKind kind = CladdingKind::kConformal;
};

// Rib waveguide cross-section. Coordinates: x = 0 at the rib center,
// y = 0 at the substrate surface, layers listed bottom to top.
struct LayerStack {
  std::string substrate = "sio2";
  std::string superstrate = "air";
  std::vector<Layer> layers;
  double rib_width_nm = 0.0;
  double slab_thickness_nm = 0.0;  // residual unetched slab, 0 = fully etched
  std::optional<TopCladding> cladding;

  double total_thickness_nm() const;
  double thinnest_layer_nm() const;
  // Name of the material at (x, y) in nm.
  const std::string& material_at(double x_nm, double y_nm) const;
  // Every material name the stack references (substrate, layers, claddings).
  std::vector<std::string> referenced_materials() const;
};

// Checks thicknesses, a single contiguous core group and that every
// referenced material resolves in `library`. Throws ConfigError.
void validate(const LayerStack& stack, const MaterialLibrary& library);

}  // namespace wgpair
