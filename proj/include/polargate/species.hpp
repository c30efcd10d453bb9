#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polargate {

/// Constants of one molecular qubit implementation, SI units throughout.
struct SpeciesParams {
  std::string label;
  double d10 = 0.0;        // transition dipole, C m
  double mass = 0.0;       // kg
  double omega_mol = 0.0;  // qubit transition, rad/s
  double b0_gauss = 0.0;   // bias field, informational
  std::optional<double> magnetic_sensitivity_khz_per_g;

  void validate() const;
};

/// Versioned key-value table of species. Sections are `[Label]`, entries
/// `key = value`, `#` starts a comment.
class SpeciesTable {
 public:
  static constexpr int kFormatVersion = 1;

  static SpeciesTable parse(std::string_view text);
  static SpeciesTable load(const std::filesystem::path& path);
  /// Table compiled into the library; identical to data/species.txt.
  static const SpeciesTable& builtin();

  /// Case-insensitive lookup; throws ConfigError for unknown labels.
  const SpeciesParams& get(std::string_view label) const;
  bool contains(std::string_view label) const;
  std::vector<std::string> labels() const;
  int format_version() const { return version_; }

 private:
  int version_ = 0;
  std::map<std::string, SpeciesParams> entries_;  // keyed by lowercase label
};

}  // namespace polargate
