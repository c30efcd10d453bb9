#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "polargate/analysis.hpp"
#include "polargate/grape.hpp"
#include "polargate/motional.hpp"
#include "polargate/propagation.hpp"

namespace polargate {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double value);

/// Comma-separated table with LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

CsvTable scan_csv(const std::vector<ErrorScanPoint>& scan);       // delta_err_hz,fidelity
CsvTable map_csv(const FidelityMap& map);                          // delta_err_hz,f_omega,fidelity
CsvTable spectrum_csv(const SpectrumScan& scan);                   // delta_hz,e1_hz..e4_hz
CsvTable gap_minima_csv(const SpectrumScan& scan);                 // delta_hz,refined_hz,gap_hz,pair
CsvTable matrix_elements_csv(const TrapConfig& trap, double d10);  // full exchange table, Hz

/// Block phases per map point, same ordering as map_csv rows.
nlohmann::json block_phase_sidecar(const MotionalMap& map);

/// Writes JSON with two-space indentation and a trailing LF.
void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

/// Provenance record written next to every output file.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string version = POLARGATE_VERSION;
  std::vector<std::string> outputs;
  double wall_clock_s = 0.0;

  nlohmann::json to_json() const;
  /// Manifest path for an output file: `<output>.manifest.json`.
  static std::filesystem::path path_for(const std::filesystem::path& output);
  void save_next_to(const std::filesystem::path& output) const;
};

}  // namespace polargate
