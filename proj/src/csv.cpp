#include "polargate/csv.hpp"

#include <charconv>
#include <fstream>

#include "polargate/errors.hpp"
#include "polargate/units.hpp"

namespace polargate {

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buffer, end);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw ConfigError("CsvTable: header is empty");
  add_row(header);
  rows_ = 0;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ConfigError("CsvTable: wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  ++rows_;
}

void CsvTable::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text_;
}

CsvTable scan_csv(const std::vector<ErrorScanPoint>& scan) {
  CsvTable t({"delta_err_hz", "fidelity"});
  for (const auto& p : scan) t.add_row({p.delta_err_hz, p.fidelity});
  return t;
}

CsvTable map_csv(const FidelityMap& map) {
  CsvTable t({"delta_err_hz", "f_omega", "fidelity"});
  for (std::size_t i = 0; i < map.f_omega.size(); ++i) {
    for (std::size_t k = 0; k < map.delta_err_hz.size(); ++k) {
      t.add_row({map.delta_err_hz[k], map.f_omega[i], map.at(i, k)});
    }
  }
  return t;
}

CsvTable spectrum_csv(const SpectrumScan& scan) {
  CsvTable t({"delta_hz", "e1_hz", "e2_hz", "e3_hz", "e4_hz"});
  for (std::size_t i = 0; i < scan.delta_hz.size(); ++i) {
    const auto& e = scan.energies_hz[i];
    t.add_row({scan.delta_hz[i], e[0], e[1], e[2], e[3]});
  }
  return t;
}

CsvTable gap_minima_csv(const SpectrumScan& scan) {
  CsvTable t({"delta_hz", "refined_hz", "gap_hz", "pair"});
  for (const auto& m : scan.gap_minima) {
    t.add_row({format_double(m.delta_hz), format_double(m.refined_hz), format_double(m.gap_hz),
               m.lower_level == 0 ? std::string("lower") : std::string("upper")});
  }
  return t;
}

CsvTable matrix_elements_csv(const TrapConfig& trap, double d10) {
  CsvTable t({"bra_internal", "bra_motional", "ket_internal", "ket_motional", "value_hz"});
  const std::array<InternalPair, 2> sector{{{1, 0}, {0, 1}}};
  for (const auto& bi : sector) {
    for (int bm = 0; bm < 3; ++bm) {
      for (const auto& ki : sector) {
        for (int km = 0; km < 3; ++km) {
          const double v = ddi_matrix_element({bi, bm}, {ki, km}, trap, d10);
          t.add_row({std::string(internal_label(bi)), std::string(motional_label(bm)),
                     std::string(internal_label(ki)), std::string(motional_label(km)),
                     format_double(units::joule_to_hz(v))});
        }
      }
    }
  }
  return t;
}

nlohmann::json block_phase_sidecar(const MotionalMap& m) {
  nlohmann::json points = nlohmann::json::array();
  const std::size_t nd = m.map.delta_err_hz.size();
  for (std::size_t k = 0; k < m.map.values.size(); ++k) {
    points.push_back({{"delta_err_hz", m.map.delta_err_hz[k % nd]},
                      {"f_omega", m.map.f_omega[k / nd]},
                      {"phi_00_rad", m.block_phases[k][0]},
                      {"phi_01_rad", m.block_phases[k][1]},
                      {"phi_10_rad", m.block_phases[k][2]}});
  }
  return {{"block_order", {"00", "01", "10"}}, {"points", points}};
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"config", config},
          {"seed", seed},
          {"version", version},
          {"outputs", outputs},
          {"wall_clock_s", wall_clock_s}};
}

std::filesystem::path RunManifest::path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void RunManifest::save_next_to(const std::filesystem::path& output) const {
  save_json(to_json(), path_for(output));
}

}  // namespace polargate
