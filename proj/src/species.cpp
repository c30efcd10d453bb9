#include "polargate/species.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "polargate/errors.hpp"
#include "polargate/units.hpp"

namespace polargate {

namespace {

constexpr std::string_view kBuiltinTable = R"(# Species constants for two-level microwave-dressed qubits.
format_version = 1

[CaF]
d10_debye = 1.77
mass_u = 58.9684
f_mol_hz = 20.778e9
b0_gauss = 50
magnetic_sensitivity_khz_per_g = 0.104

[RbCs]
d10_debye = 0.482
mass_u = 219.822
f_mol_hz = 980.138e6
b0_gauss = 181.5
)";

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_number(const std::string& value, int line) {
  double out = 0.0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("species table line " + std::to_string(line) + ": bad number '" +
                      value + "'");
  }
  return out;
}

}  // namespace

void SpeciesParams::validate() const {
  if (!(d10 > 0.0)) throw ConfigError("species " + label + ": d10 must be > 0");
  if (!(mass > 0.0)) throw ConfigError("species " + label + ": mass must be > 0");
  if (!(omega_mol > 0.0)) throw ConfigError("species " + label + ": omega_mol must be > 0");
}

SpeciesTable SpeciesTable::parse(std::string_view text) {
  SpeciesTable table;
  std::istringstream in{std::string(text)};
  std::string raw;
  SpeciesParams* current = nullptr;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("species table line " + std::to_string(line_no) +
                          ": unterminated section");
      }
      const std::string label = trim(std::string_view(line).substr(1, line.size() - 2));
      if (label.empty()) throw ConfigError("species table: empty section label");
      auto [it, inserted] = table.entries_.try_emplace(lower(label));
      if (!inserted) throw ConfigError("species table: duplicate species " + label);
      it->second.label = label;
      current = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("species table line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (current == nullptr) {
      if (key == "format_version") {
        table.version_ = static_cast<int>(parse_number(value, line_no));
        continue;
      }
      throw ConfigError("species table: key '" + key + "' outside a section");
    }
    const double x = parse_number(value, line_no);
    if (key == "d10_debye") {
      current->d10 = units::debye_to_cm(x);
    } else if (key == "mass_u") {
      current->mass = x * units::kAtomicMass;
    } else if (key == "f_mol_hz") {
      current->omega_mol = units::hz_to_rad(x);
    } else if (key == "b0_gauss") {
      current->b0_gauss = x;
    } else if (key == "magnetic_sensitivity_khz_per_g") {
      current->magnetic_sensitivity_khz_per_g = x;
    } else {
      throw ConfigError("species table: unknown key '" + key + "'");
    }
  }
  if (table.version_ != kFormatVersion) {
    throw ConfigError("species table: unsupported format_version " +
                      std::to_string(table.version_));
  }
  for (const auto& [_, species] : table.entries_) species.validate();
  return table;
}

SpeciesTable SpeciesTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open species table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const SpeciesTable& SpeciesTable::builtin() {
  static const SpeciesTable table = parse(kBuiltinTable);
  return table;
}

const SpeciesParams& SpeciesTable::get(std::string_view label) const {
  auto it = entries_.find(lower(label));
  if (it == entries_.end()) throw ConfigError("unknown species '" + std::string(label) + "'");
  return it->second;
}

bool SpeciesTable::contains(std::string_view label) const {
  return entries_.count(lower(label)) != 0;
}

std::vector<std::string> SpeciesTable::labels() const {
  std::vector<std::string> out;
  for (const auto& [_, species] : entries_) out.push_back(species.label);
  return out;
}

}  // namespace polargate
