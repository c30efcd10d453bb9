#include "polargate/pulse.hpp"

#include <cmath>
#include <fstream>

#include "polargate/errors.hpp"

namespace polargate {

double PulseStep::omega_x() const { return amplitude * std::cos(phase); }
double PulseStep::omega_y() const { return amplitude * std::sin(phase); }

Pulse::Pulse(double dt, std::vector<PulseStep> steps, nlohmann::json meta)
    : dt_(dt), steps_(std::move(steps)), meta_(std::move(meta)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ConfigError("Pulse: dt must be > 0");
  for (const auto& s : steps_) {
    if (!(s.amplitude >= 0.0) || !std::isfinite(s.amplitude) || !std::isfinite(s.phase)) {
      throw ConfigError("Pulse: amplitudes must be finite and >= 0");
    }
  }
}

Pulse Pulse::from_quadratures(double dt, const std::vector<double>& interleaved) {
  if (interleaved.size() % 2 != 0) {
    throw ConfigError("Pulse::from_quadratures: odd number of quadrature values");
  }
  std::vector<PulseStep> steps(interleaved.size() / 2);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const double x = interleaved[2 * j];
    const double y = interleaved[2 * j + 1];
    steps[j] = {std::hypot(x, y), std::atan2(y, x)};
  }
  return Pulse(dt, std::move(steps));
}

double Pulse::max_amplitude() const {
  double m = 0.0;
  for (const auto& s : steps_) m = std::max(m, s.amplitude);
  return m;
}

std::vector<double> Pulse::quadratures() const {
  std::vector<double> out;
  out.reserve(2 * steps_.size());
  for (const auto& s : steps_) {
    out.push_back(s.omega_x());
    out.push_back(s.omega_y());
  }
  return out;
}

Pulse Pulse::then(const Pulse& next) const {
  if (empty()) return next;
  if (next.empty()) return *this;
  if (next.dt_ != dt_) throw ConfigError("Pulse::then: step durations differ");
  auto steps = steps_;
  steps.insert(steps.end(), next.steps_.begin(), next.steps_.end());
  return Pulse(dt_, std::move(steps), meta_);
}

nlohmann::json Pulse::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : steps_) steps.push_back({s.amplitude, s.phase});
  return {{"dt_s", dt_}, {"steps", steps}, {"meta", meta_}};
}

Pulse Pulse::from_json(const nlohmann::json& j) {
  try {
    std::vector<PulseStep> steps;
    for (const auto& row : j.at("steps")) {
      if (!row.is_array() || row.size() != 2) {
        throw ConfigError("pulse JSON: each step must be [amplitude, phase]");
      }
      steps.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    return Pulse(j.at("dt_s").get<double>(), std::move(steps),
                 j.value("meta", nlohmann::json::object()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pulse JSON: ") + e.what());
  }
}

void Pulse::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

Pulse Pulse::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

void GaussianPulse::validate() const {
  if (!(tau_gate > 0.0)) throw ConfigError("GaussianPulse: tau_gate must be > 0");
  if (!(tau_rms > 0.0)) throw ConfigError("GaussianPulse: tau_rms must be > 0");
  if (!(omega_max >= 0.0)) throw ConfigError("GaussianPulse: omega_max must be >= 0");
}

double GaussianPulse::amplitude_at(double t) const {
  if (t < 0.0 || t > tau_gate) return 0.0;
  const double u = (t - 0.5 * tau_gate) / tau_rms;
  return omega_max * std::exp(-0.5 * u * u);
}

Pulse GaussianPulse::discretize(double step) const {
  validate();
  if (!(step > 0.0)) throw ConfigError("GaussianPulse::discretize: step must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(tau_gate / step));
  if (n == 0) throw ConfigError("GaussianPulse::discretize: step longer than the window");
  const double dt = tau_gate / static_cast<double>(n);
  std::vector<PulseStep> steps(n);
  for (std::size_t j = 0; j < n; ++j) {
    steps[j] = {amplitude_at((static_cast<double>(j) + 0.5) * dt), phase};
  }
  return Pulse(dt, std::move(steps));
}

}  // namespace polargate
