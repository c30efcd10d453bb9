#pragma once

#include <filesystem>
#include <numbers>
#include <vector>

#include <json.hpp>

namespace polargate {

struct PulseStep {
  double amplitude = 0.0;  // rad/s, >= 0
  double phase = 0.0;      // rad

  double omega_x() const;
  double omega_y() const;
};

/// Piecewise-constant control: `steps.size()` slices of length `dt`.
class Pulse {
 public:
  Pulse() = default;
  Pulse(double dt, std::vector<PulseStep> steps, nlohmann::json meta = nlohmann::json::object());

  /// From interleaved quadratures [x0, y0, x1, y1, ...] (rad/s).
  static Pulse from_quadratures(double dt, const std::vector<double>& interleaved);

  double dt() const { return dt_; }
  const std::vector<PulseStep>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  double duration() const { return dt_ * static_cast<double>(steps_.size()); }
  double max_amplitude() const;
  std::vector<double> quadratures() const;

  const nlohmann::json& meta() const { return meta_; }
  nlohmann::json& meta() { return meta_; }

  /// This pulse followed by `next` (same dt required).
  Pulse then(const Pulse& next) const;

  nlohmann::json to_json() const;
  static Pulse from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Pulse load(const std::filesystem::path& path);

 private:
  double dt_ = 1.0;
  std::vector<PulseStep> steps_;
  nlohmann::json meta_ = nlohmann::json::object();
};

/// Gaussian envelope switched by a rectangular window of length tau_gate,
/// centred at tau_gate/2, at constant detuning and drive phase.
struct GaussianPulse {
  double tau_gate = 0.0;   // s
  double tau_rms = 0.0;    // s
  double omega_max = 0.0;  // rad/s
  double delta = 0.0;      // rad/s
  // Drive quadrature. -pi/2 realizes the sign convention of the target gate
  // (|11> -> -|Psi+>) for a resonant pi pulse.
  double phase = -0.5 * std::numbers::pi;

  static constexpr double kDefaultStep = 1e-6;

  void validate() const;
  double amplitude_at(double t) const;
  /// Samples the envelope at step midpoints; the step count is
  /// round(tau_gate / step).
  Pulse discretize(double step = kDefaultStep) const;
};

}  // namespace polargate
