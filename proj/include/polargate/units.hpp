#pragma once

#include <numbers>

// Physical constants (CODATA 2018) and unit conversions. Internally all
// frequencies are angular (rad/s) and all energies are joules; public
// configuration surfaces use ordinary frequencies in Hz.
namespace polargate::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kHbar = kPlanck / kTwoPi;
inline constexpr double kEpsilon0 = 8.8541878128e-12;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kAtomicMass = 1.66053906660e-27;
inline constexpr double kDebye = 3.33564e-30;

constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }
constexpr double hz_to_joule(double hz) { return kPlanck * hz; }
constexpr double joule_to_hz(double joule) { return joule / kPlanck; }
constexpr double rad_to_joule(double rad) { return kHbar * rad; }
constexpr double joule_to_rad(double joule) { return joule / kHbar; }
constexpr double debye_to_cm(double debye) { return debye * kDebye; }
constexpr double cm_to_debye(double cm) { return cm / kDebye; }

}  // namespace polargate::units
