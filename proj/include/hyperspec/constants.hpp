#pragma once

namespace hyperspec {

// Physical constants (CODATA 2018) and unit conversions used across the
// toolkit. Energies are carried in cm^-1 at the crystal-field stage and in
// MHz at the hyperfine stage.
namespace constants {

// 1 cm^-1 in MHz (exact, c = 299792458 m/s).
inline constexpr double kMHzPerInvCm = 29979.2458;

// Bohr magneton over h, MHz/T.
inline constexpr double kBohrMagnetonMHzPerT = 13996.2449361;

// Nuclear magneton over h, MHz/T.
inline constexpr double kNuclearMagnetonMHzPerT = 7.62259323;

// Free-electron g-factor (magnitude).
inline constexpr double kElectronG = 2.0023;

// SI constants for the oscillator-strength chain.
inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kElectronMass = 9.1093837015e-31;     // kg
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace constants

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace hyperspec
