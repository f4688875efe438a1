#pragma once

namespace fwm::constants {

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double speed_of_light = 2.99792458e8; // m/s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double torr_to_pa = 133.322368;

// Rb D1 line. The reduced dipole moment is scaled by 1/(2*sqrt(2)) to fold
// in the hyperfine/angular coupling factors of the far-detuned pump; the
// resulting light shift lands at the two-photon detunings used throughout.
inline constexpr double rb_d1_reduced_dipole = 2.537e-29; // C m
inline constexpr double dipole_angular_factor = 0.35355339059327373; // 1/(2 sqrt 2)
inline constexpr double rb_d1_wavelength = 794.979e-9; // m

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647692;

} // namespace fwm::constants
