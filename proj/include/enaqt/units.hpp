// units.hpp: physical constants and unit conversions
//
// Internal conventions: rates and propagation constants in cm^-1, lengths in
// cm, wavelengths in nm at every public interface. Angular frequencies are
// rad/s and time delays are s.

#pragma once

#include <numbers>

namespace enaqt::units {

inline constexpr double speed_of_light_cm_per_s = 2.99792458e10;
inline constexpr double nm_per_cm = 1.0e7;
inline constexpr double pi = std::numbers::pi;

inline constexpr double nm_to_cm(double nm) { return nm / nm_per_cm; }
inline constexpr double cm_to_nm(double cm) { return cm * nm_per_cm; }

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_nm`.
inline constexpr double angular_frequency(double lambda_nm) {
    return 2.0 * pi * speed_of_light_cm_per_s / nm_to_cm(lambda_nm);
}

/// Inverse of angular_frequency.
inline constexpr double wavelength_nm(double omega) {
    return cm_to_nm(2.0 * pi * speed_of_light_cm_per_s / omega);
}

/// Angular-frequency width corresponding to a (small) wavelength width
/// around `center_nm`, using |dω/dλ| = 2πc/λ².
inline constexpr double angular_bandwidth(double width_nm, double center_nm) {
    const double center_cm = nm_to_cm(center_nm);
    return 2.0 * pi * speed_of_light_cm_per_s * nm_to_cm(width_nm) / (center_cm * center_cm);
}

}  // namespace enaqt::units
