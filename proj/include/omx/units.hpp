#pragma once

#include <cmath>
#include <complex>

namespace omx {

using Complex = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double speed_of_light = 299792458.0;    // m/s

// All rates and frequencies are angular (rad/s) internally; files and CLI
// speak ordinary frequency (Hz). Conversion happens only at the boundary.
inline double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline double rad_to_hz(double w_rad) { return w_rad / two_pi; }

inline double optical_angular_frequency(double wavelength_m)
{
    return two_pi * speed_of_light / wavelength_m;
}

// Photon flux (1/s) carried by an optical beam of the given power.
inline double photon_flux_from_power(double power_w, double wavelength_m)
{
    return power_w / (hbar * optical_angular_frequency(wavelength_m));
}

inline double power_from_photon_flux(double flux, double wavelength_m)
{
    return flux * hbar * optical_angular_frequency(wavelength_m);
}

} // namespace omx
