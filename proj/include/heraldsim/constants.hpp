#ifndef HERALDSIM_CONSTANTS_HPP
#define HERALDSIM_CONSTANTS_HPP

namespace heraldsim::constants {

inline constexpr double speed_of_light = 2.99792458e8;    // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;

}  // namespace heraldsim::constants

#endif
