#pragma once

// CODATA-2018 values in Gaussian (CGS) units.

namespace cyclores::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double c = 2.99792458e10;             // cm/s, exact
inline constexpr double hbar = 1.054571817e-27;        // erg s
inline constexpr double e = 4.80320471257026372e-10;   // esu, 1.602176634e-19 C * c/10
inline constexpr double m_electron = 9.1093837015e-28; // g
inline constexpr double m_proton = 1.67262192369e-24;  // g
inline constexpr double eV = 1.602176634e-12;          // erg, exact

}  // namespace cyclores::constants
