#pragma once

// Hartree atomic units throughout: hbar = m_e = e = 1. Momenta are in a.u. of
// momentum, times in a.u. of time, lengths in bohr. Conversion from SI or from
// experiment-specific units is left to the caller.

namespace paircorr::units {

inline constexpr double hbar = 1.0;
inline constexpr double electron_mass = 1.0;

inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace paircorr::units
