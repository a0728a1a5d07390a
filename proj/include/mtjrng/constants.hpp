#pragma once

namespace mtjrng::constants {

// Vacuum permeability, T*m/A.
inline constexpr double mu0 = 1.25663706212e-6;

// Electron gyromagnetic ratio, rad/(s*T).
inline constexpr double gamma_e = 1.760859e11;

// Gyromagnetic ratio in Landau-Lifshitz form for fields in A/m: gamma_e * mu0, m/(A*s).
inline constexpr double gamma_ll = gamma_e * mu0;

// Reduced Planck constant, J*s.
inline constexpr double hbar = 1.054571817e-34;

// Elementary charge, C.
inline constexpr double e_charge = 1.602176634e-19;

// Boltzmann constant, J/K.
inline constexpr double k_B = 1.380649e-23;

} // namespace mtjrng::constants
