#pragma once

// Frozen oracle values. Each was produced by a method independent of the
// code under test (see tools/ for the generating scripts).
namespace oracle {

// Koranyi sphere measure for d = 2: Dirichlet closed form 16 sqrt(pi) Gamma(5/4)^2,
// confirmed by the Cartesian shell oracle to 3e-13.
inline constexpr double kSphereMeasureD2 = 23.2989895416674263761978245777;
// Same closed form for d = 4.
inline constexpr double kSphereMeasureD4 = 86.3961330318301455512255799981;

inline constexpr double kPi = 3.14159265358979323846264338328;

// rho for n = 2 at mu = 0: 1 / (24 pi), mpmath at 60 digits.
inline constexpr double kRho2At0 = 0.0132629119243246113;

}  // namespace oracle
