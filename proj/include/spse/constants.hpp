#pragma once

namespace spse::constants {

/// L2 mass of the mass-critical ground state, int_{R^3} Q_{10/3}^2, pinned
/// from the adaptive shooting oracle; the solver must reproduce it to six
/// digits on every grid the suite runs.
inline constexpr double kMassCriticalL2 = 63.783114513556;

/// Q(0) of the cubic (p = 4) ground state, pinned the same way.
inline constexpr double kCubicCenterValue = 4.337387679976;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spse::constants
