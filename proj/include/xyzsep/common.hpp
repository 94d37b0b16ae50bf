#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace xyzsep {

/// Invalid input: bad model data, violated precondition, malformed file.
struct ModelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, inconsistent on-curve data, singular estimate.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Anisotropic coupling triple (j_x, j_y, j_z), in energy units.
/// Per-edge couplings are r_ij * j; physical strengths are j/s for spin s.
struct Couplings {
    double jx = 1.0;
    double jy = 0.0;
    double jz = 0.0;
};

// Default tolerances, shared across modules.
inline constexpr double kCurveTol = 1e-9;        // on-curve acceptance (relative to max(1,|jx|))
inline constexpr double kAngleTol = 1e-9;        // angle-sign resolution against the pair equations
inline constexpr double kEnergyFormTol = 1e-10;  // agreement between closed-form energy expressions
inline constexpr double kDegeneracyTol = 1e-9;   // GS degeneracy, relative to max(1, max|H|)

/// x^n for integer n >= 0 (exact for the small exponents 2s, 4s used throughout).
inline double int_pow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

/// True if 2s is a positive integer (s = 1/2, 1, 3/2, ...).
inline bool is_half_integer_spin(double s) {
    if (!(s > 0)) return false;
    const double twos = 2.0 * s;
    return std::abs(twos - std::round(twos)) < 1e-9;
}

/// 2s as an exact integer; throws for non-half-integer input.
inline int twice_spin(double s) {
    if (!is_half_integer_spin(s)) throw ModelError("spin must be a positive half-integer, got " + std::to_string(s));
    return static_cast<int>(std::llround(2.0 * s));
}

}  // namespace xyzsep
