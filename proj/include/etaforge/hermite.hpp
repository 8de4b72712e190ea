#pragma once

#include <vector>

namespace etaforge::numkit {

/// Samples of the first M oscillator eigenfunctions, row k holding
/// phi_k(x) for the given abscissas.  phi_k is L2-normalized and satisfies
/// (-hbar^2 d^2/dt^2 + t^2) phi_k = hbar (2k+1) phi_k.
struct HermiteTable {
    std::size_t count = 0;   // M
    std::size_t points = 0;  // |x|
    std::vector<double> values;  // row-major M x |x|

    double at(std::size_t k, std::size_t i) const { return values[k * points + i]; }
};

/// Evaluate by a stable three-term recurrence on the scaled variable
/// x/sqrt(hbar).  Throws GridTooNarrow when the boundary amplitude of the
/// last row exceeds 1e-10 of its max (the grid fails to contain phi_{M-1}).
HermiteTable hermite_functions(std::size_t m, const std::vector<double>& x, double hbar,
                               bool narrow_check = true);

/// Oscillator eigenvalue of phi_k.
inline double hermite_eigenvalue(std::size_t k, double hbar) {
    return hbar * (2.0 * static_cast<double>(k) + 1.0);
}

} // namespace etaforge::numkit
