#pragma once

#include <cstdint>
#include <random>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::numkit {

/// Deterministic random source.  Box-Muller over mt19937 so streams are
/// reproducible independent of the standard library's distribution
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(static_cast<std::mt19937_64::result_type>(seed)) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    cplx cnormal() { return cplx(normal(), normal()); }

    ComplexMatrix random_matrix(std::size_t n, double scale = 1.0) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = scale * cnormal();
        return m;
    }

    ComplexMatrix random_hermitian(std::size_t n, double scale = 1.0) {
        ComplexMatrix m = random_matrix(n, scale);
        ComplexMatrix h = m + m.adjoint();
        h *= 0.5;
        return h;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace etaforge::numkit
