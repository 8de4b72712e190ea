#include "etaforge/hermite.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/errors.hpp"

namespace etaforge::numkit {

HermiteTable hermite_functions(std::size_t m, const std::vector<double>& x, double hbar,
                               bool narrow_check) {
    if (m == 0) throw GridMismatch("hermite_functions: need at least one function");
    if (hbar <= 0.0) throw GridMismatch("hermite_functions: hbar must be positive");

    HermiteTable table;
    table.count = m;
    table.points = x.size();
    table.values.assign(m * x.size(), 0.0);

    const double scale = std::pow(hbar, -0.25);
    const double norm0 = std::pow(M_PI, -0.25);
    const double sqrt_hbar = std::sqrt(hbar);

    for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = x[i] / sqrt_hbar;
        double prev = 0.0;
        double cur = scale * norm0 * std::exp(-0.5 * y * y);
        table.values[i] = cur;
        for (std::size_t k = 1; k < m; ++k) {
            const double dk = static_cast<double>(k);
            const double next = std::sqrt(2.0 / dk) * y * cur - std::sqrt((dk - 1.0) / dk) * prev;
            prev = cur;
            cur = next;
            table.values[k * x.size() + i] = cur;
        }
    }

    if (narrow_check && x.size() >= 2) {
        const double* last = &table.values[(m - 1) * x.size()];
        double peak = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) peak = std::max(peak, std::abs(last[i]));
        const double edge = std::max(std::abs(last[0]), std::abs(last[x.size() - 1]));
        if (peak > 0.0 && edge > 1e-10 * peak)
            throw GridTooNarrow("hermite_functions: last row has significant boundary amplitude");
    }
    return table;
}

} // namespace etaforge::numkit
