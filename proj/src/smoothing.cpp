#include "etaforge/smoothing.hpp"

#include <cmath>

#include "etaforge/errors.hpp"
#include "etaforge/fourier.hpp"
#include "etaforge/parallel.hpp"

namespace etaforge::smoothing {

cplx det_fr(const ComplexMatrix& k) {
    if (!k.square()) throw GridMismatch("det_fr: K must be square");
    ComplexMatrix g = ComplexMatrix::identity(k.rows());
    g += k;
    return numkit::det_lu(g);
}

cplx det_fr(const SmoothingPerturbation& p) { return det_fr(p.k); }

ComplexMatrix pad_identity_embedding(const ComplexMatrix& k, std::size_t new_dim) {
    if (new_dim < k.rows()) throw GridMismatch("pad_identity_embedding: target smaller than source");
    ComplexMatrix out(new_dim, new_dim);
    for (std::size_t i = 0; i < k.rows(); ++i)
        for (std::size_t j = 0; j < k.cols(); ++j) out(i, j) = k(i, j);
    return out;
}

GroupLoop GroupLoop::sample(std::size_t nodes, const std::function<ComplexMatrix(double)>& g,
                            double closure_tol) {
    GroupLoop loop;
    loop.closure_tol = closure_tol;
    loop.thetas.resize(nodes + 1);
    loop.values.resize(nodes + 1);
    for (std::size_t i = 0; i <= nodes; ++i) {
        loop.thetas[i] = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(nodes);
        loop.values[i] = g(loop.thetas[i]);
    }
    return loop;
}

void GroupLoop::validate() const {
    if (values.size() < 3 || values.size() != thetas.size())
        throw GridMismatch("GroupLoop: need at least two segments");
    const double gap = values.front().max_abs_diff(values.back());
    if (gap > closure_tol) throw GridMismatch("GroupLoop: endpoints fail closure tolerance");
}

namespace {

// Unwrapped phase increment along det(values); throws on steps at or
// beyond step_limit and on relatively vanishing determinants.
double unwrapped_phase(const std::vector<ComplexMatrix>& values, double step_limit) {
    std::vector<cplx> dets(values.size());
    double max_abs = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        dets[i] = numkit::det_lu(values[i]);
        max_abs = std::max(max_abs, std::abs(dets[i]));
    }
    for (const cplx& d : dets)
        if (std::abs(d) < 1e-13 * std::max(max_abs, 1e-300))
            throw Singular("winding_number: singular node");
    double total = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double step = std::arg(dets[i] / dets[i - 1]);
        if (std::abs(step) >= step_limit)
            throw PhaseJump("winding_number: adjacent-node phase step reached pi");
        total += step;
    }
    return total;
}

} // namespace

int winding_number(const GroupLoop& loop) {
    loop.validate();
    const double total = unwrapped_phase(loop.values, M_PI);
    const double w = total / (2.0 * M_PI);
    return static_cast<int>(std::lround(w));
}

int winding_number(const std::function<ComplexMatrix(double)>& g, std::size_t initial_nodes,
                   double closure_tol) {
    // midpoint insertion until steps are safely below the branch limit;
    // pi/2 guards against aliased near-pi steps that look legal
    std::size_t n = initial_nodes;
    for (int round = 0;; ++round) {
        try {
            GroupLoop loop = GroupLoop::sample(n, g, closure_tol);
            loop.validate();
            const double total = unwrapped_phase(loop.values, M_PI / 2.0);
            return static_cast<int>(std::lround(total / (2.0 * M_PI)));
        } catch (const PhaseJump&) {
            if (round == 4) throw;
            n *= 2;
        }
    }
}

cplx odd_chern_ch1(const std::function<ComplexMatrix(double)>& g, std::size_t nodes) {
    // spectral differentiation entrywise in theta, then trapezoid; both
    // steps are spectrally accurate for smooth periodic loops
    const double h = 2.0 * M_PI / static_cast<double>(nodes);
    std::vector<ComplexMatrix> vals(nodes);
    for (std::size_t i = 0; i < nodes; ++i) vals[i] = g(h * static_cast<double>(i));
    const std::size_t fd = vals.front().rows();
    std::vector<ComplexMatrix> ders(nodes, ComplexMatrix(fd, fd));
    std::vector<cplx> line(nodes);
    for (std::size_t r = 0; r < fd; ++r)
        for (std::size_t s = 0; s < fd; ++s) {
            for (std::size_t i = 0; i < nodes; ++i) line[i] = vals[i](r, s);
            numkit::fft(line);
            for (std::size_t k = 0; k < nodes; ++k) {
                const long kk = (k <= nodes / 2) ? static_cast<long>(k)
                                                 : static_cast<long>(k) - static_cast<long>(nodes);
                const double freq = (k == nodes / 2) ? 0.0 : static_cast<double>(kk);
                line[k] *= cplx(0.0, freq);
            }
            numkit::ifft(line);
            for (std::size_t i = 0; i < nodes; ++i) ders[i](r, s) = line[i];
        }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) acc += (numkit::inverse(vals[i]) * ders[i]).trace();
    return acc * h / cplx(0.0, 2.0 * M_PI);
}

namespace {

struct ChartGrid {
    std::array<std::size_t, 3> n;
    std::array<double, 3> h;
    std::vector<ComplexMatrix> vals;

    std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * n[1] + j) * n[2] + k;
    }
};

} // namespace

cplx odd_chern_ch3(const ChartS3& chart, double integral_tol) {
    ChartGrid grid;
    grid.n = chart.nodes;
    for (int a = 0; a < 3; ++a) {
        const auto span = chart.hi[a] - chart.lo[a];
        // periodic axes omit the duplicate endpoint
        const auto denom = chart.periodic[a] ? chart.nodes[a] : chart.nodes[a] - 1;
        grid.h[a] = span / static_cast<double>(denom);
    }
    grid.vals.resize(grid.n[0] * grid.n[1] * grid.n[2]);
    parallel_for(grid.n[0], [&](std::size_t i) {
        const double u0 = chart.lo[0] + grid.h[0] * static_cast<double>(i);
        for (std::size_t j = 0; j < grid.n[1]; ++j) {
            const double u1 = chart.lo[1] + grid.h[1] * static_cast<double>(j);
            for (std::size_t k = 0; k < grid.n[2]; ++k) {
                const double u2 = chart.lo[2] + grid.h[2] * static_cast<double>(k);
                grid.vals[grid.idx(i, j, k)] = chart.g(u0, u1, u2);
            }
        }
    });

    // spectral derivatives along periodic axes (entrywise line FFTs)
    std::array<std::vector<ComplexMatrix>, 3> spectral;
    const std::size_t fd = grid.vals.front().rows();
    for (int axis = 0; axis < 3; ++axis) {
        if (!chart.periodic[axis]) continue;
        spectral[axis].assign(grid.vals.size(), ComplexMatrix(fd, fd));
        const std::size_t nline = grid.n[static_cast<std::size_t>(axis)];
        const double span = grid.h[static_cast<std::size_t>(axis)] * static_cast<double>(nline);
        std::array<std::size_t, 3> other{};
        int o = 0;
        for (int a = 0; a < 3; ++a)
            if (a != axis) other[static_cast<std::size_t>(o++)] = static_cast<std::size_t>(a);
        const std::size_t n1 = grid.n[other[0]], n2 = grid.n[other[1]];
        parallel_for(n1, [&](std::size_t j) {
            std::vector<cplx> line(nline);
            for (std::size_t k = 0; k < n2; ++k)
                for (std::size_t r = 0; r < fd; ++r)
                    for (std::size_t s = 0; s < fd; ++s) {
                        for (std::size_t l = 0; l < nline; ++l) {
                            std::array<std::size_t, 3> at{};
                            at[static_cast<std::size_t>(axis)] = l;
                            at[other[0]] = j;
                            at[other[1]] = k;
                            line[l] = grid.vals[grid.idx(at[0], at[1], at[2])](r, s);
                        }
                        numkit::fft(line);
                        for (std::size_t m = 0; m < nline; ++m) {
                            const long mm = (m <= nline / 2)
                                                ? static_cast<long>(m)
                                                : static_cast<long>(m) - static_cast<long>(nline);
                            const double freq =
                                (m == nline / 2) ? 0.0
                                                 : 2.0 * M_PI * static_cast<double>(mm) / span;
                            line[m] *= cplx(0.0, freq);
                        }
                        numkit::ifft(line);
                        for (std::size_t l = 0; l < nline; ++l) {
                            std::array<std::size_t, 3> at{};
                            at[static_cast<std::size_t>(axis)] = l;
                            at[other[0]] = j;
                            at[other[1]] = k;
                            spectral[axis][grid.idx(at[0], at[1], at[2])](r, s) = line[l];
                        }
                    }
        });
    }

    // 4th-order central differences; one-sided 4th-order stencils at
    // non-periodic edges
    auto stencil_value = [&](int axis, std::array<long, 3> at, long offset) -> const ComplexMatrix& {
        long pos = at[axis] + offset;
        const long n = static_cast<long>(grid.n[axis]);
        if (chart.periodic[axis])
            pos = ((pos % n) + n) % n;
        std::array<long, 3> p = at;
        p[axis] = pos;
        return grid.vals[grid.idx(static_cast<std::size_t>(p[0]), static_cast<std::size_t>(p[1]),
                                  static_cast<std::size_t>(p[2]))];
    };

    auto derivative = [&](int axis, std::array<long, 3> at) -> ComplexMatrix {
        if (chart.periodic[axis])
            return spectral[axis][grid.idx(static_cast<std::size_t>(at[0]),
                                           static_cast<std::size_t>(at[1]),
                                           static_cast<std::size_t>(at[2]))];
        const long n = static_cast<long>(grid.n[axis]);
        const double h = grid.h[axis];
        if (at[axis] >= 2 && at[axis] + 2 < n) {
            ComplexMatrix d = stencil_value(axis, at, 1) - stencil_value(axis, at, -1);
            d *= 8.0;
            d -= stencil_value(axis, at, 2);
            d += stencil_value(axis, at, -2);
            d *= 1.0 / (12.0 * h);
            return d;
        }
        // one-sided 5-point stencils (+- depending on edge)
        const bool left = at[axis] < 2;
        const double s = left ? 1.0 : -1.0;
        auto v = [&](long o) { return stencil_value(axis, at, left ? o : -o); };
        ComplexMatrix d = v(0) * cplx(-25.0 / 12.0);
        d += v(1) * cplx(4.0);
        d += v(2) * cplx(-3.0);
        d += v(3) * cplx(4.0 / 3.0);
        d += v(4) * cplx(-1.0 / 4.0);
        d *= s / h;
        return d;
    };

    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    const double signs[6] = {1.0, 1.0, 1.0, -1.0, -1.0, -1.0};

    std::vector<cplx> slab_sums(grid.n[0], cplx(0.0));
    parallel_for(grid.n[0], [&](std::size_t i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < grid.n[1]; ++j)
            for (std::size_t k = 0; k < grid.n[2]; ++k) {
                const std::array<long, 3> at = {static_cast<long>(i), static_cast<long>(j),
                                                static_cast<long>(k)};
                const ComplexMatrix ginv = numkit::inverse(grid.vals[grid.idx(i, j, k)]);
                const ComplexMatrix m0 = ginv * derivative(0, at);
                const ComplexMatrix m1 = ginv * derivative(1, at);
                const ComplexMatrix m2 = ginv * derivative(2, at);
                const ComplexMatrix* ms[3] = {&m0, &m1, &m2};
                cplx node = 0.0;
                for (int p = 0; p < 6; ++p)
                    node += signs[p] * ((*ms[perms[p][0]]) * (*ms[perms[p][1]]) * (*ms[perms[p][2]])).trace();
                double w = 1.0;
                if (!chart.periodic[0] && (i == 0 || i + 1 == grid.n[0])) w *= 0.5;
                if (!chart.periodic[1] && (j == 0 || j + 1 == grid.n[1])) w *= 0.5;
                if (!chart.periodic[2] && (k == 0 || k + 1 == grid.n[2])) w *= 0.5;
                acc += w * node;
            }
        slab_sums[i] = acc;
    });
    cplx total = 0.0;
    for (const cplx& s : slab_sums) total += s;
    total *= grid.h[0] * grid.h[1] * grid.h[2];

    // normalization of the third odd Chern form
    const cplx two_pi_i(0.0, 2.0 * M_PI);
    total *= 1.0 / (two_pi_i * two_pi_i) * (1.0 / 6.0);

    const double nearest = std::round(total.real());
    if (std::abs(total - nearest) > integral_tol)
        throw NonIntegral("odd_chern_ch3: result is not within tolerance of an integer");
    return total;
}

ComplexMatrix su2_from_point(double x0, double x1, double x2, double x3) {
    // x0 Id + i (x1 s1 + x2 s2 + x3 s3) with the standard Pauli matrices
    ComplexMatrix g(2, 2);
    g(0, 0) = cplx(x0, x3);
    g(0, 1) = cplx(x2, x1);
    g(1, 0) = cplx(-x2, x1);
    g(1, 1) = cplx(x0, -x3);
    return g;
}

ChartS3 hopf_chart(std::size_t nodes_per_axis,
                   const std::function<ComplexMatrix(double, double, double, double)>& g_of_x) {
    ChartS3 chart;
    chart.nodes = {nodes_per_axis, nodes_per_axis, nodes_per_axis};
    chart.lo = {0.0, 0.0, 0.0};
    chart.hi = {M_PI / 2.0, 2.0 * M_PI, 2.0 * M_PI};
    chart.periodic = {false, true, true};
    // axes ordered so the chart orientation makes the identity map
    // S^3 -> SU(2) come out with degree +1
    chart.g = [g_of_x](double eta, double xi2, double xi1) {
        // z1 = cos(eta) e^{i xi1}, z2 = sin(eta) e^{i xi2}
        const double x0 = std::cos(eta) * std::cos(xi1);
        const double x3 = std::cos(eta) * std::sin(xi1);
        const double x2 = std::sin(eta) * std::cos(xi2);
        const double x1 = std::sin(eta) * std::sin(xi2);
        return g_of_x(x0, x1, x2, x3);
    };
    return chart;
}

} // namespace etaforge::smoothing
