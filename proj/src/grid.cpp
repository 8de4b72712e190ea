#include "etaforge/grid.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/errors.hpp"
#include "etaforge/fourier.hpp"

namespace etaforge::numkit {

namespace {

void check_even_positive(std::size_t n) {
    if (n == 0 || n % 2 != 0) throw GridMismatch("grid: points-per-axis must be even positive");
}

// Multiplies the spectrum line by (i k_phys)^order with the Nyquist mode
// zeroed for odd orders.
void derivative_line(std::vector<cplx>& line, double half_width, int order) {
    const std::size_t n = line.size();
    fft(line);
    for (std::size_t k = 0; k < n; ++k) {
        const long kk = (k <= n / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
        double kphys = M_PI * static_cast<double>(kk) / half_width;
        if (order % 2 != 0 && k == n / 2) kphys = 0.0;
        cplx mult = 1.0;
        for (int p = 0; p < order; ++p) mult *= cplx(0.0, kphys);
        line[k] *= mult;
    }
    ifft(line);
}

} // namespace

// ---------------------------------------------------------------- Grid1D

Grid1D::Grid1D(double half_width, std::size_t n, std::size_t fiber_dim)
    : half_width_(half_width), n_(n), fdim_(fiber_dim), data_(n * fiber_dim * fiber_dim, cplx(0.0)) {
    if (half_width <= 0.0) throw GridMismatch("grid: half-width must be positive");
    check_even_positive(n);
}

Grid1D Grid1D::sample(double half_width, std::size_t n, std::size_t fiber_dim,
                      const std::function<ComplexMatrix(double)>& f) {
    Grid1D g(half_width, n, fiber_dim);
    for (std::size_t i = 0; i < n; ++i) g.set_value(i, f(g.node(i)));
    return g;
}

ComplexMatrix Grid1D::value(std::size_t i) const {
    ComplexMatrix m(fdim_, fdim_);
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s) m(r, s) = at(r, s, i);
    return m;
}

void Grid1D::set_value(std::size_t i, const ComplexMatrix& m) {
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s) at(r, s, i) = m(r, s);
}

double Grid1D::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Grid1D::boundary_max_abs(std::size_t ring) const {
    double m = 0.0;
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s)
            for (std::size_t i = 0; i < n_; ++i)
                if (i < ring || i + ring >= n_) m = std::max(m, std::abs(at(r, s, i)));
    return m;
}

void Grid1D::check_envelope(double tol) const {
    const double m = max_abs();
    if (m == 0.0) return;
    const double b = boundary_max_abs();
    if (b < 1e-14) return;  // numerically zero boundary data
    if (b > tol * m)
        throw EnvelopeViolation("grid1d: boundary samples exceed envelope tolerance");
}

Grid1D& Grid1D::operator+=(const Grid1D& o) {
    if (!same_geometry(o)) throw GridMismatch("grid1d: geometry mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Grid1D& Grid1D::operator-=(const Grid1D& o) {
    if (!same_geometry(o)) throw GridMismatch("grid1d: geometry mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Grid1D& Grid1D::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Grid1D pw_product(const Grid1D& a, const Grid1D& b) {
    if (!a.same_geometry(b)) throw GridMismatch("grid1d: geometry mismatch");
    const std::size_t f = a.fdim_, n = a.n_;
    Grid1D c(a.half_width_, n, f);
    for (std::size_t r = 0; r < f; ++r)
        for (std::size_t s = 0; s < f; ++s)
            for (std::size_t l = 0; l < f; ++l) {
                const cplx* pa = &a.data_[(r * f + l) * n];
                const cplx* pb = &b.data_[(l * f + s) * n];
                cplx* pc = &c.data_[(r * f + s) * n];
                for (std::size_t i = 0; i < n; ++i) pc[i] += pa[i] * pb[i];
            }
    return c;
}

Grid1D pw_inverse(const Grid1D& a, double rel_tol) {
    Grid1D c(a.half_width(), a.points(), a.fiber_dim());
    for (std::size_t i = 0; i < a.points(); ++i) c.set_value(i, inverse(a.value(i), rel_tol));
    return c;
}

cplx Grid1D::trace_integral() const {
    cplx acc = 0.0;
    for (std::size_t r = 0; r < fdim_; ++r) {
        const cplx* p = &data_[(r * fdim_ + r) * n_];
        for (std::size_t i = 0; i < n_; ++i) acc += p[i];
    }
    return acc * spacing();
}

Grid1D fft_derivative(const Grid1D& g, int order, double envelope_tol) {
    if (order < 0) throw GridMismatch("fft_derivative: negative order");
    if (order == 0) return g;
    g.check_envelope(envelope_tol);
    Grid1D out = g;
    std::vector<cplx> line(g.points());
    for (std::size_t r = 0; r < g.fiber_dim(); ++r)
        for (std::size_t s = 0; s < g.fiber_dim(); ++s) {
            for (std::size_t i = 0; i < g.points(); ++i) line[i] = g.at(r, s, i);
            derivative_line(line, g.half_width(), order);
            for (std::size_t i = 0; i < g.points(); ++i) out.at(r, s, i) = line[i];
        }
    return out;
}

// ---------------------------------------------------------------- Grid2D

Grid2D::Grid2D(double half_width, std::size_t n, std::size_t fiber_dim)
    : half_width_(half_width),
      n_(n),
      fdim_(fiber_dim),
      data_(n * n * fiber_dim * fiber_dim, cplx(0.0)) {
    if (half_width <= 0.0) throw GridMismatch("grid: half-width must be positive");
    check_even_positive(n);
}

Grid2D Grid2D::sample(double half_width, std::size_t n, std::size_t fiber_dim,
                      const std::function<ComplexMatrix(double, double)>& f) {
    Grid2D g(half_width, n, fiber_dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.set_value(i, j, f(g.node(i), g.node(j)));
    return g;
}

ComplexMatrix Grid2D::value(std::size_t it, std::size_t itau) const {
    ComplexMatrix m(fdim_, fdim_);
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s) m(r, s) = at(r, s, it, itau);
    return m;
}

void Grid2D::set_value(std::size_t it, std::size_t itau, const ComplexMatrix& m) {
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s) at(r, s, it, itau) = m(r, s);
}

double Grid2D::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Grid2D::boundary_max_abs(std::size_t ring) const {
    double m = 0.0;
    for (std::size_t r = 0; r < fdim_; ++r)
        for (std::size_t s = 0; s < fdim_; ++s) {
            const cplx* plane = &data_[(r * fdim_ + s) * n_ * n_];
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j) {
                    const bool edge = i < ring || i + ring >= n_ || j < ring || j + ring >= n_;
                    if (edge) m = std::max(m, std::abs(plane[i * n_ + j]));
                }
        }
    return m;
}

void Grid2D::check_envelope(double tol) const {
    const double m = max_abs();
    if (m == 0.0) return;
    const double b = boundary_max_abs();
    if (b < 1e-14) return;  // numerically zero boundary data
    if (b > tol * m)
        throw EnvelopeViolation("grid2d: boundary samples exceed envelope tolerance");
}

Grid2D& Grid2D::operator+=(const Grid2D& o) {
    if (!same_geometry(o)) throw GridMismatch("grid2d: geometry mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Grid2D& Grid2D::operator-=(const Grid2D& o) {
    if (!same_geometry(o)) throw GridMismatch("grid2d: geometry mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Grid2D& Grid2D::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Grid2D pw_product(const Grid2D& a, const Grid2D& b) {
    if (!a.same_geometry(b)) throw GridMismatch("grid2d: geometry mismatch");
    const std::size_t f = a.fdim_, nn = a.n_ * a.n_;
    Grid2D c(a.half_width_, a.n_, f);
    for (std::size_t r = 0; r < f; ++r)
        for (std::size_t s = 0; s < f; ++s)
            for (std::size_t l = 0; l < f; ++l) {
                const cplx* pa = &a.data_[(r * f + l) * nn];
                const cplx* pb = &b.data_[(l * f + s) * nn];
                cplx* pc = &c.data_[(r * f + s) * nn];
                for (std::size_t i = 0; i < nn; ++i) pc[i] += pa[i] * pb[i];
            }
    return c;
}

Grid2D pw_inverse(const Grid2D& a, double rel_tol) {
    Grid2D c(a.half_width(), a.points_per_axis(), a.fiber_dim());
    for (std::size_t i = 0; i < a.points_per_axis(); ++i)
        for (std::size_t j = 0; j < a.points_per_axis(); ++j)
            c.set_value(i, j, inverse(a.value(i, j), rel_tol));
    return c;
}

cplx Grid2D::trace_integral() const {
    cplx acc = 0.0;
    const std::size_t nn = n_ * n_;
    for (std::size_t r = 0; r < fdim_; ++r) {
        const cplx* p = &data_[(r * fdim_ + r) * nn];
        for (std::size_t i = 0; i < nn; ++i) acc += p[i];
    }
    const double h = spacing();
    return acc * (h * h);
}

Grid2D fft_derivative(const Grid2D& g, int axis, int order, double envelope_tol) {
    if (order < 0) throw GridMismatch("fft_derivative: negative order");
    if (axis != 0 && axis != 1) throw GridMismatch("fft_derivative: axis must be 0 or 1");
    if (order == 0) return g;
    g.check_envelope(envelope_tol);
    Grid2D out = g;
    const std::size_t n = g.points_per_axis();
    std::vector<cplx> line(n);
    for (std::size_t r = 0; r < g.fiber_dim(); ++r)
        for (std::size_t s = 0; s < g.fiber_dim(); ++s)
            for (std::size_t fixed = 0; fixed < n; ++fixed) {
                for (std::size_t k = 0; k < n; ++k) {
                    line[k] = (axis == 0) ? g.at(r, s, k, fixed) : g.at(r, s, fixed, k);
                }
                derivative_line(line, g.half_width(), order);
                for (std::size_t k = 0; k < n; ++k) {
                    if (axis == 0)
                        out.at(r, s, k, fixed) = line[k];
                    else
                        out.at(r, s, fixed, k) = line[k];
                }
            }
    return out;
}

Grid2D fft_derivative_mixed(const Grid2D& g, int order_t, int order_tau, double envelope_tol) {
    if (order_t < 0 || order_tau < 0) throw GridMismatch("fft_derivative_mixed: negative order");
    if (order_t == 0 && order_tau == 0) return g;
    g.check_envelope(envelope_tol);
    Grid2D out = g;
    const std::size_t n = g.points_per_axis();
    std::vector<cplx> line(n);
    for (std::size_t r = 0; r < g.fiber_dim(); ++r)
        for (std::size_t s = 0; s < g.fiber_dim(); ++s) {
            if (order_t > 0)
                for (std::size_t fixed = 0; fixed < n; ++fixed) {
                    for (std::size_t k = 0; k < n; ++k) line[k] = out.at(r, s, k, fixed);
                    derivative_line(line, g.half_width(), order_t);
                    for (std::size_t k = 0; k < n; ++k) out.at(r, s, k, fixed) = line[k];
                }
            if (order_tau > 0)
                for (std::size_t fixed = 0; fixed < n; ++fixed) {
                    for (std::size_t k = 0; k < n; ++k) line[k] = out.at(r, s, fixed, k);
                    derivative_line(line, g.half_width(), order_tau);
                    for (std::size_t k = 0; k < n; ++k) out.at(r, s, fixed, k) = line[k];
                }
        }
    return out;
}

} // namespace etaforge::numkit
