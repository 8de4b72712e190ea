#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::numkit {

/// Default boundary-decay tolerance for Schwartz-class sampled data.
constexpr double kDefaultEnvelopeTol = 1e-8;

/// Matrix-valued samples on a uniform 1-D grid over [-L, L), spacing
/// h = 2L/N.  Data layout is component-plane major: plane (r,s) holds the
/// N samples of entry (r,s) contiguously.
class Grid1D {
public:
    Grid1D() = default;
    Grid1D(double half_width, std::size_t n, std::size_t fiber_dim);

    static Grid1D sample(double half_width, std::size_t n, std::size_t fiber_dim,
                         const std::function<ComplexMatrix(double)>& f);

    double half_width() const { return half_width_; }
    std::size_t points() const { return n_; }
    std::size_t fiber_dim() const { return fdim_; }
    double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    double node(std::size_t i) const { return -half_width_ + spacing() * static_cast<double>(i); }

    cplx& at(std::size_t r, std::size_t s, std::size_t i) { return data_[(r * fdim_ + s) * n_ + i]; }
    const cplx& at(std::size_t r, std::size_t s, std::size_t i) const {
        return data_[(r * fdim_ + s) * n_ + i];
    }
    ComplexMatrix value(std::size_t i) const;
    void set_value(std::size_t i, const ComplexMatrix& m);

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    bool same_geometry(const Grid1D& o) const {
        return n_ == o.n_ && fdim_ == o.fdim_ && half_width_ == o.half_width_;
    }

    double max_abs() const;
    /// Largest |sample| on the outermost ring of nodes.
    double boundary_max_abs(std::size_t ring = 1) const;
    void check_envelope(double tol = kDefaultEnvelopeTol) const;

    Grid1D& operator+=(const Grid1D& o);
    Grid1D& operator-=(const Grid1D& o);
    Grid1D& operator*=(cplx s);

    /// Pointwise matrix product.
    friend Grid1D pw_product(const Grid1D& a, const Grid1D& b);
    /// Pointwise matrix inverse; throws Singular if a node fails.
    friend Grid1D pw_inverse(const Grid1D& a, double rel_tol);

    /// h * sum of matrix traces over nodes (trapezoid for decayed data).
    cplx trace_integral() const;

private:
    double half_width_ = 0.0;
    std::size_t n_ = 0;
    std::size_t fdim_ = 0;
    std::vector<cplx> data_;
};

/// Matrix-valued samples on a uniform 2-D grid over [-L, L)^2, node
/// (i, j) at (t_i, tau_j), same component-plane-major layout.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(double half_width, std::size_t n, std::size_t fiber_dim);

    static Grid2D sample(double half_width, std::size_t n, std::size_t fiber_dim,
                         const std::function<ComplexMatrix(double, double)>& f);

    double half_width() const { return half_width_; }
    std::size_t points_per_axis() const { return n_; }
    std::size_t fiber_dim() const { return fdim_; }
    double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    double node(std::size_t i) const { return -half_width_ + spacing() * static_cast<double>(i); }

    std::size_t node_index(std::size_t it, std::size_t itau) const { return it * n_ + itau; }
    cplx& at(std::size_t r, std::size_t s, std::size_t it, std::size_t itau) {
        return data_[(r * fdim_ + s) * n_ * n_ + node_index(it, itau)];
    }
    const cplx& at(std::size_t r, std::size_t s, std::size_t it, std::size_t itau) const {
        return data_[(r * fdim_ + s) * n_ * n_ + node_index(it, itau)];
    }
    ComplexMatrix value(std::size_t it, std::size_t itau) const;
    void set_value(std::size_t it, std::size_t itau, const ComplexMatrix& m);

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    bool same_geometry(const Grid2D& o) const {
        return n_ == o.n_ && fdim_ == o.fdim_ && half_width_ == o.half_width_;
    }

    double max_abs() const;
    double boundary_max_abs(std::size_t ring = 1) const;
    void check_envelope(double tol = kDefaultEnvelopeTol) const;

    Grid2D& operator+=(const Grid2D& o);
    Grid2D& operator-=(const Grid2D& o);
    Grid2D& operator*=(cplx s);

    friend Grid2D pw_product(const Grid2D& a, const Grid2D& b);
    friend Grid2D pw_inverse(const Grid2D& a, double rel_tol);

    /// h^2 * sum of matrix traces over nodes.
    cplx trace_integral() const;

private:
    double half_width_ = 0.0;
    std::size_t n_ = 0;
    std::size_t fdim_ = 0;
    std::vector<cplx> data_;
};

Grid1D pw_product(const Grid1D& a, const Grid1D& b);
Grid1D pw_inverse(const Grid1D& a, double rel_tol = 1e-12);
Grid2D pw_product(const Grid2D& a, const Grid2D& b);
Grid2D pw_inverse(const Grid2D& a, double rel_tol = 1e-12);

/// Spectral derivative along `axis` (0 = t, 1 = tau) of the given order;
/// order 0 is the identity.  Periodic extension is admissible because the
/// envelope check requires boundary decay.  Exact for band-limited input.
Grid1D fft_derivative(const Grid1D& g, int order, double envelope_tol = kDefaultEnvelopeTol);
Grid2D fft_derivative(const Grid2D& g, int axis, int order,
                      double envelope_tol = kDefaultEnvelopeTol);

/// Mixed partial d_t^{order_t} d_tau^{order_tau} in one spectral pass;
/// the envelope check runs once on the input, so chained differentiation
/// noise at the boundary ring is not re-tested against itself.
Grid2D fft_derivative_mixed(const Grid2D& g, int order_t, int order_tau,
                            double envelope_tol = kDefaultEnvelopeTol);

} // namespace etaforge::numkit
