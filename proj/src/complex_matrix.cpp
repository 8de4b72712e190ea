#include "etaforge/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etaforge/errors.hpp"

namespace etaforge::numkit {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diag(std::initializer_list<cplx> entries) {
    ComplexMatrix m(entries.size(), entries.size());
    std::size_t i = 0;
    for (cplx v : entries) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    ComplexMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (cplx v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double ComplexMatrix::frob_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
    return m;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw GridMismatch("matrix product: inner dimensions differ");
    ComplexMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = b.cols(), k = a.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const cplx ail = a(i, l);
            if (ail == cplx(0.0, 0.0)) continue;
            const cplx* brow = &b(l, 0);
            cplx* crow = &c(i, 0);
            for (std::size_t j = 0; j < m; ++j) crow[j] += ail * brow[j];
        }
    }
    return c;
}

namespace {

// In-place LU with partial pivoting; returns permutation sign, or 0 if an
// exactly zero pivot was hit.
int lu_factor(ComplexMatrix& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    perm.resize(n);
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        perm[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        const cplx pivot = a(k, k);
        if (pivot == cplx(0.0, 0.0)) return 0;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / pivot;
            a(i, k) = f;
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return sign;
}

} // namespace

cplx det_lu(ComplexMatrix a) {
    if (!a.square()) throw GridMismatch("det_lu: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return 1.0;
    std::vector<std::size_t> perm;
    const int sign = lu_factor(a, perm);
    if (sign == 0) return 0.0;
    cplx d = static_cast<double>(sign);
    for (std::size_t k = 0; k < n; ++k) d *= a(k, k);
    return d;
}

LogDet logdet_lu(ComplexMatrix a) {
    if (!a.square()) throw GridMismatch("logdet_lu: matrix not square");
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm;
    const int sign = lu_factor(a, perm);
    if (sign == 0) return {-std::numeric_limits<double>::infinity(), 0.0};
    double log_abs = 0.0;
    double arg = (sign < 0) ? M_PI : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        log_abs += std::log(std::abs(a(k, k)));
        arg += std::arg(a(k, k));
    }
    arg = std::remainder(arg, 2.0 * M_PI);
    return {log_abs, arg};
}

ComplexMatrix solve_lu(ComplexMatrix a, ComplexMatrix b, double rel_tol) {
    if (!a.square() || a.rows() != b.rows()) throw GridMismatch("solve_lu: shape mismatch");
    const std::size_t n = a.rows();
    const double scale = a.max_abs();
    std::vector<std::size_t> perm;
    const int sign = lu_factor(a, perm);
    if (sign == 0) throw Singular("solve_lu: zero pivot");
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(a(k, k)) < rel_tol * scale) throw Singular("solve_lu: pivot below tolerance");
    // apply permutation to rows of b
    for (std::size_t k = 0; k < n; ++k) {
        if (perm[k] != k)
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(perm[k], j));
    }
    // forward substitution (unit lower triangular)
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) {
            const cplx f = a(i, k);
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) {
            const cplx f = a(ii, k);
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) b(ii, j) -= f * b(k, j);
        }
        const cplx d = a(ii, ii);
        for (std::size_t j = 0; j < b.cols(); ++j) b(ii, j) /= d;
    }
    return b;
}

ComplexMatrix inverse(const ComplexMatrix& a, double rel_tol) {
    return solve_lu(a, ComplexMatrix::identity(a.rows()), rel_tol);
}

} // namespace etaforge::numkit
