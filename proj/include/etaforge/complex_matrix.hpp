#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace etaforge::numkit {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.  The workhorse container for all
/// finite-rank models; kept deliberately small (no expression templates).
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diag(std::initializer_list<cplx> entries);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    cplx trace() const;

    /// Max entrywise |a_ij|.
    double max_abs() const;
    /// Frobenius norm.
    double frob_norm() const;
    /// Max |a_ij - b_ij|.
    double max_abs_diff(const ComplexMatrix& other) const;

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Determinant via partially pivoted LU; exact sign tracking of the pivot
/// permutation.  Singular input gives 0 within round-off.
cplx det_lu(ComplexMatrix a);

/// log|det| and arg(det) via the same factorization; avoids overflow for
/// large matrices.  arg is the principal-branch sum of pivot phases.
struct LogDet {
    double log_abs;  // -inf for exactly singular pivots
    double arg;      // accumulated mod 2pi, not unwrapped
};
LogDet logdet_lu(ComplexMatrix a);

/// Solve A X = B by LU with partial pivoting.  Throws Singular if a pivot
/// falls below rel_tol * max_abs(A).
ComplexMatrix solve_lu(ComplexMatrix a, ComplexMatrix b, double rel_tol = 1e-13);

ComplexMatrix inverse(const ComplexMatrix& a, double rel_tol = 1e-13);

} // namespace etaforge::numkit
