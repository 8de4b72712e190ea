#pragma once

#include <vector>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::numkit {

struct EigResult {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // unitary, columns match eigenvalues
};

/// Hermitian eigensolver: Householder tridiagonalization followed by
/// implicit QL with Wilkinson shifts, 64 iterations per eigenvalue cap.
///
/// Throws NotHermitian if max |A - A*| exceeds herm_tol, NoConvergence on
/// iteration cap.
EigResult eig_hermitian(const ComplexMatrix& a, double herm_tol = 1e-10);

/// Eigenvalues only (same reduction, no vector accumulation).
std::vector<double> eigvals_hermitian(const ComplexMatrix& a, double herm_tol = 1e-10);

} // namespace etaforge::numkit
