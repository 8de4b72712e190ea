#pragma once

#include <array>
#include <functional>
#include <vector>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::smoothing {

using numkit::ComplexMatrix;
using numkit::cplx;

/// Finite-rank model of an invertible smoothing perturbation Id + K.
struct SmoothingPerturbation {
    ComplexMatrix k;
    double trace_norm_bound = 0.0;

    ComplexMatrix group_element() const {
        ComplexMatrix g = ComplexMatrix::identity(k.rows());
        g += k;
        return g;
    }
};

/// Fredholm determinant of Id + K, consistent under identity padding.
cplx det_fr(const SmoothingPerturbation& p);
cplx det_fr(const ComplexMatrix& k);

/// Embed K into a larger fiber, padding with zeros so that Id + K gains
/// identity rows; det_fr is invariant under this embedding.
ComplexMatrix pad_identity_embedding(const ComplexMatrix& k, std::size_t new_dim);

/// Closed loop of group elements over S^1.  values[i] = G(theta_i) with
/// theta running over [0, 2pi]; first and last samples must agree within
/// closure_tol and every sample must be invertible.
struct GroupLoop {
    std::vector<double> thetas;
    std::vector<ComplexMatrix> values;
    double closure_tol = 1e-9;

    static GroupLoop sample(std::size_t nodes, const std::function<ComplexMatrix(double)>& g,
                            double closure_tol = 1e-9);
    void validate() const;
};

/// Winding of det over the loop by principal-branch phase accumulation.
/// Adjacent-node phase steps must stay below pi (PhaseJump otherwise);
/// Singular if a node is non-invertible.
int winding_number(const GroupLoop& loop);

/// Same, with automatic midpoint refinement (up to four rounds) when a
/// phase step reaches pi.
int winding_number(const std::function<ComplexMatrix(double)>& g, std::size_t initial_nodes = 64,
                   double closure_tol = 1e-9);

/// (1/2pi i) * loop integral of Tr(G^{-1} dG), the first odd Chern form;
/// quadrature by trapezoid with spectral-accurate differencing in theta.
cplx odd_chern_ch1(const std::function<ComplexMatrix(double)>& g, std::size_t nodes = 256);

/// Map into the group over a 3-parameter chart covering S^3 (up to
/// measure zero).  Periodic axes wrap in the finite-difference stencils;
/// non-periodic axes must carry an integrand vanishing at the ends.
struct ChartS3 {
    std::array<std::size_t, 3> nodes;
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::array<bool, 3> periodic;
    std::function<ComplexMatrix(double, double, double)> g;
};

/// Integral of the pulled-back third odd Chern form,
/// (1/(2pi i)^2) (1!/3!) Tr[(G^{-1}dG)^3].  For loops in the image of a
/// spherical class the result is an integer up to quadrature error; if it
/// is farther than integral_tol from the nearest integer the value is
/// still returned but flagged via NonIntegral.
cplx odd_chern_ch3(const ChartS3& chart, double integral_tol = 1e30);

/// Hopf-coordinate chart for a map S^3 -> group given at quaternion
/// coordinates (x0, x1, x2, x3).
ChartS3 hopf_chart(std::size_t nodes_per_axis,
                   const std::function<ComplexMatrix(double, double, double, double)>& g_of_x);

/// The degree-one map S^3 -> SU(2), x -> x0 Id + i(x1 s1 + x2 s2 + x3 s3).
ComplexMatrix su2_from_point(double x0, double x1, double x2, double x3);

} // namespace etaforge::smoothing
