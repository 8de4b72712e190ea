#pragma once

#include <functional>
#include <vector>

#include "etaforge/complex_matrix.hpp"
#include "etaforge/grid.hpp"
#include "etaforge/moyal.hpp"
#include "etaforge/smoothing.hpp"

namespace etaforge::adiabatic {

using moyal::FormalSeries;
using moyal::HermiteMatrix;
using numkit::ComplexMatrix;
using numkit::cplx;
using numkit::Grid2D;

// Group elements Id + P are represented by their perturbation series P;
// the identity never fits a Schwartz grid, so it stays implicit.

/// (Id + P)(Id + Q) = Id + (P + Q + P * Q).
FormalSeries group_mul(const FormalSeries& p, const FormalSeries& q);

/// Perturbation W of the star inverse: (Id + W) * (Id + P) = Id, found by
/// order-by-order Neumann recursion; both-sided residual is checked to
/// check_tol.  Requires Id + P_0 pointwise invertible (Singular).
FormalSeries formal_inverse(const FormalSeries& p, double check_tol = 1e-9);

/// Residual max-norm of (Id+P)*(Id+W) - Id through the truncation order.
double group_inverse_residual(const FormalSeries& p, const FormalSeries& w);

/// alpha_1 evaluated on (gamma, gamma-dot) = (Id + P, Pdot): the
/// epsilon^1 coefficient of gamma^{-1} * gamma-dot, traced and integrated
/// with the quantized-trace normalization (one factor of 2 pi per
/// oscillator pair), so loop integrals land on 2 pi i Z.  inverse_tol
/// bounds the star-inverse residual; rough symbols need it loosened to
/// what their grid resolution supports.
cplx alpha1(const FormalSeries& p, const FormalSeries& pdot, double inverse_tol = 1e-9);

/// Integral of alpha_1 along a path s -> Id + P(s), s in [0, 1] (or a
/// loop when closed); the s-derivative is taken by 4th-order differences
/// on uniform nodes (periodic stencils when closed).  adet of the path
/// endpoint is exp of this when the path starts at Id.
cplx adet_log(const std::function<FormalSeries(double)>& path, std::size_t nodes, bool closed,
              double inverse_tol = 1e-9);

/// Same with the s-derivative supplied analytically; quadrature then
/// runs on Gauss-Legendre panels and converges spectrally for smooth
/// paths.
cplx adet_log(const std::function<FormalSeries(double)>& path,
              const std::function<FormalSeries(double)>& pathdot, std::size_t panels,
              bool closed, double inverse_tol = 1e-9);

/// exp(adet_log) for an open path from Id.
cplx adet(const std::function<FormalSeries(double)>& path_from_id, std::size_t nodes = 96);
cplx adet(const std::function<FormalSeries(double)>& path_from_id,
          const std::function<FormalSeries(double)>& pathdot, std::size_t panels = 12);

/// Fredholm determinant through the Hermite quantization: det(Id + Qhat).
/// Throws Singular when |det| falls below singular_rel_tol relative to
/// the scale of the factors.
cplx det_eps(const HermiteMatrix& q_hat, double singular_rel_tol = 1e-12);
cplx det_eps(const Grid2D& q, double hbar, std::size_t m,
             const moyal::QuantizeOptions& opts = {});

/// Relative change of det_eps under m -> m + 8 (truncation stability).
double det_eps_m_stability(const Grid2D& q, double hbar, std::size_t m,
                           const moyal::QuantizeOptions& opts = {});

/// log det along a discretized group path of full matrices Id + Qhat,
/// with |det| telescoped exactly and the phase unwrapped step by step
/// (PhaseJump on steps reaching pi).
cplx path_logdet(const std::vector<ComplexMatrix>& group_path);

/// Laurent data of log det_eps in the deformation parameter:
///   log det_eps(A) = sum_{k<n} a_k eps^{k-n} + log F(eps),  F(0) = F0.
struct LaurentExpansion {
    int n = 1;
    std::vector<cplx> singular;     // a_k, coefficient of eps^{k-n}
    cplx log_f0 = 0.0;              // constant term
    cplx f0 = 1.0;                  // exp(log_f0)
    double residual = 0.0;
    double route_disagreement = 0.0;
};

/// Fits log det_eps samples (provided per route so independent paths can
/// be compared) against {eps^{-n}, ..., 1, eps, ...}.  eps_samples must
/// be a decreasing ladder with at least 6 entries; routes beyond the
/// first are used for the path-independence check (PathDependent above
/// path_tol).
LaurentExpansion laurent_of_logdet(const std::function<cplx(double, int)>& logdet_route,
                                   std::size_t routes, const std::vector<double>& eps_samples,
                                   int sing_depth = 1, int max_reg_power = 2,
                                   double path_tol = 1e-6);

/// Loop of 2x2 group elements generating the fundamental group: the
/// degree-one map S^3 -> SU(2) transported to S^1 x R^2 through an
/// analytically compactified radial chart (chi = pi tanh(r/r0)); the
/// perturbation decays like e^{-2r/r0} and the loop closes at s = 0 to
/// machine precision.
struct GeneratorLoop {
    double r0 = 1.0;

    ComplexMatrix value(double s, double t, double tau) const;
    Grid2D perturbation(double s, double half_width, std::size_t n) const;
    /// Chart over (s, t, tau) for the h3 degree certificate.
    smoothing::ChartS3 chart(std::size_t nodes_s, std::size_t nodes_plane) const;
};

} // namespace etaforge::adiabatic
