#pragma once

#include <functional>
#include <vector>

#include "etaforge/adiabatic.hpp"
#include "etaforge/complex_matrix.hpp"
#include "etaforge/grid.hpp"

namespace etaforge::eta {

using numkit::ComplexMatrix;
using numkit::cplx;
using numkit::Grid1D;

/// Arithmetic half-lattice of eigenvalues sign * (j + alpha) * beta for
/// j >= j0, alpha in (0, 1), beta > 0.
struct LatticeTail {
    double alpha = 0.5;
    double beta = 1.0;
    long j0 = 0;
    int sign = +1;
};

/// Finite eigenvalue list plus optional signed lattice tails; models an
/// invertible self-adjoint elliptic operator.
struct SpectralModel {
    std::vector<double> finite;  // nonzero reals, multiplicity by repetition
    std::vector<LatticeTail> tails;

    void validate() const;  // SingularSpectrum / TailDivergence
};

/// Hurwitz zeta by Euler-Maclaurin: eight correction terms, summation
/// crossover once x + n >= 20.  Exact at z = 0 and z = -1 against the
/// Bernoulli closed forms, which the tests pin down.
double hurwitz_zeta(double z, double x);

/// Analytic continuation of sum sgn(a_j) |a_j|^{-z} to z = 0: the finite
/// part contributes #pos - #neg, each tail sign * zeta_H(0, alpha + j0).
double eta_spectral(const SpectralModel& s);

struct EtaSpectralReport {
    double value = 0.0;             // eta at z = 0
    double window_variation = 0.0;  // max |eta(z) - eta(0)| over |z| <= 0.05
};
/// Reports the continuation value together with its variation on a small
/// window around z = 0, so pole-like behavior would be visible rather
/// than silently regularized.
EtaSpectralReport eta_spectral_report(const SpectralModel& s);

// ------------------------------------------------------------------ b-Tr

struct BtrOptions {
    double window_lo = 32.0;
    double window_hi = 512.0;
    std::size_t t_samples = 32;   // geometric ladder across the window
    int fit_min_power = -3;
    // resolvent and lattice expansions carry no logarithms (the atan
    // remainders expand in pure powers); callers whose inputs do produce
    // them opt in, at the price of a wider window for conditioning
    bool with_logs = false;
    double lambda_factor = 40.0;  // lattice truncation at |a| <= factor * window_hi
    double residual_tol = 1e-5;
};

/// b-Tr of the resolvent family B(tau) = (A + i tau)^{-1} for a spectral
/// model: the N-fold antiderivative of Tr d^N B is assembled in closed
/// form per eigenvalue, lattice tails are truncated with an integral
/// correction, and the T^0 coefficient is read off by the asymptotic
/// fitter.  Each positive eigenvalue contributes pi, each negative -pi.
cplx btr_resolvent(const SpectralModel& s, int n_deriv = 2, const BtrOptions& opts = {});

/// Schwartz one-parameter families reduce to the plain integral.
cplx btr(const Grid1D& family, double envelope_tol = numkit::kDefaultEnvelopeTol);

/// The same Grid input pushed through the generic route: spectral N-th
/// derivative, N-fold cumulative integration from 0, window fit.  Used by
/// the N-independence checks.
cplx btr_grid_nfold(const Grid1D& family, int n_deriv, const BtrOptions& opts = {});

/// Descriptor input: Tr B as a callable with declared polynomial degree.
/// n_deriv = 0 integrates the trace directly (admissible when it decays
/// integrably up to logs); n_deriv > poly_degree is required otherwise
/// (ThresholdViolated), with the N-th derivative callable supplied.
struct BtrCallable {
    std::function<cplx(double)> trace;              // Tr B(tau)
    std::function<cplx(double, int)> dtrace;        // d^n/dtau^n Tr B
    int poly_degree = -1;
};
cplx btr_callable(const BtrCallable& b, int n_deriv, const BtrOptions& opts = {});

// ------------------------------------------------------------------- eta

/// eta of the spectral family A + i tau through the regularized trace:
/// (1/pi) bTr((A + i tau)^{-1}).
double eta_psus(const SpectralModel& s, int n_deriv = 2, const BtrOptions& opts = {});

/// eta of an invertible family Id + L(tau) with L Schwartz (sampled):
/// (1/(pi i)) int tr((Id+L)^{-1} L') dtau, the derivative spectral.
cplx eta_psus(const Grid1D& family_minus_id,
              double envelope_tol = numkit::kDefaultEnvelopeTol);

/// eta of a general invertible product-suspended family given as
/// callables; the trace of A^{-1} dA/dtau goes through btr_callable.
cplx eta_family(const std::function<ComplexMatrix(double)>& a,
                const std::function<ComplexMatrix(double)>& adot, int n_deriv = 0,
                const BtrOptions& opts = {});

struct MultiplicativityReport {
    cplx eta_a, eta_b, eta_ab;
    double defect = 0.0;  // |eta(AB) - eta(A) - eta(B)|
};
/// Log-multiplicativity check on sampled Schwartz families.
MultiplicativityReport eta_multiplicativity_check(const Grid1D& a_minus_id,
                                                  const Grid1D& b_minus_id);

struct TauReport {
    double eta_base = 0.0;
    cplx eta_perturbed;
    cplx eta_shift;
    int winding = 0;
    cplx tau;  // e^{i pi eta} of the perturbed family
};
/// eta(A (Id+L)) - eta(A) = 2 * winding(det(Id+L)) for a spectral family
/// A = diag(model) + i tau and a Schwartz loop L given analytically.  The
/// perturbed eta is computed directly from the product family's trace,
/// not via multiplicativity.
TauReport tau_invariant(const SpectralModel& base,
                        const std::function<ComplexMatrix(double)>& loop,
                        const std::function<ComplexMatrix(double)>& loop_dot,
                        const BtrOptions& opts = {});

// -------------------------------------------------------- adiabatic eta

/// Formal family over one product-suspended parameter sigma with two
/// quantized variables: P(sigma) and its sigma-derivative.
struct AdiabaticFamily {
    std::function<adiabatic::FormalSeries(double)> p;
    std::function<adiabatic::FormalSeries(double)> pdot;
    double sigma_half_width = 8.0;
    std::size_t sigma_samples = 96;
};

/// Constant (eps^0) term of the expansion of (1/(pi i)) bTr(A^{-1} * A'):
/// the sigma-integral of the eps^1 star coefficient with the quantized
/// trace normalization.  Families independent of the quantized variables
/// degenerate to eta_psus, which callers should invoke directly.
cplx eta_adiabatic(const AdiabaticFamily& fam);

} // namespace etaforge::eta
