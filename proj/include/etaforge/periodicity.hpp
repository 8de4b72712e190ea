#pragma once

#include <functional>
#include <vector>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::periodicity {

using numkit::ComplexMatrix;
using numkit::cplx;

/// Quillen metric of an invertible matrix through the zeta route:
/// exp(-zeta'(0)/2) over the spectrum of (D+Q)*(D+Q), which collapses to
/// |det(D+Q)| at matrix scale.
double quillen_metric(const ComplexMatrix& dplusq, double sing_tol = 1e-14);

/// Matrix family over S^2 acting between clutched bundles, presented in
/// the northern trivialization with unitary clutching maps on the
/// overlap: a section v of the source satisfies v_N = psi_src(phi) v_S,
/// so the southern expression of the family is
///   d_south = psi_tgt(phi)^{-1} d_north psi_src(phi).
/// Globally defined matrix functions (trivial clutches) always carry a
/// flat determinant bundle at finite rank; every nontrivial degree enters
/// through the clutches, the way elliptic families inherit theirs from
/// the geometry they act on.
struct FamilyS2 {
    std::size_t dim = 0;
    std::function<ComplexMatrix(double, double)> d_north;  // theta in [0, pi], phi in [0, 2 pi)
    std::function<ComplexMatrix(double)> source_clutch;    // empty = Id
    std::function<ComplexMatrix(double)> target_clutch;    // empty = Id

    // Optional edge-exact Gram matrices D*D and DD* on the equator in
    // northern coordinates.  Quantized families provide these from a
    // larger truncation: the compression of the product, unlike the
    // product of compressions, carries no spurious kernel at the
    // truncation edge.
    std::function<ComplexMatrix(double)> equator_gram_source;
    std::function<ComplexMatrix(double)> equator_gram_target;

    ComplexMatrix north(double theta, double phi) const;
    ComplexMatrix south(double theta, double phi) const;
    ComplexMatrix src_clutch(double phi) const;
    ComplexMatrix tgt_clutch(double phi) const;
    ComplexMatrix gram_source(double phi) const;  // D*D at the equator
    ComplexMatrix gram_target(double phi) const;  // DD* at the equator

    /// Winding of det(psi_src) - det-winding oracle for the clutching.
    int clutch_degree(std::size_t nodes = 512) const;
};

struct ChartSection {
    ComplexMatrix q;    // constant perturbation in the chart trivialization
    int seed = 0;
    double scale = 0.0;
    double min_det = 0.0;  // smallest |det| over the chart samples
};

struct DetBundleDescription {
    ChartSection north, south;
    std::vector<cplx> transition;  // section det-ratios over the equator
    int degree = 0;
    double cocycle_residual = 0.0;  // three-chart multiplicativity defect
};

struct DegreeOptions {
    double overlap_deg = 15.0;        // overlap half-band around the equator
    std::size_t equator_nodes = 512;
    std::size_t chart_theta = 24;
    std::size_t chart_phi = 48;
    std::size_t seeds = 6;
    double invert_tol = 1e-8;         // relative min |det| accepted
    double base_scale = 0.5;
};

/// Trivializing sections per polar chart (deterministic seed escalation),
/// equatorial transition by determinant ratios in a common
/// trivialization, degree as its winding.  The cocycle residual is
/// measured on a three-chart refinement.  Faithful for families between
/// different bundles; endomorphism-type families (equal clutches) always
/// come out flat here and are handled by the spectral route below.
DetBundleDescription det_bundle_degree(const FamilyS2& f, const DegreeOptions& opts = {});

/// Degree of the determinant line built from the [0, lambda) spectral
/// subbundles along the equator (the Quillen construction): the
/// difference of the clutch windings of det H^+ and det H^-, each
/// computed from reference-projected eigenframes of D*D and DD* in the
/// two chart trivializations.  This is the construction that transports
/// through the doubling isomorphism.
int spectral_band_degree(const FamilyS2& f, double lambda, std::size_t nodes = 512,
                         int ref_seed = 5);

/// The spectral-projector section value of detdirac-style charts:
/// det(P^- (D+Q) P^+ restricted to the [0, lambda) eigenspaces) times the
/// determinant of A(Q, lambda) = (D + P^- Q P^+)^{-1}(D + Q).  Ratios
/// between sections at the same point are lambda-independent.
cplx quillen_section_value(const ComplexMatrix& d, const ComplexMatrix& q, double lambda);

/// det of the (lambda, mu) eigenband of D in its singular bases; the
/// modulus of the transition under a lambda -> mu chart change.
cplx eigenband_determinant(const ComplexMatrix& d, double lambda, double mu);

/// Hermite-basis matrix of the doubled operator
/// [[i t - tau, D*], [D, i t + tau]] on m oscillator modes; dimension
/// 2 m k.  This module quantizes with [t, tau] = +i hbar so the block
/// identity carries the minus shift on the D*D side, matching the
/// spectral statements it is tested against.
ComplexMatrix doubled_quantized(const ComplexMatrix& d, double hbar, std::size_t m);

/// The doubled family over the base: the oscillator factor is clutch
/// free, so both clutches become diag(psi_src, psi_tgt) tensored over the
/// Hermite modes (an endomorphism-type family).
FamilyS2 doubled_family(const FamilyS2& base, double hbar, std::size_t m);

struct DoubledSpectra {
    std::vector<double> lower;      // eig of Dhat* Dhat
    std::vector<double> upper;      // eig of Dhat Dhat*
    std::vector<double> predicted;  // block identity below the cutoff
    double cutoff = 0.0;            // hbar * 2m/3
    double residual = 0.0;          // multiset distance below the cutoff
};

/// Spectra of the doubled quantized operator against the block identity
/// {mu_j + hbar(2k+1) - hbar} union {nu_j + hbar(2k+1) + hbar} with mu,
/// nu the spectra of D*D and DD*.  The product is formed two modes above
/// the truncation so the kept block is edge-exact.
DoubledSpectra doubled_quantized_spectrum(const ComplexMatrix& d, double hbar, std::size_t m);

struct LowEigReport {
    std::size_t dim_base = 0;
    std::size_t dim_doubled = 0;
    double eigenvalue_mismatch = 0.0;
    double phi_isometry_defect = 0.0;
    double phi_relation_residual = 0.0;  // Dhat Phi+(f) vs Phi-(D f)
};

/// Correspondence of the [0, lambda) eigenspaces of Dhat*Dhat with those
/// of D*D, lambda < 2 hbar: dimensions, eigenvalues, and the ground-state
/// tensor maps Phi+- with Dhat Phi+ = Phi- D.  EigenvalueOnThreshold if
/// lambda grazes the spectrum.
LowEigReport low_eigenspace_correspondence(const ComplexMatrix& d, double hbar, std::size_t m,
                                           double lambda);

struct PeriodicityReport {
    int clutch_oracle = 0;
    int degree_base_sections = 0;
    int degree_base_spectral = 0;
    std::vector<double> hbars;
    std::vector<int> degree_doubled;
    bool consistent = false;
};

/// Degree of Det(D) (section route and spectral route) against the
/// spectral degree of the doubled quantized family at each hbar; the
/// band cut for the doubled side sits midway between the top of the
/// lowest band and the next oscillator level.
PeriodicityReport periodicity_check(const FamilyS2& f, const std::vector<double>& hbars,
                                    std::size_t m, const DegreeOptions& opts = {});

} // namespace etaforge::periodicity
