#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "etaforge/complex_matrix.hpp"
#include "etaforge/grid.hpp"

namespace etaforge::suspended {

using numkit::ComplexMatrix;
using numkit::cplx;
using numkit::Grid1D;
using numkit::Grid2D;

/// Matrix coefficient of the monomial t^pow_t tau^pow_tau.  For
/// one-parameter families pow_t must be zero and tau is the parameter.
struct Monomial {
    int pow_t = 0;
    int pow_tau = 0;
    ComplexMatrix coeff;
};

/// Descriptor form of a product-suspended family: finite polynomial part
/// plus an optional Schwartz part given as a callable.
struct DescriptorFamily {
    int p = 2;  // parameter count, 1 or 2
    std::size_t fiber_dim = 0;
    std::vector<Monomial> poly;
    std::function<ComplexMatrix(double, double)> schwartz;  // may be empty

    ComplexMatrix eval(double t, double tau) const;
    ComplexMatrix eval(double tau) const;  // p = 1
    int poly_degree() const;               // -1 when the polynomial part vanishes
};

/// Regularized suspended trace: (2pi)^{-p} integral of the pointwise
/// trace over the grid box.
cplx tr_sus(const Grid1D& family, double envelope_tol = numkit::kDefaultEnvelopeTol);
cplx tr_sus(const Grid2D& family, double envelope_tol = numkit::kDefaultEnvelopeTol);

/// Sum over path steps of tr_sus(Log(gamma_k^{-1} gamma_{k+1})); the
/// discretized integral of tr_sus(gamma^{-1} d gamma).  Steps must be
/// close enough that the matrix logarithm series converges pointwise
/// (throws Singular otherwise).  The path starts at Id for naive_det and
/// closes on itself for loop integrals.
cplx path_log_integral(const std::vector<Grid2D>& path);

/// exp of the path integral from Id to the endpoint.
cplx naive_det(const std::vector<Grid2D>& path_from_identity);

/// Base-family limits at parameter infinity together with the principal
/// polynomial part.
struct JointSymbol {
    std::vector<double> directions;          // sampled angles on S^{p-1}
    std::vector<ComplexMatrix> base_limits;  // degree-normalized limits per direction
    std::vector<Monomial> principal;         // leading homogeneous coefficients
};

struct FullEllipticity {
    bool fully_elliptic = false;
    JointSymbol joint;
};

/// Full-ellipticity check for a Descriptor family: invertibility of the
/// degree-normalized limits at parameter infinity (two points for p = 1,
/// a sampled circle of radius R for p = 2) and of the leading polynomial
/// part on the sampled directions.  DegenerateOrder if the polynomial
/// part vanishes identically.
FullEllipticity is_fully_elliptic(const DescriptorFamily& family, double radius = 64.0,
                                  std::size_t directions = 32, double inv_tol = 1e-8);

/// One Bott-doubling step: D -> [[it - tau, D*], [D, it + tau]] as a
/// two-parameter descriptor of fiber dimension 2k.
DescriptorFamily bott_double(const ComplexMatrix& d);

/// Winding number of det P around the circle t^2 + tau^2 = R^2,
/// counterclockwise positive.  SingularOnCircle if a node determinant
/// falls below sing_tol relative to the circle maximum; PhaseJump after
/// refinement rounds are exhausted.
int index_susp(const DescriptorFamily& p, double radius, std::size_t initial_nodes = 256,
               double sing_tol = 1e-12);

/// Smallest circle radius at which |det P| dips below tol, scanned
/// outward; nullopt when the scan range is clean.
std::optional<double> scan_singular_radius(const DescriptorFamily& p, double r_max,
                                           std::size_t radial_steps = 128,
                                           std::size_t angular_steps = 64, double tol = 1e-8);

} // namespace etaforge::suspended
