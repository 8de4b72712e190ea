#pragma once

#include <functional>
#include <vector>

#include "etaforge/complex_matrix.hpp"
#include "etaforge/grid.hpp"
#include "etaforge/suspended.hpp"

namespace etaforge::moyal {

using numkit::ComplexMatrix;
using numkit::cplx;
using numkit::Grid2D;

/// Truncated power series in the deformation parameter with Grid2D
/// coefficients; arithmetic drops orders beyond kmax uniformly.
struct FormalSeries {
    std::vector<Grid2D> coeff;  // index = power of epsilon, 0..kmax

    std::size_t kmax() const { return coeff.size() - 1; }
    const Grid2D& geometry() const { return coeff.front(); }

    static FormalSeries zero(double half_width, std::size_t n, std::size_t fiber_dim,
                             std::size_t kmax);
    static FormalSeries identity(double half_width, std::size_t n, std::size_t fiber_dim,
                                 std::size_t kmax);

    FormalSeries& operator+=(const FormalSeries& o);
    FormalSeries& operator-=(const FormalSeries& o);
    FormalSeries& operator*=(cplx s);

    bool same_shape(const FormalSeries& o) const;
    double max_abs() const;
};

/// Single bidifferential term of the star product:
/// (-i/2)^q / q! * sum_r C(q,r) (-1)^{q-r} (dt^r dtau^{q-r} a)(dtau^r dt^{q-r} b),
/// the coefficient of epsilon^q in a * b for epsilon-independent symbols.
Grid2D star_term(const Grid2D& a, const Grid2D& b, int q,
                 double envelope_tol = numkit::kDefaultEnvelopeTol);

/// Star product of formal series; coefficient of epsilon^sigma collects
/// mu + nu + q = sigma.  The epsilon^0 part is the pointwise product and
/// t * tau - tau * t = -i epsilon.
FormalSeries star_formal(const FormalSeries& a, const FormalSeries& b,
                         double envelope_tol = numkit::kDefaultEnvelopeTol);

/// Truncated matrix of a quantized symbol in the Hermite x fiber basis;
/// row/column index is hermite_index * fiber_dim + fiber_index.
struct HermiteMatrix {
    double hbar = 0.0;
    std::size_t m = 0;
    std::size_t fiber_dim = 1;
    ComplexMatrix matrix;
    double tail_energy = 0.0;

    std::size_t dim() const { return m * fiber_dim; }
};

struct QuantizeOptions {
    double tail_tol = 1e30;        // throw TruncationDominated above this
    double envelope_tol = numkit::kDefaultEnvelopeTol;
    double band_tol = 1e-12;       // kernel band cutoff relative to peak
};

/// Weyl quantization of a Schwartz grid symbol with parameter hbar:
/// matrix elements <phi_i e_r, Op(a) phi_j e_s> by quadrature of the
/// integral kernel.  Conventions: Op(t) = multiplication, Op(tau) =
/// i hbar d/dt, so Op(t^2 + tau^2) is the oscillator with spectrum
/// hbar(2k+1) and quantization intertwines the star product above.
HermiteMatrix weyl_quantize(const Grid2D& a, double hbar, std::size_t m,
                            const QuantizeOptions& opts = {});

/// Rectangular block [0, m_rows) x [0, m_cols) of the same matrix (fiber
/// blocks included); used where only low Hermite components are needed.
ComplexMatrix weyl_quantize_block(const Grid2D& a, double hbar, std::size_t m_rows,
                                  std::size_t m_cols, const QuantizeOptions& opts = {});

/// Exact ladder-algebra quantization of a descriptor whose polynomial
/// part has total degree <= 2 (monomials 1, t, tau, t^2, tau^2, t tau);
/// an optional Schwartz part is quantized on the supplied grid geometry.
HermiteMatrix weyl_quantize(const suspended::DescriptorFamily& a, double hbar, std::size_t m,
                            double grid_half_width = 10.0, std::size_t grid_points = 256,
                            const QuantizeOptions& opts = {});

/// Radial symbols a = f(t^2 + tau^2) quantize to Hermite-diagonal
/// operators with matrix-valued weights
///   A_k = (1/hbar) int_0^inf f(u) (-1)^k L_k(2u/hbar) e^{-u/hbar} du;
/// evaluated by Laguerre recurrence on a dense radial grid.
HermiteMatrix weyl_quantize_radial(const std::function<ComplexMatrix(double)>& f_of_r2,
                                   std::size_t fiber_dim, double hbar, std::size_t m,
                                   std::size_t quad_points = 0);

/// Ladder matrices of the position/momentum pair on m Hermite modes:
/// T = Op(t), Y = Op(tau) with [T, Y] = -i hbar (exact below the
/// truncation edge).
ComplexMatrix op_t(double hbar, std::size_t m);
ComplexMatrix op_tau(double hbar, std::size_t m);

/// Composition oracle: quantize(a) . quantize(b), the exact star_epsilon
/// composition up to basis truncation.
HermiteMatrix star_eps_oracle(const Grid2D& a, const Grid2D& b, double hbar, std::size_t m,
                              const QuantizeOptions& opts = {});
HermiteMatrix oracle_product(const HermiteMatrix& a, const HermiteMatrix& b);

/// Trace with the physical normalization Tr(Op(a)) ~ (2 pi hbar)^{-1} int a.
cplx oracle_trace(const HermiteMatrix& a);

/// C-infinity flat-top window: exactly 1 on |x| <= flat, exactly 0 on
/// |x| >= cut, smooth in between.  Used to bring polynomial probes onto
/// Schwartz grids without windowing error at core evaluation sites.
double flat_window(double x, double flat, double cut);

} // namespace etaforge::moyal
