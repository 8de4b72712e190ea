#include "etaforge/adiabatic.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/asymfit.hpp"
#include "etaforge/errors.hpp"
#include "etaforge/parallel.hpp"

namespace etaforge::adiabatic {

FormalSeries group_mul(const FormalSeries& p, const FormalSeries& q) {
    FormalSeries out = moyal::star_formal(p, q);
    out += p;
    out += q;
    return out;
}

FormalSeries formal_inverse(const FormalSeries& p, double check_tol) {
    const Grid2D& geom = p.geometry();
    const std::size_t n = geom.points_per_axis();
    const std::size_t kmax = p.kmax();

    // pointwise inverse of the unit part Id + P_0
    Grid2D unit_inv(geom.half_width(), n, geom.fiber_dim());
    const ComplexMatrix id = ComplexMatrix::identity(geom.fiber_dim());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ComplexMatrix g = p.coeff[0].value(i, j);
            g += id;
            try {
                unit_inv.set_value(i, j, numkit::inverse(g));
            } catch (const Singular&) {
                throw Singular("formal_inverse: Id + P_0 fails pointwise invertibility");
            }
        }

    // W_s (Id + P_0) = -(P_s + cross terms)  order by order
    FormalSeries w = FormalSeries::zero(geom.half_width(), n, geom.fiber_dim(), kmax);
    for (std::size_t sigma = 0; sigma <= kmax; ++sigma) {
        Grid2D rhs = p.coeff[sigma];
        rhs *= cplx(-1.0);
        for (std::size_t mu = 0; mu <= sigma; ++mu)
            for (std::size_t nu = 0; nu + mu <= sigma; ++nu) {
                const int q = static_cast<int>(sigma - mu - nu);
                if (mu == sigma && nu == 0 && q == 0) continue;  // the W_sigma P_0 term
                Grid2D term = moyal::star_term(w.coeff[mu], p.coeff[nu], q);
                rhs -= term;
            }
        // W_sigma (Id + P_0) = -(P_sigma + cross terms)
        w.coeff[sigma] = pw_product(rhs, unit_inv);
    }

    const double resid = group_inverse_residual(p, w);
    if (resid > check_tol) throw Singular("formal_inverse: inverse residual above tolerance");
    return w;
}

double group_inverse_residual(const FormalSeries& p, const FormalSeries& w) {
    FormalSeries right = group_mul(p, w);
    FormalSeries left = group_mul(w, p);
    return std::max(right.max_abs(), left.max_abs());
}

cplx alpha1(const FormalSeries& p, const FormalSeries& pdot, double inverse_tol) {
    if (!p.same_shape(pdot)) throw GridMismatch("alpha1: shape mismatch");
    const FormalSeries w = formal_inverse(p, inverse_tol);
    // (Id + W) * Pdot, epsilon^1 coefficient
    Grid2D acc = pdot.coeff.size() > 1 ? pdot.coeff[1]
                                       : Grid2D(p.geometry().half_width(),
                                                p.geometry().points_per_axis(),
                                                p.geometry().fiber_dim());
    for (std::size_t mu = 0; mu <= 1 && mu <= w.kmax(); ++mu)
        for (std::size_t nu = 0; nu + mu <= 1 && nu <= pdot.kmax(); ++nu) {
            const int q = static_cast<int>(1 - mu - nu);
            acc += moyal::star_term(w.coeff[mu], pdot.coeff[nu], q);
        }
    // the quantized trace carries (2 pi eps)^{-1} per oscillator pair, so
    // the eps^0 coefficient of Tr_eps(gamma^{-1} * gamma-dot) is the
    // plane integral of the eps^1 symbol coefficient over 2 pi; loop
    // integrals of alpha_1 then land on 2 pi i Z as the winding argument
    // demands
    return acc.trace_integral() / (2.0 * M_PI);
}

namespace {

FormalSeries fd_derivative(const std::vector<FormalSeries>& samples, std::size_t i, double h,
                           bool closed) {
    const std::size_t n = samples.size();
    auto at = [&](long k) -> const FormalSeries& {
        if (closed) {
            const long nn = static_cast<long>(n);
            return samples[static_cast<std::size_t>(((k % nn) + nn) % nn)];
        }
        return samples[static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(n) - 1))];
    };
    const long li = static_cast<long>(i);
    if (closed || (i >= 2 && i + 2 < n)) {
        FormalSeries d = at(li + 1);
        d -= at(li - 1);
        d *= 8.0;
        FormalSeries e = at(li + 2);
        e -= at(li - 2);
        d -= e;
        d *= cplx(1.0 / (12.0 * h));
        return d;
    }
    const bool left = i < 2;
    const double s = left ? 1.0 : -1.0;
    auto v = [&](long o) { return at(left ? li + o : li - o); };
    FormalSeries d = v(0);
    d *= cplx(-25.0 / 12.0);
    FormalSeries t1 = v(1);
    t1 *= cplx(4.0);
    d += t1;
    FormalSeries t2 = v(2);
    t2 *= cplx(-3.0);
    d += t2;
    FormalSeries t3 = v(3);
    t3 *= cplx(4.0 / 3.0);
    d += t3;
    FormalSeries t4 = v(4);
    t4 *= cplx(-0.25);
    d += t4;
    d *= cplx(s / h);
    return d;
}

} // namespace

cplx adet_log(const std::function<FormalSeries(double)>& path, std::size_t nodes, bool closed,
              double inverse_tol) {
    const std::size_t npts = closed ? nodes : nodes + 1;
    const double h = 1.0 / static_cast<double>(nodes);
    std::vector<FormalSeries> samples;
    samples.reserve(npts);
    for (std::size_t i = 0; i < npts; ++i) samples.push_back(path(h * static_cast<double>(i)));

    std::vector<cplx> vals(npts);
    parallel_for(npts, [&](std::size_t i) {
        const FormalSeries dot = fd_derivative(samples, i, h, closed);
        vals[i] = alpha1(samples[i], dot, inverse_tol);
    });

    cplx acc = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        double w = 1.0;
        if (!closed && (i == 0 || i + 1 == npts)) w = 0.5;
        acc += w * vals[i];
    }
    return acc * h;
}

cplx adet_log(const std::function<FormalSeries(double)>& path,
              const std::function<FormalSeries(double)>& pathdot, std::size_t panels,
              bool closed, double inverse_tol) {
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    (void)closed;  // quadrature nodes never sit on the seam
    const double plen = 1.0 / static_cast<double>(panels);
    std::vector<double> s(panels * 8);
    std::vector<double> w(panels * 8);
    for (std::size_t p = 0; p < panels; ++p) {
        const double c = (static_cast<double>(p) + 0.5) * plen;
        for (int i = 0; i < 4; ++i) {
            s[p * 8 + 2 * i] = c - 0.5 * plen * gx[i];
            s[p * 8 + 2 * i + 1] = c + 0.5 * plen * gx[i];
            w[p * 8 + 2 * i] = w[p * 8 + 2 * i + 1] = gw[i] * 0.5 * plen;
        }
    }
    std::vector<cplx> vals(s.size());
    parallel_for(s.size(), [&](std::size_t i) {
        vals[i] = alpha1(path(s[i]), pathdot(s[i]), inverse_tol);
    });
    cplx acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += w[i] * vals[i];
    return acc;
}

cplx adet(const std::function<FormalSeries(double)>& path_from_id, std::size_t nodes) {
    const FormalSeries start = path_from_id(0.0);
    if (start.max_abs() > 1e-12) throw GridMismatch("adet: path must start at the identity");
    return std::exp(adet_log(path_from_id, nodes, false));
}

cplx adet(const std::function<FormalSeries(double)>& path_from_id,
          const std::function<FormalSeries(double)>& pathdot, std::size_t panels) {
    const FormalSeries start = path_from_id(0.0);
    if (start.max_abs() > 1e-12) throw GridMismatch("adet: path must start at the identity");
    return std::exp(adet_log(path_from_id, pathdot, panels, false));
}

cplx det_eps(const HermiteMatrix& q_hat, double singular_rel_tol) {
    ComplexMatrix g = ComplexMatrix::identity(q_hat.matrix.rows());
    g += q_hat.matrix;
    const auto ld = numkit::logdet_lu(g);
    if (!std::isfinite(ld.log_abs) || std::exp(ld.log_abs) < singular_rel_tol)
        throw Singular("det_eps: Id + Qhat numerically singular");
    return std::exp(cplx(ld.log_abs, ld.arg));
}

cplx det_eps(const Grid2D& q, double hbar, std::size_t m, const moyal::QuantizeOptions& opts) {
    return det_eps(moyal::weyl_quantize(q, hbar, m, opts));
}

double det_eps_m_stability(const Grid2D& q, double hbar, std::size_t m,
                           const moyal::QuantizeOptions& opts) {
    const cplx d1 = det_eps(q, hbar, m, opts);
    const cplx d2 = det_eps(q, hbar, m + 8, opts);
    return std::abs(d1 - d2) / std::max(1e-300, std::abs(d2));
}

cplx path_logdet(const std::vector<ComplexMatrix>& group_path) {
    if (group_path.size() < 2) throw GridMismatch("path_logdet: need at least two nodes");
    numkit::LogDet first = numkit::logdet_lu(group_path.front());
    numkit::LogDet prev = first;
    double phase = 0.0;
    for (std::size_t k = 1; k < group_path.size(); ++k) {
        const numkit::LogDet cur = numkit::logdet_lu(group_path[k]);
        if (!std::isfinite(cur.log_abs)) throw Singular("path_logdet: singular node");
        const double step = std::remainder(cur.arg - prev.arg, 2.0 * M_PI);
        if (std::abs(step) >= M_PI * 0.999)
            throw PhaseJump("path_logdet: phase step reached pi, refine the path");
        phase += step;
        prev = cur;
    }
    return cplx(prev.log_abs - first.log_abs, phase);
}

LaurentExpansion laurent_of_logdet(const std::function<cplx(double, int)>& logdet_route,
                                   std::size_t routes, const std::vector<double>& eps_samples,
                                   int sing_depth, int max_reg_power, double path_tol) {
    if (eps_samples.size() < 6)
        throw GridMismatch("laurent_of_logdet: need at least 6 epsilon samples");
    for (std::size_t i = 1; i < eps_samples.size(); ++i)
        if (eps_samples[i] >= eps_samples[i - 1])
            throw GridMismatch("laurent_of_logdet: epsilon ladder must decrease");

    // fit against T = 1/eps, powers -max_reg_power .. sing_depth; the
    // decreasing eps ladder maps to increasing T as-is
    std::vector<double> t;
    t.reserve(eps_samples.size());
    for (double e : eps_samples) t.push_back(1.0 / e);

    std::vector<std::vector<cplx>> route_vals(routes);
    for (std::size_t r = 0; r < routes; ++r) {
        route_vals[r].reserve(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            route_vals[r].push_back(logdet_route(1.0 / t[i], static_cast<int>(r)));
    }

    LaurentExpansion out;
    out.n = sing_depth;
    std::vector<std::vector<cplx>> route_sing(routes);
    for (std::size_t r = 0; r < routes; ++r) {
        const auto fit =
            numkit::fit_asymptotic(t, route_vals[r], -max_reg_power, sing_depth, false);
        if (r == 0) {
            for (int k = 0; k < sing_depth; ++k) out.singular.push_back(fit.coeff_of(sing_depth - k));
            out.log_f0 = fit.lim();
            out.f0 = std::exp(out.log_f0);
            out.residual = fit.residual;
        }
        for (int k = 0; k < sing_depth; ++k) route_sing[r].push_back(fit.coeff_of(sing_depth - k));
    }
    for (std::size_t r = 1; r < routes; ++r)
        for (int k = 0; k < sing_depth; ++k)
            out.route_disagreement = std::max(
                out.route_disagreement, std::abs(route_sing[r][static_cast<std::size_t>(k)] -
                                                 route_sing[0][static_cast<std::size_t>(k)]));
    if (out.route_disagreement > path_tol)
        throw PathDependent("laurent_of_logdet: singular coefficients disagree between paths");
    return out;
}

// ------------------------------------------------------- generator loop

ComplexMatrix GeneratorLoop::value(double s, double t, double tau) const {
    // sigma runs over the line as s runs over the loop; the radial angle
    // chi = pi tanh(r / r0) compactifies analytically, so the symbol is
    // exponentially Schwartz and its grid representation has exponential
    // spectral decay (a flat cutoff would be Gevrey-rough instead)
    const double half = 0.5 * s;
    const double sn = std::sin(half);
    const double cs = std::cos(half);
    if (std::abs(sn) < 1e-300) return ComplexMatrix::identity(2);
    const double sigma = -cs / sn;  // -cot(s/2)
    const double r = std::sqrt(sigma * sigma + t * t + tau * tau);
    if (r > 400.0 * r0) return ComplexMatrix::identity(2);
    const double chi = M_PI * std::tanh(r / r0);
    double dir[3] = {0.0, 0.0, 0.0};
    if (r > 1e-300) {
        dir[0] = sigma / r;
        dir[1] = t / r;
        dir[2] = tau / r;
    }
    const double sc = std::sin(chi);
    // antipode of the compactified point, so infinity maps to Id
    return smoothing::su2_from_point(-std::cos(chi), -sc * dir[0], -sc * dir[1], -sc * dir[2]);
}

Grid2D GeneratorLoop::perturbation(double s, double half_width, std::size_t n) const {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    return Grid2D::sample(half_width, n, 2, [&](double t, double tau) {
        ComplexMatrix v = value(s, t, tau);
        v -= id;
        return v;
    });
}

smoothing::ChartS3 GeneratorLoop::chart(std::size_t nodes_s, std::size_t nodes_plane) const {
    smoothing::ChartS3 chart;
    chart.nodes = {nodes_s, nodes_plane, nodes_plane};
    const double lp = 9.0 * r0;
    chart.lo = {0.0, -lp, -lp};
    chart.hi = {2.0 * M_PI, lp, lp};
    // the map is exactly Id outside the support ball, so the plane axes
    // extend periodically; axis order fixes the orientation so the
    // certificate integral comes out +1
    chart.periodic = {true, true, true};
    chart.g = [*this](double s, double tau, double t) { return value(s, t, tau); };
    return chart;
}

} // namespace etaforge::adiabatic
