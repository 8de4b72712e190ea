#include "etaforge/suspended.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/errors.hpp"

namespace etaforge::suspended {

namespace {

// Principal log of a matrix near the identity by the Mercator series.
ComplexMatrix log_near_identity(const ComplexMatrix& g, double norm_limit = 0.85) {
    const std::size_t n = g.rows();
    ComplexMatrix x = g;
    x -= ComplexMatrix::identity(n);
    const double nrm = x.frob_norm();
    if (nrm > norm_limit)
        throw Singular("log_near_identity: step too far from identity, refine the path");
    ComplexMatrix term = x;
    ComplexMatrix acc = x;
    // terms decay at least geometrically with ratio nrm
    const int kmax = 96;
    for (int k = 2; k <= kmax; ++k) {
        term = term * x;
        ComplexMatrix contrib = term;
        contrib *= cplx(((k % 2 == 0) ? -1.0 : 1.0) / static_cast<double>(k));
        acc += contrib;
        if (term.frob_norm() / static_cast<double>(k) < 1e-17) break;
    }
    return acc;
}

} // namespace

ComplexMatrix DescriptorFamily::eval(double t, double tau) const {
    ComplexMatrix out(fiber_dim, fiber_dim);
    for (const auto& mono : poly) {
        double w = 1.0;
        for (int a = 0; a < mono.pow_t; ++a) w *= t;
        for (int b = 0; b < mono.pow_tau; ++b) w *= tau;
        ComplexMatrix c = mono.coeff;
        c *= cplx(w);
        out += c;
    }
    if (schwartz) out += schwartz(t, tau);
    return out;
}

ComplexMatrix DescriptorFamily::eval(double tau) const {
    if (p != 1) throw GridMismatch("DescriptorFamily: single-parameter eval on p != 1 family");
    return eval(0.0, tau);
}

int DescriptorFamily::poly_degree() const {
    int deg = -1;
    for (const auto& mono : poly)
        if (mono.coeff.max_abs() > 0.0) deg = std::max(deg, mono.pow_t + mono.pow_tau);
    return deg;
}

cplx tr_sus(const Grid1D& family, double envelope_tol) {
    family.check_envelope(envelope_tol);
    return family.trace_integral() / (2.0 * M_PI);
}

cplx tr_sus(const Grid2D& family, double envelope_tol) {
    family.check_envelope(envelope_tol);
    return family.trace_integral() / (4.0 * M_PI * M_PI);
}

cplx path_log_integral(const std::vector<Grid2D>& path) {
    if (path.size() < 2) throw GridMismatch("path_log_integral: need at least two nodes");
    cplx acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const Grid2D& cur = path[k];
        const Grid2D& nxt = path[k + 1];
        if (!cur.same_geometry(nxt)) throw GridMismatch("path_log_integral: geometry changes along path");
        const std::size_t n = cur.points_per_axis();
        Grid2D step_log(cur.half_width(), n, cur.fiber_dim());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const ComplexMatrix gi = numkit::inverse(cur.value(i, j));
                step_log.set_value(i, j, log_near_identity(gi * nxt.value(i, j)));
            }
        // boundary already decayed for group paths Id + Schwartz, but the
        // log can be constant 0 there; skip the envelope check
        acc += step_log.trace_integral() / (4.0 * M_PI * M_PI);
    }
    return acc;
}

cplx naive_det(const std::vector<Grid2D>& path_from_identity) {
    const Grid2D& start = path_from_identity.front();
    for (std::size_t i = 0; i < start.points_per_axis(); ++i)
        for (std::size_t j = 0; j < start.points_per_axis(); ++j) {
            ComplexMatrix d = start.value(i, j);
            d -= ComplexMatrix::identity(start.fiber_dim());
            if (d.max_abs() > 1e-12)
                throw GridMismatch("naive_det: path must start at the identity");
        }
    return std::exp(path_log_integral(path_from_identity));
}

FullEllipticity is_fully_elliptic(const DescriptorFamily& family, double radius,
                                  std::size_t directions, double inv_tol) {
    const int deg = family.poly_degree();
    if (deg < 1)
        throw DegenerateOrder("is_fully_elliptic: polynomial part carries no parameter dependence");

    FullEllipticity out;
    out.fully_elliptic = true;

    // leading homogeneous part
    for (const auto& mono : family.poly)
        if (mono.pow_t + mono.pow_tau == deg && mono.coeff.max_abs() > 0.0)
            out.joint.principal.push_back(mono);

    const std::size_t ndir = (family.p == 1) ? 2 : directions;
    for (std::size_t k = 0; k < ndir; ++k) {
        double ct, st;
        double angle;
        if (family.p == 1) {
            angle = (k == 0) ? 0.0 : M_PI;
            ct = 0.0;
            st = (k == 0) ? 1.0 : -1.0;  // tau -> +inf / -inf
        } else {
            angle = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(ndir);
            ct = std::cos(angle);
            st = std::sin(angle);
        }

        // degree-normalized values at R, 2R, 4R; Richardson in 1/R kills
        // the leading finite-radius error and flags non-stabilizing data
        ComplexMatrix v[3];
        for (int j = 0; j < 3; ++j) {
            const double r = radius * std::pow(2.0, j);
            v[j] = family.eval(r * ct, r * st);
            v[j] *= cplx(std::pow(1.0 + r * r, -0.5 * static_cast<double>(deg)));
        }
        ComplexMatrix e1 = v[1];
        e1 *= 2.0;
        e1 -= v[0];
        ComplexMatrix e2 = v[2];
        e2 *= 2.0;
        e2 -= v[1];
        ComplexMatrix limit = e2;
        limit *= 4.0;
        limit -= e1;
        limit *= cplx(1.0 / 3.0);
        if (e2.max_abs_diff(e1) > 1e-2 * std::max(1.0, limit.max_abs()))
            out.fully_elliptic = false;  // base family not stabilizing

        out.joint.directions.push_back(angle);
        out.joint.base_limits.push_back(limit);

        if (std::abs(numkit::det_lu(limit)) < inv_tol) out.fully_elliptic = false;

        // principal symbol on this direction
        ComplexMatrix princ(family.fiber_dim, family.fiber_dim);
        for (const auto& mono : out.joint.principal) {
            double w = 1.0;
            for (int a = 0; a < mono.pow_t; ++a) w *= ct;
            for (int b = 0; b < mono.pow_tau; ++b) w *= st;
            ComplexMatrix c = mono.coeff;
            c *= cplx(w);
            princ += c;
        }
        if (std::abs(numkit::det_lu(princ)) < inv_tol) out.fully_elliptic = false;
    }
    return out;
}

DescriptorFamily bott_double(const ComplexMatrix& d) {
    if (!d.square()) throw GridMismatch("bott_double: need a square matrix");
    const std::size_t k = d.rows();
    const std::size_t n = 2 * k;
    DescriptorFamily fam;
    fam.p = 2;
    fam.fiber_dim = n;

    Monomial t_term;
    t_term.pow_t = 1;
    t_term.coeff = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) t_term.coeff(i, i) = cplx(0.0, 1.0);

    Monomial tau_term;
    tau_term.pow_tau = 1;
    tau_term.coeff = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < k; ++i) tau_term.coeff(i, i) = -1.0;
    for (std::size_t i = k; i < n; ++i) tau_term.coeff(i, i) = 1.0;

    Monomial const_term;
    const_term.coeff = ComplexMatrix(n, n);
    const ComplexMatrix dstar = d.adjoint();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const_term.coeff(i, k + j) = dstar(i, j);
            const_term.coeff(k + i, j) = d(i, j);
        }

    fam.poly = {std::move(t_term), std::move(tau_term), std::move(const_term)};
    return fam;
}

int index_susp(const DescriptorFamily& p, double radius, std::size_t initial_nodes,
               double sing_tol) {
    std::size_t nodes = initial_nodes;
    for (int round = 0;; ++round) {
        std::vector<cplx> dets(nodes + 1);
        double max_abs = 0.0, min_abs = 1e300;
        for (std::size_t i = 0; i <= nodes; ++i) {
            const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(nodes);
            const ComplexMatrix v = p.eval(radius * std::cos(th), radius * std::sin(th));
            dets[i] = numkit::det_lu(v);
            max_abs = std::max(max_abs, std::abs(dets[i]));
            min_abs = std::min(min_abs, std::abs(dets[i]));
        }
        if (min_abs < sing_tol * std::max(max_abs, 1.0))
            throw SingularOnCircle("index_susp: determinant vanishes on the circle");
        double total = 0.0;
        bool jump = false;
        for (std::size_t i = 1; i <= nodes; ++i) {
            const double step = std::arg(dets[i] / dets[i - 1]);
            if (std::abs(step) >= M_PI * 0.999) {
                jump = true;
                break;
            }
            total += step;
        }
        if (!jump) return static_cast<int>(std::lround(total / (2.0 * M_PI)));
        if (round == 4) throw PhaseJump("index_susp: phase steps stay too large after refinement");
        nodes *= 2;
    }
}

std::optional<double> scan_singular_radius(const DescriptorFamily& p, double r_max,
                                           std::size_t radial_steps, std::size_t angular_steps,
                                           double tol) {
    for (std::size_t ri = 0; ri <= radial_steps; ++ri) {
        const double r = r_max * static_cast<double>(ri) / static_cast<double>(radial_steps);
        for (std::size_t ai = 0; ai < angular_steps; ++ai) {
            const double th = 2.0 * M_PI * static_cast<double>(ai) / static_cast<double>(angular_steps);
            const ComplexMatrix v = p.eval(r * std::cos(th), r * std::sin(th));
            if (std::abs(numkit::det_lu(v)) < tol) return r;
        }
    }
    return std::nullopt;
}

} // namespace etaforge::suspended
