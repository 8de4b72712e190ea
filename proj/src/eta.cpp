#include "etaforge/eta.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/asymfit.hpp"
#include "etaforge/errors.hpp"
#include "etaforge/parallel.hpp"

namespace etaforge::eta {

// ---------------------------------------------------------- SpectralModel

void SpectralModel::validate() const {
    for (double a : finite)
        if (a == 0.0 || !std::isfinite(a))
            throw SingularSpectrum("SpectralModel: zero or non-finite eigenvalue");
    for (const auto& tail : tails) {
        if (!(tail.alpha > 0.0 && tail.alpha < 1.0))
            throw TailDivergence("SpectralModel: lattice offset must lie in (0,1)");
        if (!(tail.beta > 0.0)) throw TailDivergence("SpectralModel: lattice spacing must be positive");
        if (tail.j0 < 0) throw TailDivergence("SpectralModel: negative lattice start");
        if (tail.sign != 1 && tail.sign != -1)
            throw TailDivergence("SpectralModel: tail sign must be +-1");
    }
}

// ------------------------------------------------------------ Hurwitz zeta

double hurwitz_zeta(double z, double x) {
    if (x <= 0.0) throw TailDivergence("hurwitz_zeta: x must be positive");
    if (z == 1.0) throw TailDivergence("hurwitz_zeta: pole at z = 1");

    // Euler-Maclaurin coefficients (2k)!/B_{2k}
    static const double recip[8] = {12.0,         -720.0,       30240.0,      -1209600.0,
                                    47900160.0,   -1.8924375803183791e9,      7.47242496e10,
                                    -2.9501307279181642e12};

    long n = 0;
    while (x + static_cast<double>(n) < 20.0) ++n;

    double acc = 0.0;
    for (long j = 0; j < n; ++j) acc += std::pow(x + static_cast<double>(j), -z);
    const double y = x + static_cast<double>(n);

    acc += std::pow(y, 1.0 - z) / (z - 1.0);
    acc += 0.5 * std::pow(y, -z);

    // sum_k B_2k/(2k)! * z(z+1)...(z+2k-2) * y^{-z-2k+1}
    double rising = z;  // z ... (z + 2k - 2), updated per k
    double ypow = std::pow(y, -z - 1.0);
    for (int k = 1; k <= 8; ++k) {
        acc += rising * ypow / recip[k - 1];
        rising *= (z + 2.0 * k - 1.0) * (z + 2.0 * k);
        ypow /= y * y;
    }
    return acc;
}

double eta_spectral(const SpectralModel& s) {
    s.validate();
    double value = 0.0;
    for (double a : s.finite) value += (a > 0.0) ? 1.0 : -1.0;
    for (const auto& tail : s.tails)
        value += static_cast<double>(tail.sign) *
                 hurwitz_zeta(0.0, tail.alpha + static_cast<double>(tail.j0));
    return value;
}

EtaSpectralReport eta_spectral_report(const SpectralModel& s) {
    s.validate();
    auto eta_at = [&](double z) {
        double v = 0.0;
        for (double a : s.finite) v += ((a > 0.0) ? 1.0 : -1.0) * std::pow(std::abs(a), -z);
        for (const auto& tail : s.tails)
            v += static_cast<double>(tail.sign) * std::pow(tail.beta, -z) *
                 hurwitz_zeta(z, tail.alpha + static_cast<double>(tail.j0));
        return v;
    };
    EtaSpectralReport rep;
    rep.value = eta_spectral(s);
    for (double z : {-0.05, -0.025, 0.025, 0.05})
        rep.window_variation = std::max(rep.window_variation, std::abs(eta_at(z) - rep.value));
    return rep;
}

// ------------------------------------------------------------------ b-Tr

namespace {

// Taylor remainder of atan past the odd powers m <= n:
// R_n(x) = atan(x) - sum_{m odd <= n} (-1)^{(m-1)/2} x^m / m.
double atan_remainder(double x, int n) {
    double partial = 0.0;
    double sign = 1.0;
    for (int m = 1; m <= n; m += 2) {
        partial += sign * std::pow(x, m) / static_cast<double>(m);
        sign = -sign;
    }
    if (std::abs(x) >= 0.5) return std::atan(x) - partial;
    // small-argument series continuation avoids the cancellation
    double acc = 0.0;
    int m0 = (n % 2 == 0) ? n + 1 : n + 2;
    double sgn = ((m0 - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    double xpow = std::pow(x, m0);
    for (int m = m0; m < m0 + 400; m += 2) {
        const double term = sgn * xpow / static_cast<double>(m);
        acc += term;
        if (std::abs(term) < 1e-18 * std::max(1e-30, std::abs(acc))) break;
        sgn = -sgn;
        xpow *= x * x;
    }
    return acc;
}

// Per-eigenvalue contribution to F_{B,N}(T) for B = (A + i tau)^{-1}.
double resolvent_f_term(double t, double a, int n) {
    return ((a > 0.0) ? 1.0 : -1.0) * 2.0 * atan_remainder(t / std::abs(a), n);
}

// 16-panel composite Gauss-Legendre on [lo, hi].
template <typename F>
auto gauss_integrate(const F& f, double lo, double hi, std::size_t panels) -> decltype(f(lo)) {
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    decltype(f(lo)) acc{};
    const double plen = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double c = lo + (static_cast<double>(p) + 0.5) * plen;
        for (int i = 0; i < 4; ++i) {
            acc += gw[i] * 0.5 * plen * (f(c + 0.5 * plen * gx[i]) + f(c - 0.5 * plen * gx[i]));
        }
    }
    return acc;
}

std::vector<double> window_samples(const BtrOptions& opts) {
    // geometric spacing separates the power-law columns of the fit
    std::vector<double> t(opts.t_samples);
    const double ratio = opts.window_hi / opts.window_lo;
    for (std::size_t k = 0; k < opts.t_samples; ++k)
        t[k] = opts.window_lo *
               std::pow(ratio, static_cast<double>(k) / static_cast<double>(opts.t_samples - 1));
    return t;
}

cplx fit_lim(const std::vector<double>& t, const std::vector<cplx>& f, int min_power,
             int max_power, const BtrOptions& opts) {
    const auto fit = numkit::fit_asymptotic(t, f, min_power, max_power, opts.with_logs,
                                            opts.residual_tol);
    return fit.lim();
}

} // namespace

cplx btr_resolvent(const SpectralModel& s, int n_deriv, const BtrOptions& opts) {
    s.validate();
    if (n_deriv < 1) throw ThresholdViolated("btr_resolvent: need at least one derivative");

    // lattice models keep small linear and T log T pieces after the
    // polynomial subtraction (density-of-states edges); a quarter-octave
    // ladder supports exact two-fold decimation that removes them
    const bool lattice = !s.tails.empty();
    std::vector<double> t;
    if (lattice) {
        const std::size_t nj = 28;
        t.resize(nj);
        for (std::size_t j = 0; j < nj; ++j)
            t[j] = opts.window_lo * std::pow(2.0, static_cast<double>(j) / 4.0);
    } else {
        t = window_samples(opts);
    }
    const double lambda = opts.lambda_factor * t.back();

    // F_{B,N} differs from the polynomial-reduced representative
    //   sum_j sgn(a_j) 2 atan(T/|a_j|)    (explicit region)
    // by an exact odd polynomial with no constant term, which is the
    // same quotient the N-independence argument takes; working in this
    // gauge keeps every explicit term bounded by pi.  The lattice tail
    // keeps the full Taylor-remainder form, whose argument stays below
    // 1/lambda_factor so only the small-x series branch runs there.
    std::vector<cplx> f(t.size(), cplx(0.0));
    for (std::size_t k = 0; k < t.size(); ++k) {
        double acc = 0.0;
        for (double a : s.finite)
            acc += ((a > 0.0) ? 2.0 : -2.0) * std::atan(t[k] / std::abs(a));
        for (const auto& tail : s.tails) {
            // explicit sum out to |a| <= lambda
            long j = tail.j0;
            for (; (static_cast<double>(j) + tail.alpha) * tail.beta <= lambda; ++j) {
                const double sgn = static_cast<double>(tail.sign);
                const double a = (static_cast<double>(j) + tail.alpha) * tail.beta;
                acc += sgn * 2.0 * std::atan(t[k] / a);
            }
            // Euler-Maclaurin tail: integral + half-term - derivative/12
            const double jj = static_cast<double>(j);
            auto h = [&](double u) {
                const double a = static_cast<double>(tail.sign) * (u + tail.alpha) * tail.beta;
                return resolvent_f_term(t[k], a, n_deriv);
            };
            // substitute u = jj / v so the infinite range maps to (0, 1]
            auto integrand = [&](double v) {
                if (v <= 0.0) return 0.0;
                return h(jj / v) * jj / (v * v);
            };
            acc += gauss_integrate(integrand, 0.0, 1.0, 64);
            acc += 0.5 * h(jj);
            const double dh = (h(jj + 1e-4) - h(jj - 1e-4)) / 2e-4;
            acc -= dh / 12.0;
        }
        f[k] = acc;
    }

    std::vector<numkit::BasisTerm> basis;
    for (int p = opts.fit_min_power; p <= 0; ++p) basis.push_back({p, false});

    if (lattice) {
        // S[F](T) = F(2T) - 2F(T) kills c T exactly; twice kills d T log T
        // and restores the sign of the constant, so LIM(S^2 F) = LIM(F)
        const std::size_t shift = 4;  // quarter-octave ladder: factor two
        std::vector<cplx> s1(f.size() - shift), s2(f.size() - 2 * shift);
        for (std::size_t j = 0; j < s1.size(); ++j) s1[j] = f[j + shift] - 2.0 * f[j];
        for (std::size_t j = 0; j < s2.size(); ++j) s2[j] = s1[j + shift] - 2.0 * s1[j];
        std::vector<double> t2(t.begin(), t.begin() + static_cast<long>(s2.size()));
        const auto fit = numkit::fit_asymptotic_basis(t2, s2, basis, opts.residual_tol);
        return fit.lim();
    }
    const auto fit = numkit::fit_asymptotic_basis(t, f, basis, opts.residual_tol);
    return fit.lim();
}

cplx btr(const Grid1D& family, double envelope_tol) {
    family.check_envelope(envelope_tol);
    return family.trace_integral();
}

cplx btr_grid_nfold(const Grid1D& family, int n_deriv, const BtrOptions& opts) {
    if (n_deriv < 0) throw ThresholdViolated("btr_grid_nfold: negative derivative order");
    const std::size_t n = family.points();
    const double h = family.spacing();

    // scalar trace samples
    std::vector<cplx> g(n);
    Grid1D tr_grid(family.half_width(), n, 1);
    for (std::size_t i = 0; i < n; ++i) tr_grid.at(0, 0, i) = family.value(i).trace();
    const Grid1D dg = numkit::fft_derivative(tr_grid, n_deriv);
    for (std::size_t i = 0; i < n; ++i) g[i] = dg.at(0, 0, i);

    // cumulative trapezoid from the t = 0 node, n_deriv + 1 times
    const std::size_t i0 = n / 2;
    auto cumulative = [&](const std::vector<cplx>& src) {
        std::vector<cplx> out(n, cplx(0.0));
        for (std::size_t i = i0 + 1; i < n; ++i)
            out[i] = out[i - 1] + 0.5 * h * (src[i - 1] + src[i]);
        for (std::size_t i1 = i0; i1-- > 0;) out[i1] = out[i1 + 1] - 0.5 * h * (src[i1] + src[i1 + 1]);
        return out;
    };
    std::vector<cplx> u = g;
    for (int r = 0; r < n_deriv + 1; ++r) u = cumulative(u);

    // F(T) = G(T) - G(-T) on node-aligned window samples
    std::vector<double> t;
    std::vector<cplx> f;
    for (std::size_t i = i0 + 1; i < n; ++i) {
        const double tv = family.node(i);
        if (tv < opts.window_lo || tv > opts.window_hi) continue;
        const double mirror = -tv;
        const std::size_t im = static_cast<std::size_t>(
            std::llround((mirror + family.half_width()) / h));
        t.push_back(tv);
        f.push_back(u[i] - u[im]);
    }
    if (t.size() < 12) throw GridMismatch("btr_grid_nfold: window holds too few grid nodes");
    return fit_lim(t, f, opts.fit_min_power, std::max(n_deriv, 1), opts);
}

cplx btr_callable(const BtrCallable& b, int n_deriv, const BtrOptions& opts) {
    if (n_deriv == 0) {
        if (!b.trace) throw GridMismatch("btr_callable: missing trace callable");
        // F(T) = int_{-T}^{T} trace, accumulated over the window samples
        const std::vector<double> t = window_samples(opts);
        std::vector<cplx> f(t.size());
        cplx acc = gauss_integrate([&](double s) { return b.trace(s); }, -t[0], t[0], 256);
        f[0] = acc;
        for (std::size_t k = 1; k < t.size(); ++k) {
            acc += gauss_integrate([&](double s) { return b.trace(s); }, t[k - 1], t[k], 64);
            acc += gauss_integrate([&](double s) { return b.trace(s); }, -t[k], -t[k - 1], 64);
            f[k] = acc;
        }
        return fit_lim(t, f, opts.fit_min_power, 1, opts);
    }

    if (!b.dtrace) throw ThresholdViolated("btr_callable: derivative callable required for N > 0");
    if (n_deriv <= b.poly_degree)
        throw ThresholdViolated("btr_callable: derivative order must exceed the polynomial degree");

    // dense grid, cumulative Simpson from 0, n_deriv + 1 times
    const std::size_t half = 1 << 14;
    const std::size_t n = 2 * half + 1;
    const double t1 = opts.window_hi;
    const double h = t1 / static_cast<double>(half);
    std::vector<cplx> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = b.dtrace(-t1 + h * static_cast<double>(i), n_deriv);

    auto cumulative_simpson = [&](const std::vector<cplx>& src) {
        std::vector<cplx> out(n, cplx(0.0));
        // forward from the center node (index half)
        for (std::size_t i = half + 1; i < n; ++i) {
            if ((i - half) % 2 == 0)
                out[i] = out[i - 2] + h / 3.0 * (src[i - 2] + 4.0 * src[i - 1] + src[i]);
            else
                out[i] = out[i - 1] + h / 12.0 * (5.0 * src[i] + 8.0 * src[i - 1] -
                                                  (i >= 2 ? src[i - 2] : src[i - 1]));
        }
        for (std::size_t step = 1; step <= half; ++step) {
            const std::size_t i = half - step;
            if (step % 2 == 0)
                out[i] = out[i + 2] - h / 3.0 * (src[i + 2] + 4.0 * src[i + 1] + src[i]);
            else
                out[i] = out[i + 1] - h / 12.0 * (5.0 * src[i] + 8.0 * src[i + 1] -
                                                  (i + 2 < n ? src[i + 2] : src[i + 1]));
        }
        return out;
    };
    for (int r = 0; r < n_deriv + 1; ++r) u = cumulative_simpson(u);

    std::vector<double> t;
    std::vector<cplx> f;
    for (double tv : window_samples(opts)) {
        const std::size_t i = half + static_cast<std::size_t>(std::llround(tv / h));
        const std::size_t im = half - (i - half);
        const double snapped = h * static_cast<double>(i - half);
        if (!t.empty() && snapped <= t.back()) continue;
        t.push_back(snapped);
        f.push_back(u[i] - u[im]);
    }
    return fit_lim(t, f, opts.fit_min_power, std::max(n_deriv, 1), opts);
}

// ------------------------------------------------------------------- eta

double eta_psus(const SpectralModel& s, int n_deriv, const BtrOptions& opts) {
    const cplx v = btr_resolvent(s, n_deriv, opts);
    return v.real() / M_PI;
}

cplx eta_psus(const Grid1D& family_minus_id, double envelope_tol) {
    const std::size_t n = family_minus_id.points();
    const Grid1D ldot = numkit::fft_derivative(family_minus_id, 1, envelope_tol);
    Grid1D integrand(family_minus_id.half_width(), n, 1);
    const ComplexMatrix id = ComplexMatrix::identity(family_minus_id.fiber_dim());
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix a = family_minus_id.value(i);
        a += id;
        integrand.at(0, 0, i) = (numkit::inverse(a) * ldot.value(i)).trace();
    }
    return integrand.trace_integral() / cplx(0.0, M_PI);
}

cplx eta_family(const std::function<ComplexMatrix(double)>& a,
                const std::function<ComplexMatrix(double)>& adot, int n_deriv,
                const BtrOptions& opts) {
    BtrCallable b;
    b.trace = [&](double tau) { return (numkit::inverse(a(tau)) * adot(tau)).trace(); };
    b.poly_degree = -1;
    const cplx v = btr_callable(b, n_deriv, opts);
    return v / cplx(0.0, M_PI);
}

MultiplicativityReport eta_multiplicativity_check(const Grid1D& a_minus_id,
                                                  const Grid1D& b_minus_id) {
    MultiplicativityReport rep;
    rep.eta_a = eta_psus(a_minus_id);
    rep.eta_b = eta_psus(b_minus_id);
    // (Id+A)(Id+B) - Id = A + B + AB
    Grid1D ab = pw_product(a_minus_id, b_minus_id);
    ab += a_minus_id;
    ab += b_minus_id;
    rep.eta_ab = eta_psus(ab);
    rep.defect = std::abs(rep.eta_ab - rep.eta_a - rep.eta_b);
    return rep;
}

TauReport tau_invariant(const SpectralModel& base,
                        const std::function<ComplexMatrix(double)>& loop,
                        const std::function<ComplexMatrix(double)>& loop_dot,
                        const BtrOptions& opts) {
    base.validate();
    if (!base.tails.empty())
        throw GridMismatch("tau_invariant: finite spectral models only at this scale");
    const std::size_t f = base.finite.size();

    TauReport rep;
    rep.eta_base = eta_psus(base, 2, opts);

    // direct eta of the product family A(tau)(Id + L(tau))
    auto a_of = [&](double tau) {
        ComplexMatrix a(f, f);
        for (std::size_t i = 0; i < f; ++i) a(i, i) = cplx(base.finite[i], tau);
        return a;
    };
    BtrCallable b;
    b.trace = [&](double tau) {
        const ComplexMatrix a = a_of(tau);
        ComplexMatrix g = loop(tau);
        g += ComplexMatrix::identity(f);
        const ComplexMatrix m = a * g;
        ComplexMatrix mdot = g;  // Adot (Id+L) + A Ldot with Adot = i Id
        mdot *= cplx(0.0, 1.0);
        mdot += a * loop_dot(tau);
        return (numkit::inverse(m) * mdot).trace();
    };
    rep.eta_perturbed = btr_callable(b, 0, opts) / cplx(0.0, M_PI);
    rep.eta_shift = rep.eta_perturbed - rep.eta_base;
    rep.tau = std::exp(cplx(0.0, M_PI) * rep.eta_perturbed);

    // winding of det(Id + L) over the compactified line
    const double t_inf = 4.0 * opts.window_hi;
    const std::size_t nodes = 16384;
    double phase = 0.0;
    cplx prev = 0.0;
    for (std::size_t i = 0; i <= nodes; ++i) {
        const double tau = -t_inf + 2.0 * t_inf * static_cast<double>(i) / static_cast<double>(nodes);
        ComplexMatrix g = loop(tau);
        g += ComplexMatrix::identity(f);
        const cplx d = numkit::det_lu(g);
        if (std::abs(d) < 1e-12) throw Singular("tau_invariant: loop hits a singular matrix");
        if (i > 0) {
            const double step = std::arg(d / prev);
            if (std::abs(step) >= M_PI * 0.999)
                throw PhaseJump("tau_invariant: winding sampling too coarse");
            phase += step;
        }
        prev = d;
    }
    rep.winding = static_cast<int>(std::lround(phase / (2.0 * M_PI)));
    return rep;
}

cplx eta_adiabatic(const AdiabaticFamily& fam) {
    // Schwartz decay in sigma makes bTr the plain integral; the quantized
    // pair contributes through the eps^1 coefficient captured by alpha1
    const std::size_t panels = std::max<std::size_t>(8, fam.sigma_samples / 8);
    std::vector<cplx> vals(panels * 8);
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const double plen = 2.0 * fam.sigma_half_width / static_cast<double>(panels);
    std::vector<double> sig(panels * 8), wgt(panels * 8);
    for (std::size_t p = 0; p < panels; ++p) {
        const double c = -fam.sigma_half_width + (static_cast<double>(p) + 0.5) * plen;
        for (int i = 0; i < 4; ++i) {
            sig[p * 8 + 2 * i] = c - 0.5 * plen * gx[i];
            sig[p * 8 + 2 * i + 1] = c + 0.5 * plen * gx[i];
            wgt[p * 8 + 2 * i] = wgt[p * 8 + 2 * i + 1] = gw[i] * 0.5 * plen;
        }
    }
    parallel_for(sig.size(), [&](std::size_t i) {
        vals[i] = adiabatic::alpha1(fam.p(sig[i]), fam.pdot(sig[i]));
    });
    cplx acc = 0.0;
    for (std::size_t i = 0; i < sig.size(); ++i) acc += wgt[i] * vals[i];
    return acc / cplx(0.0, M_PI);
}

} // namespace etaforge::eta
