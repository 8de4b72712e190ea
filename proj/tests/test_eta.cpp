#include "doctest.h"

#include <cmath>
#include <complex>

#include "etaforge/errors.hpp"
#include "etaforge/eta.hpp"
#include "etaforge/rng.hpp"

using namespace etaforge;
using namespace etaforge::eta;
using numkit::cplx;
using numkit::ComplexMatrix;
using numkit::Grid1D;

TEST_CASE("hurwitz_zeta: closed forms at z = 0, -1 and classical values") {
    for (double x : {0.1, 0.25, 0.4, 0.9, 1.0, 3.7}) {
        CHECK(std::abs(hurwitz_zeta(0.0, x) - (0.5 - x)) < 1e-12);
        CHECK(std::abs(hurwitz_zeta(-1.0, x) + 0.5 * (x * x - x + 1.0 / 6.0)) < 1e-12);
    }
    CHECK(std::abs(hurwitz_zeta(2.0, 1.0) - M_PI * M_PI / 6.0) < 1e-12);
    CHECK(std::abs(hurwitz_zeta(3.0, 1.0) - 1.2020569031595943) < 1e-12);
}

TEST_CASE("eta_spectral: finite signature and lattices") {
    SpectralModel fin;
    fin.finite = {1.0, 2.0, -3.0};
    CHECK(eta_spectral(fin) == doctest::Approx(1.0).epsilon(1e-14));

    // scale invariance: only the signs matter
    SpectralModel scaled;
    scaled.finite = {17.0, 34.0, -51.0};
    CHECK(eta_spectral(scaled) == doctest::Approx(eta_spectral(fin)).epsilon(1e-14));

    for (double a : {0.1, 0.25, 0.4, 0.5}) {
        SpectralModel lat;
        lat.tails.push_back({a, 1.0, 0, +1});
        lat.tails.push_back({1.0 - a, 1.0, 0, -1});
        const auto rep = eta_spectral_report(lat);
        CHECK(std::abs(rep.value - (1.0 - 2.0 * a)) < 1e-12);
        CHECK(rep.window_variation < 0.2);  // smooth continuation, no pole
    }

    SpectralModel bad;
    bad.finite = {0.0};
    CHECK_THROWS_AS(eta_spectral(bad), SingularSpectrum);
}

TEST_CASE("btr: schwartz grid reduces to the plain integral") {
    const std::size_t n = 512;
    auto fam = Grid1D::sample(12.0, n, 2, [](double tau) {
        ComplexMatrix m(2, 2);
        m(0, 0) = std::exp(-tau * tau);
        return m;
    });
    CHECK(std::abs(btr(fam) - cplx(std::sqrt(M_PI))) < 1e-10);

    // derivative of a Schwartz function integrates to zero
    auto dfam = Grid1D::sample(12.0, n, 1, [](double tau) {
        return ComplexMatrix::from_rows({{-2.0 * tau * std::exp(-tau * tau)}});
    });
    CHECK(std::abs(btr(dfam)) < 1e-10);
}

TEST_CASE("btr_grid_nfold: agrees with the plain integral and is N-independent") {
    const std::size_t n = 1024;
    auto fam = Grid1D::sample(12.0, n, 1, [](double tau) {
        return ComplexMatrix::from_rows({{std::exp(-tau * tau) * (1.0 + 0.3 * tau)}});
    });
    BtrOptions opts;
    opts.window_lo = 5.0;
    opts.window_hi = 10.0;
    const cplx plain = btr(fam);
    for (int nd : {0, 1, 2}) {
        const cplx v = btr_grid_nfold(fam, nd, opts);
        CHECK(std::abs(v - plain) < 1e-6);
    }
}

TEST_CASE("btr_resolvent: scalar spectrum and N-independence") {
    SpectralModel one;
    one.finite = {1.0};
    for (int nd : {1, 2, 3})
        CHECK(std::abs(btr_resolvent(one, nd) - cplx(M_PI)) < 1e-6);

    SpectralModel mix;
    mix.finite = {0.7, -1.3, 2.1};
    const cplx v1 = btr_resolvent(mix, 1);
    const cplx v3 = btr_resolvent(mix, 3);
    CHECK(std::abs(v1 - v3) < 1e-6);
    CHECK(std::abs(v1 - cplx(M_PI)) < 1e-6);
}

TEST_CASE("btr_callable: N = 0 window fit matches the resolvent value") {
    BtrCallable b;
    b.trace = [](double tau) { return 1.0 / cplx(1.0, tau); };
    const cplx v = btr_callable(b, 0);
    CHECK(std::abs(v - cplx(M_PI)) < 1e-6);
}

TEST_CASE("btr: commutators of grid families vanish") {
    numkit::Rng rng(21);
    const ComplexMatrix a = rng.random_matrix(3);
    const ComplexMatrix b = rng.random_matrix(3);
    auto fa = Grid1D::sample(12.0, 512, 3, [&](double tau) {
        ComplexMatrix m = a;
        m *= cplx(std::exp(-tau * tau));
        return m;
    });
    auto fb = Grid1D::sample(12.0, 512, 3, [&](double tau) {
        ComplexMatrix m = b;
        m *= cplx(std::exp(-0.7 * tau * tau) * (1.0 + 0.1 * tau));
        return m;
    });
    Grid1D comm = pw_product(fa, fb);
    comm -= pw_product(fb, fa);
    CHECK(std::abs(btr(comm)) < 1e-9);
}

TEST_CASE("eta_psus: spectral families against the spectral continuation") {
    SpectralModel sym;
    sym.finite = {1.0, -1.0};
    CHECK(std::abs(eta_psus(sym)) < 1e-7);

    SpectralModel one;
    one.finite = {1.0};
    CHECK(std::abs(eta_psus(one) - 1.0) < 1e-7);

    // finite random models: equality with the signature at 1e-7
    numkit::Rng rng(22);
    SpectralModel rnd;
    double expect = 0.0;
    for (int i = 0; i < 24; ++i) {
        const double a = (rng.uniform() - 0.45) * 4.0;
        if (std::abs(a) < 0.2) continue;
        rnd.finite.push_back(a);
        expect += (a > 0.0) ? 1.0 : -1.0;
    }
    CHECK(std::abs(eta_psus(rnd) - expect) < 1e-7);

    // lattice models against the Hurwitz oracle
    for (double a : {0.1, 0.25, 0.4}) {
        SpectralModel lat;
        lat.tails.push_back({a, 1.0, 0, +1});
        lat.tails.push_back({1.0 - a, 1.0, 0, -1});
        const double oracle = eta_spectral(lat);
        CHECK(std::abs(eta_psus(lat, 3) - oracle) < 1e-5);
    }
}

TEST_CASE("eta_psus grid: pure loops carry twice their winding") {
    const std::size_t n = 1024;
    for (int w : {1, -1, 2}) {
        auto fam = Grid1D::sample(24.0, n, 1, [&](double tau) {
            const double theta = M_PI * (1.0 + std::tanh(tau)) * w;
            return ComplexMatrix::from_rows({{std::polar(1.0, theta) - 1.0}});
        });
        const cplx v = eta_psus(fam);
        CHECK(std::abs(v - cplx(2.0 * w)) < 1e-8);
    }
}

TEST_CASE("eta multiplicativity: commuting and non-commuting pairs") {
    numkit::Rng rng(23);
    // commuting: both diagonal
    auto da = Grid1D::sample(16.0, 1024, 2, [](double tau) {
        ComplexMatrix m(2, 2);
        m(0, 0) = 0.4 * std::exp(-tau * tau);
        m(1, 1) = cplx(0.0, 0.3) * std::exp(-0.5 * tau * tau);
        return m;
    });
    auto db = Grid1D::sample(16.0, 1024, 2, [](double tau) {
        ComplexMatrix m(2, 2);
        m(0, 0) = cplx(0.1, -0.2) * std::exp(-0.8 * tau * tau);
        m(1, 1) = 0.25 * std::exp(-tau * tau) * tau;
        return m;
    });
    CHECK(eta_multiplicativity_check(da, db).defect < 1e-10);

    // non-commuting random 4x4 pair
    const ComplexMatrix a = rng.random_matrix(4, 0.25);
    const ComplexMatrix b = rng.random_matrix(4, 0.25);
    auto fa = Grid1D::sample(16.0, 1024, 4, [&](double tau) {
        ComplexMatrix m = a;
        m *= cplx(std::exp(-tau * tau) * (1.0 + 0.2 * std::sin(tau)));
        return m;
    });
    auto fb = Grid1D::sample(16.0, 1024, 4, [&](double tau) {
        ComplexMatrix m = b;
        m *= cplx(std::exp(-0.6 * tau * tau) * (1.0 - 0.1 * tau));
        return m;
    });
    CHECK(eta_multiplicativity_check(fa, fb).defect < 1e-8);
}

TEST_CASE("tau_invariant: loop windings shift eta by two units") {
    SpectralModel base;
    base.finite = {1.0};

    auto zero_loop = [](double) { return ComplexMatrix(1, 1); };
    auto zero_dot = zero_loop;
    const auto rep0 = tau_invariant(base, zero_loop, zero_dot);
    CHECK(std::abs(rep0.eta_shift) < 1e-6);
    CHECK(rep0.winding == 0);

    for (int w : {1, -1}) {
        auto loop = [w](double tau) {
            const double theta = M_PI * (1.0 + std::tanh(tau)) * w;
            return ComplexMatrix::from_rows({{std::polar(1.0, theta) - 1.0}});
        };
        auto loop_dot = [w](double tau) {
            const double theta = M_PI * (1.0 + std::tanh(tau)) * w;
            const double dtheta = M_PI * w / (std::cosh(tau) * std::cosh(tau));
            return ComplexMatrix::from_rows({{cplx(0.0, dtheta) * std::polar(1.0, theta)}});
        };
        const auto rep = tau_invariant(base, loop, loop_dot);
        CHECK(rep.winding == w);
        CHECK(std::abs(rep.eta_shift - cplx(2.0 * w)) < 1e-6);
        CHECK(std::abs(std::abs(rep.tau) - 1.0) < 1e-6);
    }
}

TEST_CASE("eta_family: scalar line families for the index formula") {
    const double r = 3.0;
    // P = t + iR restricted to tau = R
    auto p = [&](double t) { return ComplexMatrix::from_rows({{cplx(t, r)}}); };
    auto pdot = [](double) { return ComplexMatrix::from_rows({{cplx(1.0, 0.0)}}); };
    const cplx eta_p = eta_family(p, pdot);
    CHECK(std::abs(eta_p - cplx(-1.0)) < 1e-5);

    // invertible-on-the-half-plane perturbation restricted to tau = R
    auto pp = [&](double t) {
        return ComplexMatrix::from_rows({{cplx(t, r - 2.0 * r * std::exp(-t * t))}});
    };
    auto ppdot = [&](double t) {
        return ComplexMatrix::from_rows({{cplx(1.0, 4.0 * r * t * std::exp(-t * t))}});
    };
    const cplx eta_pp = eta_family(pp, ppdot);
    CHECK(std::abs(eta_pp - cplx(1.0)) < 1e-5);
}

TEST_CASE("eta_adiabatic: identity and log-multiplicativity") {
    using adiabatic::FormalSeries;
    const double L = 8.0;
    const std::size_t n = 128;

    AdiabaticFamily id;
    id.p = [&](double) { return FormalSeries::zero(L, n, 2, 1); };
    id.pdot = id.p;
    id.sigma_samples = 16;
    CHECK(std::abs(eta_adiabatic(id)) < 1e-12);

    // two sigma-Schwartz families with non-commuting fibers
    numkit::Rng rng(24);
    const ComplexMatrix ma = rng.random_matrix(2, 0.3);
    const ComplexMatrix mb = rng.random_matrix(2, 0.3);
    auto mk = [&](const ComplexMatrix& mat, double widths, double off) {
        return [&, mat, widths, off](double sigma) {
            const double g = std::exp(-widths * sigma * sigma);
            FormalSeries p = FormalSeries::zero(L, n, 2, 1);
            p.coeff[0] = numkit::Grid2D::sample(L, n, 2, [&](double v, double w) {
                ComplexMatrix m = mat;
                m *= cplx(g * std::exp(-(v - off) * (v - off) - w * w));
                return m;
            });
            p.coeff[1] = numkit::Grid2D::sample(L, n, 2, [&](double v, double w) {
                ComplexMatrix m = ComplexMatrix::identity(2);
                m *= cplx(0.2 * g * std::exp(-0.8 * (v * v + w * w)) * w);
                return m;
            });
            return p;
        };
    };
    auto mkdot = [&](const ComplexMatrix& mat, double widths, double off) {
        return [&, mat, widths, off](double sigma) {
            const double dg = -2.0 * widths * sigma * std::exp(-widths * sigma * sigma);
            FormalSeries p = FormalSeries::zero(L, n, 2, 1);
            p.coeff[0] = numkit::Grid2D::sample(L, n, 2, [&](double v, double w) {
                ComplexMatrix m = mat;
                m *= cplx(dg * std::exp(-(v - off) * (v - off) - w * w));
                return m;
            });
            p.coeff[1] = numkit::Grid2D::sample(L, n, 2, [&](double v, double w) {
                ComplexMatrix m = ComplexMatrix::identity(2);
                m *= cplx(0.2 * dg * std::exp(-0.8 * (v * v + w * w)) * w);
                return m;
            });
            return p;
        };
    };

    AdiabaticFamily fa;
    fa.p = mk(ma, 1.0, 0.4);
    fa.pdot = mkdot(ma, 1.0, 0.4);
    fa.sigma_samples = 48;
    fa.sigma_half_width = 6.0;
    AdiabaticFamily fb;
    fb.p = mk(mb, 0.7, -0.3);
    fb.pdot = mkdot(mb, 0.7, -0.3);
    fb.sigma_samples = 48;
    fb.sigma_half_width = 6.0;

    AdiabaticFamily fab;
    fab.p = [&](double sigma) { return adiabatic::group_mul(fa.p(sigma), fb.p(sigma)); };
    fab.pdot = [&](double sigma) {
        // product rule: d(P*Q) = Pdot + Qdot + Pdot*Q + P*Qdot
        adiabatic::FormalSeries d = moyal::star_formal(fa.pdot(sigma), fb.p(sigma));
        d += moyal::star_formal(fa.p(sigma), fb.pdot(sigma));
        d += fa.pdot(sigma);
        d += fb.pdot(sigma);
        return d;
    };
    fab.sigma_samples = 48;
    fab.sigma_half_width = 6.0;

    const cplx ea = eta_adiabatic(fa);
    const cplx eb = eta_adiabatic(fb);
    const cplx eab = eta_adiabatic(fab);
    CHECK(std::abs(eab - ea - eb) < 1e-6);
}
