#include "doctest.h"

#include <cmath>
#include <complex>

#include "etaforge/asymfit.hpp"
#include "etaforge/complex_matrix.hpp"
#include "etaforge/eig.hpp"
#include "etaforge/errors.hpp"
#include "etaforge/grid.hpp"
#include "etaforge/hermite.hpp"
#include "etaforge/rng.hpp"

using namespace etaforge;
using numkit::ComplexMatrix;
using numkit::cplx;

namespace {

// independent determinant oracle: cofactor expansion, n <= 4
cplx det_cofactor(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    REQUIRE(n <= 4);
    if (n == 1) return a(0, 0);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        ComplexMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        acc += sign * a(0, j) * det_cofactor(minor);
    }
    return acc;
}

} // namespace

TEST_CASE("det_lu: fixed examples") {
    CHECK(std::abs(numkit::det_lu(ComplexMatrix::identity(4)) - cplx(1.0)) < 1e-14);
    CHECK(std::abs(numkit::det_lu(ComplexMatrix::diag({2.0, 3.0})) - cplx(6.0)) < 1e-14);
}

TEST_CASE("det_lu: agrees with cofactor oracle at size <= 4") {
    numkit::Rng rng(12345);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const ComplexMatrix a = rng.random_matrix(n);
        const cplx oracle = det_cofactor(a);
        CHECK(std::abs(numkit::det_lu(a) - oracle) < 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("det_lu: multiplicative on random 8x8 pairs") {
    numkit::Rng rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = rng.random_matrix(8);
        const ComplexMatrix b = rng.random_matrix(8);
        const cplx dab = numkit::det_lu(a * b);
        const cplx dd = numkit::det_lu(a) * numkit::det_lu(b);
        CHECK(std::abs(dab - dd) < 1e-10 * std::abs(dd));
    }
}

TEST_CASE("logdet_lu matches det_lu") {
    numkit::Rng rng(4242);
    const ComplexMatrix a = rng.random_matrix(6);
    const cplx d = numkit::det_lu(a);
    const auto ld = numkit::logdet_lu(a);
    CHECK(ld.log_abs == doctest::Approx(std::log(std::abs(d))).epsilon(1e-12));
    CHECK(std::abs(std::remainder(ld.arg - std::arg(d), 2.0 * M_PI)) < 1e-10);
}

TEST_CASE("eig_hermitian: diagonal and pauli-x") {
    auto r = numkit::eig_hermitian(ComplexMatrix::diag({3.0, 1.0, 2.0}));
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(r.eigenvalues[2] == doctest::Approx(3.0));

    const ComplexMatrix px = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    auto rp = numkit::eig_hermitian(px);
    CHECK(rp.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(rp.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian: reconstruction and unitarity on random matrices") {
    numkit::Rng rng(99);
    for (std::size_t n : {3u, 8u, 24u}) {
        const ComplexMatrix a = rng.random_hermitian(n);
        const auto r = numkit::eig_hermitian(a);
        // A V = V diag(lambda)
        ComplexMatrix av = a * r.eigenvectors;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) av(i, j) -= r.eigenvalues[j] * r.eigenvectors(i, j);
        CHECK(av.max_abs() < 1e-9);
        // V* V = Id
        ComplexMatrix vv = r.eigenvectors.adjoint() * r.eigenvectors;
        vv -= ComplexMatrix::identity(n);
        CHECK(vv.max_abs() < 1e-9);
        // eigenvalue sum = trace
        double sum = 0.0;
        for (double ev : r.eigenvalues) sum += ev;
        CHECK(std::abs(sum - a.trace().real()) < 1e-10 * std::max(1.0, std::abs(sum)));
    }
}

TEST_CASE("eig_hermitian: rejects non-hermitian input") {
    ComplexMatrix a = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    CHECK_THROWS_AS(numkit::eig_hermitian(a), NotHermitian);
}

TEST_CASE("fit_asymptotic: exact basis members") {
    std::vector<double> t;
    std::vector<cplx> f_const, f_poly, f_log;
    for (int k = 0; k < 24; ++k) {
        const double tk = 2.0 + 0.75 * k;
        t.push_back(tk);
        f_const.push_back(5.0);
        f_poly.push_back(2.0 * tk + 3.0 + 4.0 / tk);
        f_log.push_back(std::log(tk) + 7.0);
    }

    auto fit_c = numkit::fit_asymptotic(t, f_const, -2, 2, false);
    CHECK(std::abs(fit_c.lim() - cplx(5.0)) < 1e-10);
    for (int p : {-2, -1, 1, 2}) CHECK(std::abs(fit_c.coeff_of(p)) < 1e-10);

    auto fit_p = numkit::fit_asymptotic(t, f_poly, -2, 2, false);
    CHECK(std::abs(fit_p.coeff_of(1) - cplx(2.0)) < 1e-9);
    CHECK(std::abs(fit_p.coeff_of(0) - cplx(3.0)) < 1e-9);
    CHECK(std::abs(fit_p.coeff_of(-1) - cplx(4.0)) < 1e-9);

    auto fit_l = numkit::fit_asymptotic(t, f_log, -1, 1, true);
    CHECK(std::abs(fit_l.log_coeff_of(0) - cplx(1.0)) < 1e-9);
    CHECK(std::abs(fit_l.lim() - cplx(7.0)) < 1e-9);
}

TEST_CASE("fit_asymptotic: LIM invariant under extending the window for exact input") {
    std::vector<double> t;
    std::vector<cplx> f;
    auto fun = [](double tk) { return cplx(1.5 * tk + 0.25 - 2.0 / tk); };
    for (int k = 0; k < 20; ++k) {
        t.push_back(3.0 + k);
        f.push_back(fun(t.back()));
    }
    const cplx lim1 = numkit::fit_asymptotic(t, f, -1, 1, false).lim();
    for (int k = 0; k < 10; ++k) {
        t.push_back(t.back() + 5.0);
        f.push_back(fun(t.back()));
    }
    const cplx lim2 = numkit::fit_asymptotic(t, f, -1, 1, false).lim();
    CHECK(std::abs(lim1 - lim2) < 1e-9);
    CHECK(std::abs(lim1 - cplx(0.25)) < 1e-9);
}

TEST_CASE("fit_asymptotic: precondition violations") {
    std::vector<double> t = {2.0, 3.0};
    std::vector<cplx> f = {1.0, 1.0};
    CHECK_THROWS_AS(numkit::fit_asymptotic(t, f, -2, 2, false), IllConditioned);
}

TEST_CASE("hermite_functions: ground state and scaling") {
    std::vector<double> x = {0.0};
    const auto t1 = numkit::hermite_functions(1, x, 1.0, false);
    CHECK(t1.at(0, 0) == doctest::Approx(0.7511255).epsilon(1e-6));  // pi^{-1/4}

    // oscillator eigenvalue at hbar = 0.5 read off by applying the
    // operator spectrally to sampled phi_0
    const double hbar = 0.5;
    const std::size_t n = 256;
    const double L = 10.0;
    numkit::Grid1D phi(L, n, 1);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = phi.node(i);
    const auto tab = numkit::hermite_functions(1, nodes, hbar, false);
    for (std::size_t i = 0; i < n; ++i)
        phi.set_value(i, ComplexMatrix::from_rows({{tab.at(0, i)}}));
    const auto d2 = numkit::fft_derivative(phi, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = phi.node(i);
        if (std::abs(phi.value(i)(0, 0)) < 1e-3) continue;
        const cplx lhs = -hbar * hbar * d2.value(i)(0, 0) + t * t * phi.value(i)(0, 0);
        const cplx ratio = lhs / phi.value(i)(0, 0);
        worst = std::max(worst, std::abs(ratio - cplx(hbar)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("hermite_functions: quadrature orthonormality and completeness") {
    const std::size_t m = 20;
    const double L = 12.0;
    const std::size_t n = 512;
    std::vector<double> x(n);
    const double h = 2.0 * L / n;
    for (std::size_t i = 0; i < n; ++i) x[i] = -L + h * i;
    const auto tab = numkit::hermite_functions(m, x, 1.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += tab.at(a, i) * tab.at(b, i);
            dot *= h;
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    // projector onto the first m functions reproduces phi_j, j < m
    for (std::size_t j : {0ul, 7ul, 19ul}) {
        std::vector<double> proj(n, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) c += tab.at(k, i) * tab.at(j, i);
            c *= h;
            for (std::size_t i = 0; i < n; ++i) proj[i] += c * tab.at(k, i);
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(proj[i] - tab.at(j, i)));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("hermite_functions: narrow grid raises") {
    std::vector<double> x;
    for (int i = 0; i < 64; ++i) x.push_back(-2.0 + 4.0 * i / 63.0);
    CHECK_THROWS_AS(numkit::hermite_functions(30, x, 1.0), GridTooNarrow);
}

TEST_CASE("fft_derivative: analytic gaussian derivative") {
    const std::size_t n = 256;
    const double L = 10.0;
    auto g = numkit::Grid1D::sample(L, n, 1, [](double t) {
        return ComplexMatrix::from_rows({{std::exp(-t * t)}});
    });
    const auto d = numkit::fft_derivative(g, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.node(i);
        worst = std::max(worst, std::abs(d.value(i)(0, 0) - cplx(-2.0 * t * std::exp(-t * t))));
    }
    CHECK(worst < 1e-8);

    // order 0 is the identity
    const auto same = numkit::fft_derivative(g, 0);
    CHECK(same.value(17)(0, 0) == g.value(17)(0, 0));
}

TEST_CASE("fft_derivative 2d: mixed partials commute exactly") {
    const std::size_t n = 64;
    auto g = numkit::Grid2D::sample(8.0, n, 1, [](double t, double tau) {
        return ComplexMatrix::from_rows({{std::exp(-t * t - tau * tau) * (1.0 + 0.3 * t * tau)}});
    });
    auto dtdtau = numkit::fft_derivative(numkit::fft_derivative(g, 0, 1), 1, 1);
    auto dtaudt = numkit::fft_derivative(numkit::fft_derivative(g, 1, 1), 0, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(dtdtau.value(i, j)(0, 0) - dtaudt.value(i, j)(0, 0)));
    CHECK(worst < 1e-12);
}

TEST_CASE("fft_derivative: envelope violation raises") {
    auto g = numkit::Grid1D::sample(4.0, 64, 1, [](double t) {
        return ComplexMatrix::from_rows({{std::exp(-0.05 * t * t)}});
    });
    CHECK_THROWS_AS(numkit::fft_derivative(g, 1), EnvelopeViolation);
}
