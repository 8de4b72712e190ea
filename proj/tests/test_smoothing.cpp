#include "doctest.h"

#include <cmath>
#include <complex>

#include "etaforge/errors.hpp"
#include "etaforge/rng.hpp"
#include "etaforge/smoothing.hpp"

using namespace etaforge;
using namespace etaforge::smoothing;
using numkit::cplx;

TEST_CASE("det_fr: normalization examples") {
    CHECK(std::abs(det_fr(ComplexMatrix(3, 3)) - cplx(1.0)) < 1e-14);

    // rank-1 K with trace 0.5: det(Id + K) = 1 + tr K
    ComplexMatrix k(3, 3);
    k(0, 0) = 0.2;
    k(0, 1) = 0.7;
    k(1, 0) = 0.3 / 0.7 * 0.2;  // keep rank 1: rows proportional
    k(1, 1) = 0.3;
    CHECK(std::abs(k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0)) < 1e-15);
    CHECK(std::abs(det_fr(k) - cplx(1.5)) < 1e-12);
}

TEST_CASE("det_fr: derivative at the identity is the trace") {
    numkit::Rng rng(31);
    const ComplexMatrix a = rng.random_matrix(5);
    const double h = 1e-5;
    ComplexMatrix kp = a, km = a;
    kp *= cplx(h);
    km *= cplx(-h);
    const cplx deriv = (det_fr(kp) - det_fr(km)) / (2.0 * h);
    CHECK(std::abs(deriv - a.trace()) < 1e-8);
}

TEST_CASE("det_fr: invariant under identity padding, exactly") {
    numkit::Rng rng(32);
    const ComplexMatrix k = rng.random_matrix(4);
    const cplx d1 = det_fr(k);
    const cplx d2 = det_fr(pad_identity_embedding(k, 9));
    CHECK(d1 == d2);
}

TEST_CASE("det_fr: multiplicative on the group") {
    numkit::Rng rng(33);
    for (int trial = 0; trial < 8; ++trial) {
        const ComplexMatrix a = rng.random_matrix(16, 0.4);
        const ComplexMatrix b = rng.random_matrix(16, 0.4);
        // (Id+a)(Id+b) = Id + (a + b + ab)
        ComplexMatrix prod = a + b + a * b;
        const cplx lhs = det_fr(prod);
        const cplx rhs = det_fr(a) * det_fr(b);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
    }
}

TEST_CASE("winding_number: scalar and diagonal loops") {
    auto scalar = [](double th) { return ComplexMatrix::from_rows({{std::polar(1.0, th)}}); };
    CHECK(winding_number(scalar) == 1);

    auto constant = [](double) { return ComplexMatrix::diag({2.0, cplx(0.0, 1.0)}); };
    CHECK(winding_number(constant) == 0);

    auto diag2 = [](double th) {
        return ComplexMatrix::diag({std::polar(1.0, 2.0 * th), std::polar(1.0, -th)});
    };
    CHECK(winding_number(diag2) == 1);
}

TEST_CASE("winding_number: refinement handles fast loops, fixed sampling raises") {
    auto fast = [](double th) { return ComplexMatrix::from_rows({{std::polar(1.0, 40.0 * th)}}); };
    CHECK(winding_number(fast, 64) == 40);
    // steps of exactly pi refuse; refinement resolves the same loop
    auto half = [](double th) { return ComplexMatrix::from_rows({{std::polar(1.0, 32.0 * th)}}); };
    CHECK_THROWS_AS(winding_number(GroupLoop::sample(64, half)), PhaseJump);
    CHECK(winding_number(half, 64) == 32);

    auto singular = [](double th) { return ComplexMatrix::from_rows({{cplx(std::cos(th), 0.0)}}); };
    CHECK_THROWS_AS(winding_number(singular, 64), NumericalError);  // Singular or PhaseJump
}

TEST_CASE("winding additivity under pointwise loop product") {
    numkit::Rng rng(55);
    auto base = [&](int w, double th, const ComplexMatrix& a) {
        ComplexMatrix g = ComplexMatrix::identity(3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                g(i, j) += 0.25 * a(i, j) * std::polar(1.0, th * ((i + j) % 2 ? 1.0 : -1.0));
        for (std::size_t j = 0; j < 3; ++j) g(0, j) *= std::polar(1.0, w * th);
        return g;
    };
    // same matrix in both loops so they share the basepoint at theta = 0
    const ComplexMatrix a1 = rng.random_matrix(3);
    auto l1 = [&](double th) { return base(2, th, a1); };
    auto l2 = [&](double th) { return base(-1, th, a1); };
    auto prod = [&](double th) { return l1(th) * l2(th); };
    const int w1 = winding_number(l1, 256);
    const int w2 = winding_number(l2, 256);
    CHECK(winding_number(prod, 256) == w1 + w2);

    // concatenation of the two loops traversed in sequence
    auto concat = [&](double th) { return th < M_PI ? l1(2.0 * th) : l2(2.0 * (th - M_PI)); };
    CHECK(winding_number(concat, 512) == w1 + w2);
}

TEST_CASE("odd chern ch1 equals winding on random loops") {
    numkit::Rng rng(56);
    for (int trial = 0; trial < 6; ++trial) {
        const int w = trial - 3;
        const ComplexMatrix a = rng.random_matrix(2);
        auto loop = [&](double th) {
            ComplexMatrix g = ComplexMatrix::identity(2);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    g(i, j) += 0.3 * a(i, j) * std::polar(1.0, std::cos(th) + i - j);
            for (std::size_t j = 0; j < 2; ++j) g(1, j) *= std::polar(1.0, w * th);
            return g;
        };
        const cplx h1 = odd_chern_ch1(loop, 512);
        const int wn = winding_number(loop, 512);
        CHECK(wn == w);
        CHECK(std::abs(h1 - cplx(static_cast<double>(wn))) < 1e-8);
    }
}

TEST_CASE("odd chern ch3: constant map integrates to zero") {
    ChartS3 chart = hopf_chart(16, [](double, double, double, double) {
        return ComplexMatrix::diag({cplx(0.5, 0.5), 2.0});
    });
    CHECK(std::abs(odd_chern_ch3(chart)) < 1e-12);
}

TEST_CASE("odd chern ch3: degree-one SU(2) map gives 1") {
    ChartS3 chart = hopf_chart(32, su2_from_point);
    const cplx h3 = odd_chern_ch3(chart);
    CHECK(std::abs(h3 - cplx(1.0)) < 1e-3);
}
