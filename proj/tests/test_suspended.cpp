#include "doctest.h"

#include <cmath>
#include <complex>

#include "etaforge/errors.hpp"
#include "etaforge/rng.hpp"
#include "etaforge/suspended.hpp"

using namespace etaforge;
using namespace etaforge::suspended;
using numkit::cplx;

namespace {

Grid2D gaussian_e11(double c, double half_width = 10.0, std::size_t n = 128,
                    std::size_t fdim = 2) {
    return Grid2D::sample(half_width, n, fdim, [&](double t, double tau) {
        ComplexMatrix m = ComplexMatrix::identity(fdim);
        m(0, 0) += c * std::exp(-t * t - tau * tau);
        return m;
    });
}

} // namespace

TEST_CASE("tr_sus: gaussian, zero, odd symmetry") {
    auto g = Grid2D::sample(10.0, 128, 2, [](double t, double tau) {
        ComplexMatrix m(2, 2);
        m(0, 0) = std::exp(-t * t - tau * tau);
        return m;
    });
    CHECK(std::abs(tr_sus(g) - cplx(1.0 / (4.0 * M_PI))) < 1e-10);

    Grid2D zero(10.0, 64, 2);
    CHECK(std::abs(tr_sus(zero)) == 0.0);

    auto odd = Grid2D::sample(10.0, 128, 1, [](double t, double tau) {
        return ComplexMatrix::from_rows({{t * std::exp(-t * t - tau * tau)}});
    });
    CHECK(std::abs(tr_sus(odd)) < 1e-12);
}

TEST_CASE("naive_det: identity and pointwise-log oracle") {
    std::vector<Grid2D> trivial = {gaussian_e11(0.0), gaussian_e11(0.0)};
    CHECK(std::abs(naive_det(trivial) - cplx(1.0)) < 1e-12);

    // straight path to Id + c G E11 against exp(tr_sus(log(Id + Q)))
    const double c = 0.6;
    const std::size_t steps = 48;
    std::vector<Grid2D> path;
    for (std::size_t k = 0; k <= steps; ++k)
        path.push_back(gaussian_e11(c * static_cast<double>(k) / static_cast<double>(steps)));
    const cplx via_path = naive_det(path);

    // pointwise logarithm oracle: scalar log on the perturbed entry
    auto logg = Grid2D::sample(10.0, 128, 1, [&](double t, double tau) {
        return ComplexMatrix::from_rows({{std::log(1.0 + c * std::exp(-t * t - tau * tau))}});
    });
    const cplx via_pointwise = std::exp(logg.trace_integral() / (4.0 * M_PI * M_PI));
    CHECK(std::abs(via_path - via_pointwise) < 1e-8 * std::abs(via_pointwise));

    // refinement stability
    std::vector<Grid2D> coarse;
    for (std::size_t k = 0; k <= steps / 2; ++k)
        coarse.push_back(gaussian_e11(c * static_cast<double>(2 * k) / static_cast<double>(steps)));
    CHECK(std::abs(naive_det(coarse) - via_path) < 1e-6 * std::abs(via_path));
}

TEST_CASE("naive_det: closed loops contribute nothing") {
    // scalar winding loop in the coefficient
    const std::size_t steps = 64;
    std::vector<Grid2D> loop;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(steps);
        loop.push_back(gaussian_e11(0.45 * std::cos(s) + 0.25 +
                                    0.45 * std::sin(s)));  // real closed curve
    }
    CHECK(std::abs(path_log_integral(loop)) < 1e-8);

    // genuinely complex non-commuting loop
    numkit::Rng rng(64);
    const ComplexMatrix a = rng.random_matrix(2, 1.0);
    const ComplexMatrix b = rng.random_matrix(2, 1.0);
    std::vector<Grid2D> loop2;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(steps);
        loop2.push_back(Grid2D::sample(10.0, 96, 2, [&](double t, double tau) {
            const double env = std::exp(-t * t - tau * tau);
            ComplexMatrix m = ComplexMatrix::identity(2);
            ComplexMatrix pa = a, pb = b;
            pa *= cplx(0.22 * std::cos(s) * env, 0.1 * std::sin(s) * env);
            pb *= cplx(0.18 * std::sin(s) * env * t, 0.0);
            m += pa;
            m += pb;
            return m;
        }));
    }
    CHECK(std::abs(path_log_integral(loop2)) < 1e-8);
}

TEST_CASE("tr_sus vanishes on pointwise commutators") {
    numkit::Rng rng(65);
    const ComplexMatrix a = rng.random_matrix(3);
    const ComplexMatrix b = rng.random_matrix(3);
    auto fam_a = Grid2D::sample(8.0, 64, 3, [&](double t, double tau) {
        ComplexMatrix m = a;
        m *= cplx(std::exp(-t * t - tau * tau) * (1.0 + 0.2 * t));
        return m;
    });
    auto fam_b = Grid2D::sample(8.0, 64, 3, [&](double t, double tau) {
        ComplexMatrix m = b;
        m *= cplx(std::exp(-0.8 * (t * t + tau * tau)) * (1.0 - 0.1 * tau));
        return m;
    });
    Grid2D comm = pw_product(fam_a, fam_b);
    comm -= pw_product(fam_b, fam_a);
    CHECK(std::abs(comm.trace_integral()) < 1e-12);
}

TEST_CASE("is_fully_elliptic: spectral family A + i tau") {
    DescriptorFamily fam;
    fam.p = 1;
    fam.fiber_dim = 2;
    Monomial m0;
    m0.coeff = ComplexMatrix::diag({1.0, -2.0});
    Monomial m1;
    m1.pow_tau = 1;
    m1.coeff = ComplexMatrix::diag({cplx(0.0, 1.0), cplx(0.0, 1.0)});
    fam.poly = {m0, m1};

    const auto fe = is_fully_elliptic(fam);
    CHECK(fe.fully_elliptic);
    REQUIRE(fe.joint.base_limits.size() == 2);
    ComplexMatrix plus_i = ComplexMatrix::diag({cplx(0.0, 1.0), cplx(0.0, 1.0)});
    ComplexMatrix minus_i = ComplexMatrix::diag({cplx(0.0, -1.0), cplx(0.0, -1.0)});
    CHECK(fe.joint.base_limits[0].max_abs_diff(plus_i) < 1e-3);
    CHECK(fe.joint.base_limits[1].max_abs_diff(minus_i) < 1e-3);
}

TEST_CASE("is_fully_elliptic: scalar i tau passes even though A is singular") {
    DescriptorFamily fam;
    fam.p = 1;
    fam.fiber_dim = 1;
    Monomial m1;
    m1.pow_tau = 1;
    m1.coeff = ComplexMatrix::from_rows({{cplx(0.0, 1.0)}});
    fam.poly = {m1};
    CHECK(is_fully_elliptic(fam).fully_elliptic);
}

TEST_CASE("is_fully_elliptic: constant family raises DegenerateOrder") {
    DescriptorFamily fam;
    fam.p = 2;
    fam.fiber_dim = 2;
    Monomial m0;
    m0.coeff = ComplexMatrix(2, 2);
    m0.coeff(0, 1) = 1.0;  // singular constant
    fam.poly = {m0};
    CHECK_THROWS_AS(is_fully_elliptic(fam), DegenerateOrder);
}

TEST_CASE("bott_double: determinant and block identity") {
    // scalar d = 0
    const auto f0 = bott_double(ComplexMatrix(1, 1));
    CHECK(std::abs(numkit::det_lu(f0.eval(0.0, 0.0))) < 1e-15);
    CHECK(std::abs(numkit::det_lu(f0.eval(0.3, -0.2))) > 1e-3);

    // scalar d != 0: det = -(t^2 + tau^2 + |d|^2)
    ComplexMatrix d(1, 1);
    d(0, 0) = cplx(0.4, -0.3);
    const auto f1 = bott_double(d);
    for (double t : {-1.0, 0.0, 2.0})
        for (double tau : {-0.7, 0.1}) {
            const cplx det = numkit::det_lu(f1.eval(t, tau));
            const double expect = -(t * t + tau * tau + std::norm(d(0, 0)));
            CHECK(std::abs(det - cplx(expect)) < 1e-12);
        }

    // block identity D1* D1 = diag(D*D + t^2+tau^2, DD* + t^2+tau^2)
    numkit::Rng rng(66);
    const ComplexMatrix dd = rng.random_matrix(3);
    const auto fam = bott_double(dd);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const double t = rng.uniform(-2.0, 2.0);
        const double tau = rng.uniform(-2.0, 2.0);
        const ComplexMatrix v = fam.eval(t, tau);
        const ComplexMatrix lhs = v.adjoint() * v;
        ComplexMatrix rhs(6, 6);
        const ComplexMatrix dstar_d = dd.adjoint() * dd;
        const ComplexMatrix d_dstar = dd * dd.adjoint();
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                rhs(i, j) = dstar_d(i, j);
                rhs(3 + i, 3 + j) = d_dstar(i, j);
            }
        for (std::size_t i = 0; i < 6; ++i) rhs(i, i) += t * t + tau * tau;
        worst = std::max(worst, lhs.max_abs_diff(rhs));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("index_susp: clutching windings") {
    // scalar t + i tau winds once counterclockwise
    DescriptorFamily p;
    p.p = 2;
    p.fiber_dim = 1;
    Monomial mt;
    mt.pow_t = 1;
    mt.coeff = ComplexMatrix::from_rows({{1.0}});
    Monomial mtau;
    mtau.pow_tau = 1;
    mtau.coeff = ComplexMatrix::from_rows({{cplx(0.0, 1.0)}});
    p.poly = {mt, mtau};
    CHECK(index_susp(p, 2.0) == 1);

    // doubled invertible scalar has no winding
    ComplexMatrix d(1, 1);
    d(0, 0) = 0.8;
    CHECK(index_susp(bott_double(d), 3.0) == 0);

    // constant invertible family
    DescriptorFamily c;
    c.p = 2;
    c.fiber_dim = 2;
    Monomial m0;
    m0.coeff = ComplexMatrix::diag({2.0, cplx(0.0, 1.0)});
    Monomial m1;  // tiny parameter part to stay a descriptor-form family
    m1.pow_t = 1;
    m1.coeff = ComplexMatrix(2, 2);
    m1.coeff(0, 1) = 1e-3;
    c.poly = {m0, m1};
    CHECK(index_susp(c, 1.0) == 0);
}

TEST_CASE("index_susp: stable under interior Schwartz perturbation and radius change") {
    DescriptorFamily p;
    p.p = 2;
    p.fiber_dim = 1;
    Monomial mt;
    mt.pow_t = 1;
    mt.coeff = ComplexMatrix::from_rows({{1.0}});
    Monomial mtau;
    mtau.pow_tau = 1;
    mtau.coeff = ComplexMatrix::from_rows({{cplx(0.0, 1.0)}});
    p.poly = {mt, mtau};

    DescriptorFamily q = p;
    q.schwartz = [](double t, double tau) {
        return ComplexMatrix::from_rows({{0.35 * std::exp(-6.0 * (t * t + tau * tau))}});
    };
    const double r = 3.0;
    CHECK(index_susp(q, r) == index_susp(p, r));
    CHECK(index_susp(q, 1.7 * r) == index_susp(q, r));
}

TEST_CASE("index_susp: vanishing for doubled invertible operators, homotopy stable") {
    numkit::Rng rng(67);
    ComplexMatrix d = rng.random_matrix(2);
    d += ComplexMatrix::diag({3.0, 3.0});  // safely invertible
    const ComplexMatrix q = rng.random_matrix(2, 0.4);
    for (double s : {0.0, 0.5, 1.0}) {
        ComplexMatrix ds = q;
        ds *= cplx(s);
        ds += d;
        CHECK(index_susp(bott_double(ds), 4.0) == 0);
    }
}

TEST_CASE("index_susp: singular circle raises") {
    DescriptorFamily p;
    p.p = 2;
    p.fiber_dim = 1;
    Monomial mt;
    mt.pow_t = 1;
    mt.coeff = ComplexMatrix::from_rows({{1.0}});
    Monomial mtau;
    mtau.pow_tau = 1;
    mtau.coeff = ComplexMatrix::from_rows({{1.0}});  // t + tau vanishes on the anti-diagonal
    p.poly = {mt, mtau};
    CHECK_THROWS_AS(index_susp(p, 1.0), SingularOnCircle);
    const auto rad = scan_singular_radius(p, 1.0);
    CHECK(rad.has_value());
}
