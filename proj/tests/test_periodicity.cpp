#include "doctest.h"

#include <cmath>
#include <complex>

#include "etaforge/eig.hpp"
#include "etaforge/errors.hpp"
#include "etaforge/periodicity.hpp"
#include "etaforge/rng.hpp"

using namespace etaforge;
using namespace etaforge::periodicity;
using numkit::cplx;
using numkit::ComplexMatrix;

namespace {

// scalar family out of a clutched line bundle: the determinant line
// degree rides entirely on the clutching map
FamilyS2 clutched_family(int d, double amp = 1.0) {
    FamilyS2 f;
    f.dim = 1;
    f.d_north = [amp, d](double theta, double phi) {
        const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
        return ComplexMatrix::from_rows(
            {{amp * (c * c + 0.35 * s * s * std::polar(1.0, -d * phi))}});
    };
    if (d != 0)
        f.source_clutch = [d](double phi) {
            return ComplexMatrix::from_rows({{std::polar(1.0, d * phi)}});
        };
    return f;
}

} // namespace

TEST_CASE("quillen_metric: identity, diagonal, zeta route") {
    CHECK(quillen_metric(ComplexMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quillen_metric(ComplexMatrix::diag({2.0, 3.0})) == doctest::Approx(6.0).epsilon(1e-12));

    numkit::Rng rng(31);
    ComplexMatrix d = rng.random_matrix(5);
    d += ComplexMatrix::diag({4.0, 4.0, 4.0, 4.0, 4.0});
    const ComplexMatrix a = rng.random_matrix(5) + ComplexMatrix::diag({3.0, 3.0, 3.0, 3.0, 3.0});
    const double lhs = quillen_metric(d * a);
    const double rhs = std::abs(numkit::det_lu(a)) * quillen_metric(d);
    CHECK(std::abs(lhs - rhs) < 1e-10 * rhs);

    CHECK_THROWS_AS(quillen_metric(ComplexMatrix(2, 2)), Singular);
}

TEST_CASE("quillen sections: lambda independence of ratios and band transition") {
    numkit::Rng rng(32);
    ComplexMatrix d = rng.random_matrix(6);
    const ComplexMatrix q1 = rng.random_matrix(6, 0.6);
    const ComplexMatrix q2 = rng.random_matrix(6, 0.6);

    const auto mu = numkit::eigvals_hermitian(d.adjoint() * d, 1e-8);
    const double lam = 0.5 * (mu[1] + mu[2]);
    const double muu = 0.5 * (mu[3] + mu[4]);

    const cplx r_lam = quillen_section_value(d, q1, lam) / quillen_section_value(d, q2, lam);
    const cplx r_mu = quillen_section_value(d, q1, muu) / quillen_section_value(d, q2, muu);
    CHECK(std::abs(r_lam - r_mu) < 1e-9 * std::abs(r_mu));

    // ratio equals the plain determinant ratio
    ComplexMatrix dq1 = d, dq2 = d;
    dq1 += q1;
    dq2 += q2;
    const cplx plain = numkit::det_lu(dq1) / numkit::det_lu(dq2);
    CHECK(std::abs(r_lam - plain) < 1e-9 * std::abs(plain));

    // modulus of the lambda -> mu transition is the eigenband determinant
    const cplx f_lam = quillen_section_value(d, q1, lam);
    const cplx f_mu = quillen_section_value(d, q1, muu);
    const cplx band = eigenband_determinant(d, lam, muu);
    CHECK(std::abs(std::abs(f_mu / f_lam) - std::abs(band)) < 1e-9 * std::abs(band));
}

TEST_CASE("doubled_quantized_spectrum: exact cancellation and shifted ladders") {
    // scalar D = 0: lowest eigenvalue exactly zero
    const auto s0 = doubled_quantized_spectrum(ComplexMatrix(1, 1), 0.2, 16);
    CHECK(std::abs(s0.lower.front()) < 1e-12);
    CHECK(s0.residual < 1e-10);

    // D = diag(1) with hbar below the gap: levels 1 + 2 hbar k
    const auto s1 = doubled_quantized_spectrum(ComplexMatrix::diag({1.0}), 0.2, 16);
    CHECK(s1.residual < 1e-10);
    CHECK(std::abs(s1.lower.front() - 1.0) < 1e-12);

    // random non-normal fiber
    numkit::Rng rng(33);
    const ComplexMatrix d = rng.random_matrix(2, 0.7);
    const auto sr = doubled_quantized_spectrum(d, 0.25, 20);
    CHECK(sr.residual < 1e-7);

    // lowest level simple when D*D has a simple bottom eigenvalue
    const auto sd = doubled_quantized_spectrum(ComplexMatrix::diag({0.3, 1.1}), 0.3, 16);
    CHECK(sd.lower[1] - sd.lower[0] > 1e-3);
}

TEST_CASE("low_eigenspace_correspondence: dimensions, values and the intertwining map") {
    const auto rep = low_eigenspace_correspondence(ComplexMatrix::diag({0.1}), 0.2, 20, 0.3);
    CHECK(rep.dim_base == 1);
    CHECK(rep.dim_doubled == 1);
    CHECK(rep.eigenvalue_mismatch < 1e-9);
    CHECK(rep.phi_relation_residual < 1e-8);
    CHECK(rep.phi_isometry_defect < 1e-8);

    // no spectrum below lambda
    const auto rep2 = low_eigenspace_correspondence(ComplexMatrix::diag({1.0}), 0.2, 20, 0.3);
    CHECK(rep2.dim_base == 0);
    CHECK(rep2.dim_doubled == 0);

    numkit::Rng rng(34);
    ComplexMatrix d = rng.random_matrix(3, 0.12);
    const auto rep3 = low_eigenspace_correspondence(d, 0.3, 24, 0.5);
    CHECK(rep3.dim_base == rep3.dim_doubled);
    CHECK(rep3.eigenvalue_mismatch < 1e-7);
    CHECK(rep3.phi_relation_residual < 1e-7);

    CHECK_THROWS_AS(low_eigenspace_correspondence(ComplexMatrix::diag({0.1}), 0.2, 20, 0.5),
                    EigenvalueOnThreshold);
}

TEST_CASE("det_bundle_degree: flat for global families, clutch winding otherwise") {
    FamilyS2 constant;
    constant.dim = 2;
    constant.d_north = [](double, double) { return ComplexMatrix::diag({2.0, cplx(0.0, 1.5)}); };
    DegreeOptions opts;
    opts.equator_nodes = 256;
    CHECK(det_bundle_degree(constant, opts).degree == 0);

    const auto desc1 = det_bundle_degree(clutched_family(1), opts);
    const auto descm1 = det_bundle_degree(clutched_family(-1), opts);
    const auto desc2 = det_bundle_degree(clutched_family(2), opts);
    CHECK(desc1.degree == clutched_family(1).clutch_degree());
    CHECK(descm1.degree == -desc1.degree);
    CHECK(desc2.degree == 2 * desc1.degree);
    CHECK(desc1.cocycle_residual < 1e-8);

    // direct sum of clutched lines is additive
    FamilyS2 dsum;
    dsum.dim = 2;
    dsum.d_north = [](double theta, double phi) {
        const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
        ComplexMatrix m(2, 2);
        m(0, 0) = c * c + 0.35 * s * s * std::polar(1.0, -phi);
        m(1, 1) = c * c + 0.4 * s * s * std::polar(1.0, -2.0 * phi);
        return m;
    };
    dsum.source_clutch = [](double phi) {
        return ComplexMatrix::diag({std::polar(1.0, phi), std::polar(1.0, 2.0 * phi)});
    };
    CHECK(det_bundle_degree(dsum, opts).degree == 3 * desc1.degree / std::abs(desc1.degree));

    // degree independent of the perturbation seed list
    DegreeOptions alt = opts;
    alt.seeds = 3;
    CHECK(det_bundle_degree(clutched_family(1), alt).degree == desc1.degree);
}

TEST_CASE("spectral_band_degree: agrees with the section route on the base family") {
    DegreeOptions opts;
    opts.equator_nodes = 256;
    for (int d : {0, 1, -1, 2}) {
        const FamilyS2 f = clutched_family(d);
        const int via_sections = det_bundle_degree(f, opts).degree;
        const int via_bands = spectral_band_degree(f, 3.0, 256);
        CHECK(via_bands == via_sections);
    }
}

TEST_CASE("periodicity_check: clutched degrees survive doubling across the hbar ladder") {
    DegreeOptions opts;
    opts.equator_nodes = 256;
    opts.chart_theta = 16;
    opts.chart_phi = 32;
    const std::vector<double> hbars = {0.4, 0.2};
    for (int d : {0, 1, -1}) {
        const auto rep = periodicity_check(clutched_family(d, 0.3), hbars, 10, opts);
        CHECK(rep.consistent);
        CHECK(rep.degree_base_sections == rep.clutch_oracle);
        for (int dd : rep.degree_doubled) CHECK(dd == rep.degree_base_sections);
    }
}
