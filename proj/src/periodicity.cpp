#include "etaforge/periodicity.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/eig.hpp"
#include "etaforge/errors.hpp"
#include "etaforge/moyal.hpp"
#include "etaforge/parallel.hpp"
#include "etaforge/rng.hpp"

namespace etaforge::periodicity {

double quillen_metric(const ComplexMatrix& dplusq, double sing_tol) {
    if (!dplusq.square()) throw GridMismatch("quillen_metric: matrix not square");
    const ComplexMatrix h = dplusq.adjoint() * dplusq;
    const auto eig = numkit::eigvals_hermitian(h, 1e-8);
    const double scale = std::max(1.0, eig.back());
    double zeta_prime = 0.0;
    for (double lam : eig) {
        if (lam < sing_tol * scale) throw Singular("quillen_metric: operator numerically singular");
        zeta_prime -= std::log(lam);
    }
    return std::exp(-0.5 * zeta_prime);
}

// ---------------------------------------------------------------- family

ComplexMatrix FamilyS2::north(double theta, double phi) const { return d_north(theta, phi); }

ComplexMatrix FamilyS2::src_clutch(double phi) const {
    return source_clutch ? source_clutch(phi) : ComplexMatrix::identity(dim);
}

ComplexMatrix FamilyS2::tgt_clutch(double phi) const {
    return target_clutch ? target_clutch(phi) : ComplexMatrix::identity(dim);
}

ComplexMatrix FamilyS2::south(double theta, double phi) const {
    ComplexMatrix m = d_north(theta, phi);
    if (target_clutch) m = tgt_clutch(phi).adjoint() * m;  // unitary inverse
    if (source_clutch) m = m * src_clutch(phi);
    return m;
}

ComplexMatrix FamilyS2::gram_source(double phi) const {
    if (equator_gram_source) return equator_gram_source(phi);
    const ComplexMatrix dn = north(M_PI / 2.0, phi);
    return dn.adjoint() * dn;
}

ComplexMatrix FamilyS2::gram_target(double phi) const {
    if (equator_gram_target) return equator_gram_target(phi);
    const ComplexMatrix dn = north(M_PI / 2.0, phi);
    return dn * dn.adjoint();
}

int FamilyS2::clutch_degree(std::size_t nodes) const {
    if (!source_clutch) return 0;
    double phase = 0.0;
    cplx prev = numkit::det_lu(src_clutch(0.0));
    for (std::size_t j = 1; j <= nodes; ++j) {
        const double phi = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(nodes);
        const cplx cur = numkit::det_lu(src_clutch(phi));
        const double step = std::arg(cur / prev);
        if (std::abs(step) >= M_PI * 0.999) throw PhaseJump("clutch_degree: sampling too coarse");
        phase += step;
        prev = cur;
    }
    return static_cast<int>(std::lround(phase / (2.0 * M_PI)));
}

// ----------------------------------------------------------- S2 sections

namespace {

struct ChartSpec {
    double theta_lo, theta_hi;
    bool use_south_coords;
};

ComplexMatrix chart_value(const FamilyS2& f, const ChartSpec& chart, double th, double ph) {
    return chart.use_south_coords ? f.south(th, ph) : f.north(th, ph);
}

double chart_min_det(const FamilyS2& f, const ComplexMatrix& q, const ChartSpec& chart,
                     const DegreeOptions& opts) {
    double min_det = 1e300;
    for (std::size_t i = 0; i <= opts.chart_theta; ++i) {
        const double th = chart.theta_lo + (chart.theta_hi - chart.theta_lo) *
                                               static_cast<double>(i) /
                                               static_cast<double>(opts.chart_theta);
        for (std::size_t j = 0; j < opts.chart_phi; ++j) {
            const double ph = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(opts.chart_phi);
            ComplexMatrix m = chart_value(f, chart, th, ph);
            m += q;
            min_det = std::min(min_det, std::abs(numkit::det_lu(m)));
        }
    }
    return min_det;
}

ChartSection find_section(const FamilyS2& f, const ChartSpec& chart, const DegreeOptions& opts) {
    double scale = 0.0;
    for (std::size_t i = 0; i <= 8; ++i) {
        const double th = chart.theta_lo + (chart.theta_hi - chart.theta_lo) * i / 8.0;
        scale = std::max(scale, std::abs(numkit::det_lu(chart_value(f, chart, th, 0.3))));
    }
    scale = std::max(scale, 1e-6);

    for (std::size_t seed = 0; seed < opts.seeds; ++seed) {
        numkit::Rng rng(1000 + 97 * seed);
        const ComplexMatrix g = rng.random_matrix(f.dim, 1.0);
        for (int esc = 0; esc <= 10; ++esc) {
            const double s = opts.base_scale * std::pow(2.0, esc);
            ComplexMatrix q = g;
            q *= cplx(s);
            const double min_det = chart_min_det(f, q, chart, opts);
            if (min_det > opts.invert_tol * scale) {
                ChartSection sec;
                sec.q = q;
                sec.seed = static_cast<int>(seed);
                sec.scale = s;
                sec.min_det = min_det;
                return sec;
            }
        }
    }
    throw NoPerturbationFound("det_bundle_degree: no invertible chart perturbation found");
}

int winding_of(const std::vector<cplx>& vals) {
    double phase = 0.0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        const double step = std::arg(vals[i] / vals[i - 1]);
        if (std::abs(step) >= M_PI * 0.999)
            throw PhaseJump("det_bundle_degree: transition phase step reached pi");
        phase += step;
    }
    return static_cast<int>(std::lround(phase / (2.0 * M_PI)));
}

} // namespace

DetBundleDescription det_bundle_degree(const FamilyS2& f, const DegreeOptions& opts) {
    const double band = opts.overlap_deg * M_PI / 180.0;
    const ChartSpec north{0.0, M_PI / 2.0 + band, false};
    const ChartSpec south{M_PI / 2.0 - band, M_PI, true};

    DetBundleDescription out;
    out.north = find_section(f, north, opts);
    out.south = find_section(f, south, opts);

    // transition in southern coordinates: the northern section transforms
    // to psi_tgt^{-1} (D_N + Q_N) psi_src = D_S + psi_tgt^{-1} Q_N psi_src
    out.transition.resize(opts.equator_nodes + 1);
    for (std::size_t j = 0; j <= opts.equator_nodes; ++j) {
        const double ph = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(opts.equator_nodes);
        const ComplexMatrix ds = f.south(M_PI / 2.0, ph);
        ComplexMatrix sn = ds;
        sn += f.tgt_clutch(ph).adjoint() * out.north.q * f.src_clutch(ph);
        ComplexMatrix ss = ds;
        ss += out.south.q;
        out.transition[j] = numkit::det_lu(sn) / numkit::det_lu(ss);
    }
    out.degree = winding_of(out.transition);

    // three-chart refinement: an equatorial band chart (northern
    // coordinates) must satisfy g_NS = g_NB g_BS on the equator
    const ChartSpec bandchart{M_PI / 2.0 - 2.0 * band, M_PI / 2.0 + 2.0 * band, false};
    const ChartSection mid = find_section(f, bandchart, opts);
    double worst = 0.0;
    for (std::size_t j = 0; j < opts.equator_nodes; j += 8) {
        const double ph = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(opts.equator_nodes);
        const ComplexMatrix dn = f.north(M_PI / 2.0, ph);
        const ComplexMatrix ds = f.south(M_PI / 2.0, ph);
        ComplexMatrix n_n = dn, b_n = dn;
        n_n += out.north.q;
        b_n += mid.q;
        ComplexMatrix b_s = ds, s_s = ds, n_s = ds;
        b_s += f.tgt_clutch(ph).adjoint() * mid.q * f.src_clutch(ph);
        s_s += out.south.q;
        n_s += f.tgt_clutch(ph).adjoint() * out.north.q * f.src_clutch(ph);
        const cplx g_nb = numkit::det_lu(n_n) / numkit::det_lu(b_n);
        const cplx g_bs = numkit::det_lu(b_s) / numkit::det_lu(s_s);
        const cplx g_ns = numkit::det_lu(n_s) / numkit::det_lu(s_s);
        worst = std::max(worst, std::abs(g_ns - g_nb * g_bs) / std::abs(g_ns));
    }
    out.cocycle_residual = worst;
    if (worst > 1e-8) throw CocycleViolation("det_bundle_degree: triple-overlap cocycle fails");
    return out;
}

// --------------------------------------------------- spectral band route

namespace {

// columns of an orthonormal frame spanning the range of P restricted to
// the reference columns; Gram-Schmidt is fine at these sizes
ComplexMatrix projected_frame(const ComplexMatrix& p, const ComplexMatrix& ref, std::size_t rank) {
    const std::size_t n = p.rows();
    ComplexMatrix pr = p * ref;
    ComplexMatrix frame(n, rank);
    std::size_t built = 0;
    for (std::size_t c = 0; c < ref.cols() && built < rank; ++c) {
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = pr(i, c);
        for (std::size_t b = 0; b < built; ++b) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(frame(i, b)) * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * frame(i, b);
        }
        double nrm = 0.0;
        for (const auto& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) continue;  // reference column degenerate here
        for (std::size_t i = 0; i < n; ++i) frame(i, built) = v[i] / nrm;
        ++built;
    }
    if (built != rank)
        throw NoPerturbationFound("spectral_band_degree: reference frame degenerates on the band");
    return frame;
}

ComplexMatrix low_projector(const ComplexMatrix& m, double lambda, std::size_t* rank_out) {
    const auto eg = numkit::eig_hermitian(m, 1e-7);
    const std::size_t n = m.rows();
    ComplexMatrix p(n, n);
    std::size_t rank = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (eg.eigenvalues[k] >= lambda) continue;
        ++rank;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                p(i, j) += eg.eigenvectors(i, k) * std::conj(eg.eigenvectors(j, k));
    }
    if (rank_out) *rank_out = rank;
    return p;
}

} // namespace

int spectral_band_degree(const FamilyS2& f, double lambda, std::size_t nodes, int ref_seed) {
    numkit::Rng rng(static_cast<std::uint64_t>(ref_seed) * 7919 + 11);
    const ComplexMatrix ref_plus = rng.random_matrix(f.dim, 1.0);
    const ComplexMatrix ref_minus = rng.random_matrix(f.dim, 1.0);

    std::vector<cplx> fplus(nodes + 1), fminus(nodes + 1);
    std::vector<int> ranks(nodes + 1, -1);
    parallel_for(nodes + 1, [&](std::size_t j) {
        const double ph = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(nodes);
        const ComplexMatrix src = f.src_clutch(ph);
        const ComplexMatrix tgt = f.tgt_clutch(ph);

        std::size_t rank_n = 0, crank_n = 0;
        const ComplexMatrix pp_n = low_projector(f.gram_source(ph), lambda, &rank_n);
        const ComplexMatrix pm_n = low_projector(f.gram_target(ph), lambda, &crank_n);
        // D_S* D_S = src* (D_N* D_N) src and D_S D_S* = tgt* (D_N D_N*) tgt
        const ComplexMatrix pp_s = src.adjoint() * pp_n * src;
        const ComplexMatrix pm_s = tgt.adjoint() * pm_n * tgt;
        ranks[j] = static_cast<int>(rank_n);

        const ComplexMatrix vp_n = projected_frame(pp_n, ref_plus, rank_n);
        const ComplexMatrix vp_s = projected_frame(pp_s, ref_plus, rank_n);
        const ComplexMatrix vm_n = projected_frame(pm_n, ref_minus, crank_n);
        const ComplexMatrix vm_s = projected_frame(pm_s, ref_minus, crank_n);

        fplus[j] = (rank_n == 0) ? cplx(1.0) : numkit::det_lu(vp_n.adjoint() * src * vp_s);
        fminus[j] = (crank_n == 0) ? cplx(1.0) : numkit::det_lu(vm_n.adjoint() * tgt * vm_s);
    });
    for (std::size_t j = 1; j <= nodes; ++j)
        if (ranks[j] != ranks[0])
            throw EigenvalueOnThreshold("spectral_band_degree: lambda crosses the spectrum");

    return winding_of(fplus) - winding_of(fminus);
}

// ------------------------------------------------- spectral chart values

namespace {

struct SingularBases {
    std::vector<double> mu;  // eig of D*D ascending
    ComplexMatrix vplus;     // eigenvectors of D*D
    ComplexMatrix vminus;    // eigenvectors of DD*
};

SingularBases singular_bases(const ComplexMatrix& d) {
    SingularBases sb;
    const auto ep = numkit::eig_hermitian(d.adjoint() * d, 1e-8);
    const auto em = numkit::eig_hermitian(d * d.adjoint(), 1e-8);
    sb.mu = ep.eigenvalues;
    sb.vplus = ep.eigenvectors;
    sb.vminus = em.eigenvectors;
    return sb;
}

ComplexMatrix basis_block(const ComplexMatrix& basis, std::size_t lo, std::size_t hi) {
    ComplexMatrix out(basis.rows(), hi - lo);
    for (std::size_t i = 0; i < basis.rows(); ++i)
        for (std::size_t j = lo; j < hi; ++j) out(i, j - lo) = basis(i, j);
    return out;
}

} // namespace

cplx quillen_section_value(const ComplexMatrix& d, const ComplexMatrix& q, double lambda) {
    const std::size_t n = d.rows();
    const SingularBases sb = singular_bases(d);
    std::size_t k = 0;
    while (k < n && sb.mu[k] < lambda) ++k;
    if (k > 0 && std::abs(sb.mu[k - 1] - lambda) < 1e-12)
        throw EigenvalueOnThreshold("quillen_section_value: lambda on the spectrum");

    const ComplexMatrix vp = basis_block(sb.vplus, 0, k);
    const ComplexMatrix vm = basis_block(sb.vminus, 0, k);
    ComplexMatrix dq = d;
    dq += q;

    // det(P^- (D+Q) P^+) in the low bases
    const ComplexMatrix low = vm.adjoint() * dq * vp;
    const cplx det_low = (k == 0) ? cplx(1.0) : numkit::det_lu(low);

    // A(Q, lambda) = (D + P^- Q P^+)^{-1}(D + Q)
    ComplexMatrix projected_q = vm * (vm.adjoint() * q * vp) * vp.adjoint();
    ComplexMatrix d_proj = d;
    d_proj += projected_q;
    const ComplexMatrix a = numkit::solve_lu(d_proj, dq);
    return det_low * numkit::det_lu(a);
}

cplx eigenband_determinant(const ComplexMatrix& d, double lambda, double mu) {
    const std::size_t n = d.rows();
    const SingularBases sb = singular_bases(d);
    std::size_t lo = 0, hi = 0;
    while (lo < n && sb.mu[lo] < lambda) ++lo;
    while (hi < n && sb.mu[hi] < mu) ++hi;
    if (lo == hi) return 1.0;
    const ComplexMatrix vp = basis_block(sb.vplus, lo, hi);
    const ComplexMatrix vm = basis_block(sb.vminus, lo, hi);
    return numkit::det_lu(vm.adjoint() * d * vp);
}

// ------------------------------------------------------- doubled family

namespace {

// quantization with [t, tau] = +i hbar: t stays op_t, tau flips sign
ComplexMatrix doubled_quantized_sized(const ComplexMatrix& d, double hbar, std::size_t m) {
    const std::size_t k = d.rows();
    const ComplexMatrix t = moyal::op_t(hbar, m);
    ComplexMatrix y = moyal::op_tau(hbar, m);
    y *= cplx(-1.0);
    const std::size_t half = m * k;
    ComplexMatrix out(2 * half, 2 * half);
    const ComplexMatrix dstar = d.adjoint();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const cplx upper = cplx(0.0, 1.0) * t(i, j) - y(i, j);  // i t - tau
            const cplx lower = cplx(0.0, 1.0) * t(i, j) + y(i, j);  // i t + tau
            for (std::size_t r = 0; r < k; ++r) {
                if (upper != cplx(0.0, 0.0)) out(i * k + r, j * k + r) += upper;
                if (lower != cplx(0.0, 0.0)) out(half + i * k + r, half + j * k + r) += lower;
            }
            if (i == j)
                for (std::size_t r = 0; r < k; ++r)
                    for (std::size_t s = 0; s < k; ++s) {
                        out(i * k + r, half + j * k + s) += dstar(r, s);
                        out(half + i * k + r, j * k + s) += d(r, s);
                    }
        }
    return out;
}

// restriction of a 2(mbig k)-dim doubled-block matrix to m modes/block
ComplexMatrix restrict_doubled(const ComplexMatrix& big, std::size_t mbig, std::size_t m,
                               std::size_t k) {
    const std::size_t half_big = mbig * k;
    const std::size_t half = m * k;
    ComplexMatrix out(2 * half, 2 * half);
    auto map_index = [&](std::size_t idx) {
        const std::size_t blk = idx / half;
        const std::size_t rest = idx % half;
        return blk * half_big + rest;
    };
    for (std::size_t i = 0; i < 2 * half; ++i)
        for (std::size_t j = 0; j < 2 * half; ++j) out(i, j) = big(map_index(i), map_index(j));
    return out;
}

} // namespace

ComplexMatrix doubled_quantized(const ComplexMatrix& d, double hbar, std::size_t m) {
    if (!d.square()) throw GridMismatch("doubled_quantized: need a square matrix");
    return doubled_quantized_sized(d, hbar, m);
}

FamilyS2 doubled_family(const FamilyS2& base, double hbar, std::size_t m) {
    FamilyS2 out;
    const std::size_t k = base.dim;
    out.dim = 2 * m * k;
    out.d_north = [base, hbar, m](double th, double ph) {
        return doubled_quantized_sized(base.north(th, ph), hbar, m);
    };
    auto lift = [base, m, k](const ComplexMatrix& psi_src, const ComplexMatrix& psi_tgt) {
        const std::size_t half = m * k;
        ComplexMatrix big(2 * half, 2 * half);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t s = 0; s < k; ++s) {
                    big(i * k + r, i * k + s) = psi_src(r, s);
                    big(half + i * k + r, half + i * k + s) = psi_tgt(r, s);
                }
        return big;
    };
    // endomorphism of E + F: both clutches are diag(psi_src, psi_tgt)
    out.source_clutch = [base, lift](double ph) {
        return lift(base.src_clutch(ph), base.tgt_clutch(ph));
    };
    out.target_clutch = out.source_clutch;
    // edge-exact equator Grams from the enlarged truncation
    out.equator_gram_source = [base, hbar, m, k](double ph) {
        const ComplexMatrix big = doubled_quantized_sized(base.north(M_PI / 2.0, ph), hbar, m + 2);
        return restrict_doubled(big.adjoint() * big, m + 2, m, k);
    };
    out.equator_gram_target = [base, hbar, m, k](double ph) {
        const ComplexMatrix big = doubled_quantized_sized(base.north(M_PI / 2.0, ph), hbar, m + 2);
        return restrict_doubled(big * big.adjoint(), m + 2, m, k);
    };
    return out;
}

DoubledSpectra doubled_quantized_spectrum(const ComplexMatrix& d, double hbar, std::size_t m) {
    const std::size_t k = d.rows();
    // build two modes above the cut so the restricted product is edge-exact
    const ComplexMatrix dhat_big = doubled_quantized_sized(d, hbar, m + 2);
    const ComplexMatrix prod_low = restrict_doubled(dhat_big.adjoint() * dhat_big, m + 2, m, k);
    const ComplexMatrix prod_up = restrict_doubled(dhat_big * dhat_big.adjoint(), m + 2, m, k);

    DoubledSpectra out;
    out.lower = numkit::eigvals_hermitian(prod_low, 1e-8);
    out.upper = numkit::eigvals_hermitian(prod_up, 1e-8);
    out.cutoff = hbar * (2.0 * static_cast<double>(m) / 3.0);

    const auto mu = numkit::eigvals_hermitian(d.adjoint() * d, 1e-8);
    const auto nu = numkit::eigvals_hermitian(d * d.adjoint(), 1e-8);
    for (std::size_t kk = 0; kk < m; ++kk) {
        const double level = hbar * (2.0 * static_cast<double>(kk) + 1.0);
        for (double v : mu)
            if (v + level - hbar < out.cutoff) out.predicted.push_back(v + level - hbar);
        for (double v : nu)
            if (v + level + hbar < out.cutoff) out.predicted.push_back(v + level + hbar);
    }
    std::sort(out.predicted.begin(), out.predicted.end());

    std::vector<double> computed;
    for (double v : out.lower)
        if (v < out.cutoff) computed.push_back(v);
    out.residual = 0.0;
    if (computed.size() != out.predicted.size())
        out.residual = 1e300;  // dimension mismatch below the cutoff
    else
        for (std::size_t i = 0; i < computed.size(); ++i)
            out.residual = std::max(out.residual, std::abs(computed[i] - out.predicted[i]));
    return out;
}

LowEigReport low_eigenspace_correspondence(const ComplexMatrix& d, double hbar, std::size_t m,
                                           double lambda) {
    if (lambda >= 2.0 * hbar)
        throw EigenvalueOnThreshold("low_eigenspace_correspondence: lambda must stay below 2 hbar");
    const std::size_t k = d.rows();
    const auto base = numkit::eig_hermitian(d.adjoint() * d, 1e-8);
    for (double v : base.eigenvalues)
        if (std::abs(v - lambda) < 1e-10)
            throw EigenvalueOnThreshold("low_eigenspace_correspondence: lambda grazes the spectrum");

    const ComplexMatrix dhat_big = doubled_quantized_sized(d, hbar, m + 2);
    const ComplexMatrix prod_low = restrict_doubled(dhat_big.adjoint() * dhat_big, m + 2, m, k);
    const auto low = numkit::eig_hermitian(prod_low, 1e-8);
    const ComplexMatrix dhat = doubled_quantized_sized(d, hbar, m);

    LowEigReport rep;
    std::vector<double> base_low;
    for (double v : base.eigenvalues)
        if (v < lambda) base_low.push_back(v);
    rep.dim_base = base_low.size();

    std::vector<double> dbl_low;
    for (double v : low.eigenvalues)
        if (v < lambda) dbl_low.push_back(v);
    rep.dim_doubled = dbl_low.size();

    if (rep.dim_base == rep.dim_doubled)
        for (std::size_t i = 0; i < base_low.size(); ++i)
            rep.eigenvalue_mismatch =
                std::max(rep.eigenvalue_mismatch, std::abs(base_low[i] - dbl_low[i]));
    else
        rep.eigenvalue_mismatch = 1e300;

    // Phi+(f) = (phi_0 (x) f, 0) for f a low eigenvector of D*D; Dhat
    // sends it to Phi-(D f) = (0, phi_0 (x) D f)
    const std::size_t half = m * k;
    for (std::size_t idx = 0; idx < base.eigenvalues.size(); ++idx) {
        if (base.eigenvalues[idx] >= lambda) continue;
        std::vector<cplx> phip(2 * half, cplx(0.0));
        for (std::size_t r = 0; r < k; ++r) phip[r] = base.eigenvectors(r, idx);
        std::vector<cplx> image(2 * half, cplx(0.0));
        for (std::size_t i = 0; i < 2 * half; ++i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < 2 * half; ++j) acc += dhat(i, j) * phip[j];
            image[i] = acc;
        }
        std::vector<cplx> expect(2 * half, cplx(0.0));
        for (std::size_t r = 0; r < k; ++r) {
            cplx acc = 0.0;
            for (std::size_t s = 0; s < k; ++s) acc += d(r, s) * base.eigenvectors(s, idx);
            expect[half + r] = acc;
        }
        double diff2 = 0.0, norm2 = 0.0, img2 = 0.0;
        for (std::size_t i = 0; i < 2 * half; ++i) {
            diff2 += std::norm(image[i] - expect[i]);
            norm2 += std::norm(expect[i]);
            img2 += std::norm(image[i]);
        }
        if (norm2 > 1e-28)
            rep.phi_relation_residual =
                std::max(rep.phi_relation_residual, std::sqrt(diff2 / norm2));
        else
            rep.phi_relation_residual = std::max(rep.phi_relation_residual, std::sqrt(diff2));
        // |Dhat Phi+(f)|^2 = <f, D*D f> = eigenvalue for unit f
        rep.phi_isometry_defect =
            std::max(rep.phi_isometry_defect, std::abs(img2 - base.eigenvalues[idx]));
    }
    return rep;
}

PeriodicityReport periodicity_check(const FamilyS2& f, const std::vector<double>& hbars,
                                    std::size_t m, const DegreeOptions& opts) {
    PeriodicityReport rep;
    rep.clutch_oracle = f.clutch_degree();
    rep.degree_base_sections = det_bundle_degree(f, opts).degree;

    // base spectral route with the band covering the whole equator
    // spectrum of D*D
    double top = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
        const double ph = 2.0 * M_PI * j / 64.0;
        const ComplexMatrix dn = f.north(M_PI / 2.0, ph);
        const auto mu = numkit::eigvals_hermitian(dn.adjoint() * dn, 1e-8);
        top = std::max(top, mu.back());
    }
    rep.degree_base_spectral = spectral_band_degree(f, top * 1.5 + 1e-3, opts.equator_nodes);

    rep.hbars = hbars;
    rep.consistent = true;
    for (double hbar : hbars) {
        if (2.0 * hbar <= top)
            throw EigenvalueOnThreshold("periodicity_check: oscillator bands overlap the family band");
        const double lambda = 0.5 * (top + 2.0 * hbar);
        const FamilyS2 dbl = doubled_family(f, hbar, m);
        rep.degree_doubled.push_back(spectral_band_degree(dbl, lambda, opts.equator_nodes));
        if (rep.degree_doubled.back() != rep.degree_base_sections) rep.consistent = false;
    }
    if (rep.degree_base_spectral != rep.degree_base_sections) rep.consistent = false;
    return rep;
}

} // namespace etaforge::periodicity
