#include "etaforge/moyal.hpp"

#include <algorithm>
#include <cmath>

#include "etaforge/errors.hpp"
#include "etaforge/fourier.hpp"
#include "etaforge/hermite.hpp"
#include "etaforge/parallel.hpp"

namespace etaforge::moyal {

// ----------------------------------------------------------- FormalSeries

FormalSeries FormalSeries::zero(double half_width, std::size_t n, std::size_t fiber_dim,
                                std::size_t kmax) {
    FormalSeries s;
    s.coeff.assign(kmax + 1, Grid2D(half_width, n, fiber_dim));
    return s;
}

FormalSeries FormalSeries::identity(double half_width, std::size_t n, std::size_t fiber_dim,
                                    std::size_t kmax) {
    FormalSeries s = zero(half_width, n, fiber_dim, kmax);
    const ComplexMatrix id = ComplexMatrix::identity(fiber_dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.coeff[0].set_value(i, j, id);
    return s;
}

bool FormalSeries::same_shape(const FormalSeries& o) const {
    return coeff.size() == o.coeff.size() && coeff.front().same_geometry(o.coeff.front());
}

FormalSeries& FormalSeries::operator+=(const FormalSeries& o) {
    if (!same_shape(o)) throw GridMismatch("FormalSeries: shape mismatch");
    for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] += o.coeff[k];
    return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& o) {
    if (!same_shape(o)) throw GridMismatch("FormalSeries: shape mismatch");
    for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] -= o.coeff[k];
    return *this;
}

FormalSeries& FormalSeries::operator*=(cplx s) {
    for (auto& c : coeff) c *= s;
    return *this;
}

double FormalSeries::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeff) m = std::max(m, c.max_abs());
    return m;
}

// ------------------------------------------------------------- star terms

namespace {

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

} // namespace

Grid2D star_term(const Grid2D& a, const Grid2D& b, int q, double envelope_tol) {
    if (!a.same_geometry(b)) throw GridMismatch("star_term: geometry mismatch");
    if (q == 0) return pw_product(a, b);

    Grid2D acc(a.half_width(), a.points_per_axis(), a.fiber_dim());
    for (int r = 0; r <= q; ++r) {
        // dt^r dtau^{q-r} a  times  dtau^r dt^{q-r} b
        Grid2D da = fft_derivative_mixed(a, r, q - r, envelope_tol);
        Grid2D db = fft_derivative_mixed(b, q - r, r, envelope_tol);
        Grid2D prod = pw_product(da, db);
        const double sign = ((q - r) % 2 == 0) ? 1.0 : -1.0;
        prod *= cplx(sign * binom(q, r));
        acc += prod;
    }
    // (-i/2)^q / q!
    cplx pref = 1.0;
    for (int i = 1; i <= q; ++i) pref *= cplx(0.0, -0.5) / static_cast<double>(i);
    acc *= pref;
    return acc;
}

FormalSeries star_formal(const FormalSeries& a, const FormalSeries& b, double envelope_tol) {
    if (!a.same_shape(b)) throw GridMismatch("star_formal: shape mismatch");
    const std::size_t kmax = a.kmax();
    FormalSeries out = FormalSeries::zero(a.geometry().half_width(), a.geometry().points_per_axis(),
                                          a.geometry().fiber_dim(), kmax);
    for (std::size_t sigma = 0; sigma <= kmax; ++sigma)
        for (std::size_t mu = 0; mu <= sigma; ++mu)
            for (std::size_t nu = 0; nu + mu <= sigma; ++nu) {
                const int q = static_cast<int>(sigma - mu - nu);
                out.coeff[sigma] += star_term(a.coeff[mu], b.coeff[nu], q, envelope_tol);
            }
    return out;
}

// ------------------------------------------------------------ ladder ops

ComplexMatrix op_t(double hbar, std::size_t m) {
    ComplexMatrix t(m, m);
    const double c = std::sqrt(hbar / 2.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (k >= 1) t(k - 1, k) = c * std::sqrt(static_cast<double>(k));
        if (k + 1 < m) t(k + 1, k) = c * std::sqrt(static_cast<double>(k + 1));
    }
    return t;
}

ComplexMatrix op_tau(double hbar, std::size_t m) {
    ComplexMatrix y(m, m);
    const double c = std::sqrt(hbar / 2.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (k >= 1) y(k - 1, k) = cplx(0.0, c * std::sqrt(static_cast<double>(k)));
        if (k + 1 < m) y(k + 1, k) = cplx(0.0, -c * std::sqrt(static_cast<double>(k + 1)));
    }
    return y;
}

// -------------------------------------------------------- grid quantizer

namespace {

// zero-padding refinement of a complex line by factor two
void refine_line2(const std::vector<cplx>& in, std::vector<cplx>& out) {
    const std::size_t n = in.size();
    std::vector<cplx> spec = in;
    numkit::fft(spec);
    out.assign(2 * n, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) {
        if (k < n / 2)
            out[k] = spec[k];
        else if (k == n / 2) {
            out[n / 2] = 0.5 * spec[k];
            out[2 * n - n / 2] = 0.5 * spec[k];
        } else
            out[n + k] = spec[k];
    }
    numkit::ifft(out);
    for (auto& v : out) v *= 2.0;
}

struct BandedKernel {
    // B[(d + w) * (2N) + u] per fiber component; kernel value at
    // (t_a, t_b) is (2 pi hbar)^{-1} B(u = a + b, d = a - b)
    std::size_t n = 0;
    long w = 0;
    std::size_t fdim = 0;
    std::vector<cplx> data;  // [(r*f+s)] planes of (2w+1) x (2n)

    const cplx& at(std::size_t r, std::size_t s, long d, std::size_t u) const {
        const std::size_t plane = (r * fdim + s) * static_cast<std::size_t>(2 * w + 1) * (2 * n);
        return data[plane + static_cast<std::size_t>(d + w) * (2 * n) + u];
    }
    cplx& at(std::size_t r, std::size_t s, long d, std::size_t u) {
        const std::size_t plane = (r * fdim + s) * static_cast<std::size_t>(2 * w + 1) * (2 * n);
        return data[plane + static_cast<std::size_t>(d + w) * (2 * n) + u];
    }
};

// Fourier transform of the symbol in tau at the discrete offsets s = d h,
// evaluated on the refined t-grid; band grows adaptively until the
// kernel tail falls below band_tol of its peak or covers s_needed.
BandedKernel build_banded_kernel(const Grid2D& a, double hbar, double band_tol, double s_needed) {
    const std::size_t n = a.points_per_axis();
    const std::size_t f = a.fiber_dim();
    const double h = a.spacing();

    // aliasing bound for the tau quadrature of e^{-i s tau / hbar}, with
    // margin against undersampling near the cap
    const long alias_d = static_cast<long>(std::floor(0.85 * M_PI * hbar / (h * h)));
    const long d_cap = std::min<long>(alias_d, static_cast<long>(n) - 1);
    if (d_cap < 1)
        throw TruncationDominated("weyl_quantize: grid spacing too coarse for this hbar");

    // probe band width on a subsampled t-set using the fiber-max amplitude
    std::vector<double> tau(n);
    for (std::size_t j = 0; j < n; ++j) tau[j] = a.node(j);
    const std::size_t stride = std::max<std::size_t>(1, n / 64);

    auto band_amplitude = [&](long d) {
        // max over sampled u of |sum_j a(t, tau_j) e^{-i d h tau_j / hbar}| h
        double peak = 0.0;
        const double freq = static_cast<double>(d) * h / hbar;
        std::vector<cplx> phase(n);
        for (std::size_t j = 0; j < n; ++j) phase[j] = std::polar(1.0, -freq * tau[j]);
        for (std::size_t r = 0; r < f; ++r)
            for (std::size_t s = 0; s < f; ++s)
                for (std::size_t i = 0; i < n; i += stride) {
                    cplx acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += a.at(r, s, i, j) * phase[j];
                    peak = std::max(peak, std::abs(acc) * h);
                }
        return peak;
    };

    const double peak0 = std::max(band_amplitude(0), 1e-300);
    const long d_needed = static_cast<long>(std::ceil(s_needed / h));
    long w = 1;
    int quiet = 0;
    double last_amp = peak0;
    while (w < d_cap && quiet < 2 && w < d_needed) {
        last_amp = std::max(band_amplitude(w), band_amplitude(-w));
        if (last_amp < band_tol * peak0)
            ++quiet;
        else
            quiet = 0;
        if (quiet < 2) ++w;
    }
    // hitting the aliasing cap is fatal only when offsets that could
    // still couple the requested modes carry real kernel mass
    if (w >= d_cap && w < d_needed && last_amp > 1e-6 * peak0)
        throw TruncationDominated("weyl_quantize: kernel band exceeds the aliasing-safe range");

    BandedKernel bk;
    bk.n = n;
    bk.w = w;
    bk.fdim = f;
    bk.data.assign(f * f * static_cast<std::size_t>(2 * w + 1) * (2 * n), cplx(0.0));

    // per component and offset: tau-transform on the raw grid, then
    // refine along t so midpoints (t_a + t_b)/2 land on grid nodes
    std::vector<long> offsets;
    for (long d = -w; d <= w; ++d) offsets.push_back(d);
    parallel_for(offsets.size(), [&](std::size_t oi) {
        const long d = offsets[oi];
        const double freq = static_cast<double>(d) * h / hbar;
        std::vector<cplx> phase(n);
        for (std::size_t j = 0; j < n; ++j) phase[j] = std::polar(1.0, -freq * tau[j]);
        std::vector<cplx> line(n), refined;
        for (std::size_t r = 0; r < f; ++r)
            for (std::size_t s = 0; s < f; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    cplx acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += a.at(r, s, i, j) * phase[j];
                    line[i] = acc * h;
                }
                refine_line2(line, refined);
                for (std::size_t u = 0; u < 2 * n; ++u) bk.at(r, s, d, u) = refined[u];
            }
    });
    return bk;
}

std::vector<double> grid_nodes(const Grid2D& a) {
    std::vector<double> x(a.points_per_axis());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.node(i);
    return x;
}

} // namespace

ComplexMatrix weyl_quantize_block(const Grid2D& a, double hbar, std::size_t m_rows,
                                  std::size_t m_cols, const QuantizeOptions& opts) {
    if (hbar <= 0.0) throw GridMismatch("weyl_quantize: hbar must be positive");
    a.check_envelope(opts.envelope_tol);
    const std::size_t n = a.points_per_axis();
    const std::size_t f = a.fiber_dim();
    const double h = a.spacing();
    const std::size_t m = std::max(m_rows, m_cols);

    // the t-grid must resolve the fastest Hermite oscillation
    const double k_top = std::sqrt((2.0 * static_cast<double>(m) + 1.0) / hbar);
    if (h * k_top > 1.6)
        throw TruncationDominated("weyl_quantize: t-grid cannot resolve the requested Hermite modes");

    // offsets beyond twice the top turning point cannot couple the
    // requested modes, so the band never needs to extend past this
    const double s_needed = 2.4 * std::sqrt(hbar * (2.0 * static_cast<double>(m) + 1.0)) + 1.0;
    const numkit::HermiteTable table = numkit::hermite_functions(m, grid_nodes(a), hbar);
    const BandedKernel bk = build_banded_kernel(a, hbar, opts.band_tol, s_needed);
    const double pref = h * h / (2.0 * M_PI * hbar);

    // Q(i, b) = sum_a phi_i(t_a) K(t_a, t_b), banded in a - b
    std::vector<cplx> q(m_rows * n * f * f);
    parallel_for(m_rows, [&](std::size_t i) {
        for (std::size_t r = 0; r < f; ++r)
            for (std::size_t s = 0; s < f; ++s) {
                cplx* row = &q[((i * f + r) * f + s) * n];
                for (std::size_t b = 0; b < n; ++b) {
                    const long lo = std::max<long>(0, static_cast<long>(b) - bk.w);
                    const long hi = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(b) + bk.w);
                    cplx acc = 0.0;
                    for (long aa = lo; aa <= hi; ++aa) {
                        const long d = aa - static_cast<long>(b);
                        const std::size_t u = static_cast<std::size_t>(aa) + b;
                        acc += table.at(i, static_cast<std::size_t>(aa)) * bk.at(r, s, d, u);
                    }
                    row[b] = acc;
                }
            }
    });

    ComplexMatrix out(m_rows * f, m_cols * f);
    parallel_for(m_rows, [&](std::size_t i) {
        for (std::size_t r = 0; r < f; ++r)
            for (std::size_t s = 0; s < f; ++s) {
                const cplx* row = &q[((i * f + r) * f + s) * n];
                for (std::size_t j = 0; j < m_cols; ++j) {
                    cplx acc = 0.0;
                    const double* phi_j = &table.values[j * n];
                    for (std::size_t b = 0; b < n; ++b) acc += row[b] * phi_j[b];
                    out(i * f + r, j * f + s) = acc * pref;
                }
            }
    });
    return out;
}

namespace {

double tail_energy_of(const ComplexMatrix& mat, std::size_t m, std::size_t f) {
    if (m < 2) return 0.0;
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 0; i < mat.rows(); ++i)
        for (std::size_t j = 0; j < mat.cols(); ++j) {
            const double v = std::norm(mat(i, j));
            total += v;
            if (i / f == m - 1 || j / f == m - 1) tail += v;
        }
    if (total == 0.0) return 0.0;
    return std::sqrt(tail / total);
}

} // namespace

HermiteMatrix weyl_quantize(const Grid2D& a, double hbar, std::size_t m,
                            const QuantizeOptions& opts) {
    HermiteMatrix hm;
    hm.hbar = hbar;
    hm.m = m;
    hm.fiber_dim = a.fiber_dim();
    hm.matrix = weyl_quantize_block(a, hbar, m, m, opts);
    hm.tail_energy = tail_energy_of(hm.matrix, m, a.fiber_dim());
    if (hm.tail_energy > opts.tail_tol)
        throw TruncationDominated("weyl_quantize: tail energy exceeds tolerance");
    return hm;
}

HermiteMatrix weyl_quantize(const suspended::DescriptorFamily& a, double hbar, std::size_t m,
                            double grid_half_width, std::size_t grid_points,
                            const QuantizeOptions& opts) {
    if (a.p != 2) throw GridMismatch("weyl_quantize: descriptor must be a two-parameter family");
    if (a.poly_degree() > 2)
        throw GridMismatch("weyl_quantize: descriptor polynomial degree above 2 has no exact ladder form");
    const std::size_t f = a.fiber_dim;

    // exact monomial operators, built two modes above the truncation so
    // products are exact on the kept block
    const std::size_t mbig = m + 2;
    const ComplexMatrix t1 = op_t(hbar, mbig);
    const ComplexMatrix y1 = op_tau(hbar, mbig);
    const ComplexMatrix t2 = t1 * t1;
    const ComplexMatrix y2 = y1 * y1;
    ComplexMatrix ty = t1 * y1 + y1 * t1;
    ty *= 0.5;

    HermiteMatrix hm;
    hm.hbar = hbar;
    hm.m = m;
    hm.fiber_dim = f;
    hm.matrix = ComplexMatrix(m * f, m * f);

    auto add_mono = [&](const ComplexMatrix& op, const ComplexMatrix& c) {
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l) {
                const cplx w = op(k, l);
                if (w == cplx(0.0, 0.0)) continue;
                for (std::size_t r = 0; r < f; ++r)
                    for (std::size_t s = 0; s < f; ++s) hm.matrix(k * f + r, l * f + s) += w * c(r, s);
            }
    };

    const ComplexMatrix id = ComplexMatrix::identity(mbig);
    for (const auto& mono : a.poly) {
        const ComplexMatrix* op = nullptr;
        if (mono.pow_t == 0 && mono.pow_tau == 0)
            op = &id;
        else if (mono.pow_t == 1 && mono.pow_tau == 0)
            op = &t1;
        else if (mono.pow_t == 0 && mono.pow_tau == 1)
            op = &y1;
        else if (mono.pow_t == 2 && mono.pow_tau == 0)
            op = &t2;
        else if (mono.pow_t == 0 && mono.pow_tau == 2)
            op = &y2;
        else if (mono.pow_t == 1 && mono.pow_tau == 1)
            op = &ty;
        else
            throw GridMismatch("weyl_quantize: unsupported monomial");
        add_mono(*op, mono.coeff);
    }

    if (a.schwartz) {
        const Grid2D g = Grid2D::sample(grid_half_width, grid_points, f,
                                        [&](double t, double tau) { return a.schwartz(t, tau); });
        HermiteMatrix sw = weyl_quantize(g, hbar, m, opts);
        hm.matrix += sw.matrix;
    }
    return hm;
}

HermiteMatrix weyl_quantize_radial(const std::function<ComplexMatrix(double)>& f_of_r2,
                                   std::size_t fiber_dim, double hbar, std::size_t m,
                                   std::size_t quad_points) {
    // substitution u = hbar y^2 / 2 equalizes the Laguerre oscillation:
    // A_k = int_0^inf f(hbar y^2/2) (-1)^k L_k(y^2) e^{-y^2/2} y dy
    const double y_max = std::sqrt(4.0 * static_cast<double>(m) + 60.0);
    const std::size_t v = quad_points ? quad_points : std::max<std::size_t>(2048, 8 * m);

    // composite 8-point Gauss-Legendre panels
    static const double gl_x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
    static const double gl_w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
    const std::size_t panels = (v + 7) / 8;
    const double plen = y_max / static_cast<double>(panels);

    HermiteMatrix hm;
    hm.hbar = hbar;
    hm.m = m;
    hm.fiber_dim = fiber_dim;
    hm.matrix = ComplexMatrix(m * fiber_dim, m * fiber_dim);

    std::vector<ComplexMatrix> weights(m, ComplexMatrix(fiber_dim, fiber_dim));
    for (std::size_t pidx = 0; pidx < panels; ++pidx) {
        const double c = (static_cast<double>(pidx) + 0.5) * plen;
        const double half = 0.5 * plen;
        for (int node = 0; node < 8; ++node) {
            const double xi = (node < 4) ? -gl_x[3 - node] : gl_x[node - 4];
            const double wq = (node < 4) ? gl_w[3 - node] : gl_w[node - 4];
            const double y = c + half * xi;
            const double x = y * y;  // Laguerre argument
            const ComplexMatrix fv = f_of_r2(hbar * x / 2.0);
            // scaled recurrence l_k = L_k(x) e^{-x/2}, |l_k| <= 1
            double lprev = 0.0;
            double lcur = std::exp(-0.5 * x);
            for (std::size_t k = 0; k < m; ++k) {
                if (k > 0) {
                    const double dk = static_cast<double>(k);
                    const double lnext = ((2.0 * dk - 1.0 - x) * lcur - (dk - 1.0) * lprev) / dk;
                    lprev = lcur;
                    lcur = lnext;
                }
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const double wgt = sign * lcur * y * wq * half;
                for (std::size_t r = 0; r < fiber_dim; ++r)
                    for (std::size_t s = 0; s < fiber_dim; ++s) weights[k](r, s) += wgt * fv(r, s);
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t r = 0; r < fiber_dim; ++r)
            for (std::size_t s = 0; s < fiber_dim; ++s)
                hm.matrix(k * fiber_dim + r, k * fiber_dim + s) = weights[k](r, s);
    hm.tail_energy = tail_energy_of(hm.matrix, m, fiber_dim);
    return hm;
}

HermiteMatrix oracle_product(const HermiteMatrix& a, const HermiteMatrix& b) {
    if (a.m != b.m || a.fiber_dim != b.fiber_dim || a.hbar != b.hbar)
        throw GridMismatch("oracle_product: incompatible Hermite matrices");
    HermiteMatrix out;
    out.hbar = a.hbar;
    out.m = a.m;
    out.fiber_dim = a.fiber_dim;
    out.matrix = a.matrix * b.matrix;
    out.tail_energy = std::max(a.tail_energy, b.tail_energy);
    return out;
}

HermiteMatrix star_eps_oracle(const Grid2D& a, const Grid2D& b, double hbar, std::size_t m,
                              const QuantizeOptions& opts) {
    return oracle_product(weyl_quantize(a, hbar, m, opts), weyl_quantize(b, hbar, m, opts));
}

cplx oracle_trace(const HermiteMatrix& a) { return a.matrix.trace(); }

double flat_window(double x, double flat, double cut) {
    const double ax = std::abs(x);
    if (ax <= flat) return 1.0;
    if (ax >= cut) return 0.0;
    const double u = (cut - ax) / (cut - flat);  // in (0,1)
    const auto bump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    return bump(u) / (bump(u) + bump(1.0 - u));
}

} // namespace etaforge::moyal
