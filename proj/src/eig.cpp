#include "etaforge/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "etaforge/errors.hpp"

namespace etaforge::numkit {

namespace {

constexpr int kMaxIterPerEigenvalue = 64;

// Householder reduction of a Hermitian matrix to real symmetric
// tridiagonal form.  On return d holds the diagonal, e the subdiagonal
// (e[0] unused), and q the accumulated unitary so that A = Q T Q*.
void tridiagonalize(ComplexMatrix a, std::vector<double>& d, std::vector<double>& e,
                    ComplexMatrix* q) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (q) *q = ComplexMatrix::identity(n);
    if (n == 0) return;

    std::vector<cplx> v(n), p(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // reflect x = a[k+1.., k] onto alpha * e_1
        double beta2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) beta2 += std::norm(a(i, k));
        const double beta = std::sqrt(beta2);
        if (beta == 0.0) continue;
        const cplx x0 = a(k + 1, k);
        const cplx alpha = (x0 == cplx(0.0, 0.0)) ? cplx(-beta, 0.0) : -(x0 / std::abs(x0)) * beta;

        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 == 0.0) continue;
        const double sigma = 2.0 / vnorm2;

        // rank-2 update of the trailing block: A <- A - v q* - q v*
        for (std::size_t i = k + 1; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            p[i] = sigma * s;
        }
        cplx kappa = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) kappa += std::conj(v[i]) * p[i];
        kappa *= 0.5 * sigma;
        for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kappa * v[i];
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);

        a(k + 1, k) = alpha;
        a(k, k + 1) = std::conj(alpha);
        for (std::size_t i = k + 2; i < n; ++i) {
            a(i, k) = 0.0;
            a(k, i) = 0.0;
        }

        if (q) {
            // Q <- Q P, acting on columns k+1..n-1
            for (std::size_t i = 0; i < n; ++i) {
                cplx s = 0.0;
                for (std::size_t j = k + 1; j < n; ++j) s += (*q)(i, j) * v[j];
                s *= sigma;
                for (std::size_t j = k + 1; j < n; ++j) (*q)(i, j) -= s * std::conj(v[j]);
            }
        }
    }

    // diagonal phase similarity making the subdiagonal real non-negative:
    // d_i = d_{i-1} * e_i / |e_i|, column i of Q picks up d_i
    cplx phase = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a(i, i).real();
        if (i == 0) continue;
        const cplx sub = a(i, i - 1);
        const double mag = std::abs(sub);
        e[i] = mag;
        if (mag > 0.0) phase *= sub / mag;
        if (q && phase != cplx(1.0, 0.0))
            for (std::size_t r = 0; r < n; ++r) (*q)(r, i) *= phase;
    }
}

// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal
// matrix; rotations are accumulated into the complex columns of q.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, ComplexMatrix* q) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    // shift e so that e[i] couples d[i] and d[i+1]
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxIterPerEigenvalue)
                    throw NoConvergence("eig_hermitian: QL iteration cap reached");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i1 = m; i1-- > l;) {
                    const std::size_t i = i1;
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (q) {
                        for (std::size_t row = 0; row < q->rows(); ++row) {
                            const cplx qi1 = (*q)(row, i + 1);
                            const cplx qi = (*q)(row, i);
                            (*q)(row, i + 1) = s * qi + c * qi1;
                            (*q)(row, i) = c * qi - s * qi1;
                        }
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

EigResult eig_impl(const ComplexMatrix& a, double herm_tol, bool want_vectors) {
    if (!a.square()) throw NotHermitian("eig_hermitian: matrix not square");
    if (!a.all_finite()) throw NotHermitian("eig_hermitian: non-finite entries");
    const double dev = a.max_abs_diff(a.adjoint());
    const double scale = std::max(1.0, a.max_abs());
    if (dev > herm_tol * scale)
        throw NotHermitian("eig_hermitian: deviation from Hermitian exceeds tolerance");

    // symmetrize to kill round-off asymmetry before reduction
    ComplexMatrix h = a;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        h(i, i) = cplx(h(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < h.cols(); ++j) {
            const cplx m = 0.5 * (h(i, j) + std::conj(h(j, i)));
            h(i, j) = m;
            h(j, i) = std::conj(m);
        }
    }

    std::vector<double> d, e;
    ComplexMatrix q;
    tridiagonalize(std::move(h), d, e, want_vectors ? &q : nullptr);
    ql_implicit(d, e, want_vectors ? &q : nullptr);

    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

    EigResult res;
    res.eigenvalues.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) res.eigenvalues[i] = d[order[i]];
    if (want_vectors) {
        res.eigenvectors = ComplexMatrix(d.size(), d.size());
        for (std::size_t j = 0; j < d.size(); ++j)
            for (std::size_t i = 0; i < d.size(); ++i) res.eigenvectors(i, j) = q(i, order[j]);
    }
    return res;
}

} // namespace

EigResult eig_hermitian(const ComplexMatrix& a, double herm_tol) {
    return eig_impl(a, herm_tol, true);
}

std::vector<double> eigvals_hermitian(const ComplexMatrix& a, double herm_tol) {
    return eig_impl(a, herm_tol, false).eigenvalues;
}

} // namespace etaforge::numkit
