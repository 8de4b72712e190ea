#include "etaforge/asymfit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "etaforge/eig.hpp"
#include "etaforge/errors.hpp"

namespace etaforge::numkit {

cplx AsymptoticFit::lim() const { return coeff_of(0); }

cplx AsymptoticFit::coeff_of(int power) const {
    for (std::size_t i = 0; i < powers.size(); ++i)
        if (powers[i] == power) return coeff[i];
    return 0.0;
}

cplx AsymptoticFit::log_coeff_of(int power) const {
    if (log_coeff.empty()) return 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i)
        if (powers[i] == power) return log_coeff[i];
    return 0.0;
}

cplx AsymptoticFit::eval(double t) const {
    cplx v = 0.0;
    const double lg = std::log(t);
    for (std::size_t i = 0; i < powers.size(); ++i) {
        const double tp = std::pow(t, powers[i]);
        v += coeff[i] * tp;
        if (!log_coeff.empty()) v += log_coeff[i] * tp * lg;
    }
    return v;
}

AsymptoticFit fit_asymptotic_basis(const std::vector<double>& t_samples,
                                   const std::vector<cplx>& f_samples,
                                   const std::vector<BasisTerm>& basis, double residual_tol) {
    if (t_samples.size() != f_samples.size())
        throw GridMismatch("fit_asymptotic: sample arrays differ in length");
    if (basis.empty()) throw GridMismatch("fit_asymptotic: empty basis");
    const std::size_t nsamp = t_samples.size();
    const std::size_t nbasis = basis.size();
    if (nsamp < 2 * nbasis)
        throw IllConditioned("fit_asymptotic: need at least 2x more samples than basis functions");
    for (std::size_t k = 0; k < nsamp; ++k) {
        if (t_samples[k] <= 1.0) throw GridMismatch("fit_asymptotic: samples must satisfy T > 1");
        if (k > 0 && t_samples[k] <= t_samples[k - 1])
            throw GridMismatch("fit_asymptotic: T samples must be strictly increasing");
    }

    int max_power = basis.front().power;
    for (const auto& b : basis) max_power = std::max(max_power, b.power);

    // design matrix rows: w_k * T^p (log T)^l
    std::vector<double> design(nsamp * nbasis);
    std::vector<cplx> rhs(nsamp);
    for (std::size_t k = 0; k < nsamp; ++k) {
        const double t = t_samples[k];
        const double w = 1.0 / std::pow(t, static_cast<double>(max_power));
        const double lg = std::log(t);
        for (std::size_t j = 0; j < nbasis; ++j) {
            double col = std::pow(t, basis[j].power);
            if (basis[j].with_log) col *= lg;
            design[k * nbasis + j] = w * col;
        }
        rhs[k] = w * f_samples[k];
    }

    // normalize columns to unit norm; the Vandermonde-with-logs columns
    // otherwise span many decades
    std::vector<double> colscale(nbasis, 0.0);
    for (std::size_t i = 0; i < nbasis; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < nsamp; ++k) s += design[k * nbasis + i] * design[k * nbasis + i];
        colscale[i] = (s > 0.0) ? 1.0 / std::sqrt(s) : 1.0;
        for (std::size_t k = 0; k < nsamp; ++k) design[k * nbasis + i] *= colscale[i];
    }

    const std::vector<double> design_saved = design;

    // Householder QR of the scaled design, applied to the complex rhs
    std::vector<cplx> y = rhs;
    std::vector<double> hv(nsamp);
    std::vector<double> rdiag(nbasis, 0.0);
    for (std::size_t col = 0; col < nbasis; ++col) {
        double nrm2 = 0.0;
        for (std::size_t k = col; k < nsamp; ++k) {
            hv[k] = design[k * nbasis + col];
            nrm2 += hv[k] * hv[k];
        }
        const double alpha = (hv[col] >= 0.0) ? -std::sqrt(nrm2) : std::sqrt(nrm2);
        rdiag[col] = alpha;
        hv[col] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t k = col; k < nsamp; ++k) vnorm2 += hv[k] * hv[k];
        if (vnorm2 == 0.0) continue;
        const double sigma = 2.0 / vnorm2;
        for (std::size_t j = col; j < nbasis; ++j) {
            double dot = 0.0;
            for (std::size_t k = col; k < nsamp; ++k) dot += hv[k] * design[k * nbasis + j];
            dot *= sigma;
            for (std::size_t k = col; k < nsamp; ++k) design[k * nbasis + j] -= dot * hv[k];
        }
        cplx cdot = 0.0;
        for (std::size_t k = col; k < nsamp; ++k) cdot += hv[k] * y[k];
        cdot *= sigma;
        for (std::size_t k = col; k < nsamp; ++k) y[k] -= cdot * hv[k];
    }

    // condition estimate through the singular values of R (small system)
    ComplexMatrix rtr(nbasis, nbasis);
    for (std::size_t i = 0; i < nbasis; ++i)
        for (std::size_t j = 0; j < nbasis; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k <= std::min(i, j); ++k)
                acc += design[k * nbasis + i] * design[k * nbasis + j];
            rtr(i, j) = acc;
        }
    const auto sv = eigvals_hermitian(rtr, 1e-6);
    const double cond = (sv.front() <= 0.0) ? 1e300 : sv.back() / sv.front();
    if (cond > 1e12)
        throw IllConditioned("fit_asymptotic: normal equations condition number exceeds 1e12");

    // back substitution with R (upper triangular, diagonal in rdiag)
    std::vector<cplx> x(nbasis, cplx(0.0));
    for (std::size_t ii = nbasis; ii-- > 0;) {
        cplx acc = y[ii];
        for (std::size_t j = ii + 1; j < nbasis; ++j) acc -= design[ii * nbasis + j] * x[j];
        x[ii] = acc / rdiag[ii];
    }

    // arrange per-power slots, zero where a column is absent
    std::set<int> pset;
    bool any_log = false;
    for (const auto& b : basis) {
        pset.insert(b.power);
        any_log = any_log || b.with_log;
    }
    AsymptoticFit fit;
    fit.powers.assign(pset.begin(), pset.end());
    fit.coeff.assign(fit.powers.size(), cplx(0.0));
    if (any_log) fit.log_coeff.assign(fit.powers.size(), cplx(0.0));
    for (std::size_t j = 0; j < nbasis; ++j) {
        const auto slot = static_cast<std::size_t>(
            std::lower_bound(fit.powers.begin(), fit.powers.end(), basis[j].power) -
            fit.powers.begin());
        if (basis[j].with_log)
            fit.log_coeff[slot] = x[j] * colscale[j];
        else
            fit.coeff[slot] = x[j] * colscale[j];
    }
    fit.window_lo = t_samples.front();
    fit.window_hi = t_samples.back();
    fit.condition = cond;

    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < nsamp; ++k) {
        cplx pred = 0.0;
        for (std::size_t i = 0; i < nbasis; ++i) pred += design_saved[k * nbasis + i] * x[i];
        num += std::norm(pred - rhs[k]);
        den += 1.0;
    }
    fit.residual = std::sqrt(num / den);
    fit.reliable = fit.residual <= residual_tol;
    return fit;
}

AsymptoticFit fit_asymptotic(const std::vector<double>& t_samples,
                             const std::vector<cplx>& f_samples, int min_power, int max_power,
                             bool with_logs, double residual_tol) {
    if (min_power > max_power) throw GridMismatch("fit_asymptotic: empty power range");
    std::vector<BasisTerm> basis;
    for (int p = min_power; p <= max_power; ++p) basis.push_back({p, false});
    if (with_logs)
        for (int p = min_power; p <= max_power; ++p) basis.push_back({p, true});
    return fit_asymptotic_basis(t_samples, f_samples, basis, residual_tol);
}

} // namespace etaforge::numkit
