#pragma once

#include <vector>

#include "etaforge/complex_matrix.hpp"

namespace etaforge::numkit {

/// Least-squares fit of samples against the basis {T^j} (and optionally
/// {T^j log T}) over an integer power window.  The T^0 pure-power
/// coefficient is the regularized limit (LIM) of the sampled expansion.
struct AsymptoticFit {
    std::vector<int> powers;          // ascending
    std::vector<cplx> coeff;          // c_j, one per power
    std::vector<cplx> log_coeff;      // d_j, empty unless with_logs
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual = 0.0;            // weighted RMS misfit
    double condition = 0.0;           // normal-equation condition number
    bool reliable = true;             // residual below the requested tolerance

    cplx lim() const;                 // coefficient of T^0
    cplx coeff_of(int power) const;
    cplx log_coeff_of(int power) const;
    cplx eval(double t) const;
};

/// Weighted least squares over {T^j, T^j log T}, j in [min_power,
/// max_power].  Samples are (T_k, f(T_k)) with T strictly increasing and
/// > 1; at least twice as many samples as basis functions are required.
/// Weight of sample k is 1/T_k^max_power to balance scales.  Throws
/// IllConditioned when the normal-equation condition number exceeds 1e12.
AsymptoticFit fit_asymptotic(const std::vector<double>& t_samples,
                             const std::vector<cplx>& f_samples, int min_power, int max_power,
                             bool with_logs, double residual_tol = 1e-6);

/// One basis column T^power (log T)^{0 or 1}.
struct BasisTerm {
    int power = 0;
    bool with_log = false;
};

/// Same least-squares machinery over an explicit column list; callers
/// that know which log terms their expansion carries shrink the basis
/// this way instead of paying for the full rectangle.
AsymptoticFit fit_asymptotic_basis(const std::vector<double>& t_samples,
                                   const std::vector<cplx>& f_samples,
                                   const std::vector<BasisTerm>& basis,
                                   double residual_tol = 1e-6);

} // namespace etaforge::numkit
