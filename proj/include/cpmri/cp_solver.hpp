#pragma once

#include <limits>
#include <ostream>

#include "cpmri/encoding.hpp"
#include "cpmri/errors.hpp"
#include "cpmri/prox.hpp"

namespace cpmri {

/// Step sizes and stopping rule for the classical primal-dual solve.
/// With the unitary FFT and a binary mask, ‖A‖ = 1, so the step-size
/// condition is σ·τ ≤ 0.95.
struct CPParams {
    double sigma = 0.95;
    double tau = 0.95;
    double theta = 1.0;
    double lambda = 1e-3;
    std::int64_t max_iters = 500;
    double tol = 1e-6;

    CPParams() { validate(); }
    CPParams(double sigma_, double tau_, double theta_, double lambda_,
             std::int64_t max_iters_, double tol_)
        : sigma(sigma_), tau(tau_), theta(theta_), lambda(lambda_), max_iters(max_iters_), tol(tol_) {
        validate();
    }

    void validate() const {
        if (!(sigma > 0.0) || !(tau > 0.0))
            throw config_error("CPParams: sigma and tau must be positive");
        if (sigma * tau > 0.95)
            throw config_error("CPParams: sigma*tau = " + std::to_string(sigma * tau) +
                               " violates the step-size condition sigma*tau <= 0.95");
        if (theta < 0.0 || theta > 1.0) throw config_error("CPParams: theta must be in [0, 1]");
        if (lambda < 0.0) throw config_error("CPParams: lambda must be >= 0");
        if (max_iters < 1) throw config_error("CPParams: max_iters must be >= 1");
        if (tol < 0.0) throw config_error("CPParams: tol must be >= 0");
    }
};

struct SolveTrace {
    std::vector<double> objective;   // ½‖Ap−y‖² + λ‖Ψp‖₁ at each iterate
    std::vector<double> rel_change;  // ‖p_{n+1}−p_n‖ / ‖p_n‖
    std::int64_t iterations_run = 0;

    void write_csv(std::ostream& os) const {
        os << "iteration,objective,relative_change\n";
        for (std::size_t i = 0; i < objective.size(); ++i)
            os << i + 1 << ',' << objective[i] << ',' << rel_change[i] << '\n';
    }
};

struct CPSolveResult {
    ComplexField image;
    SolveTrace trace;
};

namespace detail {

inline double cp_objective(const ComplexField& p, const ComplexField& y, const SamplingMask& m,
                           double lambda) {
    const ComplexField r = sub(apply_encoding(p, m), y);
    double data_term = 0.0;
    for (const cplx& v : r.data) data_term += std::norm(v);
    double reg = 0.0;
    if (lambda > 0.0) {
        const ComplexField w = haar2(p);
        for (const cplx& v : w.data) reg += std::abs(v);
    }
    return 0.5 * data_term + lambda * reg;
}

} // namespace detail

/// Classical Chambolle-Pock iteration for ½‖Ap−y‖² + λ‖Ψp‖₁, started from
/// the zero-filled reconstruction with a zero dual variable. Stops on
/// max_iters or when the relative primal change drops below tol.
inline CPSolveResult cp_solve(const ComplexField& y, const SamplingMask& m, const CPParams& params) {
    params.validate();
    require_same_shape(y, m, "cp_solve");

    ComplexField p = apply_adjoint(y, m);
    ComplexField pbar = p;
    ComplexField d = zeros_like(y);

    CPSolveResult res;
    for (std::int64_t it = 0; it < params.max_iters; ++it) {
        d = prox_sigma_fstar(add_scaled(d, params.sigma, apply_encoding(pbar, m)), y, params.sigma);
        const ComplexField p_next =
            prox_tau_g(sub_scaled(p, params.tau, apply_adjoint(d, m)), params.tau, params.lambda);
        pbar = add_scaled(p_next, params.theta, sub(p_next, p));

        const double num = norm2(sub(p_next, p));
        const double den = norm2(p);
        const double rel = (den > 0.0) ? num / den : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        p = p_next;

        res.trace.objective.push_back(detail::cp_objective(p, y, m, params.lambda));
        res.trace.rel_change.push_back(rel);
        res.trace.iterations_run = it + 1;
        if (rel < params.tol) break;
    }
    res.image = std::move(p);
    return res;
}

} // namespace cpmri
