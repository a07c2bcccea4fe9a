#pragma once

#include "cpmri/cpnet_weights.hpp"

namespace cpmri {

/// First/second-moment accumulators, shaped like the weights they track.
struct AdamState {
    CPNetWeights m;
    CPNetWeights v;
    std::int64_t t = 0;

    static AdamState for_weights(const CPNetWeights& w) {
        AdamState s;
        s.m = zeros_like(w);
        s.v = zeros_like(w);
        return s;
    }
};

/// Standard bias-corrected Adam update, applied elementwise to every kernel,
/// bias, and step scalar.
inline void adam_step(CPNetWeights& weights, const GradientSet& grads, AdamState& state, double lr,
                      double beta1, double beta2, double eps) {
    if (weights.n_iters() != grads.n_iters() || weights.n_iters() != state.m.n_iters())
        throw std::invalid_argument("adam_step: mismatched parameter shapes");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

    struct Slot {
        double* p;
        std::size_t n;
    };
    std::vector<Slot> gs, ms, vs;
    for_each_param(const_cast<GradientSet&>(grads),
                   [&gs](const char*, double* p, std::size_t n) { gs.push_back({p, n}); });
    for_each_param(state.m, [&ms](const char*, double* p, std::size_t n) { ms.push_back({p, n}); });
    for_each_param(state.v, [&vs](const char*, double* p, std::size_t n) { vs.push_back({p, n}); });

    std::size_t slot = 0;
    for_each_param(weights, [&](const char*, double* w, std::size_t n) {
        double* g = gs[slot].p;
        double* m = ms[slot].p;
        double* v = vs[slot].p;
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
        ++slot;
    });
}

} // namespace cpmri
