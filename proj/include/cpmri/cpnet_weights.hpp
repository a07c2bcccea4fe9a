#pragma once

#include <cstdio>
#include <random>
#include <string>

#include "cpmri/conv.hpp"
#include "cpmri/errors.hpp"

namespace cpmri {

inline constexpr int kDualInChannels = 4;   // concat of packed iterate and packed data
inline constexpr int kPrimalInChannels = 2; // packed iterate
inline constexpr int kHiddenChannels = 32;
inline constexpr int kBlockOutChannels = 2;
inline constexpr int kDefaultUnrollIters = 10;

/// Three 3×3 convolution layers (C_in→32→32→2) with per-channel biases.
struct ConvBlockWeights {
    ConvKernel k1, k2, k3;
    std::vector<double> b1, b2, b3;

    ConvBlockWeights() = default;
    explicit ConvBlockWeights(int in_channels)
        : k1(kHiddenChannels, in_channels), k2(kHiddenChannels, kHiddenChannels),
          k3(kBlockOutChannels, kHiddenChannels), b1(kHiddenChannels, 0.0), b2(kHiddenChannels, 0.0),
          b3(kBlockOutChannels, 0.0) {}
};

/// All learnables of the unrolled network: per-iteration dual and primal
/// convolution blocks plus the per-iteration step scalars.
struct CPNetWeights {
    struct Iteration {
        ConvBlockWeights dual{kDualInChannels};
        ConvBlockWeights primal{kPrimalInChannels};
        double sigma = 0.95;
        double tau = 0.95;
        double theta = 1.0;
    };

    std::vector<Iteration> iters;
    std::uint64_t init_seed = 0;

    int n_iters() const { return static_cast<int>(iters.size()); }

    static CPNetWeights zeros(int n_iters = kDefaultUnrollIters) {
        CPNetWeights w;
        w.iters.resize(static_cast<std::size_t>(n_iters));
        return w;
    }

    /// Zero-mean uniform kernels with scale √(6/(fan_in+fan_out)), zero
    /// biases, step scalars at their classical values.
    static CPNetWeights initialized(std::uint64_t seed, int n_iters = kDefaultUnrollIters) {
        CPNetWeights w = zeros(n_iters);
        w.init_seed = seed;
        std::mt19937_64 rng(seed);
        auto fill = [&rng](ConvKernel& k) {
            const double fan_in = static_cast<double>(k.in_channels) * 9.0;
            const double fan_out = static_cast<double>(k.out_channels) * 9.0;
            const double s = std::sqrt(6.0 / (fan_in + fan_out));
            std::uniform_real_distribution<double> dist(-s, s);
            for (double& v : k.w) v = dist(rng);
        };
        for (auto& it : w.iters) {
            fill(it.dual.k1);
            fill(it.dual.k2);
            fill(it.dual.k3);
            fill(it.primal.k1);
            fill(it.primal.k2);
            fill(it.primal.k3);
        }
        return w;
    }
};

/// Gradients share the weight layout exactly.
using GradientSet = CPNetWeights;

/// All-zero container matching w's layout. Unlike CPNetWeights::zeros, the
/// step scalars are zeroed too (they default to their classical values).
inline GradientSet zeros_like(const CPNetWeights& w) {
    CPNetWeights z = CPNetWeights::zeros(w.n_iters());
    for (auto& it : z.iters) {
        it.sigma = 0.0;
        it.tau = 0.0;
        it.theta = 0.0;
    }
    return z;
}

/// Visit every parameter array (kernels, biases, step scalars) in a fixed
/// order. f(name, pointer, count). The order defines the checkpoint layout
/// and the coordinate indexing used by gradient checks.
template <class W, class F>
void for_each_param(W& w, F&& f) {
    char name[64];
    for (int n = 0; n < w.n_iters(); ++n) {
        auto& it = w.iters[static_cast<std::size_t>(n)];
        auto block = [&](const char* tag, auto& b) {
            std::snprintf(name, sizeof name, "iter%02d/%s/k1", n, tag);
            f(name, b.k1.w.data(), b.k1.w.size());
            std::snprintf(name, sizeof name, "iter%02d/%s/b1", n, tag);
            f(name, b.b1.data(), b.b1.size());
            std::snprintf(name, sizeof name, "iter%02d/%s/k2", n, tag);
            f(name, b.k2.w.data(), b.k2.w.size());
            std::snprintf(name, sizeof name, "iter%02d/%s/b2", n, tag);
            f(name, b.b2.data(), b.b2.size());
            std::snprintf(name, sizeof name, "iter%02d/%s/k3", n, tag);
            f(name, b.k3.w.data(), b.k3.w.size());
            std::snprintf(name, sizeof name, "iter%02d/%s/b3", n, tag);
            f(name, b.b3.data(), b.b3.size());
        };
        block("dual", it.dual);
        block("primal", it.primal);
        std::snprintf(name, sizeof name, "iter%02d/sigma", n);
        f(name, &it.sigma, std::size_t{1});
        std::snprintf(name, sizeof name, "iter%02d/tau", n);
        f(name, &it.tau, std::size_t{1});
        std::snprintf(name, sizeof name, "iter%02d/theta", n);
        f(name, &it.theta, std::size_t{1});
    }
}

inline std::size_t param_count(const CPNetWeights& w) {
    std::size_t n = 0;
    for_each_param(const_cast<CPNetWeights&>(w),
                   [&n](const char*, double*, std::size_t c) { n += c; });
    return n;
}

} // namespace cpmri
