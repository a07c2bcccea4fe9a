#pragma once

#include <random>

#include "cpmri/cpnet.hpp"

namespace cpmri {

struct GradCheckReport {
    std::size_t coords_checked = 0;
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Mean over pixels of |pred − truth|² (complex modulus squared).
inline double mse_loss(const ComplexField& pred, const ComplexField& truth) {
    require_same_shape(pred, truth, "mse_loss");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) s += std::norm(pred.data[i] - truth.data[i]);
    return s / static_cast<double>(pred.height * pred.width);
}

/// ∂mse_loss/∂pred in the packed real representation: 2(pred − truth)/(H·W).
inline ComplexField mse_loss_grad(const ComplexField& pred, const ComplexField& truth) {
    require_same_shape(pred, truth, "mse_loss_grad");
    ComplexField g(pred.height, pred.width);
    const double s = 2.0 / static_cast<double>(pred.height * pred.width);
    for (std::size_t i = 0; i < pred.data.size(); ++i) g.data[i] = s * (pred.data[i] - truth.data[i]);
    return g;
}

/// Compare analytic gradients of the MSE loss against central finite
/// differences on a random coordinate subset plus every step scalar.
/// Report-only: the caller decides what to do with max_rel_error.
inline GradCheckReport grad_check(const CPNetWeights& w, const ComplexField& y,
                                  const SamplingMask& m, const ComplexField& truth, double step,
                                  std::size_t n_coords = 200, std::uint64_t seed = 20240601) {
    const CpnetForward fwd = cpnet_forward(y, m, w, &truth);
    const GradientSet analytic = fwd.tape.backward_from_loss();

    // flatten parameter views of a mutable copy and of the gradient set
    CPNetWeights probe = w;
    struct View {
        std::string name;
        double* p;
        const double* g;
        std::size_t n;
        bool scalar;
    };
    std::vector<View> views;
    {
        std::vector<std::pair<const double*, std::size_t>> gptrs;
        for_each_param(analytic, [&gptrs](const char*, const double* p, std::size_t n) {
            gptrs.emplace_back(p, n);
        });
        std::size_t vi = 0;
        for_each_param(probe, [&](const char* name, double* p, std::size_t n) {
            views.push_back({name, p, gptrs[vi].first, n, n == 1});
            ++vi;
        });
    }

    auto loss_at = [&]() { return mse_loss(cpnet_infer(y, m, probe), truth); };

    GradCheckReport rep;
    auto check_coord = [&](const View& v, std::size_t i) {
        const double saved = v.p[i];
        v.p[i] = saved + step;
        const double up = loss_at();
        v.p[i] = saved - step;
        const double down = loss_at();
        v.p[i] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic_g = v.g[i];
        const double denom = std::max({std::abs(analytic_g), std::abs(numeric), 1e-12});
        const double rel = std::abs(analytic_g - numeric) / denom;
        ++rep.coords_checked;
        if (rel > rep.max_rel_error) {
            rep.max_rel_error = rel;
            rep.worst_param = v.name;
            rep.worst_index = i;
            rep.worst_analytic = analytic_g;
            rep.worst_numeric = numeric;
        }
    };

    for (const View& v : views)
        if (v.scalar) check_coord(v, 0);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_view(0, views.size() - 1);
    std::size_t sampled = 0;
    while (sampled < n_coords) {
        const View& v = views[pick_view(rng)];
        if (v.scalar) continue;
        std::uniform_int_distribution<std::size_t> pick_idx(0, v.n - 1);
        check_coord(v, pick_idx(rng));
        ++sampled;
    }
    return rep;
}

} // namespace cpmri
