#pragma once

#include <cmath>

#include "cpmri/field.hpp"
#include "cpmri/haar.hpp"

namespace cpmri {

/// Proximal map of σF* for F(z) = ½‖z − y‖²: (v − σ·y) / (1 + σ).
inline ComplexField prox_sigma_fstar(const ComplexField& v, const ComplexField& y, double sigma) {
    require_same_shape(v, y, "prox_sigma_fstar");
    if (sigma < 0.0) throw std::invalid_argument("prox_sigma_fstar: sigma must be >= 0");
    ComplexField out(v.height, v.width);
    const double inv = 1.0 / (1.0 + sigma);
    for (std::size_t i = 0; i < v.data.size(); ++i)
        out.data[i] = (v.data[i] - sigma * y.data[i]) * inv;
    return out;
}

/// Complex soft-thresholding: w · max(|w| − t, 0)/|w|, with 0 mapped to 0.
inline ComplexField soft_threshold(const ComplexField& w, double t) {
    if (t < 0.0) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
    ComplexField out(w.height, w.width);
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        const double mag = std::abs(w.data[i]);
        out.data[i] = (mag > t) ? w.data[i] * ((mag - t) / mag) : cplx(0.0, 0.0);
    }
    return out;
}

/// Proximal map of τ·λ‖Ψ·‖₁ with orthonormal Haar Ψ: exact because Ψ is a
/// change of orthonormal basis.
inline ComplexField prox_tau_g(const ComplexField& p, double tau, double lambda, int levels = 0) {
    if (tau < 0.0 || lambda < 0.0)
        throw std::invalid_argument("prox_tau_g: tau and lambda must be >= 0");
    const double t = tau * lambda;
    if (t == 0.0) return p;
    return ihaar2(soft_threshold(haar2(p, levels), t), levels);
}

} // namespace cpmri
