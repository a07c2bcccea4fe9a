#pragma once

#include "cpmri/field.hpp"
#include "cpmri/fourier.hpp"
#include "cpmri/mask.hpp"

namespace cpmri {

/// Keep the sampled entries of a DC-centered k-space grid, zero the rest.
inline ComplexField apply_mask(const ComplexField& k, const SamplingMask& m) {
    require_same_shape(k, m, "apply_mask");
    ComplexField out(k.height, k.width);
    for (std::size_t i = 0; i < k.data.size(); ++i)
        out.data[i] = m.kept[i] ? k.data[i] : cplx(0.0, 0.0);
    return out;
}

/// Undersampled Fourier encoding A: mask ∘ fft2c.
inline ComplexField apply_encoding(const ComplexField& p, const SamplingMask& m) {
    require_same_shape(p, m, "apply_encoding");
    return apply_mask(fft2c(p), m);
}

/// Adjoint A*: ifft2c ∘ mask. Exact adjoint of apply_encoding under the
/// standard complex inner product (the FFT is unitary, the mask diagonal).
inline ComplexField apply_adjoint(const ComplexField& k, const SamplingMask& m) {
    require_same_shape(k, m, "apply_adjoint");
    return ifft2c(apply_mask(k, m));
}

/// Inverse Fourier transform of the undersampled data, missing samples zero.
inline ComplexField zero_filled_recon(const ComplexField& y, const SamplingMask& m) {
    require_same_shape(y, m, "zero_filled_recon");
    return apply_adjoint(y, m);
}

} // namespace cpmri
