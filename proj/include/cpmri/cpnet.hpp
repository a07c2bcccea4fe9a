#pragma once

#include "cpmri/tape.hpp"

namespace cpmri {

namespace detail {

inline ComplexField conv_block_correction(const Tensor& input, const ConvBlockWeights& w) {
    const Tensor c1 = conv3x3_forward(input, w.k1, w.b1);
    const Tensor r1 = relu_forward(c1);
    const Tensor c2 = conv3x3_forward(r1, w.k2, w.b2);
    const Tensor r2 = relu_forward(c2);
    return unpack_channels(conv3x3_forward(r2, w.k3, w.b3));
}

inline Tensor concat_tensors(const Tensor& a, const Tensor& b) {
    Tensor out(a.channels + b.channels, a.height, a.width);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
    return out;
}

} // namespace detail

/// Learned dual update Γ: residual 3-layer convolution stack applied to the
/// 4-channel concatenation of u = d + σₙ·Ap̄ and the measured data y.
inline ComplexField dual_block(const ComplexField& d, const ComplexField& Ap_bar,
                               const ComplexField& y, double sigma_n, const ConvBlockWeights& w) {
    require_same_shape(d, Ap_bar, "dual_block");
    require_same_shape(d, y, "dual_block");
    const ComplexField u = add_scaled(d, sigma_n, Ap_bar);
    const Tensor input = detail::concat_tensors(pack_channels(u), pack_channels(y));
    return add(u, detail::conv_block_correction(input, w));
}

/// Learned primal update Λ: residual stack on the 2-channel packing of
/// v = p − τₙ·A*d.
inline ComplexField primal_block(const ComplexField& p, const ComplexField& AH_d, double tau_n,
                                 const ConvBlockWeights& w) {
    require_same_shape(p, AH_d, "primal_block");
    const ComplexField v = sub_scaled(p, tau_n, AH_d);
    return add(v, detail::conv_block_correction(pack_channels(v), w));
}

struct CpnetForward {
    ComplexField image;
    Tape tape;
};

/// Unrolled forward pass with recording: d₀ = 0, p₀ = p̄₀ = A*y, then per
/// iteration the dual block, the primal block, and the θₙ extrapolation.
/// When `truth` is supplied the MSE against it is recorded as the loss.
inline CpnetForward cpnet_forward(const ComplexField& y, const SamplingMask& m,
                                  const CPNetWeights& w, const ComplexField* truth = nullptr) {
    require_same_shape(y, m, "cpnet_forward");
    detail::require_fft_shape(y, "cpnet_forward");
    if (w.n_iters() < 1) throw std::invalid_argument("cpnet_forward: weights hold no iterations");

    CpnetForward fwd;
    Tape& t = fwd.tape;
    t.start(w, m);

    const int y_in = t.input(pack_channels(y));
    int p = t.ifft2c_of(t.mask_mul(y_in)); // zero-filled start
    int pbar = p;
    int d = t.input(Tensor(2, y.height, y.width));

    const int n_iters = w.n_iters();
    for (int n = 0; n < n_iters; ++n) {
        const int ap = t.mask_mul(t.fft2c_of(pbar));
        const int u = t.axpy(d, ap, n, 0, +1);
        const int t4 = t.concat(u, y_in);
        const int dc = t.conv(t.relu(t.conv(t.relu(t.conv(t4, n, 0, 1)), n, 0, 2)), n, 0, 3);
        d = t.add(u, dc);

        const int ahd = t.ifft2c_of(t.mask_mul(d));
        const int v = t.axpy(p, ahd, n, 1, -1);
        const int pc = t.conv(t.relu(t.conv(t.relu(t.conv(v, n, 1, 1)), n, 1, 2)), n, 1, 3);
        const int p_next = t.add(v, pc);

        if (n + 1 < n_iters) {
            const int diff = t.sub(p_next, p);
            pbar = t.axpy(p_next, diff, n, 2, +1);
        }
        p = p_next;
    }
    t.set_output(p);
    if (truth != nullptr) {
        require_same_shape(y, *truth, "cpnet_forward");
        t.mse_vs(p, pack_channels(*truth));
    }
    fwd.image = unpack_channels(t.value(p));
    return fwd;
}

/// Forward pass without recording; keeps only live iterates, so it is the
/// path to use for inference on large grids.
inline ComplexField cpnet_infer(const ComplexField& y, const SamplingMask& m, const CPNetWeights& w) {
    require_same_shape(y, m, "cpnet_infer");
    detail::require_fft_shape(y, "cpnet_infer");
    if (w.n_iters() < 1) throw std::invalid_argument("cpnet_infer: weights hold no iterations");

    ComplexField p = apply_adjoint(y, m);
    ComplexField pbar = p;
    ComplexField d = zeros_like(y);

    const int n_iters = w.n_iters();
    for (int n = 0; n < n_iters; ++n) {
        const auto& it = w.iters[static_cast<std::size_t>(n)];
        d = dual_block(d, apply_encoding(pbar, m), y, it.sigma, it.dual);
        const ComplexField p_next = primal_block(p, apply_adjoint(d, m), it.tau, it.primal);
        if (n + 1 < n_iters) pbar = add_scaled(p_next, it.theta, sub(p_next, p));
        p = p_next;
    }
    return p;
}

/// Gradients of a scalar loss with respect to every weight, given
/// ∂loss/∂(output image) as a complex field.
inline GradientSet cpnet_backward(const Tape& tape, const ComplexField& loss_grad_seed) {
    return tape.backward_with_seed(pack_channels(loss_grad_seed));
}

} // namespace cpmri
