#pragma once

#include <algorithm>

#include "cpmri/tensor.hpp"

namespace cpmri {

/// 3×3 convolution kernel bank, laid out (out_channel, in_channel, ky, kx).
struct ConvKernel {
    std::int64_t out_channels = 0;
    std::int64_t in_channels = 0;
    std::vector<double> w;

    ConvKernel() = default;
    ConvKernel(std::int64_t co, std::int64_t ci)
        : out_channels(co), in_channels(ci),
          w(static_cast<std::size_t>(co) * static_cast<std::size_t>(ci) * 9, 0.0) {}

    double& at(std::int64_t co, std::int64_t ci, std::int64_t ky, std::int64_t kx) {
        return w[static_cast<std::size_t>(((co * in_channels + ci) * 3 + ky) * 3 + kx)];
    }
    double at(std::int64_t co, std::int64_t ci, std::int64_t ky, std::int64_t kx) const {
        return w[static_cast<std::size_t>(((co * in_channels + ci) * 3 + ky) * 3 + kx)];
    }
};

namespace detail {

/// Accumulate one kernel row into an output row: o[x] += w0·s[x−1] +
/// w1·s[x] + w2·s[x+1], with zero padding at the row ends. One pass per
/// (channel pair, kernel row) keeps the inner loop a single fused sweep.
inline void accumulate_kernel_row(double* o, const double* s, std::int64_t w, double w0, double w1,
                                  double w2) {
    if (w == 1) {
        o[0] += w1 * s[0];
        return;
    }
    o[0] += w1 * s[0] + w2 * s[1];
    for (std::int64_t x = 1; x < w - 1; ++x) o[x] += w0 * s[x - 1] + w1 * s[x] + w2 * s[x + 1];
    o[w - 1] += w0 * s[w - 2] + w1 * s[w - 1];
}

template <class TapAt>
inline void conv3x3_accumulate(const Tensor& src, Tensor& dst, std::int64_t src_channels,
                               std::int64_t dst_channels, TapAt&& tap) {
    const std::int64_t h = src.height, w = src.width;
    for (std::int64_t cd = 0; cd < dst_channels; ++cd) {
        double* d = dst.channel(cd);
        for (std::int64_t cs = 0; cs < src_channels; ++cs) {
            const double* s = src.channel(cs);
            for (std::int64_t ky = 0; ky < 3; ++ky) {
                const std::int64_t dy = ky - 1;
                const double w0 = tap(cd, cs, ky, 0);
                const double w1 = tap(cd, cs, ky, 1);
                const double w2 = tap(cd, cs, ky, 2);
                if (w0 == 0.0 && w1 == 0.0 && w2 == 0.0) continue;
                const std::int64_t y0 = std::max<std::int64_t>(0, -dy);
                const std::int64_t y1 = std::min(h, h - dy);
                for (std::int64_t y = y0; y < y1; ++y)
                    accumulate_kernel_row(d + y * w, s + (y + dy) * w, w, w0, w1, w2);
            }
        }
    }
}

} // namespace detail

/// Cross-correlation with 3×3 taps, stride 1, zero padding 1 (same spatial
/// size), plus a per-output-channel bias.
inline Tensor conv3x3_forward(const Tensor& in, const ConvKernel& k, const std::vector<double>& bias) {
    if (in.channels != k.in_channels)
        throw std::invalid_argument("conv3x3_forward: input channels " + std::to_string(in.channels) +
                                    " != kernel in_channels " + std::to_string(k.in_channels));
    if (static_cast<std::int64_t>(bias.size()) != k.out_channels)
        throw std::invalid_argument("conv3x3_forward: bias length mismatch");
    Tensor out(k.out_channels, in.height, in.width);
    for (std::int64_t co = 0; co < k.out_channels; ++co) {
        double* o = out.channel(co);
        const double b = bias[static_cast<std::size_t>(co)];
        for (std::int64_t i = 0; i < in.height * in.width; ++i) o[i] = b;
    }
    detail::conv3x3_accumulate(in, out, k.in_channels, k.out_channels,
                               [&k](std::int64_t co, std::int64_t ci, std::int64_t ky,
                                    std::int64_t kx) { return k.at(co, ci, ky, kx); });
    return out;
}

/// Gradient of the convolution with respect to its input: correlate the
/// output gradient with the taps reflected through the center.
inline Tensor conv3x3_backward_input(const Tensor& gout, const ConvKernel& k) {
    if (gout.channels != k.out_channels)
        throw std::invalid_argument("conv3x3_backward_input: gradient channel mismatch");
    Tensor gin(k.in_channels, gout.height, gout.width);
    detail::conv3x3_accumulate(gout, gin, k.out_channels, k.in_channels,
                               [&k](std::int64_t ci, std::int64_t co, std::int64_t ky,
                                    std::int64_t kx) { return k.at(co, ci, 2 - ky, 2 - kx); });
    return gin;
}

/// Gradients with respect to kernel taps and biases, accumulated into gk/gbias.
inline void conv3x3_backward_params(const Tensor& gout, const Tensor& in, ConvKernel& gk,
                                    std::vector<double>& gbias) {
    const std::int64_t h = in.height, w = in.width;
    for (std::int64_t co = 0; co < gk.out_channels; ++co) {
        const double* gc = gout.channel(co);
        double bsum = 0.0;
        for (std::int64_t i = 0; i < h * w; ++i) bsum += gc[i];
        gbias[static_cast<std::size_t>(co)] += bsum;
        for (std::int64_t ci = 0; ci < gk.in_channels; ++ci) {
            for (std::int64_t ky = 0; ky < 3; ++ky) {
                const std::int64_t dy = ky - 1;
                const std::int64_t y0 = std::max<std::int64_t>(0, -dy);
                const std::int64_t y1 = std::min(h, h - dy);
                double s0 = 0.0, s1 = 0.0, s2 = 0.0;
                for (std::int64_t y = y0; y < y1; ++y) {
                    const double* g = gc + y * w;
                    const double* s = in.channel(ci) + (y + dy) * w;
                    if (w == 1) {
                        s1 += g[0] * s[0];
                        continue;
                    }
                    s1 += g[0] * s[0];
                    s2 += g[0] * s[1];
                    for (std::int64_t x = 1; x < w - 1; ++x) {
                        s0 += g[x] * s[x - 1];
                        s1 += g[x] * s[x];
                        s2 += g[x] * s[x + 1];
                    }
                    s0 += g[w - 1] * s[w - 2];
                    s1 += g[w - 1] * s[w - 1];
                }
                gk.at(co, ci, ky, 0) += s0;
                gk.at(co, ci, ky, 1) += s1;
                gk.at(co, ci, ky, 2) += s2;
            }
        }
    }
}

inline Tensor relu_forward(const Tensor& x) {
    Tensor out(x.channels, x.height, x.width);
    for (std::size_t i = 0; i < x.data.size(); ++i) out.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
    return out;
}

inline Tensor relu_backward(const Tensor& gout, const Tensor& x) {
    Tensor gin(x.channels, x.height, x.width);
    for (std::size_t i = 0; i < x.data.size(); ++i) gin.data[i] = x.data[i] > 0.0 ? gout.data[i] : 0.0;
    return gin;
}

} // namespace cpmri
