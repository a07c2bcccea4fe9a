#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cpmri/field.hpp"

namespace cpmri {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Iterative radix-2 Cooley-Tukey, unscaled. sign = -1 forward, +1 inverse.
inline void fft_pow2(cplx* x, std::size_t n, int sign) {
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/// Bluestein's chirp-z transform for arbitrary n, unscaled.
inline void fft_bluestein(cplx* x, std::size_t n, int sign) {
    const std::size_t m = next_pow2(2 * n - 1);
    // chirp b_k = exp(sign·iπ k²/n); k² reduced mod 2n to keep angles small
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> a(m, cplx(0.0, 0.0)), b(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * std::conj(chirp[k]);
    b[0] = chirp[0];
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = chirp[k];
    fft_pow2(a.data(), m, -1);
    fft_pow2(b.data(), m, -1);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a.data(), m, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) x[k] = std::conj(chirp[k]) * (a[k] * inv_m);
}

inline void fft_1d(cplx* x, std::size_t n, int sign) {
    if (n == 1) return;
    if (is_pow2(n))
        fft_pow2(x, n, sign);
    else
        fft_bluestein(x, n, sign);
}

/// src index that lands at dst index i under a circular shift by `amount`.
inline std::int64_t shifted_src(std::int64_t i, std::int64_t n, std::int64_t amount) {
    return (i + amount) % n;
}

/// Unscaled centered 2-D transform: fftshift ∘ DFT ∘ ifftshift.
/// ifftshift rotates by floor(n/2); fftshift by ceil(n/2).
inline ComplexField dft2_centered(const ComplexField& x, int sign) {
    const std::int64_t h = x.height, w = x.width;
    ComplexField work(h, w);
    // ifftshift both axes while copying in
    for (std::int64_t r = 0; r < h; ++r) {
        const std::int64_t sr = shifted_src(r, h, h / 2);
        for (std::int64_t c = 0; c < w; ++c)
            work.at(r, c) = x.at(sr, shifted_src(c, w, w / 2));
    }
    for (std::int64_t r = 0; r < h; ++r)
        fft_1d(&work.data[static_cast<std::size_t>(r * w)], static_cast<std::size_t>(w), sign);
    std::vector<cplx> col(static_cast<std::size_t>(h));
    for (std::int64_t c = 0; c < w; ++c) {
        for (std::int64_t r = 0; r < h; ++r) col[static_cast<std::size_t>(r)] = work.at(r, c);
        fft_1d(col.data(), static_cast<std::size_t>(h), sign);
        for (std::int64_t r = 0; r < h; ++r) work.at(r, c) = col[static_cast<std::size_t>(r)];
    }
    // fftshift both axes while copying out
    ComplexField out(h, w);
    for (std::int64_t r = 0; r < h; ++r) {
        const std::int64_t sr = shifted_src(r, h, (h + 1) / 2);
        for (std::int64_t c = 0; c < w; ++c)
            out.at(r, c) = work.at(sr, shifted_src(c, w, (w + 1) / 2));
    }
    return out;
}

inline void require_fft_shape(const ComplexField& x, const char* where) {
    if (x.height < 2 || x.width < 2)
        throw std::invalid_argument(std::string(where) + ": dimensions must be >= 2, got " +
                                    std::to_string(x.height) + "x" + std::to_string(x.width));
}

} // namespace detail

/// Unitary DC-centered 2-D Fourier transform (1/√(HW) scaling).
inline ComplexField fft2c(const ComplexField& x) {
    detail::require_fft_shape(x, "fft2c");
    ComplexField out = detail::dft2_centered(x, -1);
    const double s = 1.0 / std::sqrt(static_cast<double>(x.height) * static_cast<double>(x.width));
    for (cplx& v : out.data) v *= s;
    return out;
}

/// Exact inverse of fft2c.
inline ComplexField ifft2c(const ComplexField& k) {
    detail::require_fft_shape(k, "ifft2c");
    ComplexField out = detail::dft2_centered(k, +1);
    const double s = 1.0 / std::sqrt(static_cast<double>(k.height) * static_cast<double>(k.width));
    for (cplx& v : out.data) v *= s;
    return out;
}

} // namespace cpmri
