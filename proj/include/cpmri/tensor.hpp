#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpmri/field.hpp"

namespace cpmri {

/// Real-valued C×H×W tensor, channel-major row-major.
struct Tensor {
    std::int64_t channels = 0;
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::int64_t c, std::int64_t h, std::int64_t w) : channels(c), height(h), width(w) {
        if (c <= 0 || h <= 0 || w <= 0)
            throw std::invalid_argument("Tensor: dimensions must be positive");
        data.assign(static_cast<std::size_t>(c) * static_cast<std::size_t>(h) *
                        static_cast<std::size_t>(w),
                    0.0);
    }

    std::size_t size() const { return data.size(); }

    double& at(std::int64_t c, std::int64_t y, std::int64_t x) {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }
    double at(std::int64_t c, std::int64_t y, std::int64_t x) const {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }

    double* channel(std::int64_t c) { return data.data() + c * height * width; }
    const double* channel(std::int64_t c) const { return data.data() + c * height * width; }

    bool same_shape(const Tensor& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(where) + ": tensor shape mismatch");
}

/// Complex field → 2×H×W tensor; channel 0 real, channel 1 imaginary.
inline Tensor pack_channels(const ComplexField& x) {
    Tensor t(2, x.height, x.width);
    const std::size_t n = x.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        t.data[i] = x.data[i].real();
        t.data[n + i] = x.data[i].imag();
    }
    return t;
}

/// Exact inverse of pack_channels.
inline ComplexField unpack_channels(const Tensor& t) {
    if (t.channels != 2)
        throw std::invalid_argument("unpack_channels: expected 2 channels, got " +
                                    std::to_string(t.channels));
    ComplexField x(t.height, t.width);
    const std::size_t n = x.data.size();
    for (std::size_t i = 0; i < n; ++i) x.data[i] = cplx(t.data[i], t.data[n + i]);
    return x;
}

} // namespace cpmri
