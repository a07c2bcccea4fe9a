#pragma once

#include <cmath>

#include "cpmri/field.hpp"

namespace cpmri {

/// Largest decomposition depth both dimensions allow (h, w divisible by 2^L).
inline int max_haar_levels(std::int64_t h, std::int64_t w) {
    int levels = 0;
    while (h % 2 == 0 && w % 2 == 0 && h >= 2 && w >= 2) {
        h /= 2;
        w /= 2;
        ++levels;
    }
    return levels;
}

namespace detail {

inline const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

inline void haar_rows(ComplexField& x, std::int64_t h, std::int64_t w, bool forward) {
    const std::int64_t half = w / 2;
    std::vector<cplx> tmp(static_cast<std::size_t>(w));
    for (std::int64_t r = 0; r < h; ++r) {
        if (forward) {
            for (std::int64_t c = 0; c < half; ++c) {
                const cplx a = x.at(r, 2 * c), b = x.at(r, 2 * c + 1);
                tmp[static_cast<std::size_t>(c)] = (a + b) * inv_sqrt2;
                tmp[static_cast<std::size_t>(half + c)] = (a - b) * inv_sqrt2;
            }
        } else {
            for (std::int64_t c = 0; c < half; ++c) {
                const cplx s = x.at(r, c), d = x.at(r, half + c);
                tmp[static_cast<std::size_t>(2 * c)] = (s + d) * inv_sqrt2;
                tmp[static_cast<std::size_t>(2 * c + 1)] = (s - d) * inv_sqrt2;
            }
        }
        for (std::int64_t c = 0; c < w; ++c) x.at(r, c) = tmp[static_cast<std::size_t>(c)];
    }
}

inline void haar_cols(ComplexField& x, std::int64_t h, std::int64_t w, bool forward) {
    const std::int64_t half = h / 2;
    std::vector<cplx> tmp(static_cast<std::size_t>(h));
    for (std::int64_t c = 0; c < w; ++c) {
        if (forward) {
            for (std::int64_t r = 0; r < half; ++r) {
                const cplx a = x.at(2 * r, c), b = x.at(2 * r + 1, c);
                tmp[static_cast<std::size_t>(r)] = (a + b) * inv_sqrt2;
                tmp[static_cast<std::size_t>(half + r)] = (a - b) * inv_sqrt2;
            }
        } else {
            for (std::int64_t r = 0; r < half; ++r) {
                const cplx s = x.at(r, c), d = x.at(half + r, c);
                tmp[static_cast<std::size_t>(2 * r)] = (s + d) * inv_sqrt2;
                tmp[static_cast<std::size_t>(2 * r + 1)] = (s - d) * inv_sqrt2;
            }
        }
        for (std::int64_t r = 0; r < h; ++r) x.at(r, c) = tmp[static_cast<std::size_t>(r)];
    }
}

inline int resolve_levels(const ComplexField& x, int levels, const char* where) {
    const int max_levels = max_haar_levels(x.height, x.width);
    if (levels == 0) levels = max_levels;
    if (levels < 1 || levels > max_levels)
        throw std::invalid_argument(std::string(where) + ": " + std::to_string(levels) +
                                    " level(s) not supported for " + std::to_string(x.height) + "x" +
                                    std::to_string(x.width));
    return levels;
}

} // namespace detail

/// Orthonormal 2-D Haar analysis. levels = 0 selects the maximum depth the
/// dimensions allow; the approximation band recurses into the top-left corner.
inline ComplexField haar2(const ComplexField& p, int levels = 0) {
    levels = detail::resolve_levels(p, levels, "haar2");
    ComplexField w = p;
    std::int64_t h = p.height, wd = p.width;
    for (int l = 0; l < levels; ++l) {
        detail::haar_rows(w, h, wd, true);
        detail::haar_cols(w, h, wd, true);
        h /= 2;
        wd /= 2;
    }
    return w;
}

/// Orthonormal 2-D Haar synthesis; exact inverse of haar2 at the same depth.
inline ComplexField ihaar2(const ComplexField& w, int levels = 0) {
    levels = detail::resolve_levels(w, levels, "ihaar2");
    ComplexField p = w;
    std::int64_t h = w.height >> levels, wd = w.width >> levels;
    for (int l = levels - 1; l >= 0; --l) {
        h *= 2;
        wd *= 2;
        detail::haar_cols(p, h, wd, false);
        detail::haar_rows(p, h, wd, false);
    }
    return p;
}

} // namespace cpmri
