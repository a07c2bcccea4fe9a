#pragma once

#include "cpmri/field.hpp"

namespace cpmri {

/// Scale so the maximum magnitude is exactly 1.
inline ComplexField normalize(const ComplexField& x) {
    const double peak = max_abs(x);
    if (peak == 0.0) throw std::invalid_argument("normalize: all-zero input");
    return scale(x, 1.0 / peak);
}

enum class AugmentOp { identity, flip_h, flip_v, rot90, rot180, rot270 };

inline constexpr AugmentOp kAugmentOps[] = {AugmentOp::identity, AugmentOp::flip_h,
                                            AugmentOp::flip_v,   AugmentOp::rot90,
                                            AugmentOp::rot180,   AugmentOp::rot270};

inline const char* augment_name(AugmentOp op) {
    switch (op) {
    case AugmentOp::identity: return "identity";
    case AugmentOp::flip_h: return "flip_h";
    case AugmentOp::flip_v: return "flip_v";
    case AugmentOp::rot90: return "rot90";
    case AugmentOp::rot180: return "rot180";
    case AugmentOp::rot270: return "rot270";
    }
    return "?";
}

/// Exact dihedral transform; rotations are counterclockwise.
inline ComplexField augment(const ComplexField& x, AugmentOp op) {
    const std::int64_t h = x.height, w = x.width;
    switch (op) {
    case AugmentOp::identity:
        return x;
    case AugmentOp::flip_h: { // mirror left-right
        ComplexField r(h, w);
        for (std::int64_t i = 0; i < h; ++i)
            for (std::int64_t j = 0; j < w; ++j) r.at(i, j) = x.at(i, w - 1 - j);
        return r;
    }
    case AugmentOp::flip_v: { // mirror top-bottom
        ComplexField r(h, w);
        for (std::int64_t i = 0; i < h; ++i)
            for (std::int64_t j = 0; j < w; ++j) r.at(i, j) = x.at(h - 1 - i, j);
        return r;
    }
    case AugmentOp::rot90: {
        ComplexField r(w, h);
        for (std::int64_t i = 0; i < w; ++i)
            for (std::int64_t j = 0; j < h; ++j) r.at(i, j) = x.at(j, w - 1 - i);
        return r;
    }
    case AugmentOp::rot180: {
        ComplexField r(h, w);
        for (std::int64_t i = 0; i < h; ++i)
            for (std::int64_t j = 0; j < w; ++j) r.at(i, j) = x.at(h - 1 - i, w - 1 - j);
        return r;
    }
    case AugmentOp::rot270: {
        ComplexField r(w, h);
        for (std::int64_t i = 0; i < w; ++i)
            for (std::int64_t j = 0; j < h; ++j) r.at(i, j) = x.at(h - 1 - j, i);
        return r;
    }
    }
    throw std::invalid_argument("augment: unknown op");
}

inline AugmentOp augment_inverse(AugmentOp op) {
    switch (op) {
    case AugmentOp::rot90: return AugmentOp::rot270;
    case AugmentOp::rot270: return AugmentOp::rot90;
    default: return op;
    }
}

} // namespace cpmri
