#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpmri {

using cplx = std::complex<double>;

/// H×W grid of complex samples, row-major. Used for both image-space and
/// k-space quantities; k-space grids are DC-centered (DC at (H/2, W/2)).
struct ComplexField {
    std::int64_t height = 0;
    std::int64_t width  = 0;
    std::vector<cplx> data;

    ComplexField() = default;
    ComplexField(std::int64_t h, std::int64_t w) : height(h), width(w) {
        if (h <= 0 || w <= 0)
            throw std::invalid_argument("ComplexField: dimensions must be positive");
        data.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), cplx(0.0, 0.0));
    }

    std::size_t size() const { return data.size(); }

    cplx& at(std::int64_t r, std::int64_t c) {
        return data[static_cast<std::size_t>(r * width + c)];
    }
    const cplx& at(std::int64_t r, std::int64_t c) const {
        return data[static_cast<std::size_t>(r * width + c)];
    }

    bool same_shape(const ComplexField& o) const {
        return height == o.height && width == o.width;
    }
};

inline void require_same_shape(const ComplexField& a, const ComplexField& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch (" +
                                    std::to_string(a.height) + "x" + std::to_string(a.width) + " vs " +
                                    std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
}

inline ComplexField zeros_like(const ComplexField& x) { return ComplexField(x.height, x.width); }

inline double norm2(const ComplexField& x) {
    double s = 0.0;
    for (const cplx& v : x.data) s += std::norm(v);
    return std::sqrt(s);
}

/// ⟨a, b⟩ = Σ conj(a_i)·b_i
inline cplx inner(const ComplexField& a, const ComplexField& b) {
    require_same_shape(a, b, "inner");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.data.size(); ++i) s += std::conj(a.data[i]) * b.data[i];
    return s;
}

inline double max_abs(const ComplexField& x) {
    double m = 0.0;
    for (const cplx& v : x.data) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const ComplexField& x) {
    for (const cplx& v : x.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

inline ComplexField add(const ComplexField& a, const ComplexField& b) {
    require_same_shape(a, b, "add");
    ComplexField r(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] + b.data[i];
    return r;
}

inline ComplexField sub(const ComplexField& a, const ComplexField& b) {
    require_same_shape(a, b, "sub");
    ComplexField r(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] - b.data[i];
    return r;
}

/// a + s·b, elementwise.
inline ComplexField add_scaled(const ComplexField& a, double s, const ComplexField& b) {
    require_same_shape(a, b, "add_scaled");
    ComplexField r(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] + s * b.data[i];
    return r;
}

/// a − s·b, elementwise.
inline ComplexField sub_scaled(const ComplexField& a, double s, const ComplexField& b) {
    require_same_shape(a, b, "sub_scaled");
    ComplexField r(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] - s * b.data[i];
    return r;
}

inline ComplexField scale(const ComplexField& a, double s) {
    ComplexField r(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = s * a.data[i];
    return r;
}

} // namespace cpmri
