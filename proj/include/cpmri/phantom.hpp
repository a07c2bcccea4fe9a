#pragma once

#include <cmath>
#include <numbers>

#include "cpmri/field.hpp"

namespace cpmri {

/// One additive ellipse on the [−1,1]² canvas.
struct Ellipse {
    double center_x = 0.0;
    double center_y = 0.0;
    double half_axis_a = 0.0; // along the ellipse x axis before rotation
    double half_axis_b = 0.0;
    double angle = 0.0; // radians, counterclockwise
    double intensity = 0.0;
};

struct PhantomSpec {
    std::vector<Ellipse> ellipses;
    std::int64_t height = 0;
    std::int64_t width = 0;
};

/// The classic ten-ellipse head phantom table.
inline PhantomSpec shepp_logan_spec(std::int64_t height, std::int64_t width) {
    constexpr double deg = std::numbers::pi / 180.0;
    PhantomSpec spec;
    spec.height = height;
    spec.width = width;
    spec.ellipses = {
        {0.0, 0.0, 0.69, 0.92, 0.0, 2.0},
        {0.0, -0.0184, 0.6624, 0.8740, 0.0, -0.98},
        {0.22, 0.0, 0.1100, 0.3100, -18.0 * deg, -0.02},
        {-0.22, 0.0, 0.1600, 0.4100, 18.0 * deg, -0.02},
        {0.0, 0.35, 0.2100, 0.2500, 0.0, 0.01},
        {0.0, 0.1, 0.0460, 0.0460, 0.0, 0.01},
        {0.0, -0.1, 0.0460, 0.0460, 0.0, 0.01},
        {-0.08, -0.605, 0.0460, 0.0230, 0.0, 0.01},
        {0.0, -0.606, 0.0230, 0.0230, 0.0, 0.01},
        {0.06, -0.605, 0.0230, 0.0460, 0.0, 0.01},
    };
    return spec;
}

inline bool ellipse_contains(const Ellipse& e, double x, double y) {
    const double dx = x - e.center_x;
    const double dy = y - e.center_y;
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double u = c * dx + s * dy;  // rotate into ellipse frame
    const double v = -s * dx + c * dy;
    const double ua = u / e.half_axis_a;
    const double vb = v / e.half_axis_b;
    return ua * ua + vb * vb <= 1.0;
}

/// Each pixel takes the sum of intensities of the ellipses containing its
/// center; real-valued, imaginary part zero.
inline ComplexField render_phantom(const PhantomSpec& spec) {
    if (spec.ellipses.empty()) throw std::invalid_argument("render_phantom: no ellipses");
    for (const Ellipse& e : spec.ellipses)
        if (!(e.half_axis_a > 0.0) || !(e.half_axis_b > 0.0))
            throw std::invalid_argument("render_phantom: half-axes must be positive");
    ComplexField img(spec.height, spec.width);
    for (std::int64_t r = 0; r < spec.height; ++r) {
        // pixel centers on [−1, 1]; row 0 is the top of the canvas
        const double y = 1.0 - 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(spec.height);
        for (std::int64_t c = 0; c < spec.width; ++c) {
            const double x = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(spec.width) - 1.0;
            double v = 0.0;
            for (const Ellipse& e : spec.ellipses)
                if (ellipse_contains(e, x, y)) v += e.intensity;
            img.at(r, c) = cplx(v, 0.0);
        }
    }
    return img;
}

} // namespace cpmri
