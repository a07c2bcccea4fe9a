#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpmri/errors.hpp"
#include "cpmri/field.hpp"

namespace cpmri {

/// H×W boolean k-space sampling pattern, DC-centered: entry (r, c) is the
/// grid point at offset (r − H/2, c − W/2) from DC. A fully sampled disk of
/// radius calib_radius around DC is always kept.
struct SamplingMask {
    std::int64_t height = 0;
    std::int64_t width  = 0;
    std::vector<std::uint8_t> kept; // row-major, 0/1
    double target_R = 1.0;
    std::int64_t calib_radius = 0;
    std::uint64_t seed = 0;
    double min_distance = 0.0; // tuned dart-throwing exclusion radius

    bool is_kept(std::int64_t r, std::int64_t c) const {
        return kept[static_cast<std::size_t>(r * width + c)] != 0;
    }

    std::int64_t kept_count() const {
        std::int64_t n = 0;
        for (std::uint8_t k : kept) n += k;
        return n;
    }

    double achieved_R() const {
        const std::int64_t n = kept_count();
        return n == 0 ? 0.0 : static_cast<double>(height * width) / static_cast<double>(n);
    }
};

inline void require_same_shape(const ComplexField& x, const SamplingMask& m, const char* where) {
    if (x.height != m.height || x.width != m.width)
        throw std::invalid_argument(std::string(where) + ": field/mask shape mismatch (" +
                                    std::to_string(x.height) + "x" + std::to_string(x.width) + " vs " +
                                    std::to_string(m.height) + "x" + std::to_string(m.width) + ")");
}

namespace detail {

inline double centered_dist2(std::int64_t r0, std::int64_t c0, std::int64_t r1, std::int64_t c1) {
    const double dr = static_cast<double>(r0 - r1);
    const double dc = static_cast<double>(c0 - c1);
    return dr * dr + dc * dc;
}

/// Seeded dart throwing onto the grid, keeping points at pairwise distance
/// >= r_min, until `target_kept` points are kept (calibration disk included)
/// or the attempt budget runs out. Returns true when the target was reached.
inline bool throw_darts(std::int64_t h, std::int64_t w, std::int64_t calib_radius,
                        std::uint64_t seed, double r_min, std::int64_t target_kept,
                        std::vector<std::uint8_t>& kept) {
    kept.assign(static_cast<std::size_t>(h * w), 0);
    const std::int64_t cr = h / 2, cc = w / 2;
    const double calib2 = static_cast<double>(calib_radius) * static_cast<double>(calib_radius);
    std::int64_t n_kept = 0;
    for (std::int64_t r = 0; r < h; ++r)
        for (std::int64_t c = 0; c < w; ++c)
            if (centered_dist2(r, c, cr, cc) <= calib2) {
                kept[static_cast<std::size_t>(r * w + c)] = 1;
                ++n_kept;
            }
    if (n_kept >= target_kept) return n_kept == target_kept;

    const double r2 = r_min * r_min;
    const std::int64_t reach = static_cast<std::int64_t>(std::ceil(r_min));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> row(0, h - 1), col(0, w - 1);
    // Budget scales with grid size; a long miss streak means the packing is
    // jammed below the target for this radius.
    const std::int64_t max_attempts = 80 * h * w;
    const std::int64_t max_streak = 10 * h * w;
    std::int64_t streak = 0;
    for (std::int64_t attempt = 0; attempt < max_attempts && streak < max_streak; ++attempt) {
        const std::int64_t r = row(rng), c = col(rng);
        if (kept[static_cast<std::size_t>(r * w + c)]) {
            ++streak;
            continue;
        }
        bool ok = true;
        const std::int64_t r_lo = std::max<std::int64_t>(0, r - reach), r_hi = std::min(h - 1, r + reach);
        const std::int64_t c_lo = std::max<std::int64_t>(0, c - reach), c_hi = std::min(w - 1, c + reach);
        for (std::int64_t rr = r_lo; ok && rr <= r_hi; ++rr)
            for (std::int64_t cc2 = c_lo; cc2 <= c_hi; ++cc2)
                if (kept[static_cast<std::size_t>(rr * w + cc2)] &&
                    centered_dist2(r, c, rr, cc2) < r2) {
                    ok = false;
                    break;
                }
        if (!ok) {
            ++streak;
            continue;
        }
        kept[static_cast<std::size_t>(r * w + c)] = 1;
        streak = 0;
        if (++n_kept == target_kept) return true;
    }
    return false;
}

} // namespace detail

/// Poisson-disk sampling mask: dart throwing with minimum-distance rejection,
/// the minimum distance tuned by bisection to the largest exclusion radius at
/// which round(H·W / target_R) kept points are still reachable. Deterministic
/// given the seed; the calibration disk is always fully kept.
inline SamplingMask generate_poisson_mask(std::int64_t height, std::int64_t width, double target_R,
                                          std::int64_t calib_radius, std::uint64_t seed) {
    if (height < 2 || width < 2)
        throw std::invalid_argument("generate_poisson_mask: dimensions must be >= 2");
    if (target_R < 1.0)
        throw std::invalid_argument("generate_poisson_mask: target_R must be >= 1");
    if (calib_radius < 0 || calib_radius >= std::min(height, width) / 2)
        throw std::invalid_argument("generate_poisson_mask: calib_radius must be in [0, min(h,w)/2)");

    SamplingMask m;
    m.height = height;
    m.width = width;
    m.target_R = target_R;
    m.calib_radius = calib_radius;
    m.seed = seed;

    const std::int64_t total = height * width;
    if (target_R == 1.0) {
        m.kept.assign(static_cast<std::size_t>(total), 1);
        m.min_distance = 0.0;
        return m;
    }

    const std::int64_t target_kept =
        std::max<std::int64_t>(1, std::llround(static_cast<double>(total) / target_R));
    std::vector<std::uint8_t> kept;
    if (!detail::throw_darts(height, width, calib_radius, seed, 0.0, target_kept, kept))
        throw infeasible_mask_error("generate_poisson_mask: calibration disk alone exceeds the kept-point "
                                    "budget for target_R=" + std::to_string(target_R));
    double lo = 0.0; // feasible
    double hi = static_cast<double>(std::min(height, width));
    std::vector<std::uint8_t> trial;
    for (int step = 0; step < 36; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (detail::throw_darts(height, width, calib_radius, seed, mid, target_kept, trial)) {
            lo = mid;
            kept.swap(trial);
        } else {
            hi = mid;
        }
    }
    m.kept = std::move(kept);
    m.min_distance = lo;

    const double achieved = m.achieved_R();
    if (std::abs(achieved - target_R) > 0.10 * target_R)
        throw infeasible_mask_error("generate_poisson_mask: achieved R=" + std::to_string(achieved) +
                                    " outside +/-10% of target " + std::to_string(target_R));
    return m;
}

} // namespace cpmri
