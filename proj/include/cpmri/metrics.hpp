#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "cpmri/field.hpp"

namespace cpmri {

namespace detail {

inline std::vector<double> magnitude_image(const ComplexField& x) {
    std::vector<double> m(x.data.size());
    for (std::size_t i = 0; i < x.data.size(); ++i) m[i] = std::abs(x.data[i]);
    return m;
}

/// 11-tap Gaussian (σ = 1.5) normalized to sum 1.
inline const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(11);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i) {
            const double d = static_cast<double>(i - 5);
            v[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            sum += v[static_cast<std::size_t>(i)];
        }
        for (double& x : v) x /= sum;
        return v;
    }();
    return w;
}

/// Mirror-with-duplication index: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline std::int64_t reflect(std::int64_t i, std::int64_t n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

/// Separable Gaussian filter with symmetric boundary handling.
inline std::vector<double> gauss_filter(const std::vector<double>& img, std::int64_t h,
                                        std::int64_t w) {
    const std::vector<double>& k = ssim_window();
    std::vector<double> tmp(img.size()), out(img.size());
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (int t = 0; t < 11; ++t)
                s += k[static_cast<std::size_t>(t)] *
                     img[static_cast<std::size_t>(y * w + reflect(x + t - 5, w))];
            tmp[static_cast<std::size_t>(y * w + x)] = s;
        }
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (int t = 0; t < 11; ++t)
                s += k[static_cast<std::size_t>(t)] *
                     tmp[static_cast<std::size_t>(reflect(y + t - 5, h) * w + x)];
            out[static_cast<std::size_t>(y * w + x)] = s;
        }
    return out;
}

} // namespace detail

/// Mean squared difference of magnitude images.
inline double mse(const ComplexField& x, const ComplexField& ref) {
    require_same_shape(x, ref, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double d = std::abs(x.data[i]) - std::abs(ref.data[i]);
        s += d * d;
    }
    return s / static_cast<double>(x.data.size());
}

inline double psnr_from_mse(double mse_value, double peak) {
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse_value);
}

/// 10·log₁₀(peak²/MSE) with peak = max |ref|; +inf for identical images.
inline double psnr(const ComplexField& x, const ComplexField& ref) {
    require_same_shape(x, ref, "psnr");
    const double peak = max_abs(ref);
    if (peak == 0.0) throw std::invalid_argument("psnr: reference is all zero");
    return psnr_from_mse(mse(x, ref), peak);
}

/// Mean local SSIM on magnitude images: 11×11 Gaussian window (σ = 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range max |ref|, symmetric boundaries.
inline double ssim(const ComplexField& x, const ComplexField& ref) {
    require_same_shape(x, ref, "ssim");
    const std::int64_t h = x.height, w = x.width;
    if (h < 11 || w < 11)
        throw std::invalid_argument("ssim: images must be at least 11x11");

    const std::vector<double> a = detail::magnitude_image(x);
    const std::vector<double> b = detail::magnitude_image(ref);
    double range = 0.0;
    for (double v : b) range = std::max(range, v);
    if (range == 0.0) {
        bool identical = true;
        for (std::size_t i = 0; i < a.size() && identical; ++i) identical = a[i] == b[i];
        if (identical) return 1.0;
        throw std::invalid_argument("ssim: reference has zero dynamic range");
    }
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);

    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const std::vector<double> mu_a = detail::gauss_filter(a, h, w);
    const std::vector<double> mu_b = detail::gauss_filter(b, h, w);
    const std::vector<double> m_aa = detail::gauss_filter(aa, h, w);
    const std::vector<double> m_bb = detail::gauss_filter(bb, h, w);
    const std::vector<double> m_ab = detail::gauss_filter(ab, h, w);

    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double va = m_aa[i] - mu_a[i] * mu_a[i];
        const double vb = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        sum += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
               ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    return sum / static_cast<double>(a.size());
}

/// Table of per-(method, R) metrics against one reference image.
struct ReconReport {
    struct Row {
        std::string method;
        double accel = 0.0;
        double mse = 0.0;
        double ssim = 0.0;
        double psnr_db = 0.0;
    };
    std::vector<Row> rows;
    std::vector<std::string> row_errors;
    std::string reference_id;

    void write_csv(std::ostream& os) const {
        os << "method,R,MSE,SSIM,PSNR\n";
        for (const Row& r : rows)
            os << r.method << ',' << r.accel << ',' << r.mse << ',' << r.ssim << ',' << r.psnr_db
               << '\n';
    }
};

struct LabeledRecon {
    std::string method;
    double accel = 0.0;
    const ComplexField* image = nullptr;
};

/// One row per reconstruction; a shape mismatch invalidates that row only.
inline ReconReport build_report(const std::vector<LabeledRecon>& recons, const ComplexField& ref,
                                const std::string& reference_id) {
    ReconReport rep;
    rep.reference_id = reference_id;
    for (const LabeledRecon& r : recons) {
        try {
            ReconReport::Row row;
            row.method = r.method;
            row.accel = r.accel;
            row.mse = mse(*r.image, ref);
            row.ssim = ssim(*r.image, ref);
            row.psnr_db = psnr(*r.image, ref);
            rep.rows.push_back(std::move(row));
        } catch (const std::invalid_argument& e) {
            rep.row_errors.push_back(r.method + ": " + e.what());
        }
    }
    return rep;
}

} // namespace cpmri
