#pragma once

#include <random>

#include "cpmri/encoding.hpp"
#include "cpmri/errors.hpp"
#include "cpmri/parallel.hpp"
#include "cpmri/phantom.hpp"
#include "cpmri/transforms.hpp"

namespace cpmri {

struct TrainConfig {
    std::int64_t height = 64;
    std::int64_t width = 64;
    std::int64_t train_count = 200;
    std::int64_t val_count = 20;
    std::vector<double> accel_set = {4.0};
    std::int64_t calib_radius = 6;
    bool augment = true;
    double jitter = 1.0;

    std::int64_t epochs = 12;
    std::int64_t batch_size = 2;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int net_iters = 10; // reduced only in tests

    std::uint64_t seed = 1;
    unsigned threads = 0; // 0 = all logical processors; never affects results

    void validate() const {
        if (height < 2 || width < 2) throw config_error("TrainConfig: grid must be at least 2x2");
        if (val_count < 1) throw config_error("TrainConfig: val_count must be >= 1");
        if (train_count < batch_size)
            throw config_error("TrainConfig: train_count must be >= batch_size");
        if (batch_size < 1) throw config_error("TrainConfig: batch_size must be >= 1");
        if (epochs < 1) throw config_error("TrainConfig: epochs must be >= 1");
        if (accel_set.empty()) throw config_error("TrainConfig: accel_set must not be empty");
        for (double r : accel_set)
            if (r < 1.0) throw config_error("TrainConfig: acceleration factors must be >= 1");
        if (learning_rate < 0.0) throw config_error("TrainConfig: learning_rate must be >= 0");
        if (net_iters < 1) throw config_error("TrainConfig: net_iters must be >= 1");
    }
};

struct Sample {
    ComplexField truth;  // normalized ground-truth image
    SamplingMask mask;
    ComplexField kspace; // apply_encoding(truth, mask)
};

struct Dataset {
    std::vector<Sample> train;
    std::vector<Sample> val;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step
    std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Jittered variant of the head phantom: perturbed centers, axes, angles,
/// and intensities, scaled by `amount`.
inline PhantomSpec jittered_phantom_spec(std::int64_t h, std::int64_t w, double amount,
                                         std::mt19937_64& rng) {
    PhantomSpec spec = shepp_logan_spec(h, w);
    if (amount <= 0.0) return spec;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Ellipse& e : spec.ellipses) {
        e.center_x += 0.04 * amount * unit(rng);
        e.center_y += 0.04 * amount * unit(rng);
        e.half_axis_a *= 1.0 + 0.10 * amount * unit(rng);
        e.half_axis_b *= 1.0 + 0.10 * amount * unit(rng);
        e.angle += 0.10 * amount * unit(rng);
        e.intensity *= 1.0 + 0.10 * amount * unit(rng);
    }
    return spec;
}

inline Sample make_sample(const TrainConfig& cfg, std::int64_t index) {
    const std::uint64_t s = mix_seed(cfg.seed, static_cast<std::uint64_t>(index) + 1);
    std::mt19937_64 rng(s);
    ComplexField img = normalize(render_phantom(
        jittered_phantom_spec(cfg.height, cfg.width, cfg.jitter, rng)));
    if (cfg.augment) {
        std::uniform_int_distribution<int> pick(0, 5);
        img = augment(img, kAugmentOps[pick(rng)]);
    }
    const double target_R =
        cfg.accel_set[static_cast<std::size_t>(index) % cfg.accel_set.size()];
    Sample sample;
    sample.mask = generate_poisson_mask(cfg.height, cfg.width, target_R, cfg.calib_radius,
                                        mix_seed(s, 0xA5));
    sample.kspace = apply_encoding(img, sample.mask);
    sample.truth = std::move(img);
    return sample;
}

} // namespace detail

/// Seeded synthetic dataset: jittered phantoms, normalized and augmented,
/// each paired with its Poisson-disk mask and undersampled k-space. Train
/// and validation splits are disjoint by per-sample seed.
inline Dataset make_dataset(const TrainConfig& cfg) {
    cfg.validate();
    const std::int64_t total = cfg.train_count + cfg.val_count;
    std::vector<Sample> all(static_cast<std::size_t>(total));
    parallel_for(total, cfg.threads,
                 [&](std::int64_t i) { all[static_cast<std::size_t>(i)] = detail::make_sample(cfg, i); });
    Dataset ds;
    ds.train.assign(std::make_move_iterator(all.begin()),
                    std::make_move_iterator(all.begin() + cfg.train_count));
    ds.val.assign(std::make_move_iterator(all.begin() + cfg.train_count),
                  std::make_move_iterator(all.end()));
    return ds;
}

} // namespace cpmri
