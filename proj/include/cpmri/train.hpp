#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "cpmri/cpnet.hpp"
#include "cpmri/dataset.hpp"
#include "cpmri/gradcheck.hpp"
#include "cpmri/io.hpp"

namespace cpmri {

struct TrainHistory {
    std::vector<double> train_loss; // one entry per epoch run
    std::vector<double> val_loss;
    std::vector<double> seconds;
    double initial_train_loss = 0.0; // frozen-init evaluation before epoch 1
    double initial_val_loss = 0.0;

    std::int64_t epochs_run() const { return static_cast<std::int64_t>(train_loss.size()); }

    void write_csv(std::ostream& os) const {
        os << "epoch,train_loss,val_loss,seconds\n";
        os << "0," << initial_train_loss << ',' << initial_val_loss << ",0\n";
        for (std::size_t i = 0; i < train_loss.size(); ++i)
            os << i + 1 << ',' << train_loss[i] << ',' << val_loss[i] << ',' << seconds[i] << '\n';
    }
};

struct TrainResult {
    CPNetWeights weights;      // after the last epoch
    CPNetWeights best_weights; // lowest validation loss
    std::int64_t best_epoch = 0;
    TrainHistory history;
};

namespace detail {

/// Mean forward loss over a sample set with frozen weights.
inline double evaluate_loss(const std::vector<Sample>& samples, const CPNetWeights& w,
                            unsigned threads) {
    std::vector<double> losses(samples.size(), 0.0);
    parallel_for(static_cast<std::int64_t>(samples.size()), threads, [&](std::int64_t i) {
        const Sample& s = samples[static_cast<std::size_t>(i)];
        losses[static_cast<std::size_t>(i)] =
            mse_loss(cpnet_infer(s.kspace, s.mask, w), s.truth);
    });
    return std::accumulate(losses.begin(), losses.end(), 0.0) /
           static_cast<double>(losses.size());
}

/// Per-epoch batch order: a pure function of (seed, epoch) so resuming from
/// a checkpoint replays the identical stream.
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::int64_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(seed, 0xE90C + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

} // namespace detail

/// Mini-batch Adam training of the unrolled network on a synthetic dataset.
/// Writes a checkpoint per epoch plus a best-validation checkpoint when
/// ckpt_dir is given; resumes bit-exactly from a saved epoch checkpoint.
inline TrainResult train(const TrainConfig& cfg,
                         const std::optional<std::filesystem::path>& ckpt_dir = std::nullopt,
                         const std::optional<std::filesystem::path>& resume_from = std::nullopt) {
    cfg.validate();
    if (ckpt_dir) std::filesystem::create_directories(*ckpt_dir);
    const Dataset ds = make_dataset(cfg);
    const unsigned threads = resolve_threads(cfg.threads);

    CPNetWeights weights = CPNetWeights::initialized(cfg.seed, cfg.net_iters);
    AdamState adam = AdamState::for_weights(weights);
    std::int64_t start_epoch = 0; // epochs already completed
    if (resume_from) {
        Checkpoint ck = read_checkpoint(*resume_from);
        if (ck.weights.n_iters() != cfg.net_iters)
            throw config_error("resume checkpoint was trained with a different unroll depth");
        if (!ck.adam) throw config_error("resume checkpoint carries no optimizer state");
        weights = std::move(ck.weights);
        adam = std::move(*ck.adam);
        start_epoch = ck.epoch;
        if (start_epoch < 0 || start_epoch >= cfg.epochs)
            throw config_error("resume epoch out of range for the configured schedule");
    }

    TrainResult res;
    res.history.initial_train_loss = detail::evaluate_loss(ds.train, weights, threads);
    res.history.initial_val_loss = detail::evaluate_loss(ds.val, weights, threads);

    double best_val = std::numeric_limits<double>::infinity();
    res.best_weights = weights;
    res.best_epoch = 0;

    const std::size_t n_train = ds.train.size();
    for (std::int64_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<std::size_t> order = detail::epoch_order(n_train, cfg.seed, epoch);

        double epoch_loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + static_cast<std::size_t>(cfg.batch_size) <= n_train;
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t b = static_cast<std::size_t>(cfg.batch_size);
            std::vector<GradientSet> grads(b);
            std::vector<double> losses(b, 0.0);
            parallel_for(static_cast<std::int64_t>(b), threads, [&](std::int64_t j) {
                const Sample& s = ds.train[order[start + static_cast<std::size_t>(j)]];
                const CpnetForward fwd = cpnet_forward(s.kspace, s.mask, weights, &s.truth);
                losses[static_cast<std::size_t>(j)] = fwd.tape.loss();
                grads[static_cast<std::size_t>(j)] = fwd.tape.backward_from_loss();
            });
            // deterministic reduction in sample order, mean over the batch
            GradientSet batch_grad = std::move(grads[0]);
            for (std::size_t j = 1; j < b; ++j) {
                std::size_t slot = 0;
                std::vector<std::pair<const double*, std::size_t>> src;
                for_each_param(grads[j], [&src](const char*, const double* p, std::size_t n) {
                    src.emplace_back(p, n);
                });
                for_each_param(batch_grad, [&](const char*, double* p, std::size_t n) {
                    const double* q = src[slot++].first;
                    for (std::size_t i = 0; i < n; ++i) p[i] += q[i];
                });
            }
            const double inv_b = 1.0 / static_cast<double>(b);
            for_each_param(batch_grad, [inv_b](const char*, double* p, std::size_t n) {
                for (std::size_t i = 0; i < n; ++i) p[i] *= inv_b;
            });

            adam_step(weights, batch_grad, adam, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                      cfg.adam_eps);
            epoch_loss_sum += std::accumulate(losses.begin(), losses.end(), 0.0) * inv_b;
            ++batches;
        }

        const double train_loss = epoch_loss_sum / static_cast<double>(batches);
        const double val_loss = detail::evaluate_loss(ds.val, weights, threads);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw divergence_error("training diverged at epoch " + std::to_string(epoch + 1));

        const auto t1 = std::chrono::steady_clock::now();
        res.history.train_loss.push_back(train_loss);
        res.history.val_loss.push_back(val_loss);
        res.history.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());

        if (val_loss < best_val) {
            best_val = val_loss;
            res.best_weights = weights;
            res.best_epoch = epoch + 1;
        }
        if (ckpt_dir) {
            char name[32];
            std::snprintf(name, sizeof name, "ckpt_epoch_%03lld.ckpt",
                          static_cast<long long>(epoch + 1));
            write_checkpoint(*ckpt_dir / name, weights, &adam, epoch + 1, cfg.seed);
            write_checkpoint(*ckpt_dir / "best.ckpt", res.best_weights, nullptr, res.best_epoch,
                             cfg.seed);
        }
    }

    res.weights = std::move(weights);
    return res;
}

} // namespace cpmri
