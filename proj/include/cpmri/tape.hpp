#pragma once

#include <utility>

#include "cpmri/cpnet_weights.hpp"
#include "cpmri/encoding.hpp"
#include "cpmri/tensor.hpp"

namespace cpmri {

namespace tape_detail {

enum class OpKind { Input, Conv, Relu, Add, Sub, Axpy, Fft2c, Ifft2c, MaskMul, Concat, Mse };

struct ConvRef {
    int iter = -1;
    int block = -1; // 0 dual, 1 primal
    int layer = 0;  // 1..3
};

struct ScalarRef {
    int iter = -1;
    int which = -1; // 0 sigma, 1 tau, 2 theta
};

struct Node {
    OpKind kind = OpKind::Input;
    int a = -1, b = -1;
    ConvRef conv;
    ScalarRef scalar;
    int sign = +1; // Axpy: value = a + sign·s·b
    Tensor value;
    Tensor target; // Mse only
};

} // namespace tape_detail

/// Record of the primitive operations of one forward pass (convolutions,
/// ReLU, centered FFTs, mask multiplies, scalar-weighted sums, channel
/// concatenation, MSE reduction) together with the weight snapshot they
/// used. Replaying reproduces the recorded output bit-exactly; the reverse
/// sweep yields gradients for every kernel, bias, and step scalar.
class Tape {
public:
    Tape() = default;

    /// Begin recording against immutable snapshots of weights and mask.
    void start(const CPNetWeights& w, const SamplingMask& m) {
        weights_ = w;
        mask_ = m;
        nodes_.clear();
        output_ = -1;
        loss_node_ = -1;
    }

    int input(Tensor value) {
        tape_detail::Node nd;
        nd.kind = tape_detail::OpKind::Input;
        nd.value = std::move(value);
        return push(std::move(nd));
    }

    int conv(int x, int iter, int block, int layer) {
        tape_detail::Node nd;
        nd.kind = tape_detail::OpKind::Conv;
        nd.a = x;
        nd.conv = {iter, block, layer};
        return push(std::move(nd));
    }

    int relu(int x) { return simple(tape_detail::OpKind::Relu, x); }
    int add(int a, int b) { return simple(tape_detail::OpKind::Add, a, b); }
    int sub(int a, int b) { return simple(tape_detail::OpKind::Sub, a, b); }
    int fft2c_of(int x) { return simple(tape_detail::OpKind::Fft2c, x); }
    int ifft2c_of(int x) { return simple(tape_detail::OpKind::Ifft2c, x); }
    int mask_mul(int x) { return simple(tape_detail::OpKind::MaskMul, x); }
    int concat(int a, int b) { return simple(tape_detail::OpKind::Concat, a, b); }

    /// a + sign·s·b with s one of the per-iteration step scalars.
    int axpy(int a, int b, int iter, int which, int sign) {
        tape_detail::Node nd;
        nd.kind = tape_detail::OpKind::Axpy;
        nd.a = a;
        nd.b = b;
        nd.scalar = {iter, which};
        nd.sign = sign;
        return push(std::move(nd));
    }

    /// Mean over pixels of |pred − target|² (both channels of the packed
    /// representation contribute; the divisor is the pixel count).
    int mse_vs(int pred, Tensor target) {
        tape_detail::Node nd;
        nd.kind = tape_detail::OpKind::Mse;
        nd.a = pred;
        nd.target = std::move(target);
        loss_node_ = static_cast<int>(nodes_.size());
        return push(std::move(nd));
    }

    void set_output(int id) { output_ = id; }

    bool recorded() const { return output_ >= 0; }
    int output_node() const { return output_; }
    bool has_loss() const { return loss_node_ >= 0; }

    double loss() const {
        if (loss_node_ < 0) throw invalid_state_error("Tape: no loss was recorded");
        return nodes_[static_cast<std::size_t>(loss_node_)].value.data[0];
    }

    const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }

    const CPNetWeights& weights() const { return weights_; }

    std::size_t conv_count() const {
        std::size_t n = 0;
        for (const auto& nd : nodes_)
            if (nd.kind == tape_detail::OpKind::Conv) ++n;
        return n;
    }

    /// Smallest |pre-activation| seen by any ReLU in the recorded pass.
    /// Finite-difference checks are only trustworthy when this margin is
    /// comfortably larger than the probe step.
    double min_relu_input_magnitude() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& nd : nodes_)
            if (nd.kind == tape_detail::OpKind::Relu)
                for (const double v : nodes_[static_cast<std::size_t>(nd.a)].value.data)
                    m = std::min(m, std::abs(v));
        return m;
    }

    /// Re-execute every recorded operation from the stored leaves and
    /// return the recomputed output.
    Tensor replay_output() const {
        require_recorded();
        std::vector<Tensor> vals(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].kind == tape_detail::OpKind::Input)
                vals[i] = nodes_[i].value;
            else
                vals[i] = eval(nodes_[i], [&vals](int id) -> const Tensor& {
                    return vals[static_cast<std::size_t>(id)];
                });
        }
        return vals[static_cast<std::size_t>(output_)];
    }

    /// Reverse sweep seeded with ∂loss/∂output at the output node.
    GradientSet backward_with_seed(const Tensor& seed) const {
        require_recorded();
        require_same_shape(seed, nodes_[static_cast<std::size_t>(output_)].value,
                           "Tape::backward_with_seed");
        std::vector<Tensor> grads(nodes_.size());
        grads[static_cast<std::size_t>(output_)] = seed;
        return sweep(grads);
    }

    /// Reverse sweep seeded with 1 at the recorded MSE node.
    GradientSet backward_from_loss() const {
        require_recorded();
        if (loss_node_ < 0) throw invalid_state_error("Tape: no loss was recorded");
        std::vector<Tensor> grads(nodes_.size());
        Tensor one(1, 1, 1);
        one.data[0] = 1.0;
        grads[static_cast<std::size_t>(loss_node_)] = std::move(one);
        return sweep(grads);
    }

private:
    std::vector<tape_detail::Node> nodes_;
    CPNetWeights weights_;
    SamplingMask mask_;
    int output_ = -1;
    int loss_node_ = -1;

    void require_recorded() const {
        if (nodes_.empty() || output_ < 0)
            throw invalid_state_error("Tape: no forward pass has been recorded");
    }

    int simple(tape_detail::OpKind kind, int a, int b = -1) {
        tape_detail::Node nd;
        nd.kind = kind;
        nd.a = a;
        nd.b = b;
        return push(std::move(nd));
    }

    int push(tape_detail::Node nd) {
        const int id = static_cast<int>(nodes_.size());
        if (nd.kind != tape_detail::OpKind::Input)
            nd.value = eval(nd, [this](int i) -> const Tensor& {
                return nodes_[static_cast<std::size_t>(i)].value;
            });
        nodes_.push_back(std::move(nd));
        return id;
    }

    const ConvBlockWeights& block_of(const CPNetWeights& w, tape_detail::ConvRef r) const {
        const auto& it = w.iters[static_cast<std::size_t>(r.iter)];
        return r.block == 0 ? it.dual : it.primal;
    }
    ConvBlockWeights& block_of(CPNetWeights& w, tape_detail::ConvRef r) const {
        auto& it = w.iters[static_cast<std::size_t>(r.iter)];
        return r.block == 0 ? it.dual : it.primal;
    }

    template <class Vals>
    Tensor eval(const tape_detail::Node& nd, Vals&& val) const {
        using tape_detail::OpKind;
        switch (nd.kind) {
        case OpKind::Conv: {
            const ConvBlockWeights& b = block_of(weights_, nd.conv);
            const ConvKernel& k = nd.conv.layer == 1 ? b.k1 : nd.conv.layer == 2 ? b.k2 : b.k3;
            const std::vector<double>& bias = nd.conv.layer == 1 ? b.b1 : nd.conv.layer == 2 ? b.b2 : b.b3;
            return conv3x3_forward(val(nd.a), k, bias);
        }
        case OpKind::Relu:
            return relu_forward(val(nd.a));
        case OpKind::Add: {
            const Tensor& a = val(nd.a);
            const Tensor& b = val(nd.b);
            require_same_shape(a, b, "Tape add");
            Tensor out(a.channels, a.height, a.width);
            for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
            return out;
        }
        case OpKind::Sub: {
            const Tensor& a = val(nd.a);
            const Tensor& b = val(nd.b);
            require_same_shape(a, b, "Tape sub");
            Tensor out(a.channels, a.height, a.width);
            for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
            return out;
        }
        case OpKind::Axpy: {
            const Tensor& a = val(nd.a);
            const Tensor& b = val(nd.b);
            require_same_shape(a, b, "Tape axpy");
            const double s = scalar_of(weights_, nd.scalar);
            Tensor out(a.channels, a.height, a.width);
            if (nd.sign > 0)
                for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + s * b.data[i];
            else
                for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - s * b.data[i];
            return out;
        }
        case OpKind::Fft2c:
            return pack_channels(fft2c(unpack_channels(val(nd.a))));
        case OpKind::Ifft2c:
            return pack_channels(ifft2c(unpack_channels(val(nd.a))));
        case OpKind::MaskMul: {
            const Tensor& a = val(nd.a);
            Tensor out(a.channels, a.height, a.width);
            const std::size_t n = static_cast<std::size_t>(a.height) * static_cast<std::size_t>(a.width);
            for (std::int64_t c = 0; c < a.channels; ++c) {
                const double* src = a.channel(c);
                double* dst = out.channel(c);
                for (std::size_t i = 0; i < n; ++i) dst[i] = mask_.kept[i] ? src[i] : 0.0;
            }
            return out;
        }
        case OpKind::Concat: {
            const Tensor& a = val(nd.a);
            const Tensor& b = val(nd.b);
            Tensor out(a.channels + b.channels, a.height, a.width);
            std::copy(a.data.begin(), a.data.end(), out.data.begin());
            std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
            return out;
        }
        case OpKind::Mse: {
            const Tensor& pred = val(nd.a);
            require_same_shape(pred, nd.target, "Tape mse");
            double s = 0.0;
            for (std::size_t i = 0; i < pred.data.size(); ++i) {
                const double diff = pred.data[i] - nd.target.data[i];
                s += diff * diff;
            }
            Tensor out(1, 1, 1);
            out.data[0] = s / static_cast<double>(pred.height * pred.width);
            return out;
        }
        case OpKind::Input:
            break;
        }
        throw invalid_state_error("Tape: cannot evaluate input node");
    }

    static double scalar_of(const CPNetWeights& w, tape_detail::ScalarRef r) {
        const auto& it = w.iters[static_cast<std::size_t>(r.iter)];
        return r.which == 0 ? it.sigma : r.which == 1 ? it.tau : it.theta;
    }
    static double& scalar_of(CPNetWeights& w, tape_detail::ScalarRef r) {
        auto& it = w.iters[static_cast<std::size_t>(r.iter)];
        return r.which == 0 ? it.sigma : r.which == 1 ? it.tau : it.theta;
    }

    void accumulate(std::vector<Tensor>& grads, int id, const Tensor& g) const {
        Tensor& dst = grads[static_cast<std::size_t>(id)];
        if (dst.data.empty()) {
            dst = g;
            return;
        }
        for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
    }

    GradientSet sweep(std::vector<Tensor>& grads) const {
        using tape_detail::OpKind;
        GradientSet gs = zeros_like(weights_);
        for (std::size_t idx = nodes_.size(); idx-- > 0;) {
            const tape_detail::Node& nd = nodes_[idx];
            const Tensor& g = grads[idx];
            if (g.data.empty()) continue; // node does not influence the seed
            switch (nd.kind) {
            case OpKind::Conv: {
                const ConvBlockWeights& b = block_of(weights_, nd.conv);
                const ConvKernel& k = nd.conv.layer == 1 ? b.k1 : nd.conv.layer == 2 ? b.k2 : b.k3;
                ConvBlockWeights& gb = block_of(gs, nd.conv);
                ConvKernel& gk = nd.conv.layer == 1 ? gb.k1 : nd.conv.layer == 2 ? gb.k2 : gb.k3;
                std::vector<double>& gbias =
                    nd.conv.layer == 1 ? gb.b1 : nd.conv.layer == 2 ? gb.b2 : gb.b3;
                conv3x3_backward_params(g, node_value(nd.a), gk, gbias);
                accumulate(grads, nd.a, conv3x3_backward_input(g, k));
                break;
            }
            case OpKind::Relu:
                accumulate(grads, nd.a, relu_backward(g, node_value(nd.a)));
                break;
            case OpKind::Add:
                accumulate(grads, nd.a, g);
                accumulate(grads, nd.b, g);
                break;
            case OpKind::Sub: {
                accumulate(grads, nd.a, g);
                Tensor neg(g.channels, g.height, g.width);
                for (std::size_t i = 0; i < g.data.size(); ++i) neg.data[i] = -g.data[i];
                accumulate(grads, nd.b, neg);
                break;
            }
            case OpKind::Axpy: {
                accumulate(grads, nd.a, g);
                const double s = scalar_of(weights_, nd.scalar);
                const Tensor& bv = node_value(nd.b);
                Tensor gb(g.channels, g.height, g.width);
                const double coef = nd.sign > 0 ? s : -s;
                double dot = 0.0;
                for (std::size_t i = 0; i < g.data.size(); ++i) {
                    gb.data[i] = coef * g.data[i];
                    dot += g.data[i] * bv.data[i];
                }
                accumulate(grads, nd.b, gb);
                scalar_of(gs, nd.scalar) += nd.sign > 0 ? dot : -dot;
                break;
            }
            case OpKind::Fft2c:
                // unitary: the adjoint of the forward transform is the inverse
                accumulate(grads, nd.a, pack_channels(ifft2c(unpack_channels(g))));
                break;
            case OpKind::Ifft2c:
                accumulate(grads, nd.a, pack_channels(fft2c(unpack_channels(g))));
                break;
            case OpKind::MaskMul: {
                Tensor gm(g.channels, g.height, g.width);
                const std::size_t n =
                    static_cast<std::size_t>(g.height) * static_cast<std::size_t>(g.width);
                for (std::int64_t c = 0; c < g.channels; ++c) {
                    const double* src = g.channel(c);
                    double* dst = gm.channel(c);
                    for (std::size_t i = 0; i < n; ++i) dst[i] = mask_.kept[i] ? src[i] : 0.0;
                }
                accumulate(grads, nd.a, gm);
                break;
            }
            case OpKind::Concat: {
                const Tensor& av = node_value(nd.a);
                const Tensor& bv = node_value(nd.b);
                Tensor ga(av.channels, av.height, av.width);
                Tensor gb(bv.channels, bv.height, bv.width);
                std::copy(g.data.begin(), g.data.begin() + ga.data.size(), ga.data.begin());
                std::copy(g.data.begin() + ga.data.size(), g.data.end(), gb.data.begin());
                accumulate(grads, nd.a, ga);
                accumulate(grads, nd.b, gb);
                break;
            }
            case OpKind::Mse: {
                const Tensor& pred = node_value(nd.a);
                const double scale = 2.0 * g.data[0] / static_cast<double>(pred.height * pred.width);
                Tensor gp(pred.channels, pred.height, pred.width);
                for (std::size_t i = 0; i < pred.data.size(); ++i)
                    gp.data[i] = scale * (pred.data[i] - nd.target.data[i]);
                accumulate(grads, nd.a, gp);
                break;
            }
            case OpKind::Input:
                break;
            }
            // free consumed gradient storage early
            grads[idx] = Tensor();
        }
        return gs;
    }

    const Tensor& node_value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
};

} // namespace cpmri
