#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace cpmri;

namespace {

ComplexField random_consistent_kspace(std::int64_t h, std::int64_t w, const SamplingMask& m,
                                      std::mt19937_64& rng) {
    return apply_encoding(test_util::random_field(h, w, rng), m);
}

} // namespace

TEST_CASE("blocks with zero weights reduce to their proximal arguments", "[cpnet]") {
    std::mt19937_64 rng(91);
    const ComplexField d = test_util::random_field(8, 8, rng);
    const ComplexField ap = test_util::random_field(8, 8, rng);
    const ComplexField y = test_util::random_field(8, 8, rng);
    const ConvBlockWeights dual_zero(kDualInChannels);
    const ConvBlockWeights primal_zero(kPrimalInChannels);

    CHECK(test_util::bit_equal(dual_block(d, ap, y, 0.95, dual_zero), add_scaled(d, 0.95, ap)));
    CHECK(test_util::bit_equal(dual_block(d, ap, y, 0.0, dual_zero), d));

    const ComplexField p = test_util::random_field(8, 8, rng);
    const ComplexField ahd = test_util::random_field(8, 8, rng);
    CHECK(test_util::bit_equal(primal_block(p, ahd, 0.7, primal_zero), sub_scaled(p, 0.7, ahd)));
    CHECK(test_util::bit_equal(primal_block(p, ahd, 0.0, primal_zero), p));
}

TEST_CASE("zero-weight network is the identity-prox classical loop", "[cpnet]") {
    std::mt19937_64 rng(93);
    const SamplingMask m = generate_poisson_mask(16, 16, 3.0, 2, 15);
    const CPNetWeights w = CPNetWeights::zeros(10);
    for (int trial = 0; trial < 3; ++trial) {
        const ComplexField y = random_consistent_kspace(16, 16, m, rng);
        const CpnetForward fwd = cpnet_forward(y, m, w);
        const ComplexField oracle = test_util::identity_prox_cp_loop(y, m, 10, 0.95, 0.95, 1.0);
        CHECK(test_util::bit_equal(fwd.image, oracle));
    }
}

TEST_CASE("forward passes are deterministic and path-independent", "[cpnet]") {
    std::mt19937_64 rng(97);
    const SamplingMask m = generate_poisson_mask(16, 16, 2.0, 2, 8);
    const ComplexField y = random_consistent_kspace(16, 16, m, rng);
    const CPNetWeights w = CPNetWeights::initialized(5, 3);

    const CpnetForward a = cpnet_forward(y, m, w);
    const CpnetForward b = cpnet_forward(y, m, w);
    CHECK(test_util::bit_equal(a.image, b.image));
    CHECK(all_finite(a.image));

    // the tape-free inference path performs the identical arithmetic
    CHECK(test_util::bit_equal(cpnet_infer(y, m, w), a.image));
}

TEST_CASE("zero data with zero biases yields zero output", "[cpnet]") {
    const SamplingMask m = generate_poisson_mask(16, 16, 2.0, 2, 8);
    const ComplexField y(16, 16);
    const CPNetWeights w = CPNetWeights::initialized(11, 4); // random kernels, zero biases
    const CpnetForward fwd = cpnet_forward(y, m, w);
    CHECK(norm2(fwd.image) == 0.0);
}

TEST_CASE("a 256x256 input produces a 256x256 output", "[cpnet]") {
    const SamplingMask m = generate_poisson_mask(256, 256, 4.0, 12, 7);
    ComplexField y(256, 256);
    y.at(128, 128) = cplx(1.0, 0.0);
    const ComplexField out = cpnet_infer(y, m, CPNetWeights::zeros(10));
    CHECK(out.height == 256);
    CHECK(out.width == 256);
    CHECK(all_finite(out));
}

TEST_CASE("depth accounting: 60 convolutions per forward pass", "[cpnet]") {
    const SamplingMask m = generate_poisson_mask(16, 16, 2.0, 2, 8);
    std::mt19937_64 rng(101);
    const ComplexField y = random_consistent_kspace(16, 16, m, rng);
    const CpnetForward fwd = cpnet_forward(y, m, CPNetWeights::zeros(10));
    CHECK(fwd.tape.conv_count() == 60);
}

TEST_CASE("tape replay reproduces the recorded output bit-exactly", "[cpnet]") {
    std::mt19937_64 rng(103);
    const SamplingMask m = generate_poisson_mask(16, 16, 3.0, 2, 30);
    const ComplexField y = random_consistent_kspace(16, 16, m, rng);
    const CPNetWeights w = CPNetWeights::initialized(17, 2);
    const CpnetForward fwd = cpnet_forward(y, m, w);
    const Tensor replay = fwd.tape.replay_output();
    CHECK(test_util::bit_equal(unpack_channels(replay), fwd.image));
}

TEST_CASE("zero loss-gradient seed gives zero gradients", "[cpnet]") {
    std::mt19937_64 rng(107);
    const SamplingMask m = generate_poisson_mask(8, 8, 2.0, 1, 2);
    const ComplexField y = random_consistent_kspace(8, 8, m, rng);
    const CPNetWeights w = CPNetWeights::initialized(23, 2);
    const CpnetForward fwd = cpnet_forward(y, m, w);
    const GradientSet g = cpnet_backward(fwd.tape, ComplexField(8, 8));
    double total = 0.0;
    for_each_param(g, [&total](const char*, const double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) total += std::abs(p[i]);
    });
    CHECK(total == 0.0);
}

TEST_CASE("a tape without a recorded pass refuses to run", "[cpnet]") {
    Tape empty;
    CHECK_THROWS_AS(empty.backward_with_seed(Tensor(2, 4, 4)), invalid_state_error);
    CHECK_THROWS_AS(empty.replay_output(), invalid_state_error);
    CHECK_THROWS_AS(empty.backward_from_loss(), invalid_state_error);
}
