#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace cpmri;

TEST_CASE("adjoint identity over random triples", "[encoding]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> accel(2.0, 6.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SamplingMask m = generate_poisson_mask(32, 32, accel(rng), 3, rng());
        const ComplexField p = test_util::random_field(32, 32, rng);
        const ComplexField k = test_util::random_field(32, 32, rng);
        const cplx lhs = inner(apply_encoding(p, m), k);
        const cplx rhs = inner(p, apply_adjoint(k, m));
        const double denom = norm2(apply_encoding(p, m)) * norm2(k) + 1e-300;
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("full mask reduces the operators to plain transforms", "[encoding]") {
    std::mt19937_64 rng(11);
    const SamplingMask full = generate_poisson_mask(16, 16, 1.0, 2, 0);
    const ComplexField p = test_util::random_field(16, 16, rng);
    const ComplexField k = test_util::random_field(16, 16, rng);
    CHECK(test_util::bit_equal(apply_encoding(p, full), fft2c(p)));
    CHECK(test_util::bit_equal(apply_adjoint(k, full), ifft2c(k)));
    CHECK(test_util::rel_l2_error(apply_adjoint(apply_encoding(p, full), full), p) < 1e-12);
}

TEST_CASE("encoding is non-expansive", "[encoding]") {
    std::mt19937_64 rng(13);
    const SamplingMask m = generate_poisson_mask(32, 32, 3.0, 3, 5);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexField p = test_util::random_field(32, 32, rng);
        CHECK(norm2(apply_encoding(p, m)) <= norm2(p) * (1.0 + 1e-12));
    }
}

TEST_CASE("power iteration on A*A converges to operator norm 1", "[encoding]") {
    std::mt19937_64 rng(17);
    const SamplingMask m = generate_poisson_mask(32, 32, 4.0, 3, 23);
    ComplexField v = test_util::random_field(32, 32, rng);
    double estimate = 0.0;
    int iters = 0;
    for (; iters < 50; ++iters) {
        v = scale(v, 1.0 / norm2(v));
        const double next = norm2(apply_encoding(v, m)); // ‖Av‖ for unit v
        v = apply_adjoint(apply_encoding(v, m), m);
        estimate = next * next; // Rayleigh quotient of A*A
        if (std::abs(estimate - 1.0) < 1e-6) break;
    }
    CHECK(std::abs(estimate - 1.0) < 1e-6);
    CHECK(iters <= 50);
}

TEST_CASE("zero-filled reconstruction basics", "[encoding]") {
    std::mt19937_64 rng(19);
    const SamplingMask full = generate_poisson_mask(16, 16, 1.0, 2, 0);
    const ComplexField p = test_util::random_field(16, 16, rng);
    CHECK(test_util::rel_l2_error(zero_filled_recon(apply_encoding(p, full), full), p) < 1e-12);

    const SamplingMask m = generate_poisson_mask(16, 16, 3.0, 2, 5);
    const ComplexField zero(16, 16);
    CHECK(norm2(zero_filled_recon(zero, m)) == 0.0);
}

TEST_CASE("shape mismatches are rejected", "[encoding]") {
    const SamplingMask m = generate_poisson_mask(16, 16, 2.0, 2, 1);
    const ComplexField wrong(8, 8);
    CHECK_THROWS_AS(apply_encoding(wrong, m), std::invalid_argument);
    CHECK_THROWS_AS(apply_adjoint(wrong, m), std::invalid_argument);
    CHECK_THROWS_AS(zero_filled_recon(wrong, m), std::invalid_argument);
}
