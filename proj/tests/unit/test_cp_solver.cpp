#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "test_util.hpp"

using namespace cpmri;

TEST_CASE("step-size safety is enforced at construction", "[cp]") {
    CHECK_THROWS_AS(CPParams(1.0, 1.0, 1.0, 0.0, 10, 0.0), config_error);
    CHECK_THROWS_AS(CPParams(-0.1, 0.5, 1.0, 0.0, 10, 0.0), config_error);
    CHECK_THROWS_AS(CPParams(0.5, 0.5, 1.5, 0.0, 10, 0.0), config_error);
    CHECK_THROWS_AS(CPParams(0.5, 0.5, 1.0, -1.0, 10, 0.0), config_error);
    CHECK_NOTHROW(CPParams(0.95, 0.95, 1.0, 1e-3, 10, 0.0));
}

TEST_CASE("full mask with lambda 0 converges to the inverse transform", "[cp]") {
    std::mt19937_64 rng(51);
    const SamplingMask full = generate_poisson_mask(16, 16, 1.0, 2, 0);
    const ComplexField p_true = test_util::random_field(16, 16, rng);
    const ComplexField y = apply_encoding(p_true, full);
    const CPParams params(0.95, 0.95, 1.0, 0.0, 200, 0.0);
    const CPSolveResult res = cp_solve(y, full, params);
    CHECK(res.trace.iterations_run <= 200);
    CHECK(test_util::rel_l2_error(res.image, ifft2c(y)) < 1e-8);
}

TEST_CASE("all-zero data reconstructs to zero", "[cp]") {
    const SamplingMask m = generate_poisson_mask(16, 16, 3.0, 2, 3);
    const ComplexField y(16, 16);
    const CPSolveResult res = cp_solve(y, m, CPParams{});
    CHECK(norm2(res.image) == 0.0);
    CHECK(res.trace.iterations_run <= 2);
}

TEST_CASE("consistent data with lambda 0 is a fixed point of the iteration", "[cp]") {
    std::mt19937_64 rng(53);
    const SamplingMask m = generate_poisson_mask(16, 16, 3.0, 2, 9);
    // p* in the range of A* so that A p* = y is consistent
    const ComplexField p_star = apply_adjoint(apply_encoding(test_util::random_field(16, 16, rng), m), m);
    const ComplexField y = apply_encoding(p_star, m);
    const double sigma = 0.95, tau = 0.95, theta = 1.0;

    ComplexField d = zeros_like(y);
    ComplexField p = p_star;
    ComplexField pbar = p_star;
    for (int it = 0; it < 10; ++it) {
        d = prox_sigma_fstar(add_scaled(d, sigma, apply_encoding(pbar, m)), y, sigma);
        const ComplexField p_next = prox_tau_g(sub_scaled(p, tau, apply_adjoint(d, m)), tau, 0.0);
        pbar = add_scaled(p_next, theta, sub(p_next, p));
        p = p_next;
    }
    CHECK(norm2(sub(p, p_star)) < 1e-12);
    CHECK(norm2(d) < 1e-12);
}

TEST_CASE("termination by tolerance reports a small final change", "[cp]") {
    std::mt19937_64 rng(57);
    const SamplingMask full = generate_poisson_mask(16, 16, 1.0, 2, 0);
    const ComplexField y = apply_encoding(test_util::random_field(16, 16, rng), full);
    const CPParams params(0.95, 0.95, 1.0, 0.0, 500, 1e-4);
    const CPSolveResult res = cp_solve(y, full, params);
    CHECK(res.trace.iterations_run < 500);
    CHECK(res.trace.rel_change.back() < 1e-4);
}

TEST_CASE("objective is non-increasing after burn-in", "[cp]") {
    const ComplexField truth = normalize(render_phantom(shepp_logan_spec(24, 24)));
    const SamplingMask m = generate_poisson_mask(24, 24, 2.0, 3, 5);
    const ComplexField y = apply_encoding(truth, m);
    const CPParams params(0.95, 0.95, 1.0, 1e-3, 120, 0.0);
    const CPSolveResult res = cp_solve(y, m, params);
    for (std::size_t n = 20; n + 1 < res.trace.objective.size(); ++n)
        CHECK(res.trace.objective[n + 1] <= res.trace.objective[n] + 1e-9);
}

TEST_CASE("trace exports as CSV", "[cp]") {
    const SamplingMask m = generate_poisson_mask(16, 16, 2.0, 2, 4);
    std::mt19937_64 rng(61);
    const ComplexField y = apply_encoding(test_util::random_field(16, 16, rng), m);
    const CPSolveResult res = cp_solve(y, m, CPParams(0.95, 0.95, 1.0, 1e-3, 25, 0.0));
    std::ostringstream os;
    res.trace.write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.rfind("iteration,objective,relative_change\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + static_cast<std::size_t>(res.trace.iterations_run));
}
