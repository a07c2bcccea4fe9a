#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace cpmri;

TEST_CASE("fft2c impulse at the DC-centered origin", "[fourier]") {
    ComplexField x(4, 4);
    x.at(2, 2) = cplx(1.0, 0.0);
    const ComplexField k = fft2c(x);
    for (const cplx& v : k.data) CHECK(std::abs(std::abs(v) - 0.25) < 1e-15);
}

TEST_CASE("fft2c of a constant concentrates at DC", "[fourier]") {
    ComplexField x(4, 4);
    for (auto& v : x.data) v = cplx(1.0, 0.0);
    const ComplexField k = fft2c(x);
    CHECK(std::abs(k.at(2, 2) - cplx(4.0, 0.0)) < 1e-12);
    for (std::int64_t r = 0; r < 4; ++r)
        for (std::int64_t c = 0; c < 4; ++c)
            if (r != 2 || c != 2) CHECK(std::abs(k.at(r, c)) < 1e-12);
}

TEST_CASE("single DC entry inverts to a constant image", "[fourier]") {
    ComplexField k(4, 4);
    k.at(2, 2) = cplx(4.0, 0.0);
    const ComplexField x = ifft2c(k);
    for (const cplx& v : x.data) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("Parseval and round trip on random fields", "[fourier]") {
    std::mt19937_64 rng(42);
    for (const auto& [h, w] : {std::pair<std::int64_t, std::int64_t>{32, 32}, {16, 16}, {6, 10}, {7, 5}}) {
        const ComplexField x = test_util::random_field(h, w, rng);
        const ComplexField k = fft2c(x);
        CHECK(std::abs(norm2(k) - norm2(x)) <= 1e-12 * norm2(x));
        CHECK(test_util::rel_l2_error(ifft2c(k), x) < 1e-12);
        CHECK(all_finite(k));
    }
}

TEST_CASE("all-zero k-space inverts to an all-zero image", "[fourier]") {
    const ComplexField z(8, 8);
    const ComplexField x = ifft2c(z);
    CHECK(norm2(x) == 0.0);
}

TEST_CASE("transforms reject degenerate dimensions", "[fourier]") {
    CHECK_THROWS_AS(ComplexField(0, 4), std::invalid_argument);
    const ComplexField row(1, 8);
    CHECK_THROWS_AS(fft2c(row), std::invalid_argument);
    CHECK_THROWS_AS(ifft2c(row), std::invalid_argument);
}
