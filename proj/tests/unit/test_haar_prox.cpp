#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace cpmri;

TEST_CASE("full-depth Haar of a constant is a single coefficient", "[haar]") {
    ComplexField x(4, 4);
    for (auto& v : x.data) v = cplx(1.0, 0.0);
    const ComplexField w = haar2(x);
    CHECK(std::abs(w.at(0, 0) - cplx(4.0, 0.0)) < 1e-12);
    for (std::int64_t r = 0; r < 4; ++r)
        for (std::int64_t c = 0; c < 4; ++c)
            if (r != 0 || c != 0) CHECK(std::abs(w.at(r, c)) < 1e-12);
}

TEST_CASE("Haar round trip and orthonormality", "[haar]") {
    std::mt19937_64 rng(31);
    const ComplexField x = test_util::random_field(32, 32, rng);
    const ComplexField w = haar2(x);
    CHECK(std::abs(norm2(w) - norm2(x)) <= 1e-12 * norm2(x));
    CHECK(test_util::rel_l2_error(ihaar2(w), x) < 1e-12);

    const ComplexField w1 = haar2(x, 1);
    CHECK(test_util::rel_l2_error(ihaar2(w1, 1), x) < 1e-12);
}

TEST_CASE("Haar rejects unsupported depths", "[haar]") {
    const ComplexField odd(5, 6);
    CHECK_THROWS_AS(haar2(odd), std::invalid_argument);
    const ComplexField x(4, 4);
    CHECK_THROWS_AS(haar2(x, 3), std::invalid_argument);
    CHECK(max_haar_levels(4, 4) == 2);
    CHECK(max_haar_levels(6, 6) == 1);
    CHECK(max_haar_levels(5, 4) == 0);
}

TEST_CASE("soft threshold on real and complex scalars", "[prox]") {
    ComplexField w(1, 4);
    w.at(0, 0) = cplx(3.0, 0.0);
    w.at(0, 1) = cplx(0.5, 0.0);
    w.at(0, 2) = cplx(3.0, 4.0);
    w.at(0, 3) = cplx(3.0, 4.0);

    const ComplexField a = soft_threshold(w, 1.0);
    CHECK(std::abs(a.at(0, 0) - cplx(2.0, 0.0)) < 1e-15);
    CHECK(a.at(0, 1) == cplx(0.0, 0.0));

    const ComplexField b = soft_threshold(w, 5.0);
    CHECK(b.at(0, 2) == cplx(0.0, 0.0));

    const ComplexField c = soft_threshold(w, 2.5);
    CHECK(std::abs(c.at(0, 3) - cplx(1.5, 2.0)) < 1e-12); // |3+4i| = 5, shrink to 2.5

    CHECK_THROWS_AS(soft_threshold(w, -0.1), std::invalid_argument);
}

TEST_CASE("prox of the conjugate data term", "[prox]") {
    std::mt19937_64 rng(37);
    const ComplexField v = test_util::random_field(8, 8, rng);
    const ComplexField y = test_util::random_field(8, 8, rng);

    SECTION("sigma = 0 is the identity") {
        CHECK(test_util::bit_equal(prox_sigma_fstar(v, y, 0.0), v));
    }
    SECTION("v = y, sigma = 1 gives zero") {
        const ComplexField z = prox_sigma_fstar(y, y, 1.0);
        CHECK(norm2(z) == 0.0);
    }
    SECTION("Moreau identity") {
        const double sigma = 0.7;
        const ComplexField lhs = prox_sigma_fstar(v, y, sigma);
        // v − σ·prox_{F/σ}(v/σ) with prox_{F/σ}(u) = (σu + y)/(σ + 1)
        ComplexField rhs(v.height, v.width);
        for (std::size_t i = 0; i < v.data.size(); ++i) {
            const cplx u = v.data[i] / sigma;
            rhs.data[i] = v.data[i] - sigma * ((sigma * u + y.data[i]) / (sigma + 1.0));
        }
        CHECK(test_util::rel_l2_error(lhs, rhs) < 1e-12);
    }
}

namespace {

/// Brute-force prox via grid search over a scalar objective.
double grid_argmin(double lo, double hi, double pitch, const std::function<double(double)>& f) {
    double best_x = lo, best = f(lo);
    for (double x = lo; x <= hi; x += pitch) {
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

} // namespace

TEST_CASE("scalar prox maps match brute-force minimization", "[prox]") {
    const double pitch = 1e-4;
    // prox_{σF*}: minimize σ(½w² + w·y) + ½(w − v)²
    for (const auto [v, y, sigma] : {std::array<double, 3>{1.3, -0.4, 0.8},
                                     {-0.9, 0.7, 0.3},
                                     {0.2, 0.2, 2.0}}) {
        ComplexField vf(2, 2), yf(2, 2);
        vf.at(0, 0) = v;
        yf.at(0, 0) = y;
        const double got = prox_sigma_fstar(vf, yf, sigma).at(0, 0).real();
        const double expect = grid_argmin(-4.0, 4.0, pitch, [=](double w) {
            return sigma * (0.5 * w * w + w * y) + 0.5 * (w - v) * (w - v);
        });
        CHECK(std::abs(got - expect) <= pitch);
    }
    // soft threshold: minimize t|x| + ½(x − w)²
    for (const auto [w, t] : {std::array<double, 2>{1.7, 0.6}, {-2.2, 1.0}, {0.4, 0.9}}) {
        ComplexField wf(2, 2);
        wf.at(0, 0) = w;
        const double got = soft_threshold(wf, t).at(0, 0).real();
        const double expect = grid_argmin(-4.0, 4.0, pitch, [=](double x) {
            return t * std::abs(x) + 0.5 * (x - w) * (x - w);
        });
        CHECK(std::abs(got - expect) <= pitch);
    }
}

TEST_CASE("prox of the regularizer", "[prox]") {
    std::mt19937_64 rng(41);
    const ComplexField p = test_util::random_field(8, 8, rng);

    SECTION("lambda = 0 is the identity") {
        CHECK(test_util::bit_equal(prox_tau_g(p, 0.9, 0.0), p));
    }
    SECTION("constant input shrinks only the approximation coefficient") {
        ComplexField c(4, 4);
        for (auto& v : c.data) v = cplx(2.0, 0.0);
        const double tau = 0.5, lambda = 0.4; // τλ = 0.2, coefficient is 8
        const ComplexField out = prox_tau_g(c, tau, lambda);
        // single coefficient 4·2 shrinks by τλ, spreads back over 16 pixels
        const double expect = 2.0 - tau * lambda / 4.0;
        for (const cplx& v : out.data) CHECK(std::abs(v - cplx(expect, 0.0)) < 1e-12);
    }
    SECTION("applying with threshold then zero equals applying once") {
        const ComplexField once = prox_tau_g(p, 0.9, 1e-2);
        const ComplexField twice = prox_tau_g(prox_tau_g(p, 0.9, 1e-2), 0.9, 0.0);
        CHECK(test_util::bit_equal(once, twice));
    }
}
