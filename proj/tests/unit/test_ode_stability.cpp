#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles/random_data.hpp"
#include "sdde/errors.hpp"
#include "sdde/ode_stability.hpp"

using namespace sdde;

namespace {

// Winding number of Delta around the rectangle [re_lo, re_hi] x [-im_hi, im_hi].
int zeros_in_rectangle(const ScalarDDE& dde, double re_lo, double re_hi, double im_hi, int per_side = 20000) {
    const cplx corners[] = {{re_lo, -im_hi}, {re_hi, -im_hi}, {re_hi, im_hi}, {re_lo, im_hi}, {re_lo, -im_hi}};
    double total = 0.0;
    cplx prev = char_residual(dde, corners[0]);
    for (int side = 0; side < 4; ++side) {
        for (int i = 1; i <= per_side; ++i) {
            const cplx z = corners[side] + (corners[side + 1] - corners[side]) * (double(i) / per_side);
            const cplx w = char_residual(dde, z);
            total += std::arg(w / prev);
            prev = w;
        }
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

struct Crossing {
    double omega, tau;
};

// Purely imaginary roots i omega: (omega^2 - a)^2 + k^2 omega^2 = 1, and the
// smallest tau > 0 with cos(omega tau) = omega^2 - a, sin(omega tau) = k omega.
std::vector<Crossing> imaginary_crossings(double k, double a) {
    const double b = k * k - 2 * a, c = a * a - 1;
    const double disc = b * b - 4 * c;
    std::vector<Crossing> out;
    if (disc < 0) return out;
    for (double x : {(-b + std::sqrt(disc)) / 2, (-b - std::sqrt(disc)) / 2}) {
        if (x <= 0) continue;
        const double w = std::sqrt(x);
        double phase = std::atan2(k * w, x - a);
        if (phase <= 0) phase += 2 * std::numbers::pi;
        out.push_back({w, phase / w});
    }
    return out;
}

}  // namespace

TEST_CASE("characteristic function values") {
    CHECK(std::abs(char_residual({1.0, 2.0, 0.0}, 0.0) - cplx(3.0)) < 1e-15);
    CHECK(std::abs(char_residual({1.0, 2.0, 5.0}, 0.0) - cplx(3.0)) < 1e-15);
    const ScalarDDE d{0.7, 1.3, 2.1};
    const cplx z{0.2, 1.4};
    const cplx expected = z * z + 0.7 * z + 1.3 + std::exp(-z * 2.1);
    CHECK(std::abs(char_residual(d, z) - expected) < 1e-14);
    const double hstep = 1e-6;
    const cplx fd = (char_residual(d, z + hstep) - char_residual(d, z - hstep)) / (2 * hstep);
    CHECK(std::abs(char_derivative(d, z) - fd) < 1e-8);
}

TEST_CASE("real and imaginary parts on the imaginary axis") {
    const double k = 1.1, a = 1.7, tau = 3.3;
    for (double w = 0.0; w <= 4.0; w += 0.25) {
        const cplx r = char_residual({k, a, tau}, {0.0, w});
        CHECK(r.real() == doctest::Approx(-w * w + a + std::cos(w * tau)));
        CHECK(r.imag() == doctest::Approx(k * w - std::sin(w * tau)));
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(ScalarDDE({-1.0, 2.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(ScalarDDE({1.0, 2.0, -1.0}).validate(), ConfigError);
}

TEST_CASE("tau = 0 reduces to the quadratic") {
    const auto r = rightmost_root({2.0, 0.0, 0.0});
    CHECK(r.lambda.real() == doctest::Approx(-1.0));
    CHECK(std::abs(r.lambda.imag()) < 1e-12);
    const auto s = rightmost_root({1.0, 2.0, 0.0});
    CHECK(s.lambda.real() == doctest::Approx(-0.5));
    CHECK(s.lambda.imag() == doctest::Approx(std::sqrt(11.0) / 2));
}

TEST_CASE("rightmost root examples") {
    SUBCASE("k = 3, a = 2, tau = 5 is stable") {
        const auto r = rightmost_root({3.0, 2.0, 5.0});
        CHECK(r.lambda.real() < 0.0);
        CHECK(r.residual < 1e-10);
    }
    SUBCASE("k = 1, a = 2, tau = 10 is stable") {
        // (omega^2 - 2)^2 + omega^2 = 1 has no real solution, so no root
        // reaches the imaginary axis for any delay.
        const auto r = rightmost_root({1.0, 2.0, 10.0});
        CHECK(r.lambda.real() < 0.0);
    }
    SUBCASE("k = 0.5, a = 2, tau = 10 is unstable") {
        const auto r = rightmost_root({0.5, 2.0, 10.0});
        CHECK(r.lambda.real() > 0.0);
        CHECK(r.residual < 1e-10);
    }
}

TEST_CASE("no characteristic zeros to the right of the reported root") {
    const ScalarDDE cases[] = {{3.0, 2.0, 5.0}, {1.0, 2.0, 10.0}, {0.5, 2.0, 10.0}, {0.2, 1.5, 2.0}, {2.0, 1.1, 0.7}};
    for (const auto& d : cases) {
        CAPTURE(d.k);
        CAPTURE(d.tau);
        const auto r = rightmost_root(d);
        CHECK(zeros_in_rectangle(d, r.lambda.real() + 0.01, 6.0, 6.0) == 0);
        CHECK(zeros_in_rectangle(d, r.lambda.real() - 0.01, 6.0, 6.0) >= 1);
    }
}

TEST_CASE("collocation eigenvalues approximate characteristic roots") {
    const ScalarDDE d{0.5, 2.0, 3.0};
    const auto eig = collocation_eigenvalues(d, 24);
    CHECK(eig.size() == 50);
    std::size_t accurate = 0;
    for (const auto& z : eig)
        if (std::abs(z) < 3.0 && std::abs(char_residual(d, z)) < 1e-6) ++accurate;
    CHECK(accurate >= 4);
}

TEST_CASE("Newton refinement") {
    const ScalarDDE d{0.5, 2.0, 10.0};
    const auto r = rightmost_root(d);
    const auto polished = newton_root(d, r.lambda + cplx(0.01, -0.01));
    REQUIRE(polished.has_value());
    CHECK(std::abs(*polished - r.lambda) < 1e-10);
}

TEST_CASE("stability switch against the imaginary-axis oracle") {
    SUBCASE("k = 0.5, a = 2") {
        const auto crossings = imaginary_crossings(0.5, 2.0);
        REQUIRE(crossings.size() == 2);
        const auto star = find_tau_star(0.5, 2.0);
        REQUIRE(star.found);
        CHECK(star.tau == doctest::Approx(crossings[0].tau).epsilon(1e-9));
        CHECK(star.omega == doctest::Approx(crossings[0].omega).epsilon(1e-9));
        CHECK(star.residual < 1e-10);
        CHECK(rightmost_root({0.5, 2.0, star.tau - 0.01}).lambda.real() < 0.0);
        CHECK(rightmost_root({0.5, 2.0, star.tau + 0.01}).lambda.real() > 0.0);
    }
    SUBCASE("k = 3, a = 2 never switches") {
        CHECK(imaginary_crossings(3.0, 2.0).empty());
        CHECK_FALSE(find_tau_star(3.0, 2.0, 20.0).found);
    }
    SUBCASE("k = 1, a = 2 never switches") {
        CHECK(imaginary_crossings(1.0, 2.0).empty());
        CHECK_FALSE(find_tau_star(1.0, 2.0, 20.0).found);
    }
}

TEST_CASE("scan") {
    const double taus[] = {0.0};
    const auto scan = stability_scan(2.0, 0.0, taus);
    REQUIRE(scan.size() == 1);
    CHECK(scan[0].re == doctest::Approx(-1.0));

    const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const auto s2 = stability_scan(0.5, 2.0, grid);
    const auto star = find_tau_star(0.5, 2.0, s2);
    REQUIRE(star.found);
    CHECK(star.tau == doctest::Approx(0.5812138671872566).epsilon(1e-9));
}

TEST_CASE("time-domain cross validation") {
    sdde::testing::TestRng rng(7);
    int checked = 0;
    while (checked < 4) {
        const ScalarDDE d{rng.uniform(0.1, 3.0), rng.uniform(1.1, 4.0), rng.uniform(0.5, 6.0)};
        const auto c = cross_validate(d, 150.0, 0.01);
        if (std::abs(c.predicted_re) < 0.02) continue;
        CAPTURE(d.k);
        CAPTURE(d.a);
        CAPTURE(d.tau);
        CHECK(c.agree);
        CHECK(c.observed_rate == doctest::Approx(c.predicted_re).epsilon(0.2));
        ++checked;
    }
}
