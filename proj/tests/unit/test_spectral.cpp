#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles/random_data.hpp"
#include "sdde/collocation.hpp"
#include "sdde/errors.hpp"
#include "sdde/spectral.hpp"

using namespace sdde;
constexpr double pi = std::numbers::pi;

TEST_CASE("build_basis eigenvalues") {
    const auto plate = SpectralBasis::build(Geometry::Interval, 2, 4);
    CHECK(plate.size() == 4);
    CHECK(plate.mu(0) == doctest::Approx(std::pow(pi, 4)).epsilon(1e-14));
    CHECK(plate.mu(0) == doctest::Approx(97.4091).epsilon(1e-6));

    const auto wave = SpectralBasis::build(Geometry::Interval, 1, 1);
    CHECK(wave.mu(0) == doctest::Approx(9.8696).epsilon(1e-5));

    const auto square = SpectralBasis::build(Geometry::Square, 1, 2);
    REQUIRE(square.size() == 4);
    const double expected[] = {2, 5, 5, 8};
    for (std::size_t i = 0; i < 4; ++i) CHECK(square.mu(i) == doctest::Approx(expected[i] * pi * pi));
    // tie between (1,2) and (2,1) broken lexicographically
    CHECK(square.mode(1).k1 == 1);
    CHECK(square.mode(1).k2 == 2);
    CHECK(square.mode(2).k1 == 2);
}

TEST_CASE("build_basis rejects unsupported input") {
    CHECK_THROWS_AS(SpectralBasis::build(Geometry::Interval, 3, 4), ConfigError);
    CHECK_THROWS_AS(SpectralBasis::build(Geometry::Square, 2, 0), ConfigError);
    CHECK_THROWS_AS(geometry_from_string("disk"), ConfigError);
}

TEST_CASE("mode table sorted and positive") {
    for (int p : {1, 2}) {
        const auto b = SpectralBasis::build(Geometry::Square, p, 6);
        CHECK(b.size() == 36);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(b.mu(i) > 0.0);
            if (i > 0) CHECK(b.mu(i - 1) <= b.mu(i));
        }
    }
}

TEST_CASE("basis functions are orthonormal under fine quadrature") {
    // Midpoint rule with many nodes is exact for trigonometric products of low frequency.
    const auto b = SpectralBasis::build(Geometry::Interval, 1, 5);
    const int nodes = 4000;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            double acc = 0.0;
            for (int q = 0; q < nodes; ++q) {
                const Point2 x{(q + 0.5) / nodes, 0.0};
                acc += b.basis_value(i, x) * b.basis_value(j, x);
            }
            acc /= nodes;
            CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("norm_alpha") {
    const auto wave = SpectralBasis::build(Geometry::Interval, 1, 4);
    CHECK(norm_alpha(wave, std::vector<double>{1, 0, 0, 0}, 0.5) == doctest::Approx(pi));
    CHECK(norm_alpha(wave, std::vector<double>(4, 0.0), 0.7) == 0.0);
    const auto plate = SpectralBasis::build(Geometry::Interval, 2, 2);
    CHECK(norm_alpha(plate, std::vector<double>{1, 1}, 0.5) == doctest::Approx(std::sqrt(17.0) * pi * pi));
}

TEST_CASE("norm_alpha properties") {
    testing::TestRng rng(7);
    const auto b = SpectralBasis::build(Geometry::Square, 2, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto w = rng.normals(b.size());
        const double h0 = norm_alpha(b, w, 0.0);
        CHECK(h0 * h0 == doctest::Approx(inner_product(w, w)).epsilon(1e-14));
        for (double delta : {0.1, 0.25, 0.5}) {
            CHECK(norm_alpha(b, w, 0.5 - delta) <= std::pow(b.mu_min(), -delta) * norm_alpha(b, w, 0.5) * (1 + 1e-12));
        }
        double prev = norm_alpha(b, w, -1.0);
        for (double alpha = -0.75; alpha <= 1.0; alpha += 0.25) {
            const double cur = norm_alpha(b, w, alpha);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("eval_at_point") {
    const auto b = SpectralBasis::build(Geometry::Interval, 1, 4);
    CHECK(eval_at_point(b, std::vector<double>{1, 0, 0, 0}, {0.5, 0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(eval_at_point(b, std::vector<double>{0.3, -1, 2, 4}, {0.0, 0})) < 1e-15);
    CHECK(eval_at_point(b, std::vector<double>{0, 1, 0, 0}, {0.25, 0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(eval_at_point(b, std::vector<double>{1, 0, 0, 0}, {1.5, 0}), DomainError);
    const auto sq = SpectralBasis::build(Geometry::Square, 1, 2);
    CHECK_THROWS_AS(eval_at_point(sq, std::vector<double>(4, 1.0), {0.5, -0.1}), DomainError);
}

TEST_CASE("inner_product") {
    CHECK(inner_product(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(inner_product(std::vector<double>{1, 0}, std::vector<double>{1, 0}) == 1.0);
    CHECK(inner_product(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 11.0);
}

TEST_CASE("collocation transforms") {
    for (Geometry g : {Geometry::Interval, Geometry::Square}) {
        const auto b = SpectralBasis::build(g, 2, 5);
        const CollocationGrid grid(b);
        CHECK(grid.points_per_axis() == 10);

        std::vector<double> e1(b.size(), 0.0);
        e1[0] = 1.0;
        const auto values = grid.to_physical(e1);
        const auto back = grid.to_spectral(values);
        for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(back[k] - e1[k]) < 1e-13);

        const auto zero = grid.to_spectral(grid.to_physical(std::vector<double>(b.size(), 0.0)));
        for (double z : zero) CHECK(z == 0.0);

        testing::TestRng rng(11);
        const auto w = rng.normals(b.size());
        const auto phys = grid.to_physical(w);
        // direct summation oracle at each node
        const double step = 1.0 / (grid.points_per_axis() + 1);
        const std::size_t m = grid.points_per_axis();
        for (std::size_t j = 0; j < phys.size(); ++j) {
            const Point2 x = g == Geometry::Interval ? Point2{(j + 1) * step, 0.0}
                                                     : Point2{(j / m + 1) * step, (j % m + 1) * step};
            CHECK(std::abs(phys[j] - eval_at_point(b, w, x)) < 1e-12);
        }
        const auto round = grid.to_spectral(phys);
        for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(round[k] - w[k]) < 1e-10);
    }
}
