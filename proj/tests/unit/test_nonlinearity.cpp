#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "oracles/random_data.hpp"
#include "sdde/errors.hpp"
#include "sdde/nonlinearity.hpp"

using namespace sdde;
constexpr double pi = std::numbers::pi;

namespace {

std::shared_ptr<const SpectralBasis> basis(Geometry g, int p, int n) {
    return std::make_shared<const SpectralBasis>(SpectralBasis::build(g, p, n));
}

NonlinearitySpec berger(double kappa, double mu_b) {
    NonlinearitySpec s;
    s.variant = BergerForce{kappa, mu_b};
    return s;
}

NonlinearitySpec kirchhoff(std::vector<double> coeffs) {
    NonlinearitySpec s;
    s.variant = KirchhoffForce{PolynomialForce{std::move(coeffs)}};
    return s;
}

// Independent midpoint-rule projection of f(u(x)) onto e_k on the interval.
std::vector<double> quadrature_projection(const SpectralBasis& b, const std::vector<double>& u,
                                          double (*f)(double), int nodes = 20000) {
    std::vector<double> out(b.size(), 0.0);
    for (int q = 0; q < nodes; ++q) {
        const double x = (q + 0.5) / nodes;
        double ux = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) ux += u[k] * std::sqrt(2.0) * std::sin(b.mode(k).k1 * pi * x);
        const double fx = f(ux);
        for (std::size_t k = 0; k < b.size(); ++k) out[k] += fx * std::sqrt(2.0) * std::sin(b.mode(k).k1 * pi * x) / nodes;
    }
    return out;
}

double cube(double s) { return s * s * s; }
double quartic_quarter(double s) { return 0.25 * s * s * s * s; }

}  // namespace

TEST_CASE("Berger force and potentials on a single plate mode") {
    const auto b = basis(Geometry::Interval, 2, 4);
    const Nonlinearity force(berger(1.0, 0.0), b);
    const std::vector<double> u{1, 0, 0, 0};
    const auto F = force.eval_F(u);
    // s = lambda_1 = pi^2 and F_1 = kappa s lambda_1 u_1
    CHECK(F[0] == doctest::Approx(std::pow(pi, 4)).epsilon(1e-13));
    for (std::size_t k = 1; k < 4; ++k) CHECK(F[k] == 0.0);
    const auto pot = force.eval_potentials(u);
    CHECK(pot.pi0 == doctest::Approx(std::pow(pi, 4) / 4).epsilon(1e-13));
    CHECK(pot.pi0 == doctest::Approx(24.3523).epsilon(1e-5));
    CHECK(pot.pi1 == 0.0);
}

TEST_CASE("zero state is an equilibrium without load") {
    for (auto spec : {berger(2.0, 1.0), kirchhoff({0, 0, 0, 1})}) {
        const auto b = basis(Geometry::Square, 2, 3);
        const Nonlinearity force(spec, b);
        const std::vector<double> zero(b->size(), 0.0);
        for (double f : force.eval_F(zero)) CHECK(f == 0.0);
        const auto pot = force.eval_potentials(zero);
        CHECK(pot.pi0 == 0.0);
        CHECK(pot.pi1 == 0.0);
    }
}

TEST_CASE("Kirchhoff cubic against quadrature oracle") {
    const auto b = basis(Geometry::Interval, 2, 6);
    const Nonlinearity force(kirchhoff({0, 0, 0, 1}), b);
    std::vector<double> e1(b->size(), 0.0);
    e1[0] = 1.0;
    const auto F = force.eval_F(e1);
    CHECK(F[0] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(F[2] == doctest::Approx(-0.5).epsilon(1e-13));
    const auto oracle = quadrature_projection(*b, e1, cube);
    for (std::size_t k = 0; k < b->size(); ++k) CHECK(std::abs(F[k] - oracle[k]) < 1e-8);

    CHECK(force.eval_potentials(e1).pi0 == doctest::Approx(3.0 / 8.0).epsilon(1e-13));

    testing::TestRng rng(3);
    const auto u = rng.normals(b->size(), 0.5);
    const auto Fu = force.eval_F(u);
    const auto Fo = quadrature_projection(*b, u, cube);
    for (std::size_t k = 0; k < b->size(); ++k) CHECK(std::abs(Fu[k] - Fo[k]) < 1e-8);
    double pi0_oracle = 0.0;
    const int nodes = 20000;
    for (int q = 0; q < nodes; ++q) {
        const double x = (q + 0.5) / nodes;
        double ux = 0.0;
        for (std::size_t k = 0; k < b->size(); ++k) ux += u[k] * std::sqrt(2.0) * std::sin(b->mode(k).k1 * pi * x);
        pi0_oracle += quartic_quarter(ux) / nodes;
    }
    CHECK(force.eval_potentials(u).pi0 == doctest::Approx(pi0_oracle).epsilon(1e-8));
}

TEST_CASE("F* diagonal smoothing") {
    const auto b = basis(Geometry::Interval, 1, 3);
    NonlinearitySpec s;
    s.c_nc = 0.0;
    const std::vector<double> u{1, 2, 3};
    for (double f : Nonlinearity(s, b).eval_Fstar(u)) CHECK(f == 0.0);
    s.c_nc = 2.0;
    s.delta_hat = 0.5;
    const auto id = Nonlinearity(s, b).eval_Fstar(u);
    for (std::size_t k = 0; k < 3; ++k) CHECK(id[k] == doctest::Approx(2.0 * u[k]));
    s.c_nc = 1.0;
    s.delta_hat = 0.25;
    const auto one = Nonlinearity(s, b).eval_Fstar(std::vector<double>{1, 0, 0});
    CHECK(one[0] == doctest::Approx(std::sqrt(pi)));
    CHECK(one[1] == 0.0);
}

TEST_CASE("spec validation") {
    const auto b = basis(Geometry::Interval, 2, 3);
    CHECK_THROWS_AS(Nonlinearity(berger(0.0, 0.0), b), ConfigError);
    CHECK_THROWS_AS(Nonlinearity(kirchhoff({0, 0, 1}), b), ConfigError);
    CHECK_THROWS_AS(Nonlinearity(kirchhoff({0, 0, 0, -1}), b), ConfigError);
    NonlinearitySpec wave;
    wave.variant = WavePolyForce{PolynomialForce{{0, 0, 0, 0, 0, 1}}};
    CHECK_THROWS_AS(Nonlinearity(wave, b), ConfigError);
    NonlinearitySpec s;
    s.delta_hat = 0.7;
    CHECK_THROWS_AS(Nonlinearity(s, b), ConfigError);
}

TEST_CASE("gradient consistency by central differences") {
    testing::TestRng rng(21);
    NonlinearitySpec b_spec = berger(1.5, 3.0);
    NonlinearitySpec k_spec = kirchhoff({0, 2.0, 0.5, 1.0});
    NonlinearitySpec w_spec;
    w_spec.variant = WavePolyForce{PolynomialForce{{0.1, -1.0, 0.0, 1.0}}};
    for (const auto& spec_in : {b_spec, k_spec, w_spec}) {
        for (Geometry g : {Geometry::Interval, Geometry::Square}) {
            const auto b = basis(g, 2, 4);
            NonlinearitySpec spec = spec_in;
            spec.load = rng.normals(b->size(), 0.3);
            spec.c_nc = 0.7;
            spec.delta_hat = 0.25;
            const Nonlinearity force(spec, b);
            for (int trial = 0; trial < 20; ++trial) {
                const auto u = rng.normals(b->size(), 0.1);
                const auto w = rng.normals(b->size(), 0.1);
                const auto F = force.eval_F(u);
                const auto Fs = force.eval_Fstar(u);
                double slope = 0.0;
                for (std::size_t k = 0; k < F.size(); ++k) slope += (F[k] - Fs[k]) * w[k];
                auto potential_at = [&](double eps) {
                    std::vector<double> x = u;
                    for (std::size_t k = 0; k < x.size(); ++k) x[k] += eps * w[k];
                    return force.eval_potentials(x).total();
                };
                const double eps = 1e-4;
                const double fd = (potential_at(eps) - potential_at(-eps)) / (2 * eps);
                CHECK(std::abs(fd - slope) <= 1e-6 * (1.0 + std::abs(slope)));
            }
        }
    }
}

TEST_CASE("Pi0 is nonnegative") {
    testing::TestRng rng(5);
    const auto b = basis(Geometry::Square, 2, 4);
    NonlinearitySpec w_spec;
    w_spec.variant = WavePolyForce{PolynomialForce{{0.0, -3.0, 2.0, 1.0}}};
    for (const auto& spec : {berger(1.0, 50.0), kirchhoff({0, -5, 0, 1}), w_spec}) {
        const Nonlinearity force(spec, b);
        for (int trial = 0; trial < 50; ++trial) CHECK(force.eval_potentials(rng.normals(b->size(), 2.0)).pi0 >= 0.0);
    }
}

TEST_CASE("directional derivative check") {
    testing::TestRng rng(8);
    const auto b = basis(Geometry::Interval, 2, 5);
    const Nonlinearity bf(berger(1.0, 2.0), b);
    const auto u = rng.normals(b->size(), 0.2);
    const auto w = rng.normals(b->size(), 0.2);
    const double r1 = directional_derivative_check(bf, u, w, 1e-4);
    const double r2 = directional_derivative_check(bf, u, w, 5e-5);
    CHECK(r1 > 0.0);
    // O(eps): halving eps halves the defect
    CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(directional_derivative_check(bf, u, std::vector<double>(b->size(), 0.0), 1e-4) == 0.0);

    const Nonlinearity kf(kirchhoff({0, 0, 0, 1}), b);
    const double eps = 1e-3;
    const double r0 = directional_derivative_check(kf, std::vector<double>(b->size(), 0.0), w, eps);
    CHECK(r0 <= eps * eps * 10.0);
}

TEST_CASE("local Lipschitz constant grows with the ball radius") {
    testing::TestRng rng(13);
    const auto b = basis(Geometry::Interval, 2, 6);
    const Nonlinearity force(berger(1.0, 0.0), b);
    double previous = 0.0;
    for (double radius : {0.5, 1.0, 2.0, 4.0}) {
        double lip = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            auto u1 = rng.normals(b->size());
            auto u2 = rng.normals(b->size());
            const double n1 = norm_alpha(*b, u1, 0.5), n2 = norm_alpha(*b, u2, 0.5);
            for (auto& x : u1) x *= radius / n1 * rng.uniform();
            for (auto& x : u2) x *= radius / n2 * rng.uniform();
            const auto F1 = force.eval_F(u1), F2 = force.eval_F(u2);
            std::vector<double> dF(b->size()), du(b->size());
            for (std::size_t k = 0; k < du.size(); ++k) {
                dF[k] = F1[k] - F2[k];
                du[k] = u1[k] - u2[k];
            }
            lip = std::max(lip, std::sqrt(inner_product(dF, dF)) / norm_alpha(*b, du, 0.5));
            // subcritical: ratio against a weaker norm stays finite
            CHECK(std::isfinite(std::sqrt(inner_product(dF, dF)) / norm_alpha(*b, du, 0.25)));
        }
        CHECK(std::isfinite(lip));
        CHECK(lip >= previous);
        previous = lip;
    }
}
