#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles/models.hpp"
#include "sdde/diagnostics.hpp"
#include "sdde/errors.hpp"

using namespace sdde;
using sdde::testing::berger_sigmoid_beam;
using sdde::testing::linear_mode;
using sdde::testing::loaded_berger_plate;

namespace {

// Damped oscillator from u = 1, v = 0 on theta <= 0.
struct DampedOscillator {
    double mu, k;
    double omega() const { return std::sqrt(mu - k * k / 4); }
    double u(double t) const {
        if (t <= 0) return 1.0;
        return std::exp(-k * t / 2) * (std::cos(omega() * t) + k / (2 * omega()) * std::sin(omega() * t));
    }
    double v(double t) const {
        if (t <= 0) return 0.0;
        return -mu / omega() * std::exp(-k * t / 2) * std::sin(omega() * t);
    }
};

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double hstep = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * hstep);
    return s * hstep / 3.0;
}

}  // namespace

TEST_CASE("energy residual on trivial solutions") {
    const Model zero = linear_mode(4.0, 1.0, InitialHistory(1, {}));
    const auto tz = simulate(zero, StepperConfig{0.01, 2.0, 1});
    const auto rz = energy_residual(zero, tz);
    CHECK(rz.max_abs == 0.0);

    const Model conservative = linear_mode(9.0, 0.0, InitialHistory(1, {{0, 0.5, 0, 0, 0}}));
    const auto tc = simulate(conservative, StepperConfig{0.01, 10.0, 1});
    CHECK(energy_residual(conservative, tc).max_abs <= 1e-10);
}

TEST_CASE("energy ledger structure") {
    const Model m = berger_sigmoid_beam();
    const auto trace = simulate(m, StepperConfig{1e-3, 1.0, 1});
    REQUIRE(trace.completed());
    const auto L = energy_ledger(m, trace);
    REQUIRE(L.t.size() == trace.rows.size());
    for (std::size_t j = 0; j < L.t.size(); ++j) CHECK(L.t[j] == trace.rows[j].t);
    CHECK(L.residual[0] == 0.0);
    for (std::size_t j = 1; j < L.t.size(); ++j) CHECK(L.damping_work[j] >= L.damping_work[j - 1]);
}

TEST_CASE("energy residual converges at second order") {
    const Model m = berger_sigmoid_beam();
    const auto coarse = simulate(m, StepperConfig{1e-3, 2.0, 1});
    const auto fine = simulate(m, StepperConfig{5e-4, 2.0, 1});
    REQUIRE(coarse.completed());
    REQUIRE(fine.completed());
    const double ratio = energy_residual(m, coarse).max_abs / energy_residual(m, fine).max_abs;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("Lyapunov parameters") {
    LyapunovParams p;
    for (double k : {0.1, 1.0, std::sqrt(2.0), 10.0}) {
        CHECK(p.gamma(k) * k < 0.5);
        CHECK(p.gamma(k) < 0.5);
    }
    CHECK(LyapunovParams::mu(2.0) == 0.5);
    LyapunovParams bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(1.0), ConfigError);
}

TEST_CASE("Lyapunov functional of the zero solution vanishes") {
    const Model zero = linear_mode(4.0, 1.0, InitialHistory(1, {}));
    const auto trace = simulate(zero, StepperConfig{0.01, 1.0, 1});
    for (double v : lyapunov_series(zero, trace)) CHECK(v == 0.0);
}

TEST_CASE("Lyapunov memory term matches nested quadrature of the closed form") {
    const DampedOscillator osc{4.0, 1.0};
    const double h = 0.5, dt = 1e-3;
    const Model m = linear_mode(osc.mu, osc.k, InitialHistory(1, {{0, 1.0, 0, 0, 0}}), h);
    const auto trace = simulate(m, StepperConfig{dt, 3.0, 1});
    const auto V = lyapunov_series(m, trace);
    const LyapunovParams p;
    const double gamma = p.gamma(osc.k), mu_l = LyapunovParams::mu(osc.k);
    for (double t : {0.0, 0.2, 0.5, 1.3, 3.0}) {
        const auto j = static_cast<std::size_t>(std::llround(t / dt));
        const double inner_outer = simpson(
            [&](double s) { return simpson([&](double xi) { return std::pow(osc.v(xi), 2); }, t - s, t, 200); }, 0.0,
            h, 200);
        const double u = osc.u(t), v = osc.v(t);
        const double expected = 0.5 * (v * v + osc.mu * u * u) + gamma * u * v + mu_l / h * inner_outer;
        CAPTURE(t);
        CHECK(V[j] == doctest::Approx(expected).epsilon(1e-5));
    }
}

TEST_CASE("equivalence belt holds with c = 0 for linear dynamics") {
    const Model m = linear_mode(4.0, 1.0, InitialHistory(1, {{0, 1.0, 0.5, 0.2, 3.0}}), 0.3);
    const auto trace = simulate(m, StepperConfig{1e-3, 5.0, 1});
    const auto belt = equivalence_belt(m, trace);
    CHECK(belt.c_lower <= 0.0);
    CHECK(belt.c_upper <= 0.0);
    CHECK(belt.max_E > 0.0);
}

TEST_CASE("Lyapunov functional decreases along a dissipative trajectory") {
    const Model m = loaded_berger_plate();
    const auto trace = simulate(m, StepperConfig{1e-3, 10.0, 1000});
    REQUIRE(trace.completed());
    const auto V = lyapunov_series(m, trace);
    CHECK(V.back() <= V.front());
    const auto belt = equivalence_belt(m, trace);
    CHECK(std::isfinite(belt.c_lower));
    CHECK(std::isfinite(belt.c_upper));
}

TEST_CASE("dissipativity sweep") {
    SUBCASE("linear decay gives a vanishing radius") {
        const Model m = linear_mode(4.0, 1.0, InitialHistory(1, {{0, 1.0, 0, 0, 0}}));
        const double ks[] = {1.0}, hs[] = {0.1};
        const auto table = dissipativity_sweep(m, ks, hs, StepperConfig{1e-2, 50.0, 1});
        REQUIRE(table.size() == 1);
        CHECK(table[0].R < 1e-6);
    }
    SUBCASE("Berger with sigmoid delay: radius uniform in k and stable under halving h") {
        const Model m = loaded_berger_plate();
        const double ks[] = {2.0, 4.0, 8.0}, hs[] = {0.05, 0.025};
        const auto table = dissipativity_sweep(m, ks, hs, StepperConfig{1e-3, 30.0, 1});
        REQUIRE(table.size() == 6);
        CHECK(table[0].k == 2.0);
        CHECK(table[1].h == 0.025);
        double lo = 1e300, hi = 0.0;
        for (const auto& e : table) {
            CHECK(e.status == TraceStatus::Completed);
            if (e.h == 0.05) {
                lo = std::min(lo, e.R);
                hi = std::max(hi, e.R);
            }
        }
        CHECK(hi / lo <= 1.15);
        for (std::size_t i = 0; i < table.size(); i += 2) CHECK(table[i + 1].R <= 1.1 * table[i].R);
    }
}

TEST_CASE("quasi-stability fit") {
    SUBCASE("identical data is degenerate") {
        const Model m = loaded_berger_plate();
        const auto fit = quasi_stability_fit(m, *m.initial, *m.initial, StepperConfig{1e-3, 1.0, 10});
        CHECK(fit.degenerate);
    }
    SUBCASE("linear damped modes decay at rate k") {
        auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(Geometry::Interval, 2, 3));
        DelaySpec d;
        d.horizon = 0.1;
        const double k = 1.5;
        const Model m = make_model(basis, NonlinearitySpec{}, d, k, InitialHistory(3, {{0, 0.5, 0, 0, 0}}));
        const InitialHistory other(3, {{0, 0.5, 0, 0, 0}, {1, 1e-3, 0, 0, 0}, {2, -1e-3, 0, 0, 0}});
        const auto fit = quasi_stability_fit(m, *m.initial, other, StepperConfig{1e-3, 20.0, 10});
        CHECK(!fit.degenerate);
        CHECK(fit.lambda == doctest::Approx(k).epsilon(0.1));
    }
    SUBCASE("Berger plate pair") {
        const Model m = loaded_berger_plate();
        const InitialHistory psi(m.basis->size(), {{0, 1.0, 0, 0, 0}, {2, -0.5, 1.0, 0, 0}});
        const double w = w_norm(psi, m.horizon(), *m.basis);
        const auto fit = quasi_stability_fit(m, *m.initial, m.initial->plus(psi, 1e-3 / w), StepperConfig{1e-3, 20.0, 10});
        CHECK(!fit.degenerate);
        CHECK(fit.lambda > 0.0);
        CHECK(std::isfinite(fit.C2));
        CHECK(fit.floor >= 0.0);
        CHECK(fit.floor <= fit.C2 * fit.driver_max * fit.driver_max);
        CHECK(fit.initial_distance_sq == doctest::Approx(1e-6));
    }
}

TEST_CASE("Lipschitz ratios") {
    const double eps[] = {1e-2, 1e-3, 1e-4};
    SUBCASE("linear dynamics: ratio independent of eps") {
        const Model m = linear_mode(9.0, 0.5, InitialHistory(1, {{0, 1.0, 0, 0, 0}}));
        const InitialHistory psi(1, {{0, 0.3, 1.0, 0, 0}});
        const auto res = lipschitz_ratio(m, *m.initial, psi, eps, StepperConfig{1e-3, 2.0, 1});
        CHECK(res.spread == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(res.within_factor_two);
    }
    SUBCASE("Berger with delay stays within a factor of two") {
        const Model m = berger_sigmoid_beam();
        const InitialHistory psi(m.basis->size(), {{0, 0.1, 0, 0, 0}, {1, 0.0, 0.2, 0, 0}});
        const auto res = lipschitz_ratio(m, *m.initial, psi, eps, StepperConfig{1e-3, 2.0, 10});
        CHECK(res.within_factor_two);
    }
    SUBCASE("zero direction is rejected") {
        const Model m = linear_mode(9.0, 0.5, InitialHistory(1, {{0, 1.0, 0, 0, 0}}));
        CHECK_THROWS_AS(lipschitz_ratio(m, *m.initial, InitialHistory(1, {}), eps, StepperConfig{1e-3, 1.0, 1}),
                        std::invalid_argument);
    }
}

TEST_CASE("equation residual") {
    SUBCASE("exact linear dynamics") {
        const Model m = linear_mode(1.0, 0.5, InitialHistory(1, {{0, 1.0, 0, 0, 0}}));
        const auto trace = simulate(m, StepperConfig{1e-4, 0.3, 1});
        CHECK(equation_residual(m, trace, 0.2) <= 1e-8);
    }
    SUBCASE("zero solution") {
        const Model m = berger_sigmoid_beam().with_initial(InitialHistory(4, {}));
        const auto trace = simulate(m, StepperConfig{1e-3, 0.25, 1});
        CHECK(equation_residual(m, trace, 0.2) == 0.0);
    }
    SUBCASE("too early") {
        const Model m = berger_sigmoid_beam();
        const auto trace = simulate(m, StepperConfig{1e-3, 0.25, 1});
        CHECK_THROWS_AS(equation_residual(m, trace, 0.101), std::invalid_argument);
    }
    SUBCASE("second order under step halving") {
        const Model m = berger_sigmoid_beam();
        const auto a = simulate(m, StepperConfig{1e-3, 0.201, 1});
        const auto b = simulate(m, StepperConfig{5e-4, 0.2005, 1});
        const double ratio = equation_residual(m, a, 0.2) / equation_residual(m, b, 0.2);
        CHECK(ratio >= 3.0);
        CHECK(ratio <= 5.0);
    }
}

TEST_CASE("line fit") {
    const double x[] = {0, 1, 2, 3}, y[] = {1, 3, 5, 7};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rms == doctest::Approx(0.0));
}
