#include "sdde/ode_stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "sdde/errors.hpp"
#include "sdde/integrator.hpp"

namespace sdde {

void ScalarDDE::validate() const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau", "delay must be >= 0");
    if (!(k >= 0.0)) throw ConfigError("k", "damping must be >= 0");
    if (!std::isfinite(a)) throw ConfigError("a", "stiffness must be finite");
}

cplx char_residual(const ScalarDDE& dde, cplx lambda) {
    return lambda * lambda + dde.k * lambda + dde.a + std::exp(-lambda * dde.tau);
}

cplx char_derivative(const ScalarDDE& dde, cplx lambda) {
    return 2.0 * lambda + dde.k - dde.tau * std::exp(-lambda * dde.tau);
}

namespace {

cplx upper(cplx z) { return z.imag() < 0.0 ? std::conj(z) : z; }

// Rightmost root of lambda^2 + k lambda + (a + 1).
cplx quadratic_root(double k, double c) {
    const cplx disc = std::sqrt(cplx(k * k - 4.0 * c, 0.0));
    const cplx r1 = (-k + disc) / 2.0, r2 = (-k - disc) / 2.0;
    return upper(r1.real() >= r2.real() ? r1 : r2);
}

double residual_scale(const ScalarDDE& dde, cplx z) {
    return 1.0 + std::norm(z) + dde.k * std::abs(z) + std::abs(dde.a) + std::abs(std::exp(-z * dde.tau));
}

}  // namespace

std::vector<cplx> collocation_eigenvalues(const ScalarDDE& dde, std::size_t M) {
    if (M < 2) throw std::invalid_argument("collocation size must be >= 2");
    const auto m = static_cast<Eigen::Index>(M);
    // Chebyshev points x_j = cos(j pi / M), theta_j = tau (x_j - 1) / 2; theta_0 = 0, theta_M = -tau.
    Eigen::VectorXd x(m + 1), c(m + 1);
    for (Eigen::Index j = 0; j <= m; ++j) {
        x(j) = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(M));
        c(j) = ((j == 0 || j == m) ? 2.0 : 1.0) * (j % 2 == 0 ? 1.0 : -1.0);
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (Eigen::Index i = 0; i <= m; ++i) {
        for (Eigen::Index j = 0; j <= m; ++j)
            if (i != j) D(i, j) = c(i) / c(j) / (x(i) - x(j));
        D(i, i) = -(D.row(i).sum());
    }
    D *= 2.0 / dde.tau;

    const Eigen::Index n = 2 * (m + 1);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    // Row block 0: x'(0) = A0 x(0) + A1 x(-tau).
    G(0, 1) = 1.0;
    G(1, 0) = -dde.a;
    G(1, 1) = -dde.k;
    G(1, 2 * m) -= 1.0;
    for (Eigen::Index i = 1; i <= m; ++i)
        for (Eigen::Index j = 0; j <= m; ++j) {
            G(2 * i, 2 * j) = D(i, j);
            G(2 * i + 1, 2 * j + 1) = D(i, j);
        }
    Eigen::EigenSolver<Eigen::MatrixXd> es(G, false);
    if (es.info() != Eigen::Success) throw NumericalFailure("collocation eigenvalue solver failed");
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    return ev;
}

std::optional<cplx> newton_root(const ScalarDDE& dde, cplx seed) {
    cplx z = seed;
    for (int it = 0; it < 50; ++it) {
        const cplx f = char_residual(dde, z);
        if (std::abs(f) <= 1e-14 * residual_scale(dde, z)) return upper(z);
        const cplx df = char_derivative(dde, z);
        if (std::abs(df) == 0.0) return std::nullopt;
        const cplx step = f / df;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
            if (std::abs(char_residual(dde, z)) <= 1e-10) return upper(z);
        }
    }
    if (std::abs(char_residual(dde, z)) <= 1e-11) return upper(z);
    return std::nullopt;
}

namespace {

struct Seeded {
    cplx root;
    bool ok = false;
};

// Refines every collocation eigenvalue within `band` of the rightmost one and
// keeps the rightmost converged root.
Seeded seeded_root(const ScalarDDE& dde, std::size_t M, double band = 0.5) {
    auto ev = collocation_eigenvalues(dde, M);
    std::sort(ev.begin(), ev.end(), [](cplx p, cplx q) { return p.real() > q.real(); });
    Seeded best;
    for (const cplx& seed : ev) {
        if (seed.real() < ev.front().real() - band) break;
        if (seed.imag() < 0.0) continue;
        const auto z = newton_root(dde, seed);
        if (z && (!best.ok || z->real() > best.root.real())) best = {*z, true};
    }
    return best;
}

}  // namespace

RootReport rightmost_root(const ScalarDDE& dde, std::size_t M) {
    dde.validate();
    if (M < 16) throw std::invalid_argument("collocation size must be >= 16");
    RootReport rep;
    if (dde.tau == 0.0) {
        rep.lambda = quadratic_root(dde.k, dde.a + 1.0);
        rep.residual = std::abs(char_residual(dde, rep.lambda));
        return rep;
    }
    // Resolve exp(lambda theta) on [-tau, 0]: start with a size growing with tau.
    std::size_t m = M + static_cast<std::size_t>(std::ceil(1.2 * dde.tau));
    Seeded prev = seeded_root(dde, m);
    for (int level = 0; level < 5; ++level) {
        const Seeded next = seeded_root(dde, 2 * m);
        if (prev.ok && next.ok && std::abs(prev.root.real() - next.root.real()) < 1e-8) {
            rep.lambda = next.root.real() >= prev.root.real() ? next.root : prev.root;
            rep.residual = std::abs(char_residual(dde, rep.lambda));
            rep.M = m;
            if (rep.residual <= 1e-10) return rep;
        }
        prev = next;
        m *= 2;
    }
    std::ostringstream msg;
    msg << "rightmost root did not settle (k=" << dde.k << ", a=" << dde.a << ", tau=" << dde.tau << ", last M=" << m
        << ")";
    throw NumericalFailure(msg.str());
}

std::vector<ScanPoint> stability_scan(double k, double a, std::span<const double> taus) {
    if (!std::is_sorted(taus.begin(), taus.end())) throw std::invalid_argument("tau grid must be sorted");
    std::vector<ScanPoint> out(taus.size());
    const auto n = static_cast<std::int64_t>(taus.size());
    std::vector<std::string> errors(taus.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            const auto r = rightmost_root(ScalarDDE{k, a, taus[idx]});
            out[idx] = {taus[idx], r.lambda.real(), r.lambda.imag()};
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalFailure(e);
    return out;
}

TauStar find_tau_star(double k, double a, double tau_max, double grid_step) {
    if (!(tau_max > 0.0) || !(grid_step > 0.0)) throw std::invalid_argument("tau range and step must be positive");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * grid_step;
        if (t > tau_max + 1e-12) break;
        grid.push_back(t);
    }
    const auto scan = stability_scan(k, a, grid);
    return find_tau_star(k, a, scan);
}

TauStar find_tau_star(double k, double a, std::span<const ScanPoint> scan) {
    TauStar out;
    std::size_t hit = scan.size();
    for (std::size_t i = 1; i < scan.size(); ++i)
        if (scan[i - 1].re < 0.0 && scan[i].re > 0.0) {
            hit = i;
            break;
        }
    if (hit == scan.size()) return out;

    double lo = scan[hit - 1].tau, hi = scan[hit].tau;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (rightmost_root(ScalarDDE{k, a, mid}).lambda.real() < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const RootReport at = rightmost_root(ScalarDDE{k, a, 0.5 * (lo + hi)});
    double w = at.lambda.imag(), tau = 0.5 * (lo + hi);
    // Joint Newton on (omega, tau): a - w^2 + cos(w tau) = 0, k w - sin(w tau) = 0.
    for (int it = 0; it < 30; ++it) {
        const double f1 = a - w * w + std::cos(w * tau), f2 = k * w - std::sin(w * tau);
        if (std::hypot(f1, f2) < 1e-15) break;
        const double j11 = -2.0 * w - tau * std::sin(w * tau), j12 = -w * std::sin(w * tau);
        const double j21 = k - tau * std::cos(w * tau), j22 = -w * std::cos(w * tau);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        w -= (f1 * j22 - f2 * j12) / det;
        tau -= (j11 * f2 - j21 * f1) / det;
    }
    out.found = true;
    out.omega = w;
    out.tau = tau;
    out.bracket = hi - lo;
    out.residual = std::abs(char_residual(ScalarDDE{k, a, tau}, cplx(0.0, w)));
    return out;
}

TimeDomainCheck cross_validate(const ScalarDDE& dde, double t_end, double dt) {
    dde.validate();
    if (!(dde.a > 0.0)) throw ConfigError("a", "time-domain check needs a > 0 (mode eigenvalue)");
    if (!(dde.tau > 0.0)) throw ConfigError("tau", "time-domain check needs tau > 0");
    TimeDomainCheck out;
    const RootReport root = rightmost_root(dde);
    out.predicted_re = root.lambda.real();

    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::single_mode(dde.a));
    DelaySpec delay;
    delay.horizon = dde.tau;
    delay.terms.push_back(DelayTerm{LinearResponse{1.0, {}}, ConstantLaw{dde.tau}, PointFunctional{}});
    const Model model = make_model(basis, NonlinearitySpec{}, delay, dde.k, InitialHistory(1, {{0, 1.0, 0, 0, 0}}));
    const Trace trace = simulate(model, StepperConfig{dt, t_end, 1});

    const double omega = std::max(std::abs(root.lambda.imag()), 0.1);
    const double window = std::max({2.0 * dde.tau, 4.0 * std::numbers::pi / omega, 10.0});
    auto envelope = [&](double from, double to) {
        double m = 0.0;
        for (std::size_t j = 0; j < trace.states.size(); ++j) {
            const double t = trace.rows[j].t;
            if (t < from || t > to) continue;
            const auto& s = trace.states[j];
            m = std::max(m, std::hypot(std::sqrt(dde.a) * s.u[0], s.v[0]));
        }
        return m;
    };
    if (!trace.completed()) {
        out.observed_rate = std::numeric_limits<double>::infinity();
    } else {
        const double t0 = 0.25 * t_end, t1 = t_end - window;
        const double e0 = envelope(t0, t0 + window), e1 = envelope(t1, t_end);
        out.observed_rate = (std::log(e1) - std::log(e0)) / (t1 - t0);
    }
    out.agree = (out.predicted_re < 0.0) == (out.observed_rate < 0.0);
    return out;
}

}  // namespace sdde
