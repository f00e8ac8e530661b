#include "sdde/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "sdde/errors.hpp"

namespace sdde {

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

ModePropagator taylor(double mu, double k, double dt) {
    // E = sum X^n/n!, phi1 = dt sum X^n/(n+1)!, phi2 = dt^2 sum X^n/(n+2)!, X = B dt.
    const Mat2 x{0.0, dt, -mu * dt, -k * dt};
    Mat2 power{1.0, 0.0, 0.0, 1.0};
    ModePropagator p{};
    double fact = 1.0;  // n!
    for (int n = 0; n < 24; ++n) {
        const double c0 = 1.0 / fact;
        const double c1 = c0 / (n + 1);
        const double c2 = c1 / (n + 2);
        for (int i = 0; i < 4; ++i) {
            p.E[i] += c0 * power[i];
            p.phi1[i] += c1 * dt * power[i];
            p.phi2[i] += c2 * dt * dt * power[i];
        }
        power = mul(power, x);
        fact *= (n + 1);
    }
    return p;
}

}  // namespace

DampingRegime damping_regime(double mu, double damping) noexcept {
    const double disc = damping * damping - 4.0 * mu;
    if (std::abs(disc) <= 1e-8 * 4.0 * mu) return DampingRegime::Critical;
    return disc < 0.0 ? DampingRegime::Under : DampingRegime::Over;
}

ModePropagator mode_propagator(double mu, double damping, double dt) {
    if (!(mu > 0.0) || !(dt > 0.0) || !(damping >= 0.0))
        throw ConfigError("propagator", "need mu > 0, dt > 0, k >= 0");
    if (dt * std::max(std::sqrt(mu), damping) < 0.1) return taylor(mu, damping, dt);

    // exp(B t) = e^{-k t/2} [ C I + S (B + k/2 I) ] with
    //   under:    C = cos(w t),  S = sin(w t)/w,   w = sqrt(mu - k^2/4)
    //   over:     C = cosh(w t), S = sinh(w t)/w,  w = sqrt(k^2/4 - mu)
    //   critical: C = 1,         S = t
    const double half = 0.5 * damping;
    double c = 1.0, s = dt;
    switch (damping_regime(mu, damping)) {
        case DampingRegime::Under: {
            const double w = std::sqrt(mu - half * half);
            c = std::cos(w * dt);
            s = std::sin(w * dt) / w;
            break;
        }
        case DampingRegime::Over: {
            const double w = std::sqrt(half * half - mu);
            c = std::cosh(w * dt);
            s = std::sinh(w * dt) / w;
            break;
        }
        case DampingRegime::Critical: break;
    }
    const double decay = std::exp(-half * dt);
    ModePropagator p{};
    p.E = {decay * (c + half * s), decay * s, -decay * mu * s, decay * (c - half * s)};

    // B^{-1} = (1/mu) [[-k, -1], [mu, 0]]
    const Mat2 binv{-damping / mu, -1.0 / mu, 1.0, 0.0};
    const Mat2 e_minus_i{p.E[0] - 1.0, p.E[1], p.E[2], p.E[3] - 1.0};
    p.phi1 = mul(binv, e_minus_i);
    const Mat2 phi1_minus{p.phi1[0] - dt, p.phi1[1], p.phi1[2], p.phi1[3] - dt};
    p.phi2 = mul(binv, phi1_minus);
    return p;
}

}  // namespace sdde
