#pragma once

#include <array>

namespace sdde {

// Row-major 2x2 matrix.
using Mat2 = std::array<double, 4>;

// Exact exponential-integrator data for one mode of U' = B U + N(t),
// B = [[0, 1], [-mu, -k]]:
//   E    = exp(B dt)
//   phi1 = B^{-1} (E - I)              = int_0^dt exp(B s) ds
//   phi2 = B^{-2} (E - I - B dt)       = int_0^dt exp(B (dt - s)) s ds
struct ModePropagator {
    Mat2 E{};
    Mat2 phi1{};
    Mat2 phi2{};
};

enum class DampingRegime { Under, Critical, Over };

DampingRegime damping_regime(double mu, double damping) noexcept;

// Closed forms for the three damping regimes; the critical case is taken when
// |k^2 - 4 mu| <= 1e-8 * 4 mu. Short steps (dt * max(sqrt(mu), k) < 0.1) use
// the Taylor series to avoid cancellation in the B^{-1}, B^{-2} forms.
ModePropagator mode_propagator(double mu, double damping, double dt);

}  // namespace sdde
