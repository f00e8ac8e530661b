#pragma once

// Non-delayed force F = Pi' + F* with the potential split Pi = Pi0 + Pi1.
//
//   Berger:    Pi0 = kappa/4 s^2,  Pi1 = -mu_B/2 s - <h,u>,  s = ||grad u||^2
//   Kirchhoff: F = f(u) - h with f an odd-degree polynomial, leading coefficient > 0
//   WavePoly:  as Kirchhoff, degree <= 3
//
// Pi0 collects the leading term of the polynomial antiderivative (nonnegative
// when the degree of f is odd); the remaining terms and the load go to Pi1.
// F*_k = c_nc mu_k^{1/2 - delta_hat} u_k is the nonconservative part.

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sdde/collocation.hpp"
#include "sdde/spectral.hpp"

namespace sdde {

struct NoForce {};

struct BergerForce {
    double kappa = 1.0;
    double mu_b = 0.0;
};

// f(s) = sum_j coeffs[j] s^j
struct PolynomialForce {
    std::vector<double> coeffs;

    int degree() const noexcept;
    double operator()(double s) const noexcept;
    double antiderivative(double s) const noexcept;
    double leading_antiderivative(double s) const noexcept;
};

struct KirchhoffForce {
    PolynomialForce f;
};

struct WavePolyForce {
    PolynomialForce f;
};

using ForceVariant = std::variant<NoForce, BergerForce, KirchhoffForce, WavePolyForce>;

struct NonlinearitySpec {
    ForceVariant variant = NoForce{};
    ModeVector load;          // h(x) in mode coefficients; empty means zero
    double c_nc = 0.0;        // strength of F*
    double delta_hat = 0.5;   // F* smoothing exponent shift, in (0, 1/2]

    // Throws ConfigError on violated invariants (kappa > 0, leading coefficient > 0, ...).
    void validate() const;
};

struct Potentials {
    double pi0 = 0.0;
    double pi1 = 0.0;
    double total() const noexcept { return pi0 + pi1; }
};

class Nonlinearity {
public:
    Nonlinearity(NonlinearitySpec spec, std::shared_ptr<const SpectralBasis> basis);

    const NonlinearitySpec& spec() const noexcept { return spec_; }
    const SpectralBasis& basis() const noexcept { return *basis_; }
    bool is_zero() const noexcept;

    // Full force F(u) = Pi'(u) + F*(u). Throws BlowUp on non-finite output.
    void eval_F(std::span<const double> u, std::span<double> out) const;
    ModeVector eval_F(std::span<const double> u) const;

    // Gradient of the potential, Pi'(u) = F(u) - F*(u).
    ModeVector eval_gradient(std::span<const double> u) const;

    void eval_Fstar(std::span<const double> u, std::span<double> out) const;
    ModeVector eval_Fstar(std::span<const double> u) const;

    Potentials eval_potentials(std::span<const double> u) const;

private:
    void add_gradient(std::span<const double> u, std::span<double> out) const;

    NonlinearitySpec spec_;
    std::shared_ptr<const SpectralBasis> basis_;
    std::optional<CollocationGrid> grid_;
    ModeVector fstar_scale_;
};

// |Pi(u + eps w) - Pi(u) - eps <Pi'(u), w>| / eps
double directional_derivative_check(const Nonlinearity& force, std::span<const double> u,
                                    std::span<const double> w, double eps);

}  // namespace sdde
