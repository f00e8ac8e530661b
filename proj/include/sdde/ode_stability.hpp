#pragma once

// Rightmost characteristic roots of u'' + k u' + a u + u(t - tau) = 0,
// Delta(lambda) = lambda^2 + k lambda + a + exp(-lambda tau).

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace sdde {

using cplx = std::complex<double>;

struct ScalarDDE {
    double k = 0.0;
    double a = 0.0;
    double tau = 0.0;

    void validate() const;
};

cplx char_residual(const ScalarDDE& dde, cplx lambda);
cplx char_derivative(const ScalarDDE& dde, cplx lambda);

struct RootReport {
    cplx lambda;              // Im >= 0 representative of the conjugate pair
    double residual = 0.0;    // |Delta(lambda)|
    std::size_t M = 0;        // collocation size of the accepted seed (0 for tau = 0)
};

// Chebyshev collocation of the solution generator on [-tau, 0], seeded
// Newton refinement, M doubled until Re lambda agrees to 1e-8.
// Throws NumericalFailure when Newton or the M-refinement does not settle.
RootReport rightmost_root(const ScalarDDE& dde, std::size_t M = 16);

// Eigenvalues of the 2(M+1) collocation matrix.
std::vector<cplx> collocation_eigenvalues(const ScalarDDE& dde, std::size_t M);

// Newton on Delta from `seed`; nullopt when it fails within 50 iterations.
std::optional<cplx> newton_root(const ScalarDDE& dde, cplx seed);

struct TauStar {
    bool found = false;
    double tau = 0.0;
    double omega = 0.0;
    double residual = 0.0;  // |Delta(i omega)| at the polished crossing
    double bracket = 0.0;   // final bisection width
};

// First stability switch (max Re lambda from < 0 to > 0) on [0, tau_max].
TauStar find_tau_star(double k, double a, double tau_max = 50.0, double grid_step = 0.5);

struct ScanPoint {
    double tau = 0.0;
    double re = 0.0;
    double im = 0.0;
};
// `taus` must be sorted ascending.
std::vector<ScanPoint> stability_scan(double k, double a, std::span<const double> taus);

// Same search reusing a finished scan.
TauStar find_tau_star(double k, double a, std::span<const ScanPoint> scan);

struct TimeDomainCheck {
    double predicted_re = 0.0;
    double observed_rate = 0.0;  // log envelope growth per unit time
    bool agree = false;
};

// Integrates the single-mode delay model (mu = a, G = identity, constant tau)
// and compares the envelope trend with the sign of the rightmost root.
TimeDomainCheck cross_validate(const ScalarDDE& dde, double t_end = 200.0, double dt = 0.01);

}  // namespace sdde
