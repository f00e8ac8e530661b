#pragma once

// Spectral representation of the positive operator A on a tensor-sine geometry.
//
// Interval: Omega = (0,1), e_k(x) = sqrt(2) sin(k pi x).
// Square:   Omega = (0,1)^2, e_k(x) = 2 sin(k1 pi x1) sin(k2 pi x2).
// Point:    a single mode with prescribed eigenvalue mu (scalar delay ODEs).
//
// A = (-Delta)^p with hinged (Dirichlet/Navier) conditions, so every mode is an
// exact eigenfunction: lambda_k = pi^2 |k|^2 and mu_k = lambda_k^p.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sdde {

enum class Geometry { Interval, Square, Point };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

using ModeVector = std::vector<double>;
using Point2 = std::array<double, 2>;

struct PhasePoint {
    ModeVector u;  // displacement coefficients
    ModeVector v;  // velocity coefficients

    PhasePoint() = default;
    explicit PhasePoint(std::size_t n) : u(n, 0.0), v(n, 0.0) {}
    PhasePoint(ModeVector u_, ModeVector v_) : u(std::move(u_)), v(std::move(v_)) {}

    std::size_t size() const noexcept { return u.size(); }
    bool finite() const noexcept;
};

struct ModeIndex {
    int k1 = 1;
    int k2 = 0;  // 0 for 1D and Point geometries
    double lambda = 0.0;  // Laplacian eigenvalue
    double mu = 0.0;      // operator eigenvalue
};

class SpectralBasis {
public:
    static SpectralBasis build(Geometry geometry, int power, int modes_per_axis);
    static SpectralBasis single_mode(double mu);

    Geometry geometry() const noexcept { return geometry_; }
    int power() const noexcept { return power_; }
    int modes_per_axis() const noexcept { return n_; }
    std::size_t size() const noexcept { return modes_.size(); }

    const std::vector<ModeIndex>& modes() const noexcept { return modes_; }
    const ModeIndex& mode(std::size_t i) const { return modes_.at(i); }
    double mu(std::size_t i) const noexcept { return modes_[i].mu; }
    double lambda(std::size_t i) const noexcept { return modes_[i].lambda; }
    double mu_min() const noexcept { return modes_.front().mu; }

    // Position of multi-index (k1, k2) in the mode table. Throws ConfigError if absent.
    std::size_t index_of(int k1, int k2 = 0) const;

    // e_k(x) for mode i. Throws DomainError outside the closed domain.
    double basis_value(std::size_t i, const Point2& x) const;

private:
    Geometry geometry_ = Geometry::Interval;
    int power_ = 1;
    int n_ = 1;
    std::vector<ModeIndex> modes_;
};

// ||A^alpha w|| = sqrt(sum mu_k^{2 alpha} w_k^2); alpha = 0 gives the H-norm.
double norm_alpha(const SpectralBasis& basis, std::span<const double> w, double alpha);

double inner_product(std::span<const double> a, std::span<const double> b);

// sum_k w_k e_k(x)
double eval_at_point(const SpectralBasis& basis, std::span<const double> w, const Point2& x);

// Energy-space distance ||A^{1/2}(u1-u2)||^2 + ||v1-v2||^2.
double energy_distance_sq(const SpectralBasis& basis, const PhasePoint& a, const PhasePoint& b);

}  // namespace sdde
