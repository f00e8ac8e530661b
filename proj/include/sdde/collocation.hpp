#pragma once

#include <span>
#include <vector>

#include "sdde/spectral.hpp"

namespace sdde {

// Oversampled tensor grid (2N interior nodes per axis, x_j = j/(2N+1)) for
// pseudospectral evaluation of pointwise nonlinearities. With the uniform
// weight 1/(2N+1) per axis the grid quadrature integrates products of up to
// four retained sine modes exactly, so cubic terms are fully dealiased.
class CollocationGrid {
public:
    explicit CollocationGrid(const SpectralBasis& basis);

    std::size_t points_per_axis() const noexcept { return m_; }
    std::size_t size() const noexcept { return values_size_; }
    double weight() const noexcept { return weight_; }

    // Grid values of sum_k w_k e_k.
    void to_physical(std::span<const double> w, std::span<double> values) const;
    std::vector<double> to_physical(std::span<const double> w) const;

    // Discrete L2 projection of grid values onto the retained modes.
    void to_spectral(std::span<const double> values, std::span<double> w) const;
    std::vector<double> to_spectral(std::span<const double> values) const;

    // Quadrature of grid values over Omega.
    double integrate(std::span<const double> values) const;

private:
    Geometry geometry_;
    std::size_t n_ = 1;       // modes per axis
    std::size_t m_ = 1;       // grid points per axis
    std::size_t values_size_ = 1;
    double weight_ = 1.0;
    std::vector<double> sine_;  // m_ x n_, sqrt(2) sin(k pi x_j)
    std::vector<std::size_t> axis1_, axis2_;  // zero-based k1-1, k2-1 per mode
};

}  // namespace sdde
