#pragma once

// Long-time sampling and Grassberger-Procaccia correlation dimension in the
// energy embedding (mu_k^{1/2} u_k, v_k), plus exponential attraction rates.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sdde/integrator.hpp"

namespace sdde {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PointCloud {
    std::size_t dim = 0;
    std::vector<double> coords;  // row-major, `dim` per point
    double burn_in = 0.0;
    std::size_t stride = 1;      // in integrator steps

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
    double diameter() const;
};

// Throws InsufficientData below `min_points` points.
PointCloud sample_cloud(const Model& model, const Trace& trace, double burn_in, std::size_t stride,
                        std::size_t min_points = 100);

struct DimensionOptions {
    std::size_t exact_limit = 2000;      // above this, pairs are sampled
    std::size_t sampled_pairs = 2000000;
    std::uint64_t seed = 0x5eed5eedULL;
    double slope_tolerance = 0.15;       // relative spread of local slopes in the window
    std::size_t min_window = 5;
    bool parallel = true;
};

struct DimensionEstimate {
    std::vector<double> radii;
    std::vector<double> C;            // correlation sums
    std::vector<double> local_slope;  // centred d log C / d log r (NaN where undefined)
    double slope = 0.0;
    std::size_t window_lo = 0;        // inclusive radius indices
    std::size_t window_hi = 0;
    double confidence = 0.0;          // max - min local slope in the window
    bool plateau = false;
};

// `radii` must be positive and ascending.
DimensionEstimate correlation_dimension(const PointCloud& cloud, std::span<const double> radii,
                                        const DimensionOptions& opt = {});

// `count` log-spaced radii between the given quantiles of the pair-distance distribution.
std::vector<double> default_radii(const PointCloud& cloud, std::size_t count = 24, double q_lo = 1e-3,
                                  double q_hi = 0.3, std::uint64_t seed = 0x5eed5eedULL);

struct AttractionRate {
    double gamma = 0.0;    // fitted exponential rate of D(t)
    double t_D = 0.0;      // fit onset (peak of D)
    double C_D = 0.0;      // fitted D at t_D
    double fit_residual = 0.0;
    bool flagged = false;  // no decay measured
    std::vector<double> t;
    std::vector<double> D; // max distance to the reference in the energy norm
};

// Reference plus m >= 4 trajectories started at |psi_i|_W = eps around the model's initial function.
AttractionRate attraction_rate(const Model& model, std::size_t m, double eps, const StepperConfig& cfg,
                               std::uint64_t seed);

}  // namespace sdde
