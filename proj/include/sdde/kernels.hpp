#pragma once

// Pair-counting kernels for correlation sums. Each kernel has a serial
// reference and an OpenMP version; both return identical integer counts.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sdde {

// Points stored row-major: point i occupies coords[i*dim, (i+1)*dim).
struct PointView {
    std::span<const double> coords;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    double distance(std::size_t i, std::size_t j) const noexcept;
};

// counts[r] = #{i < j : |x_i - x_j| < radii[r]} for ascending `radii`.
std::vector<std::uint64_t> count_pairs_serial(PointView pts, std::span<const double> radii);
std::vector<std::uint64_t> count_pairs_parallel(PointView pts, std::span<const double> radii);

// Same counts restricted to an explicit pair list.
using PairList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
std::vector<std::uint64_t> count_listed_pairs_serial(PointView pts, const PairList& pairs,
                                                     std::span<const double> radii);
std::vector<std::uint64_t> count_listed_pairs_parallel(PointView pts, const PairList& pairs,
                                                       std::span<const double> radii);

// `count` distinct-index pairs drawn uniformly with a fixed seed.
PairList sample_pairs(std::size_t points, std::size_t count, std::uint64_t seed);

// Number of worker threads the parallel kernels will use.
int worker_count();

}  // namespace sdde
