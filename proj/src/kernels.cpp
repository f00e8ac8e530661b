#include "sdde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>

#include "sdde/rng.hpp"

namespace sdde {

double PointView::distance(std::size_t i, std::size_t j) const noexcept {
    const double* a = coords.data() + i * dim;
    const double* b = coords.data() + j * dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double x = a[d] - b[d];
        s += x * x;
    }
    return std::sqrt(s);
}

namespace {

// First radius strictly greater than r; a pair at distance r counts for all later radii.
inline void tally(std::span<const double> radii, double r, std::vector<std::uint64_t>& hist) {
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    ++hist[static_cast<std::size_t>(it - radii.begin())];
}

std::vector<std::uint64_t> cumulate(const std::vector<std::uint64_t>& hist, std::size_t nr) {
    std::vector<std::uint64_t> counts(nr);
    std::uint64_t run = 0;
    for (std::size_t r = 0; r < nr; ++r) {
        run += hist[r];
        counts[r] = run;
    }
    return counts;
}

}  // namespace

std::vector<std::uint64_t> count_pairs_serial(PointView pts, std::span<const double> radii) {
    const std::size_t n = pts.size();
    std::vector<std::uint64_t> hist(radii.size() + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) tally(radii, pts.distance(i, j), hist);
    return cumulate(hist, radii.size());
}

std::vector<std::uint64_t> count_pairs_parallel(PointView pts, std::span<const double> radii) {
    const auto n = static_cast<std::int64_t>(pts.size());
    const std::size_t bins = radii.size() + 1;
    std::vector<std::uint64_t> hist(bins, 0);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(dynamic, 16) nowait
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j)
                tally(radii, pts.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), local);
#pragma omp critical
        for (std::size_t b = 0; b < bins; ++b) hist[b] += local[b];
    }
    return cumulate(hist, radii.size());
}

std::vector<std::uint64_t> count_listed_pairs_serial(PointView pts, const PairList& pairs,
                                                     std::span<const double> radii) {
    std::vector<std::uint64_t> hist(radii.size() + 1, 0);
    for (const auto& [i, j] : pairs) tally(radii, pts.distance(i, j), hist);
    return cumulate(hist, radii.size());
}

std::vector<std::uint64_t> count_listed_pairs_parallel(PointView pts, const PairList& pairs,
                                                       std::span<const double> radii) {
    const auto n = static_cast<std::int64_t>(pairs.size());
    const std::size_t bins = radii.size() + 1;
    std::vector<std::uint64_t> hist(bins, 0);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t p = 0; p < n; ++p) {
            const auto& [i, j] = pairs[static_cast<std::size_t>(p)];
            tally(radii, pts.distance(i, j), local);
        }
#pragma omp critical
        for (std::size_t b = 0; b < bins; ++b) hist[b] += local[b];
    }
    return cumulate(hist, radii.size());
}

PairList sample_pairs(std::size_t points, std::size_t count, std::uint64_t seed) {
    PairList pairs;
    if (points < 2) return pairs;
    pairs.reserve(count);
    Rng rng(seed);
    while (pairs.size() < count) {
        const auto i = static_cast<std::uint32_t>(rng.index(points));
        const auto j = static_cast<std::uint32_t>(rng.index(points));
        if (i == j) continue;
        pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    return pairs;
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace sdde
