#include "sdde/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdde/delay.hpp"
#include "sdde/diagnostics.hpp"
#include "sdde/kernels.hpp"
#include "sdde/rng.hpp"

namespace sdde {

double PointCloud::diameter() const {
    const PointView view{coords, dim};
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, view.distance(i, j));
    return d;
}

PointCloud sample_cloud(const Model& model, const Trace& trace, double burn_in, std::size_t stride,
                        std::size_t min_points) {
    if (!trace.completed()) throw std::invalid_argument("cloud sampling needs a completed trace");
    if (!(burn_in >= 0.0) || burn_in >= trace.t_end()) throw std::invalid_argument("burn-in must lie in [0, T_end)");
    const std::size_t steps = trace.rows.size() - 1;
    if (stride == 0 || stride > steps) throw std::invalid_argument("stride must lie in [1, number of steps]");
    if (stride % trace.stride != 0) throw std::invalid_argument("stride must be a multiple of the trace stride");

    const SpectralBasis& basis = *model.basis;
    const std::size_t n = basis.size();
    PointCloud cloud;
    cloud.dim = 2 * n;
    cloud.burn_in = burn_in;
    cloud.stride = stride;
    auto first = static_cast<std::size_t>(std::ceil(burn_in / trace.dt - 1e-9));
    first = (first + stride - 1) / stride * stride;
    for (std::size_t j = first; j <= steps; j += stride) {
        const auto& s = trace.state_at_step(j);
        for (std::size_t q = 0; q < n; ++q) cloud.coords.push_back(std::sqrt(basis.mu(q)) * s.u[q]);
        for (std::size_t q = 0; q < n; ++q) cloud.coords.push_back(s.v[q]);
    }
    if (cloud.size() < min_points)
        throw InsufficientData("cloud has " + std::to_string(cloud.size()) + " points, need " +
                               std::to_string(min_points));
    return cloud;
}

namespace {

std::vector<double> pair_fractions(const PointCloud& cloud, std::span<const double> radii,
                                   const DimensionOptions& opt) {
    const PointView view{cloud.coords, cloud.dim};
    const std::size_t n = cloud.size();
    std::vector<std::uint64_t> counts;
    double total = 0.0;
    if (n <= opt.exact_limit) {
        counts = opt.parallel ? count_pairs_parallel(view, radii) : count_pairs_serial(view, radii);
        total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    } else {
        const PairList pairs = sample_pairs(n, opt.sampled_pairs, opt.seed);
        counts = opt.parallel ? count_listed_pairs_parallel(view, pairs, radii)
                              : count_listed_pairs_serial(view, pairs, radii);
        total = static_cast<double>(pairs.size());
    }
    std::vector<double> C(radii.size());
    for (std::size_t r = 0; r < radii.size(); ++r) C[r] = static_cast<double>(counts[r]) / total;
    return C;
}

}  // namespace

DimensionEstimate correlation_dimension(const PointCloud& cloud, std::span<const double> radii,
                                        const DimensionOptions& opt) {
    if (cloud.size() < 2) throw InsufficientData("correlation sums need at least two points");
    if (radii.size() < 2) throw std::invalid_argument("need at least two radii");
    for (std::size_t r = 0; r < radii.size(); ++r)
        if (!(radii[r] > 0.0) || (r > 0 && !(radii[r] > radii[r - 1])))
            throw std::invalid_argument("radii must be positive and strictly ascending");

    DimensionEstimate est;
    est.radii.assign(radii.begin(), radii.end());
    est.C = pair_fractions(cloud, radii, opt);
    const std::size_t nr = radii.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    est.local_slope.assign(nr, nan);
    for (std::size_t r = 0; r < nr; ++r) {
        const std::size_t a = r == 0 ? 0 : r - 1, b = r + 1 == nr ? r : r + 1;
        if (est.C[a] > 0.0 && est.C[b] > 0.0)
            est.local_slope[r] = (std::log(est.C[b]) - std::log(est.C[a])) / (std::log(radii[b]) - std::log(radii[a]));
    }

    // Longest window of defined slopes with (max - min) <= tol |mean|; ties go to smaller radii.
    std::size_t best_lo = 0, best_len = 0;
    for (std::size_t lo = 0; lo < nr; ++lo) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
        for (std::size_t hi = lo; hi < nr; ++hi) {
            const double s = est.local_slope[hi];
            if (std::isnan(s)) break;
            mn = std::min(mn, s);
            mx = std::max(mx, s);
            sum += s;
            const double mean = sum / static_cast<double>(hi - lo + 1);
            if (mx - mn > opt.slope_tolerance * std::abs(mean)) break;
            if (hi - lo + 1 > best_len) {
                best_len = hi - lo + 1;
                best_lo = lo;
            }
        }
    }
    if (best_len < opt.min_window) return est;

    est.plateau = true;
    est.window_lo = best_lo;
    est.window_hi = best_lo + best_len - 1;
    std::vector<double> x, y;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t r = est.window_lo; r <= est.window_hi; ++r) {
        x.push_back(std::log(radii[r]));
        y.push_back(std::log(est.C[r]));
        mn = std::min(mn, est.local_slope[r]);
        mx = std::max(mx, est.local_slope[r]);
    }
    est.slope = fit_line(x, y).slope;
    est.confidence = mx - mn;
    return est;
}

std::vector<double> default_radii(const PointCloud& cloud, std::size_t count, double q_lo, double q_hi,
                                  std::uint64_t seed) {
    if (count < 2) throw std::invalid_argument("need at least two radii");
    const PointView view{cloud.coords, cloud.dim};
    const std::size_t n = cloud.size();
    std::vector<double> dist;
    if (n <= 700) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) dist.push_back(view.distance(i, j));
    } else {
        for (const auto& [i, j] : sample_pairs(n, 250000, seed)) dist.push_back(view.distance(i, j));
    }
    std::sort(dist.begin(), dist.end());
    auto quantile = [&](double q) {
        if (dist.empty()) return 0.0;
        return dist[std::min(dist.size() - 1, static_cast<std::size_t>(q * static_cast<double>(dist.size())))];
    };
    double hi = quantile(q_hi), lo = quantile(q_lo);
    if (!(hi > 0.0)) {
        lo = 1e-12;
        hi = 1.0;
    } else if (!(lo > 0.0) || lo >= hi) {
        const auto pos = std::upper_bound(dist.begin(), dist.end(), 0.0);
        lo = pos != dist.end() && *pos < hi ? *pos : hi * 1e-3;
    }
    std::vector<double> radii(count);
    for (std::size_t r = 0; r < count; ++r)
        radii[r] = lo * std::pow(hi / lo, static_cast<double>(r) / static_cast<double>(count - 1));
    return radii;
}

AttractionRate attraction_rate(const Model& model, std::size_t m, double eps, const StepperConfig& cfg,
                               std::uint64_t seed) {
    if (m < 4) throw std::invalid_argument("attraction rate needs a bundle of at least 4 trajectories");
    if (!(eps >= 0.0)) throw std::invalid_argument("spread must be >= 0");
    const SpectralBasis& basis = *model.basis;
    const std::size_t n = basis.size(), excited = std::min<std::size_t>(n, 8);

    Rng rng(seed);
    std::vector<InitialHistory> members{*model.initial};
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<HistoryFamily> fam;
        for (std::size_t q = 0; q < excited; ++q) fam.push_back({q, rng.normal(), 0.0, 0.0, 0.0});
        const InitialHistory psi(n, fam);
        const double w = w_norm(psi, model.horizon(), basis);
        members.push_back(model.initial->plus(psi, eps / w));
    }
    const auto bundle = simulate_bundle(model, members, cfg);
    AttractionRate out;
    out.t = bundle.t;
    out.D.assign(bundle.t.size(), 0.0);
    for (const auto& d : bundle.dist_sq)
        for (std::size_t j = 0; j < d.size(); ++j) out.D[j] = std::max(out.D[j], std::sqrt(d[j]));
    if (bundle.status != TraceStatus::Completed || out.D.empty()) {
        out.flagged = true;
        return out;
    }

    const double T = out.t.back();
    std::size_t peak = 0;
    for (std::size_t j = 0; j < out.t.size() && out.t[j] <= 0.5 * T + 1e-12; ++j)
        if (out.D[j] > out.D[peak]) peak = j;
    const double d_peak = out.D[peak];
    if (!(d_peak > 0.0)) {
        out.flagged = true;
        return out;
    }
    std::vector<double> x, y;
    for (std::size_t j = peak; j < out.t.size() && out.D[j] > 1e-9 * d_peak; ++j) {
        x.push_back(out.t[j]);
        y.push_back(std::log(out.D[j]));
    }
    if (x.size() < 2) {
        out.flagged = true;
        return out;
    }
    const LineFit line = fit_line(x, y);
    out.gamma = -line.slope;
    out.t_D = out.t[peak];
    out.C_D = std::exp(line.intercept + line.slope * out.t_D);
    out.fit_residual = line.rms;
    out.flagged = !(out.gamma > 0.0);
    return out;
}

}  // namespace sdde
