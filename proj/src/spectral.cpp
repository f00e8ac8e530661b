#include "sdde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "sdde/errors.hpp"

namespace sdde {

std::string to_string(Geometry g) {
    switch (g) {
        case Geometry::Interval: return "interval";
        case Geometry::Square: return "square";
        case Geometry::Point: return "point";
    }
    return "unknown";
}

Geometry geometry_from_string(const std::string& name) {
    if (name == "interval") return Geometry::Interval;
    if (name == "square") return Geometry::Square;
    if (name == "point") return Geometry::Point;
    throw ConfigError("geometry", "unsupported geometry '" + name + "'");
}

bool PhasePoint::finite() const noexcept {
    auto ok = [](double x) { return std::isfinite(x); };
    return std::all_of(u.begin(), u.end(), ok) && std::all_of(v.begin(), v.end(), ok);
}

SpectralBasis SpectralBasis::build(Geometry geometry, int power, int modes_per_axis) {
    if (power != 1 && power != 2) throw ConfigError("p", "operator power must be 1 or 2");
    if (modes_per_axis < 1) throw ConfigError("N", "need at least one mode per axis");
    if (geometry == Geometry::Point)
        throw ConfigError("geometry", "point geometry is built with single_mode(mu)");

    SpectralBasis b;
    b.geometry_ = geometry;
    b.power_ = power;
    b.n_ = modes_per_axis;

    const double pi2 = std::numbers::pi * std::numbers::pi;
    auto push = [&](int k1, int k2) {
        const double lambda = pi2 * static_cast<double>(k1 * k1 + k2 * k2);
        b.modes_.push_back({k1, k2, lambda, std::pow(lambda, power)});
    };
    for (int k1 = 1; k1 <= modes_per_axis; ++k1) {
        if (geometry == Geometry::Interval) {
            push(k1, 0);
        } else {
            for (int k2 = 1; k2 <= modes_per_axis; ++k2) push(k1, k2);
        }
    }
    // Sorted by mu; ties lexicographic in (k1, k2). Eigenvalues are exact
    // multiples of pi^2, so comparing k1^2+k2^2 avoids rounding ties.
    std::stable_sort(b.modes_.begin(), b.modes_.end(), [](const ModeIndex& x, const ModeIndex& y) {
        const int nx = x.k1 * x.k1 + x.k2 * x.k2;
        const int ny = y.k1 * y.k1 + y.k2 * y.k2;
        return std::tie(nx, x.k1, x.k2) < std::tie(ny, y.k1, y.k2);
    });
    return b;
}

SpectralBasis SpectralBasis::single_mode(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu", "single-mode eigenvalue must be positive");
    SpectralBasis b;
    b.geometry_ = Geometry::Point;
    b.power_ = 1;
    b.n_ = 1;
    b.modes_.push_back({1, 0, mu, mu});
    return b;
}

std::size_t SpectralBasis::index_of(int k1, int k2) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].k1 == k1 && modes_[i].k2 == k2) return i;
    throw ConfigError("mode", "mode (" + std::to_string(k1) + "," + std::to_string(k2) +
                                  ") is not in the retained basis");
}

namespace {

void check_inside(Geometry g, const Point2& x) {
    auto in01 = [](double s) { return s >= 0.0 && s <= 1.0; };
    const bool ok = g == Geometry::Point || (g == Geometry::Interval && in01(x[0])) ||
                    (g == Geometry::Square && in01(x[0]) && in01(x[1]));
    if (!ok) throw DomainError("evaluation point outside the closed domain");
}

}  // namespace

double SpectralBasis::basis_value(std::size_t i, const Point2& x) const {
    check_inside(geometry_, x);
    const auto& m = modes_.at(i);
    constexpr double pi = std::numbers::pi;
    switch (geometry_) {
        case Geometry::Point: return 1.0;
        case Geometry::Interval: return std::numbers::sqrt2 * std::sin(m.k1 * pi * x[0]);
        case Geometry::Square:
            return 2.0 * std::sin(m.k1 * pi * x[0]) * std::sin(m.k2 * pi * x[1]);
    }
    return 0.0;
}

double norm_alpha(const SpectralBasis& basis, std::span<const double> w, double alpha) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double scale = alpha == 0.0 ? 1.0 : std::pow(basis.mu(k), 2.0 * alpha);
        acc += scale * w[k] * w[k];
    }
    return std::sqrt(acc);
}

double inner_product(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

double eval_at_point(const SpectralBasis& basis, std::span<const double> w, const Point2& x) {
    check_inside(basis.geometry(), x);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * basis.basis_value(k, x);
    return acc;
}

double energy_distance_sq(const SpectralBasis& basis, const PhasePoint& a, const PhasePoint& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double du = a.u[k] - b.u[k];
        const double dv = a.v[k] - b.v[k];
        acc += basis.mu(k) * du * du + dv * dv;
    }
    return acc;
}

}  // namespace sdde
