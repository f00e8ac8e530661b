#include "sdde/collocation.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace sdde {

CollocationGrid::CollocationGrid(const SpectralBasis& basis) : geometry_(basis.geometry()) {
    if (geometry_ == Geometry::Point) {
        n_ = m_ = values_size_ = 1;
        weight_ = 1.0;
        sine_ = {1.0};
        axis1_.assign(1, 0);
        axis2_.assign(1, 0);
        return;
    }
    n_ = static_cast<std::size_t>(basis.modes_per_axis());
    m_ = 2 * n_;
    weight_ = 1.0 / static_cast<double>(m_ + 1);
    values_size_ = geometry_ == Geometry::Square ? m_ * m_ : m_;
    sine_.resize(m_ * n_);
    for (std::size_t j = 0; j < m_; ++j) {
        const double x = static_cast<double>(j + 1) * weight_;
        for (std::size_t k = 0; k < n_; ++k)
            sine_[j * n_ + k] = std::numbers::sqrt2 * std::sin(static_cast<double>(k + 1) * std::numbers::pi * x);
    }
    for (const auto& mode : basis.modes()) {
        axis1_.push_back(static_cast<std::size_t>(mode.k1 - 1));
        axis2_.push_back(static_cast<std::size_t>(std::max(mode.k2, 1) - 1));
    }
}

void CollocationGrid::to_physical(std::span<const double> w, std::span<double> values) const {
    if (geometry_ == Geometry::Point) {
        values[0] = w[0];
        return;
    }
    if (geometry_ == Geometry::Interval) {
        for (std::size_t j = 0; j < m_; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) acc += sine_[j * n_ + axis1_[i]] * w[i];
            values[j] = acc;
        }
        return;
    }
    // Square: scatter into an n x n coefficient block, then two separable passes.
    std::vector<double> coeff(n_ * n_, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) coeff[axis1_[i] * n_ + axis2_[i]] = w[i];
    std::vector<double> half(m_ * n_, 0.0);  // [j1][k2]
    for (std::size_t j1 = 0; j1 < m_; ++j1)
        for (std::size_t k1 = 0; k1 < n_; ++k1) {
            const double s = sine_[j1 * n_ + k1];
            for (std::size_t k2 = 0; k2 < n_; ++k2) half[j1 * n_ + k2] += s * coeff[k1 * n_ + k2];
        }
    for (std::size_t j1 = 0; j1 < m_; ++j1)
        for (std::size_t j2 = 0; j2 < m_; ++j2) {
            double acc = 0.0;
            for (std::size_t k2 = 0; k2 < n_; ++k2) acc += sine_[j2 * n_ + k2] * half[j1 * n_ + k2];
            values[j1 * m_ + j2] = acc;
        }
}

std::vector<double> CollocationGrid::to_physical(std::span<const double> w) const {
    std::vector<double> out(values_size_);
    to_physical(w, out);
    return out;
}

void CollocationGrid::to_spectral(std::span<const double> values, std::span<double> w) const {
    if (geometry_ == Geometry::Point) {
        w[0] = values[0];
        return;
    }
    if (geometry_ == Geometry::Interval) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m_; ++j) acc += sine_[j * n_ + axis1_[i]] * values[j];
            w[i] = acc * weight_;
        }
        return;
    }
    std::vector<double> half(m_ * n_, 0.0);  // [j1][k2]
    for (std::size_t j1 = 0; j1 < m_; ++j1)
        for (std::size_t j2 = 0; j2 < m_; ++j2) {
            const double val = values[j1 * m_ + j2];
            for (std::size_t k2 = 0; k2 < n_; ++k2) half[j1 * n_ + k2] += sine_[j2 * n_ + k2] * val;
        }
    const double w2 = weight_ * weight_;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j1 = 0; j1 < m_; ++j1) acc += sine_[j1 * n_ + axis1_[i]] * half[j1 * n_ + axis2_[i]];
        w[i] = acc * w2;
    }
}

std::vector<double> CollocationGrid::to_spectral(std::span<const double> values) const {
    std::vector<double> out(axis1_.size());
    to_spectral(values, out);
    return out;
}

double CollocationGrid::integrate(std::span<const double> values) const {
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    if (geometry_ == Geometry::Point) return sum;
    return sum * (geometry_ == Geometry::Square ? weight_ * weight_ : weight_);
}

}  // namespace sdde
