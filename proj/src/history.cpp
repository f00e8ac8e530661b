#include "sdde/history.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdde/errors.hpp"

namespace sdde {

InitialHistory::InitialHistory(std::size_t modes, std::vector<HistoryFamily> families)
    : modes_(modes), families_(std::move(families)) {
    for (const auto& f : families_) {
        if (f.mode >= modes_) throw ConfigError("initial", "history family refers to a mode outside the basis");
        if (!std::isfinite(f.a) || !std::isfinite(f.b) || !std::isfinite(f.c) || !std::isfinite(f.d))
            throw ConfigError("initial", "non-finite history coefficient");
    }
}

void InitialHistory::eval(double theta, std::span<double> u, std::span<double> v) const {
    std::fill(u.begin(), u.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    for (const auto& f : families_) {
        u[f.mode] += f.a + f.b * theta + f.c * std::sin(f.d * theta);
        v[f.mode] += f.b + f.c * f.d * std::cos(f.d * theta);
    }
}

PhasePoint InitialHistory::at(double theta) const {
    PhasePoint p(modes_);
    eval(theta, p.u, p.v);
    return p;
}

InitialHistory InitialHistory::plus(const InitialHistory& other, double scale) const {
    std::vector<HistoryFamily> merged = families_;
    for (auto f : other.families_) {
        f.a *= scale;
        f.b *= scale;
        f.c *= scale;
        merged.push_back(f);
    }
    return InitialHistory(std::max(modes_, other.modes_), std::move(merged));
}

HistorySegment::HistorySegment(std::size_t modes, double horizon, std::shared_ptr<const InitialHistory> initial)
    : modes_(modes), horizon_(horizon), initial_(std::move(initial)), slots_(16) {
    if (!(horizon_ > 0.0)) throw ConfigError("horizon", "delay horizon must be positive");
}

void HistorySegment::push(double t, const PhasePoint& p) {
    if (count_ > 0 && !(t > slot(count_ - 1).t))
        throw std::invalid_argument("history node times must be strictly increasing");
    if (count_ == slots_.size()) {
        std::vector<Node> grown(slots_.size() * 2);
        for (std::size_t i = 0; i < count_; ++i) grown[i] = std::move(slot(i));
        slots_ = std::move(grown);
        head_ = 0;
    }
    if (count_ == 0 && !started_) {
        origin_ = t;
        started_ = true;
    }
    Node& n = slot(count_);
    n.t = t;
    n.p.u.assign(p.u.begin(), p.u.end());
    n.p.v.assign(p.v.begin(), p.v.end());
    ++count_;
}

void HistorySegment::replace_last(const PhasePoint& p) {
    Node& n = slot(count_ - 1);
    n.p.u.assign(p.u.begin(), p.u.end());
    n.p.v.assign(p.v.begin(), p.v.end());
}

void HistorySegment::pop_last() {
    if (count_ > 0) --count_;
}

void HistorySegment::trim(double t_keep) {
    // Keep the last node at or before t_keep so [t_keep, t_now] stays covered.
    while (count_ >= 2 && slot(1).t <= t_keep) {
        head_ = (head_ + 1) % slots_.size();
        --count_;
    }
}

double HistorySegment::t_now() const {
    if (count_ == 0) return 0.0;
    return slot(count_ - 1).t;
}

bool HistorySegment::origin_retained() const {
    return count_ == 0 || slot(0).t == origin_;
}

double HistorySegment::earliest() const {
    if (initial_ && origin_retained()) return origin_ - horizon_;
    return count_ > 0 ? slot(0).t : origin_;
}

bool HistorySegment::use_initial(double t) const {
    return initial_ && origin_retained() && (count_ == 0 || t <= origin_);
}

void HistorySegment::check_range(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (t < earliest() - slack) {
        std::ostringstream msg;
        msg << "history underflow: t=" << t << " earliest=" << earliest();
        throw HistoryUnderflow(msg.str());
    }
    if (count_ > 0 && t > t_now() + slack) {
        std::ostringstream msg;
        msg << "history query beyond newest node: t=" << t << " t_now=" << t_now();
        throw std::out_of_range(msg.str());
    }
    if (count_ == 0 && !initial_) throw HistoryUnderflow("empty history");
}

std::size_t HistorySegment::locate(double t) const {
    // Largest i with node_time(i) <= t, clamped to [0, count-2].
    std::size_t lo = 0, hi = count_ - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (slot(mid).t <= t) lo = mid;
        else hi = mid;
    }
    return lo;
}

void HistorySegment::interpolate(double t, std::span<double> u, std::span<double> v) const {
    check_range(t);
    if (use_initial(t)) {
        initial_->eval(std::min(t - origin_, 0.0), u, v);
        return;
    }
    if (count_ == 1) {
        std::copy(slot(0).p.u.begin(), slot(0).p.u.end(), u.begin());
        std::copy(slot(0).p.v.begin(), slot(0).p.v.end(), v.begin());
        return;
    }
    const std::size_t i = locate(t);
    const Node& a = slot(i);
    const Node& b = slot(i + 1);
    const double dt = b.t - a.t;
    const double s = std::clamp((t - a.t) / dt, 0.0, 1.0);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = (s3 - 2 * s2 + s) * dt;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = (s3 - s2) * dt;
    for (std::size_t k = 0; k < modes_; ++k) {
        u[k] = h00 * a.p.u[k] + h10 * a.p.v[k] + h01 * b.p.u[k] + h11 * b.p.v[k];
        v[k] = (1 - s) * a.p.v[k] + s * b.p.v[k];
    }
}

void HistorySegment::interpolate_u(double t, std::span<double> u) const {
    std::vector<double> scratch(modes_);
    interpolate(t, u, scratch);
}

PhasePoint HistorySegment::interpolate(double t) const {
    PhasePoint p(modes_);
    interpolate(t, p.u, p.v);
    return p;
}

}  // namespace sdde
