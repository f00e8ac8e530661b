#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sdde/spectral.hpp"

namespace sdde {

// One analytic history family for a single mode: u(theta) = a + b theta + c sin(d theta).
struct HistoryFamily {
    std::size_t mode = 0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

// Initial function phi on [-h, 0] as a sum of analytic families. The velocity
// is the exact theta-derivative, so (phi, phi') is compatible by construction.
class InitialHistory {
public:
    InitialHistory() = default;
    InitialHistory(std::size_t modes, std::vector<HistoryFamily> families);

    std::size_t modes() const noexcept { return modes_; }
    const std::vector<HistoryFamily>& families() const noexcept { return families_; }

    void eval(double theta, std::span<double> u, std::span<double> v) const;
    PhasePoint at(double theta) const;

    // phi + scale * other
    InitialHistory plus(const InitialHistory& other, double scale) const;

private:
    std::size_t modes_ = 0;
    std::vector<HistoryFamily> families_;
};

// Time-stamped phase points with C^1 dense output in u (Hermite cubic from
// (u, v) endpoint data) and linear dense output in v. Nodes live in a ring
// buffer; queries at or before the first node fall back to the analytic
// initial function when one is attached.
class HistorySegment {
public:
    HistorySegment(std::size_t modes, double horizon, std::shared_ptr<const InitialHistory> initial = nullptr);

    std::size_t modes() const noexcept { return modes_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t node_count() const noexcept { return count_; }
    double node_time(std::size_t i) const { return slot(i).t; }
    const PhasePoint& node(std::size_t i) const { return slot(i).p; }

    // Appends a node; times must be strictly increasing.
    void push(double t, const PhasePoint& p);
    // Overwrites the state (not the time) of the newest node.
    void replace_last(const PhasePoint& p);
    void pop_last();
    // Drops nodes no longer needed to cover times >= t_keep.
    void trim(double t_keep);

    double t_now() const;
    // Earliest time a query may ask for.
    double earliest() const;

    void interpolate(double t, std::span<double> u, std::span<double> v) const;
    void interpolate_u(double t, std::span<double> u) const;
    PhasePoint interpolate(double t) const;

private:
    struct Node {
        double t = 0.0;
        PhasePoint p;
    };

    const Node& slot(std::size_t i) const { return slots_[(head_ + i) % slots_.size()]; }
    Node& slot(std::size_t i) { return slots_[(head_ + i) % slots_.size()]; }
    std::size_t locate(double t) const;
    bool use_initial(double t) const;
    bool origin_retained() const;
    void check_range(double t) const;

    std::size_t modes_;
    double horizon_;
    std::shared_ptr<const InitialHistory> initial_;
    std::vector<Node> slots_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    double origin_ = 0.0;  // time of the first node; the initial function covers [origin - h, origin]
    bool started_ = false;
};

}  // namespace sdde
