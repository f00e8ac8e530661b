#pragma once

// Numerical certificates for a completed simulation: energy balance,
// Lyapunov functional, dissipativity, quasi-stability, Lipschitz dependence
// and the pointwise equation residual. All time integrals use the trapezoid
// rule on the step grid.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sdde/integrator.hpp"

namespace sdde {

struct EnergyLedger {
    std::vector<double> t;
    std::vector<double> E;
    std::vector<double> calE;
    std::vector<double> damping_work;  // k int_0^t ||v||^2
    std::vector<double> fstar_work;    // int_0^t (F*(u), v)
    std::vector<double> delay_work;    // int_0^t (M(u_s), v)
    std::vector<double> residual;      // r(t), with r(0) = 0

    double max_abs_residual() const;
    double max_abs_calE() const;
};

EnergyLedger energy_ledger(const Model& model, const Trace& trace);

struct ResidualSeries {
    double max_abs = 0.0;
    std::vector<double> r;
};
ResidualSeries energy_residual(const Model& model, const Trace& trace);

struct LyapunovParams {
    double sigma = 0.25;

    double gamma(double k) const noexcept { return sigma * k / (4.0 + 2.0 * k * k); }
    static double mu(double k) noexcept { return k / 4.0; }
    void validate(double k) const;
};

// V(t) = calE + gamma (u, v) + (mu_L / h) int_0^h int_{t-s}^t ||v||^2 dxi ds.
std::vector<double> lyapunov_series(const Model& model, const Trace& trace, const LyapunovParams& params = {});

// Smallest c with E/2 - c <= V <= 2E + mu_L int_0^h ||v(t-xi)||^2 dxi + c along the trace.
struct EquivalenceBelt {
    double c_lower = 0.0;
    double c_upper = 0.0;
    double max_E = 0.0;
};
EquivalenceBelt equivalence_belt(const Model& model, const Trace& trace, const LyapunovParams& params = {});

struct SweepEntry {
    double k = 0.0;
    double h = 0.0;
    double R = std::numeric_limits<double>::infinity();  // sup of sqrt(2E) over the tail
    TraceStatus status = TraceStatus::Completed;
    std::string message;
};

// One entry per (k, h), ordered k-major. Entries run in parallel.
std::vector<SweepEntry> dissipativity_sweep(const Model& base, std::span<const double> k_list,
                                            std::span<const double> h_list, const StepperConfig& cfg,
                                            double tail_fraction = 0.25);

// Reference trajectory (member 0) and companions stepped in lockstep.
struct BundleSeries {
    std::vector<double> t;                        // every `stride` steps
    std::vector<std::vector<double>> dist_sq;     // [companion][sample]: ||v_i - v_0||^2 + ||A^{1/2}(u_i - u_0)||^2
    std::vector<std::vector<double>> driver_sq;   // running max over [0, t] of ||A^{1/2-delta}(u_i - u_0)||^2
    std::vector<double> ref_energy;               // E of member 0
    TraceStatus status = TraceStatus::Completed;
    std::string message;
};
BundleSeries simulate_bundle(const Model& model, std::span<const InitialHistory> members, const StepperConfig& cfg,
                             double delta = 0.25);

struct QuasiStabilityFit {
    double lambda = 0.0;        // fitted decay rate of d(t)
    double fit_residual = 0.0;  // RMS residual of the log-linear fit
    double C1 = 0.0;
    double C2 = 0.0;
    double floor = 0.0;         // median of d over the tail window
    double driver_max = 0.0;    // max_xi ||A^{1/2-delta}(u1 - u2)(xi)|| over [0, T]
    double initial_distance_sq = 0.0;  // |phi1 - phi2|_W^2
    bool degenerate = false;
    TraceStatus status = TraceStatus::Completed;
};

struct QuasiStabilityOptions {
    double delta = 0.25;
    double fit_fraction = 0.5;   // fit window starts at t = 0
    double tail_fraction = 0.25;
    double degenerate_below = 1e-28;
};

QuasiStabilityFit quasi_stability_fit(const Model& model, const InitialHistory& phi1, const InitialHistory& phi2,
                                      const StepperConfig& cfg, const QuasiStabilityOptions& opt = {});

struct LipschitzResult {
    std::vector<double> eps;
    std::vector<double> ratios;
    double spread = 0.0;  // max ratio / min ratio
    bool within_factor_two = false;
};

// Throws std::invalid_argument when psi = 0 or any eps <= 0.
LipschitzResult lipschitz_ratio(const Model& model, const InitialHistory& phi, const InitialHistory& psi,
                                std::span<const double> eps_list, const StepperConfig& cfg);

// ||v_fd'(t) + k v + A u + F(u) + M(u_t)|| with the centred difference of v.
// Requires a stride-1 trace with h + 2 dt <= t <= T - dt.
double equation_residual(const Model& model, const Trace& trace, double t);

// Least-squares line y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace sdde
