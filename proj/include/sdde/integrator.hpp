#pragma once

// ETD2RK integration of u'' + k u' + A u + F(u) + M(u_t) = 0 in first-order
// form U' = B U + N(U_t), N = (0; -F(u(t)) - M(u_t)), with the exact 2x2
// propagator of each mode.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdde/delay.hpp"
#include "sdde/history.hpp"
#include "sdde/nonlinearity.hpp"
#include "sdde/propagator.hpp"
#include "sdde/spectral.hpp"

namespace sdde {

struct Model {
    std::shared_ptr<const SpectralBasis> basis;
    std::shared_ptr<const Nonlinearity> force;
    std::shared_ptr<const DelayOperator> delay;
    double damping = 0.0;
    std::shared_ptr<const InitialHistory> initial;

    double horizon() const noexcept { return delay->spec().horizon; }

    // Same model with a different initial function.
    Model with_initial(InitialHistory phi) const;
    // Same model with a different damping coefficient.
    Model with_damping(double k) const;
    // Same model on a different horizon h (delay laws rescale with h).
    Model with_horizon(double h) const;
};

Model make_model(std::shared_ptr<const SpectralBasis> basis, NonlinearitySpec force, DelaySpec delay,
                 double damping, InitialHistory initial);

struct StepperConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    // Store full states every `stride` steps (per-step scalars are always kept).
    std::size_t stride = 1;

    void validate(const Model& model) const;
    std::size_t steps() const;
};

enum class TraceStatus { Completed, BlowUp, ContractViolation };
std::string to_string(TraceStatus s);

// Per-step record. Scalars are kept for every step so that time integrals
// can be taken by trapezoid on the step grid.
struct TraceRow {
    double t = 0.0;
    std::vector<double> tau;
    double E = 0.0;        // 1/2 (||v||^2 + ||A^{1/2}u||^2) + Pi0
    double calE = 0.0;     // E + Pi1
    double norm_M = 0.0;
    double m_dot_v = 0.0;  // (M(u_t), v)
    double fstar_dot_v = 0.0;
    double v_sq = 0.0;
    double u_sq = 0.0;
    double u_dot_v = 0.0;
};

struct Trace {
    double dt = 0.0;
    std::size_t stride = 1;
    std::vector<TraceRow> rows;           // one per step, t = j dt
    std::vector<PhasePoint> states;       // every `stride` steps
    // ||v||^2 of the initial function on theta = -n dt, ..., -dt (oldest first).
    std::vector<double> pre_v_sq;
    TraceStatus status = TraceStatus::Completed;
    double status_time = 0.0;
    std::string message;

    bool completed() const noexcept { return status == TraceStatus::Completed; }
    double t_end() const noexcept { return rows.empty() ? 0.0 : rows.back().t; }
    // State at step j (requires j % stride == 0).
    const PhasePoint& state_at_step(std::size_t j) const;
    // Rebuild the full history (initial function + every node) from a stride-1 trace.
    HistorySegment history(const Model& model) const;
};

// N(t) v-slot forcing: -F(u(t)) - M(u_t).
void nonlinear_rhs(const Model& model, const HistorySegment& history, double t, std::span<double> out,
                   std::span<double> taus = {}, std::span<double> m_out = {});

class Integrator {
public:
    Integrator(Model model, double dt);

    const Model& model() const noexcept { return model_; }
    const HistorySegment& history() const noexcept { return history_; }
    double time() const noexcept { return t_; }
    const PhasePoint& state() const noexcept { return state_; }

    // Advances one ETD2RK step. Throws BlowUp / ContractViolation.
    void step();

    // Diagnostics at the current time (uses the completed history).
    TraceRow observe();

    const std::vector<ModePropagator>& propagators() const noexcept { return props_; }

private:
    Model model_;
    double dt_;
    double t_ = 0.0;
    std::size_t steps_ = 0;
    bool n0_valid_ = false;
    PhasePoint state_;
    HistorySegment history_;
    std::vector<ModePropagator> props_;
    std::vector<double> n0_, n1_, taus_, mvec_;
    PhasePoint predictor_;
};

// One ETD2RK step from (t, state); `history` must end at the node (t, state)
// and is left ending at the corrected node (t + dt, result).
PhasePoint step_etd2rk(const Model& model, std::span<const ModePropagator> props, const PhasePoint& state,
                       HistorySegment& history, double t, double dt);

Trace simulate(const Model& model, const StepperConfig& cfg);

}  // namespace sdde
