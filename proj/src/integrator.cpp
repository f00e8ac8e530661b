#include "sdde/integrator.hpp"

#include <cmath>
#include <sstream>

#include "sdde/errors.hpp"

namespace sdde {

Model Model::with_initial(InitialHistory phi) const {
    Model m = *this;
    m.initial = std::make_shared<const InitialHistory>(std::move(phi));
    return m;
}

Model Model::with_damping(double k) const {
    Model m = *this;
    m.damping = k;
    return m;
}

Model Model::with_horizon(double h) const {
    Model m = *this;
    DelaySpec spec = delay->spec();
    spec.horizon = h;
    m.delay = std::make_shared<const DelayOperator>(std::move(spec), basis);
    return m;
}

Model make_model(std::shared_ptr<const SpectralBasis> basis, NonlinearitySpec force, DelaySpec delay,
                 double damping, InitialHistory initial) {
    if (!(damping >= 0.0)) throw ConfigError("damping", "damping must be >= 0");
    Model m;
    m.basis = basis;
    m.force = std::make_shared<const Nonlinearity>(std::move(force), basis);
    m.delay = std::make_shared<const DelayOperator>(std::move(delay), basis);
    m.damping = damping;
    m.initial = std::make_shared<const InitialHistory>(std::move(initial));
    return m;
}

void StepperConfig::validate(const Model& model) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "time step must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end", "final time must be >= 0");
    if (stride == 0) throw ConfigError("stride", "stride must be >= 1");
    if (model.delay->spec().has_state_dependent_law() && dt > model.horizon() / 4.0 * (1.0 + 1e-12))
        throw ConfigError("dt", "state-dependent delays require dt <= h/4");
}

std::size_t StepperConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

std::string to_string(TraceStatus s) {
    switch (s) {
        case TraceStatus::Completed: return "completed";
        case TraceStatus::BlowUp: return "blow-up";
        case TraceStatus::ContractViolation: return "contract-violation";
    }
    return "unknown";
}

const PhasePoint& Trace::state_at_step(std::size_t j) const {
    if (j % stride != 0) throw std::out_of_range("trace state not stored at this step");
    return states.at(j / stride);
}

HistorySegment Trace::history(const Model& model) const {
    if (stride != 1) throw std::invalid_argument("history reconstruction needs a stride-1 trace");
    HistorySegment h(model.basis->size(), model.horizon(), model.initial);
    for (std::size_t j = 0; j < states.size(); ++j) h.push(rows[j].t, states[j]);
    return h;
}

void nonlinear_rhs(const Model& model, const HistorySegment& history, double t, std::span<double> out,
                   std::span<double> taus, std::span<double> m_out) {
    const std::size_t n = model.basis->size();
    std::vector<double> u(n), v(n), m(n);
    history.interpolate(t, u, v);
    model.force->eval_F(u, out);
    model.delay->eval_M(history, t, m, taus);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = -out[k] - m[k];
        if (!std::isfinite(out[k])) throw BlowUp("non-finite forcing");
    }
    if (!m_out.empty()) std::copy(m.begin(), m.end(), m_out.begin());
}

namespace {

void advance_linear(std::span<const ModePropagator> props, const PhasePoint& in, std::span<const double> n0,
                    PhasePoint& out) {
    for (std::size_t k = 0; k < in.size(); ++k) {
        const auto& p = props[k];
        const double u = in.u[k], v = in.v[k];
        out.u[k] = p.E[0] * u + p.E[1] * v + p.phi1[1] * n0[k];
        out.v[k] = p.E[2] * u + p.E[3] * v + p.phi1[3] * n0[k];
    }
}

void correct(std::span<const ModePropagator> props, std::span<const double> n0, std::span<const double> n1,
             double dt, PhasePoint& state) {
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double dn = (n1[k] - n0[k]) / dt;
        state.u[k] += props[k].phi2[1] * dn;
        state.v[k] += props[k].phi2[3] * dn;
    }
}

void check_state(const PhasePoint& p, double t) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!std::isfinite(p.u[k]) || !std::isfinite(p.v[k]) || std::abs(p.u[k]) > 1e100 || std::abs(p.v[k]) > 1e100) {
            std::ostringstream msg;
            msg << "state blew up at t=" << t << " in mode " << k + 1;
            throw BlowUp(msg.str());
        }
    }
}

}  // namespace

PhasePoint step_etd2rk(const Model& model, std::span<const ModePropagator> props, const PhasePoint& state,
                       HistorySegment& history, double t, double dt) {
    const std::size_t n = state.size();
    std::vector<double> n0(n), n1(n);
    nonlinear_rhs(model, history, t, n0);
    PhasePoint next(n);
    advance_linear(props, state, n0, next);
    history.push(t + dt, next);
    nonlinear_rhs(model, history, t + dt, n1);
    correct(props, n0, n1, dt, next);
    history.replace_last(next);
    check_state(next, t + dt);
    return next;
}

Integrator::Integrator(Model model, double dt)
    : model_(std::move(model)),
      dt_(dt),
      history_(model_.basis->size(), model_.horizon(), model_.initial) {
    const std::size_t n = model_.basis->size();
    if (model_.initial->modes() != n) throw ConfigError("initial", "initial history size does not match the basis");
    state_ = model_.initial->at(0.0);
    history_.push(0.0, state_);
    props_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) props_.push_back(mode_propagator(model_.basis->mu(k), model_.damping, dt_));
    n0_.assign(n, 0.0);
    n1_.assign(n, 0.0);
    mvec_.assign(n, 0.0);
    taus_.assign(model_.delay->term_count(), 0.0);
    predictor_ = PhasePoint(n);
}

void Integrator::step() {
    // n0_ holds N(t) once observe() has run at this time; recompute otherwise.
    if (!n0_valid_) nonlinear_rhs(model_, history_, t_, n0_, taus_, mvec_);
    n0_valid_ = false;
    advance_linear(props_, state_, n0_, predictor_);
    const double t_next = static_cast<double>(steps_ + 1) * dt_;
    history_.push(t_next, predictor_);
    nonlinear_rhs(model_, history_, t_next, n1_);
    correct(props_, n0_, n1_, dt_, predictor_);
    history_.replace_last(predictor_);
    check_state(predictor_, t_next);
    std::swap(state_, predictor_);
    ++steps_;
    t_ = t_next;
    history_.trim(t_ - model_.horizon() - dt_);
}

TraceRow Integrator::observe() {
    nonlinear_rhs(model_, history_, t_, n0_, taus_, mvec_);
    n0_valid_ = true;

    TraceRow row;
    row.t = t_;
    row.tau = taus_;
    const auto& u = state_.u;
    const auto& v = state_.v;
    const auto pot = model_.force->eval_potentials(u);
    const ModeVector fstar = model_.force->eval_Fstar(u);
    const double au = norm_alpha(*model_.basis, u, 0.5);
    row.v_sq = inner_product(v, v);
    row.u_sq = inner_product(u, u);
    row.u_dot_v = inner_product(u, v);
    row.E = 0.5 * (row.v_sq + au * au) + pot.pi0;
    row.calE = row.E + pot.pi1;
    row.norm_M = std::sqrt(inner_product(mvec_, mvec_));
    row.m_dot_v = inner_product(mvec_, v);
    row.fstar_dot_v = inner_product(fstar, v);
    return row;
}

Trace simulate(const Model& model, const StepperConfig& cfg) {
    cfg.validate(model);
    Trace trace;
    trace.dt = cfg.dt;
    trace.stride = cfg.stride;

    const auto pre = static_cast<std::size_t>(std::ceil(model.horizon() / cfg.dt - 1e-9));
    for (std::size_t j = pre; j >= 1; --j) {
        const PhasePoint p = model.initial->at(-static_cast<double>(j) * cfg.dt);
        trace.pre_v_sq.push_back(inner_product(p.v, p.v));
    }

    const std::size_t steps = cfg.steps();
    trace.rows.reserve(steps + 1);
    Integrator integ(model, cfg.dt);
    for (std::size_t j = 0;; ++j) {
        try {
            trace.rows.push_back(integ.observe());
            if (j % cfg.stride == 0) trace.states.push_back(integ.state());
            if (j == steps) break;
            integ.step();
        } catch (const BlowUp& e) {
            trace.status = TraceStatus::BlowUp;
            trace.status_time = integ.time();
            trace.message = e.what();
            break;
        } catch (const ContractViolation& e) {
            trace.status = TraceStatus::ContractViolation;
            trace.status_time = integ.time();
            trace.message = e.what();
            break;
        }
    }
    return trace;
}

}  // namespace sdde
