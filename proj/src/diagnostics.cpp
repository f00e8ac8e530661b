#include "sdde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "sdde/errors.hpp"

namespace sdde {

namespace {

// ||v||^2 at grid index j (j < 0 reaches into the initial function).
class VelocityGrid {
public:
    explicit VelocityGrid(const Trace& trace) : trace_(trace), pre_(static_cast<long>(trace.pre_v_sq.size())) {}

    double operator()(long j) const {
        if (j >= 0) return trace_.rows[static_cast<std::size_t>(j)].v_sq;
        return trace_.pre_v_sq.at(static_cast<std::size_t>(pre_ + j));
    }
    // Linear interpolation between grid values at time s >= -pre dt.
    double at(double s) const {
        const double x = s / trace_.dt;
        const long j = static_cast<long>(std::floor(x + 1e-9));
        const double w = std::clamp(x - static_cast<double>(j), 0.0, 1.0);
        if (w <= 1e-9) return (*this)(j);
        return (1.0 - w) * (*this)(j) + w * (*this)(j + 1);
    }

    // int_{a}^{t_j} weight(xi) ||v(xi)||^2 dxi by trapezoid on the step grid.
    template <class Weight>
    double integrate(double a, long j_end, Weight&& weight) const {
        const double dt = trace_.dt;
        const long j_a = static_cast<long>(std::ceil(a / dt - 1e-9));
        double sum = 0.0;
        const double ta = static_cast<double>(j_a) * dt;
        if (ta - a > 1e-12 * dt) sum += 0.5 * (ta - a) * (weight(a) * at(a) + weight(ta) * (*this)(j_a));
        for (long j = j_a; j < j_end; ++j) {
            const double t0 = static_cast<double>(j) * dt, t1 = t0 + dt;
            sum += 0.5 * dt * (weight(t0) * (*this)(j) + weight(t1) * (*this)(j + 1));
        }
        return sum;
    }

private:
    const Trace& trace_;
    long pre_;
};

void require_trace(const Trace& trace) {
    if (trace.rows.empty()) throw std::invalid_argument("empty trace");
}

}  // namespace

double EnergyLedger::max_abs_residual() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, std::abs(r));
    return m;
}

double EnergyLedger::max_abs_calE() const {
    double m = 0.0;
    for (double e : calE) m = std::max(m, std::abs(e));
    return m;
}

EnergyLedger energy_ledger(const Model& model, const Trace& trace) {
    require_trace(trace);
    EnergyLedger L;
    const std::size_t n = trace.rows.size();
    const double k = model.damping, dt = trace.dt;
    L.t.resize(n);
    L.E.resize(n);
    L.calE.resize(n);
    L.damping_work.assign(n, 0.0);
    L.fstar_work.assign(n, 0.0);
    L.delay_work.assign(n, 0.0);
    L.residual.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& r = trace.rows[j];
        L.t[j] = r.t;
        L.E[j] = r.E;
        L.calE[j] = r.calE;
        if (j > 0) {
            const auto& q = trace.rows[j - 1];
            L.damping_work[j] = L.damping_work[j - 1] + 0.5 * dt * k * (q.v_sq + r.v_sq);
            L.fstar_work[j] = L.fstar_work[j - 1] + 0.5 * dt * (q.fstar_dot_v + r.fstar_dot_v);
            L.delay_work[j] = L.delay_work[j - 1] + 0.5 * dt * (q.m_dot_v + r.m_dot_v);
        }
        L.residual[j] = L.calE[j] + L.damping_work[j] - L.calE[0] + L.fstar_work[j] + L.delay_work[j];
    }
    return L;
}

ResidualSeries energy_residual(const Model& model, const Trace& trace) {
    auto L = energy_ledger(model, trace);
    ResidualSeries out;
    out.max_abs = L.max_abs_residual();
    out.r = std::move(L.residual);
    return out;
}

void LyapunovParams::validate(double k) const {
    if (!(sigma > 0.0)) throw ConfigError("sigma", "Lyapunov sigma must be positive");
    const double g = gamma(k);
    if (!(g * k < 0.5 && g < 0.5)) throw ConfigError("sigma", "gamma k < 1/2 and gamma < 1/2 are required");
}

std::vector<double> lyapunov_series(const Model& model, const Trace& trace, const LyapunovParams& params) {
    require_trace(trace);
    const double k = model.damping, h = model.horizon(), dt = trace.dt;
    params.validate(k);
    const double gamma = params.gamma(k), mu_l = LyapunovParams::mu(k);
    const VelocityGrid vel(trace);
    std::vector<double> V(trace.rows.size());
    for (std::size_t j = 0; j < trace.rows.size(); ++j) {
        const auto& r = trace.rows[j];
        const double t = static_cast<double>(j) * dt;
        // (1/h) int_0^h int_{t-s}^t f = (1/h) int_{t-h}^t f(xi) (xi - t + h) dxi
        const double memory =
            h > 0.0 ? vel.integrate(t - h, static_cast<long>(j), [&](double xi) { return xi - t + h; }) / h : 0.0;
        V[j] = r.calE + gamma * r.u_dot_v + mu_l * memory;
    }
    return V;
}

EquivalenceBelt equivalence_belt(const Model& model, const Trace& trace, const LyapunovParams& params) {
    const auto V = lyapunov_series(model, trace, params);
    const double mu_l = LyapunovParams::mu(model.damping), h = model.horizon(), dt = trace.dt;
    const VelocityGrid vel(trace);
    EquivalenceBelt belt;
    for (std::size_t j = 0; j < V.size(); ++j) {
        const double t = static_cast<double>(j) * dt;
        const double E = trace.rows[j].E;
        const double window = vel.integrate(t - h, static_cast<long>(j), [](double) { return 1.0; });
        belt.c_lower = std::max(belt.c_lower, 0.5 * E - V[j]);
        belt.c_upper = std::max(belt.c_upper, V[j] - 2.0 * E - mu_l * window);
        belt.max_E = std::max(belt.max_E, E);
    }
    return belt;
}

std::vector<SweepEntry> dissipativity_sweep(const Model& base, std::span<const double> k_list,
                                            std::span<const double> h_list, const StepperConfig& cfg,
                                            double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw ConfigError("tail_fraction", "tail fraction must lie in (0, 1]");
    std::vector<SweepEntry> table;
    for (double k : k_list)
        for (double h : h_list) {
            SweepEntry e;
            e.k = k;
            e.h = h;
            table.push_back(e);
        }

    std::vector<Model> models;
    models.reserve(table.size());
    for (const auto& e : table) models.push_back(base.with_horizon(e.h).with_damping(e.k));
    for (const auto& m : models) cfg.validate(m);

    const auto count = static_cast<std::int64_t>(table.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
        auto& entry = table[static_cast<std::size_t>(i)];
        StepperConfig run = cfg;
        run.stride = std::max<std::size_t>(1, cfg.steps());
        const Trace trace = simulate(models[static_cast<std::size_t>(i)], run);
        entry.status = trace.status;
        entry.message = trace.message;
        if (!trace.completed()) continue;
        const double t_tail = trace.t_end() * (1.0 - tail_fraction);
        double R = 0.0;
        for (const auto& row : trace.rows)
            if (row.t >= t_tail - 1e-12) R = std::max(R, std::sqrt(2.0 * std::max(row.E, 0.0)));
        entry.R = R;
    }
    return table;
}

BundleSeries simulate_bundle(const Model& model, std::span<const InitialHistory> members, const StepperConfig& cfg,
                             double delta) {
    if (members.empty()) throw std::invalid_argument("bundle needs a reference member");
    cfg.validate(model);
    const std::size_t m = members.size() - 1;
    const SpectralBasis& basis = *model.basis;
    std::vector<std::unique_ptr<Integrator>> integ;
    for (const auto& phi : members) integ.push_back(std::make_unique<Integrator>(model.with_initial(phi), cfg.dt));

    BundleSeries out;
    out.dist_sq.resize(m);
    out.driver_sq.resize(m);
    std::vector<double> running(m, 0.0);
    ModeVector du(basis.size());

    const std::size_t steps = cfg.steps();
    const auto members_count = static_cast<std::int64_t>(members.size());
    std::vector<std::string> errors(members.size());
    std::vector<int> kinds(members.size(), 0);
    for (std::size_t j = 0;; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto& a = integ[i + 1]->state();
            const auto& b = integ[0]->state();
            for (std::size_t q = 0; q < du.size(); ++q) du[q] = a.u[q] - b.u[q];
            const double drv = norm_alpha(basis, du, 0.5 - delta);
            running[i] = std::max(running[i], drv * drv);
        }
        if (j % cfg.stride == 0) {
            out.t.push_back(static_cast<double>(j) * cfg.dt);
            for (std::size_t i = 0; i < m; ++i) {
                out.dist_sq[i].push_back(energy_distance_sq(basis, integ[i + 1]->state(), integ[0]->state()));
                out.driver_sq[i].push_back(running[i]);
            }
            const auto& s = integ[0]->state();
            const double au = norm_alpha(basis, s.u, 0.5);
            out.ref_energy.push_back(0.5 * (inner_product(s.v, s.v) + au * au) +
                                     model.force->eval_potentials(s.u).pi0);
        }
        if (j == steps) break;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < members_count; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            try {
                integ[idx]->step();
            } catch (const BlowUp& e) {
                kinds[idx] = 1;
                errors[idx] = e.what();
            } catch (const ContractViolation& e) {
                kinds[idx] = 2;
                errors[idx] = e.what();
            }
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            if (kinds[i] != 0) {
                out.status = kinds[i] == 1 ? TraceStatus::BlowUp : TraceStatus::ContractViolation;
                out.message = "member " + std::to_string(i) + ": " + errors[i];
                return out;
            }
    }
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("line fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss += e * e;
    }
    f.rms = std::sqrt(ss / static_cast<double>(n));
    return f;
}

QuasiStabilityFit quasi_stability_fit(const Model& model, const InitialHistory& phi1, const InitialHistory& phi2,
                                      const StepperConfig& cfg, const QuasiStabilityOptions& opt) {
    QuasiStabilityFit fit;
    const InitialHistory diff = phi1.plus(phi2, -1.0);
    const double w = w_norm(diff, model.horizon(), *model.basis);
    fit.initial_distance_sq = w * w;

    const InitialHistory members[] = {phi2, phi1};
    const auto bundle = simulate_bundle(model, members, cfg, opt.delta);
    fit.status = bundle.status;
    if (bundle.status != TraceStatus::Completed) {
        fit.degenerate = true;
        return fit;
    }
    const auto& t = bundle.t;
    const auto& d = bundle.dist_sq[0];
    const auto& drv = bundle.driver_sq[0];
    fit.driver_max = std::sqrt(drv.back());

    const double T = t.back();
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] <= opt.fit_fraction * T + 1e-12 && d[i] > opt.degenerate_below) {
            xs.push_back(t[i]);
            ys.push_back(std::log(d[i]));
        }
    if (xs.size() < 2 || !(fit.initial_distance_sq > 0.0)) {
        fit.degenerate = true;
        return fit;
    }
    const LineFit line = fit_line(xs, ys);
    fit.lambda = -line.slope;
    fit.fit_residual = line.rms;
    fit.C1 = std::exp(line.intercept) / fit.initial_distance_sq;

    std::vector<double> tail;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= (1.0 - opt.tail_fraction) * T - 1e-12) tail.push_back(d[i]);
    std::nth_element(tail.begin(), tail.begin() + static_cast<long>(tail.size() / 2), tail.end());
    fit.floor = tail[tail.size() / 2];

    // Smallest C2 making the estimate hold at every sample of the fitted C1, lambda.
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double excess = d[i] - fit.C1 * std::exp(-fit.lambda * t[i]) * fit.initial_distance_sq;
        if (excess > 0.0 && drv[i] > 0.0) fit.C2 = std::max(fit.C2, excess / drv[i]);
    }
    if (fit.C2 == 0.0 && fit.driver_max > 0.0) fit.C2 = fit.floor / (fit.driver_max * fit.driver_max);
    return fit;
}

LipschitzResult lipschitz_ratio(const Model& model, const InitialHistory& phi, const InitialHistory& psi,
                                std::span<const double> eps_list, const StepperConfig& cfg) {
    const double psi_w = w_norm(psi, model.horizon(), *model.basis);
    if (!(psi_w > 0.0)) throw std::invalid_argument("perturbation direction psi must be non-zero");
    if (eps_list.empty()) throw std::invalid_argument("eps list is empty");
    for (double e : eps_list)
        if (!(e > 0.0)) throw std::invalid_argument("eps must be positive");

    LipschitzResult out;
    out.eps.assign(eps_list.begin(), eps_list.end());
    std::vector<InitialHistory> members{phi};
    for (double e : eps_list) members.push_back(phi.plus(psi, e));
    const auto bundle = simulate_bundle(model, members, cfg);
    if (bundle.status != TraceStatus::Completed) throw BlowUp("Lipschitz run did not complete: " + bundle.message);
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double sup = std::sqrt(*std::max_element(bundle.dist_sq[i].begin(), bundle.dist_sq[i].end()));
        out.ratios.push_back(sup / (eps_list[i] * psi_w));
    }
    const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
    out.spread = *hi / *lo;
    out.within_factor_two = out.spread <= 2.0;
    return out;
}

double equation_residual(const Model& model, const Trace& trace, double t) {
    if (trace.stride != 1) throw std::invalid_argument("equation residual needs a stride-1 trace");
    const double dt = trace.dt, h = model.horizon();
    if (t < h + 2.0 * dt - 1e-12) throw std::invalid_argument("equation residual requires t >= h + 2 dt");
    const auto j = static_cast<std::size_t>(std::llround(t / dt));
    if (std::abs(static_cast<double>(j) * dt - t) > 1e-9 * std::max(1.0, t))
        throw std::invalid_argument("residual time must lie on the step grid");
    if (j + 1 >= trace.states.size()) throw std::invalid_argument("trace must extend one step past t");

    const SpectralBasis& basis = *model.basis;
    const auto& s = trace.states[j];
    const auto& prev = trace.states[j - 1];
    const auto& next = trace.states[j + 1];
    const ModeVector F = model.force->eval_F(s.u);
    const HistorySegment history = trace.history(model);
    const ModeVector M = model.delay->eval_M(history, t);
    double sum = 0.0;
    for (std::size_t q = 0; q < basis.size(); ++q) {
        const double acc = (next.v[q] - prev.v[q]) / (2.0 * dt);
        const double r = acc + model.damping * s.v[q] + basis.mu(q) * s.u[q] + F[q] + M[q];
        sum += r * r;
    }
    return std::sqrt(sum);
}

}  // namespace sdde
