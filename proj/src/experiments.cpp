#include "sdde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>

#include "sdde/attractor.hpp"
#include "sdde/diagnostics.hpp"
#include "sdde/errors.hpp"
#include "sdde/ode_stability.hpp"

namespace sdde {

using nlohmann::json;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// JSON has no infinity; non-finite numbers become strings.
json jnum(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json jvec(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(jnum(x));
    return out;
}

class Csv {
public:
    Csv(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path);
        row_strings(header);
    }
    void row(const std::vector<double>& values) {
        std::vector<std::string> s;
        for (double v : values) s.push_back(num(v));
        row_strings(s);
    }
    void row_strings(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string mode_label(const SpectralBasis& basis, std::size_t i) {
    const auto& m = basis.mode(i);
    return basis.geometry() == Geometry::Square ? std::to_string(m.k1) + "_" + std::to_string(m.k2)
                                                : std::to_string(m.k1);
}

struct Context {
    const ExperimentConfig& cfg;
    std::filesystem::path dir;
    RunResult result;

    std::string artifact(const std::string& name) {
        const auto p = (dir / name).string();
        result.artifacts.push_back(p);
        return p;
    }
    void record(json r, bool pass) {
        r["pass"] = pass;
        result.records.push_back(r.dump());
    }
};

json base_record(const std::string& sub, const ExperimentConfig& cfg) {
    return json{{"subcommand", sub}, {"seed", cfg.seed}, {"config", json::parse(serialize_config(cfg))}};
}

StepperConfig halved(StepperConfig s, int level) {
    s.dt /= static_cast<double>(1 << level);
    s.stride *= static_cast<std::size_t>(1 << level);
    return s;
}

std::vector<std::size_t> traced_modes(const Model& model, const ExperimentConfig& cfg) {
    std::vector<std::size_t> modes;
    if (cfg.stepper.trace_modes.empty()) {
        for (std::size_t i = 0; i < model.basis->size(); ++i) modes.push_back(i);
    } else {
        for (const auto& m : cfg.stepper.trace_modes) modes.push_back(resolve_mode(*model.basis, m));
    }
    return modes;
}

bool ratio_ok(double r) { return r >= 3.0 && r <= 5.0; }

void run_simulate(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const Trace trace = simulate(model, build_stepper(ctx.cfg));
    write_trace_csv(ctx.artifact("trace.csv"), model, trace, traced_modes(model, ctx.cfg));
    write_snapshots(ctx.artifact("snapshots.txt"), model, trace, ctx.cfg.stepper.snapshot_every);
    json r = base_record("simulate", ctx.cfg);
    r["status"] = to_string(trace.status);
    r["t_end"] = trace.t_end();
    if (!trace.completed()) {
        r["status_time"] = trace.status_time;
        r["message"] = trace.message;
    }
    ctx.record(r, trace.completed());
}

void run_energy_check(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    std::vector<double> dts, maxr, bound;
    bool pass = true;
    for (int level = 0; level < ctx.cfg.experiment.dt_levels; ++level) {
        const StepperConfig s = halved(build_stepper(ctx.cfg), level);
        const Trace trace = simulate(model, s);
        if (!trace.completed()) {
            pass = false;
            break;
        }
        const EnergyLedger L = energy_ledger(model, trace);
        if (level == 0) {
            Csv csv(ctx.artifact("energy.csv"), {"t", "E", "calE", "damping_work", "fstar_work", "delay_work", "residual"});
            for (std::size_t j = 0; j < L.t.size(); j += s.stride)
                csv.row({L.t[j], L.E[j], L.calE[j], L.damping_work[j], L.fstar_work[j], L.delay_work[j], L.residual[j]});
        }
        dts.push_back(s.dt);
        maxr.push_back(L.max_abs_residual());
        bound.push_back(1e-4 * (1.0 + L.max_abs_calE()));
        pass = pass && maxr.back() <= bound.back();
    }
    std::vector<double> ratios;
    for (std::size_t i = 1; i < maxr.size(); ++i) {
        ratios.push_back(maxr[i - 1] / maxr[i]);
        pass = pass && ratio_ok(ratios.back());
    }
    json r = base_record("energy-check", ctx.cfg);
    r["dt"] = jvec(dts);
    r["max_residual"] = jvec(maxr);
    r["residual_bound"] = jvec(bound);
    r["ratios"] = jvec(ratios);
    ctx.record(r, pass && maxr.size() == static_cast<std::size_t>(ctx.cfg.experiment.dt_levels));
}

void run_dissipativity(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    std::vector<double> hs = e.h_list.empty() ? std::vector<double>{ctx.cfg.dynamics.h} : e.h_list;
    StepperConfig s = build_stepper(ctx.cfg);
    s.t_end = e.t_long;
    const auto table = dissipativity_sweep(model, e.k_list, hs, s, e.tail_fraction);
    Csv csv(ctx.artifact("dissipativity.csv"), {"k", "h", "R", "status"});
    bool pass = true;
    json spreads = json::array();
    for (double h : hs) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& t : table)
            if (t.h == h) {
                lo = std::min(lo, t.R);
                hi = std::max(hi, t.R);
            }
        const double spread = hi / lo;
        spreads.push_back({{"h", h}, {"spread", jnum(spread)}});
        pass = pass && std::isfinite(spread) && spread <= e.max_spread;
    }
    json entries = json::array();
    for (const auto& t : table) {
        csv.row_strings({num(t.k), num(t.h), num(t.R), to_string(t.status)});
        entries.push_back({{"k", t.k}, {"h", t.h}, {"R", jnum(t.R)}, {"status", to_string(t.status)}});
        pass = pass && t.status == TraceStatus::Completed;
    }
    json r = base_record("dissipativity", ctx.cfg);
    r["entries"] = entries;
    r["spread"] = spreads;
    r["max_spread"] = e.max_spread;
    ctx.record(r, pass);
}

void run_quasi_stability(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    const SpectralBasis& basis = *model.basis;
    const double h = model.horizon();
    Rng rng(ctx.cfg.seed);
    QuasiStabilityOptions opt;
    opt.delta = e.delta;
    const double base_w = w_norm(*model.initial, h, basis);
    const double jitter = 0.1 * (base_w > 0.0 ? base_w : 1.0);

    std::vector<QuasiStabilityFit> fits;
    Csv csv(ctx.artifact("quasi_stability.csv"), {"pair", "lambda", "fit_residual", "C1", "C2", "floor", "driver_max"});
    for (int i = 0; i < e.pairs; ++i) {
        const InitialHistory r1 = random_direction(basis, rng);
        const InitialHistory r2 = random_direction(basis, rng);
        const InitialHistory phi1 = model.initial->plus(r1, jitter / w_norm(r1, h, basis));
        const InitialHistory phi2 = e.distance > 0.0 ? phi1.plus(r2, e.distance / w_norm(r2, h, basis)) : phi1;
        fits.push_back(quasi_stability_fit(model, phi1, phi2, build_stepper(ctx.cfg), opt));
        const auto& f = fits.back();
        csv.row({static_cast<double>(i), f.lambda, f.fit_residual, f.C1, f.C2, f.floor, f.driver_max});
    }
    double mean = 0.0;
    for (const auto& f : fits) mean += f.lambda / static_cast<double>(fits.size());
    bool pass = true;
    json pairs = json::array();
    for (const auto& f : fits) {
        const bool floor_ok = std::isfinite(f.C2) && f.floor <= f.C2 * f.driver_max * f.driver_max;
        pass = pass && !f.degenerate && f.lambda > 0.0 && std::abs(f.lambda - mean) <= e.lambda_spread * mean &&
               floor_ok;
        pairs.push_back({{"lambda", jnum(f.lambda)},
                         {"fit_residual", jnum(f.fit_residual)},
                         {"C1", jnum(f.C1)},
                         {"C2", jnum(f.C2)},
                         {"floor", jnum(f.floor)},
                         {"driver_max", jnum(f.driver_max)},
                         {"degenerate", f.degenerate},
                         {"status", to_string(f.status)}});
    }
    json r = base_record("quasi-stability", ctx.cfg);
    r["pairs"] = pairs;
    r["lambda_mean"] = jnum(mean);
    ctx.record(r, pass);
}

void run_lipschitz(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    Rng rng(ctx.cfg.seed);
    const InitialHistory psi =
        e.psi.empty() ? random_direction(*model.basis, rng) : build_initial(*model.basis, e.psi);
    const auto res = lipschitz_ratio(model, *model.initial, psi, e.eps, build_stepper(ctx.cfg));
    Csv csv(ctx.artifact("lipschitz.csv"), {"eps", "ratio"});
    for (std::size_t i = 0; i < res.eps.size(); ++i) csv.row({res.eps[i], res.ratios[i]});
    json r = base_record("lipschitz", ctx.cfg);
    r["eps"] = jvec(res.eps);
    r["ratios"] = jvec(res.ratios);
    r["spread"] = jnum(res.spread);
    ctx.record(r, res.within_factor_two);
}

void run_residual(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    const double t = e.residual_time > 0.0 ? e.residual_time : 2.0 * model.horizon();
    std::vector<double> dts, res;
    bool pass = true;
    for (int level = 0; level < e.dt_levels; ++level) {
        StepperConfig s = build_stepper(ctx.cfg);
        s.dt /= static_cast<double>(1 << level);
        s.stride = 1;
        s.t_end = t + s.dt;
        const Trace trace = simulate(model, s);
        if (!trace.completed()) {
            pass = false;
            break;
        }
        dts.push_back(s.dt);
        res.push_back(equation_residual(model, trace, t));
    }
    std::vector<double> ratios;
    for (std::size_t i = 1; i < res.size(); ++i) {
        ratios.push_back(res[i - 1] / res[i]);
        pass = pass && ratio_ok(ratios.back());
    }
    Csv csv(ctx.artifact("residual.csv"), {"dt", "residual"});
    for (std::size_t i = 0; i < res.size(); ++i) csv.row({dts[i], res[i]});
    json r = base_record("residual", ctx.cfg);
    r["t"] = t;
    r["dt"] = jvec(dts);
    r["residual"] = jvec(res);
    r["ratios"] = jvec(ratios);
    ctx.record(r, pass);
}

void run_ode_stability(Context& ctx) {
    const auto& e = ctx.cfg.experiment;
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double tau = static_cast<double>(i) * e.tau_step;
        if (tau > e.tau_max + 1e-12) break;
        grid.push_back(tau);
    }
    const auto scan = stability_scan(e.k, e.a, grid);
    Csv csv(ctx.artifact("ode_stability.csv"), {"tau", "re_lambda", "im_lambda"});
    bool all_stable = true;
    for (const auto& p : scan) {
        csv.row({p.tau, p.re, p.im});
        all_stable = all_stable && p.re < 0.0;
    }
    const TauStar star = find_tau_star(e.k, e.a, scan);
    json r = base_record("ode-stability", ctx.cfg);
    r["k"] = e.k;
    r["a"] = e.a;
    r["stable_on_grid"] = all_stable;
    r["switch_found"] = star.found;
    if (star.found) {
        r["tau_star"] = star.tau;
        r["omega"] = star.omega;
        r["crossing_residual"] = star.residual;
    } else {
        r["result"] = "no switch found on range";
    }
    ctx.record(r, !star.found || star.residual <= 1e-8);
}

void run_attractor_dim(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    StepperConfig s = build_stepper(ctx.cfg);
    s.stride = e.sample_stride;
    const Trace trace = simulate(model, s);
    json r = base_record("attractor-dim", ctx.cfg);
    if (!trace.completed()) {
        r["status"] = to_string(trace.status);
        r["message"] = trace.message;
        ctx.record(r, false);
        return;
    }
    const PointCloud cloud = sample_cloud(model, trace, e.burn_in, e.sample_stride, e.min_points);
    const auto radii = default_radii(cloud, e.radii);
    DimensionOptions opt;
    opt.seed = ctx.cfg.seed;
    const auto est = correlation_dimension(cloud, radii, opt);
    Csv csv(ctx.artifact("attractor.csv"), {"r", "C_r", "local_slope"});
    for (std::size_t i = 0; i < radii.size(); ++i) csv.row({est.radii[i], est.C[i], est.local_slope[i]});
    r["points"] = cloud.size();
    r["plateau"] = est.plateau;
    r["slope"] = jnum(est.slope);
    r["window"] = {jnum(est.radii[est.window_lo]), jnum(est.radii[est.window_hi])};
    r["confidence"] = jnum(est.confidence);
    ctx.record(r, est.plateau);
}

void run_attraction_rate(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    const auto rate =
        attraction_rate(model, static_cast<std::size_t>(e.bundle), e.distance, build_stepper(ctx.cfg), ctx.cfg.seed);
    Csv csv(ctx.artifact("attraction.csv"), {"t", "D"});
    for (std::size_t i = 0; i < rate.t.size(); ++i) csv.row({rate.t[i], rate.D[i]});
    json r = base_record("attraction-rate", ctx.cfg);
    r["gamma_D"] = jnum(rate.gamma);
    r["t_D"] = rate.t_D;
    r["C_D"] = jnum(rate.C_D);
    r["fit_residual"] = jnum(rate.fit_residual);
    r["flagged"] = rate.flagged;
    ctx.record(r, !rate.flagged);
}

void run_convergence(Context& ctx) {
    const Model model = build_model(ctx.cfg);
    const auto& e = ctx.cfg.experiment;
    const int levels = std::max(3, e.dt_levels);
    std::vector<Trace> traces;
    bool completed = true;
    for (int level = 0; level < levels; ++level) {
        traces.push_back(simulate(model, halved(build_stepper(ctx.cfg), level)));
        completed = completed && traces.back().completed();
    }
    std::vector<double> gaps, orders;
    if (completed)
        for (int level = 1; level < levels; ++level)
            gaps.push_back(max_state_gap(*model.basis, traces[level - 1], traces[level]));
    for (std::size_t i = 1; i < gaps.size(); ++i) orders.push_back(std::log2(gaps[i - 1] / gaps[i]));
    Csv csv(ctx.artifact("convergence.csv"), {"dt", "self_gap"});
    for (std::size_t i = 0; i < gaps.size(); ++i) csv.row({traces[i].dt, gaps[i]});
    bool pass = completed && !orders.empty();
    for (double o : orders) pass = pass && o >= e.min_order;
    json r = base_record("convergence", ctx.cfg);
    json status = json::array();
    for (const auto& t : traces) status.push_back(to_string(t.status));
    r["status"] = status;
    r["self_gap"] = jvec(gaps);
    r["orders"] = jvec(orders);
    r["min_order"] = e.min_order;
    ctx.record(r, pass);
}

const std::map<std::string, std::function<void(Context&)>>& table() {
    static const std::map<std::string, std::function<void(Context&)>> t{
        {"simulate", run_simulate},
        {"energy-check", run_energy_check},
        {"dissipativity", run_dissipativity},
        {"quasi-stability", run_quasi_stability},
        {"lipschitz", run_lipschitz},
        {"residual", run_residual},
        {"ode-stability", run_ode_stability},
        {"attractor-dim", run_attractor_dim},
        {"attraction-rate", run_attraction_rate},
        {"convergence", run_convergence},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"simulate",      "energy-check", "dissipativity", "quasi-stability",
                                                "lipschitz",     "residual",     "ode-stability", "attractor-dim",
                                                "attraction-rate", "convergence"};
    return names;
}

bool is_subcommand(const std::string& name) { return table().count(name) > 0; }

RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto it = table().find(subcommand);
    if (it == table().end()) throw ConfigError("subcommand", "unknown subcommand '" + subcommand + "'");
    std::filesystem::create_directories(out_dir);
    Context ctx{cfg, out_dir, {}};
    it->second(ctx);
    ctx.result.pass = !ctx.result.records.empty();
    for (const auto& rec : ctx.result.records) ctx.result.pass = ctx.result.pass && json::parse(rec).at("pass").get<bool>();
    return ctx.result;
}

InitialHistory random_direction(const SpectralBasis& basis, Rng& rng, std::size_t modes) {
    std::vector<HistoryFamily> fam;
    for (std::size_t q = 0; q < std::min(modes, basis.size()); ++q) {
        const double a = rng.normal(), b = rng.normal();
        fam.push_back({q, a, b, 0.0, 0.0});
    }
    return InitialHistory(basis.size(), fam);
}

void write_trace_csv(const std::string& path, const Model& model, const Trace& trace,
                     const std::vector<std::size_t>& modes) {
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < model.delay->term_count(); ++i) header.push_back("tau_" + std::to_string(i + 1));
    for (const char* c : {"E", "calE", "normM"}) header.push_back(c);
    for (std::size_t q : modes) {
        header.push_back("u_" + mode_label(*model.basis, q));
        header.push_back("v_" + mode_label(*model.basis, q));
    }
    Csv csv(path, header);
    for (std::size_t s = 0; s < trace.states.size(); ++s) {
        const auto& row = trace.rows[s * trace.stride];
        std::vector<double> v{row.t};
        v.insert(v.end(), row.tau.begin(), row.tau.end());
        v.insert(v.end(), {row.E, row.calE, row.norm_M});
        for (std::size_t q : modes) {
            v.push_back(trace.states[s].u[q]);
            v.push_back(trace.states[s].v[q]);
        }
        csv.row(v);
    }
}

void write_snapshots(const std::string& path, const Model& model, const Trace& trace, std::size_t every) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const SpectralBasis& basis = *model.basis;
    auto block = [&](std::size_t s) {
        out << "# t=" << num(trace.rows[s * trace.stride].t) << "\n";
        for (std::size_t q = 0; q < basis.size(); ++q) {
            const auto& m = basis.mode(q);
            out << m.k1 << ' ' << m.k2 << ' ' << num(trace.states[s].u[q]) << ' ' << num(trace.states[s].v[q]) << '\n';
        }
    };
    if (trace.states.empty()) return;
    if (every == 0) {
        block(trace.states.size() - 1);
        return;
    }
    for (std::size_t s = 0; s < trace.states.size(); ++s)
        if ((s * trace.stride) % every == 0) block(s);
}

double max_state_gap(const SpectralBasis& basis, const Trace& coarse, const Trace& fine) {
    double gap = 0.0;
    for (std::size_t s = 0; s < coarse.states.size(); ++s) {
        const double t = static_cast<double>(s * coarse.stride) * coarse.dt;
        const auto step = static_cast<std::size_t>(std::llround(t / fine.dt));
        if (step % fine.stride != 0 || step / fine.stride >= fine.states.size()) continue;
        gap = std::max(gap, std::sqrt(energy_distance_sq(basis, coarse.states[s], fine.states[step / fine.stride])));
    }
    return gap;
}

}  // namespace sdde
