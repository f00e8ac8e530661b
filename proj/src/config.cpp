#include "sdde/config.hpp"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sdde/errors.hpp"

namespace sdde {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Reads one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* child(const char* key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    T get(const char* key, T fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        return convert<T>(*v, join(path_, key));
    }

    std::string path(const char* key) const { return join(path_, key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }

    template <class T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
            return v.get<int>();
        } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<double>(v[i], index_path(path, i)));
            return out;
        } else {
            static_assert(sizeof(T) == 0, "unsupported config type");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

ModeRef read_mode(const json& v, const std::string& path) {
    ModeRef m;
    if (v.is_number_integer()) {
        m.k1 = v.get<int>();
    } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        m.k1 = v[0].get<int>();
        m.k2 = v[1].get<int>();
    } else {
        throw ConfigError(path, "mode must be an integer or a pair [k1, k2]");
    }
    if (m.k1 < 1 || m.k2 < 0) throw ConfigError(path, "wavenumbers must be positive");
    return m;
}

json write_mode(const ModeRef& m) { return m.k2 == 0 ? json(m.k1) : json::array({m.k1, m.k2}); }

std::vector<ModeValue> read_mode_values(const json* v, const std::string& path) {
    std::vector<ModeValue> out;
    if (!v) return out;
    if (!v->is_array()) throw ConfigError(path, "expected an array of {mode, value}");
    for (std::size_t i = 0; i < v->size(); ++i) {
        Reader r((*v)[i], index_path(path, i));
        ModeValue mv;
        const json* mode = r.child("mode");
        if (!mode) throw ConfigError(r.path("mode"), "missing");
        mv.mode = read_mode(*mode, r.path("mode"));
        mv.value = r.get("value", 0.0);
        r.finish();
        out.push_back(mv);
    }
    return out;
}

json write_mode_values(const std::vector<ModeValue>& v) {
    json out = json::array();
    for (const auto& mv : v) out.push_back({{"mode", write_mode(mv.mode)}, {"value", mv.value}});
    return out;
}

std::vector<FamilyConfig> read_families(const json* v, const std::string& path) {
    std::vector<FamilyConfig> out;
    if (!v) return out;
    if (!v->is_array()) throw ConfigError(path, "expected an array of history families");
    for (std::size_t i = 0; i < v->size(); ++i) {
        Reader r((*v)[i], index_path(path, i));
        FamilyConfig f;
        const json* mode = r.child("mode");
        if (!mode) throw ConfigError(r.path("mode"), "missing");
        f.mode = read_mode(*mode, r.path("mode"));
        f.a = r.get("a", 0.0);
        f.b = r.get("b", 0.0);
        f.c = r.get("c", 0.0);
        f.d = r.get("d", 0.0);
        r.finish();
        out.push_back(f);
    }
    return out;
}

json write_families(const std::vector<FamilyConfig>& v) {
    json out = json::array();
    for (const auto& f : v) out.push_back({{"mode", write_mode(f.mode)}, {"a", f.a}, {"b", f.b}, {"c", f.c}, {"d", f.d}});
    return out;
}

BasisConfig read_basis(const json* v) {
    BasisConfig b;
    if (!v) return b;
    Reader r(*v, "basis");
    b.geometry = r.get("geometry", b.geometry);
    b.p = r.get("p", b.p);
    b.N = r.get("N", b.N);
    b.mu = r.get("mu", b.mu);
    r.finish();
    if (b.geometry != "interval" && b.geometry != "square" && b.geometry != "point")
        throw ConfigError("basis.geometry", "expected interval, square or point");
    if (b.p != 1 && b.p != 2) throw ConfigError("basis.p", "p must be 1 or 2");
    if (b.N < 1) throw ConfigError("basis.N", "N must be >= 1");
    if (b.geometry == "point" && !(b.mu > 0.0)) throw ConfigError("basis.mu", "mu must be positive");
    return b;
}

ForceConfig read_force(const json* v) {
    ForceConfig f;
    if (!v) return f;
    Reader r(*v, "dynamics.nonlinearity");
    f.type = r.get("type", f.type);
    f.kappa = r.get("kappa", f.kappa);
    f.mu_b = r.get("mu_b", f.mu_b);
    f.coeffs = r.get("coeffs", f.coeffs);
    f.load = read_mode_values(r.child("load"), r.path("load"));
    f.c_nc = r.get("c_nc", f.c_nc);
    f.delta_hat = r.get("delta_hat", f.delta_hat);
    r.finish();
    if (f.type != "none" && f.type != "berger" && f.type != "kirchhoff" && f.type != "wave_poly")
        throw ConfigError("dynamics.nonlinearity.type", "expected none, berger, kirchhoff or wave_poly");
    return f;
}

std::vector<DelayTermConfig> read_delay(const json* v) {
    std::vector<DelayTermConfig> out;
    if (!v) return out;
    if (!v->is_array()) throw ConfigError("dynamics.delay", "expected an array of delay terms");
    for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string path = index_path("dynamics.delay", i);
        Reader r((*v)[i], path);
        DelayTermConfig d;
        d.response = r.get("response", d.response);
        d.a = r.get("a", d.a);
        d.offset = read_mode_values(r.child("offset"), r.path("offset"));
        d.law = r.get("law", d.law);
        d.tau0 = r.get("tau0", d.tau0);
        d.functional = r.get("functional", d.functional);
        if (const json* s = r.child("samples")) {
            if (!s->is_array()) throw ConfigError(r.path("samples"), "expected an array");
            for (std::size_t q = 0; q < s->size(); ++q) {
                Reader rs((*s)[q], index_path(r.path("samples"), q));
                SampleConfig sc;
                sc.c = rs.get("c", sc.c);
                sc.sigma = rs.get("sigma", sc.sigma);
                if (const json* x = rs.child("x")) {
                    const auto xs = Reader::convert<std::vector<double>>(*x, rs.path("x"));
                    if (xs.empty() || xs.size() > 2) throw ConfigError(rs.path("x"), "expected [x] or [x1, x2]");
                    sc.x = {xs[0], xs.size() > 1 ? xs[1] : 0.5};
                }
                sc.xi = read_mode_values(rs.child("xi"), rs.path("xi"));
                rs.finish();
                d.samples.push_back(sc);
            }
        }
        r.finish();
        if (d.response != "linear" && d.response != "tanh")
            throw ConfigError(r.path("response"), "expected linear or tanh");
        if (d.law != "constant" && d.law != "sigmoid" && d.law != "rational")
            throw ConfigError(r.path("law"), "expected constant, sigmoid or rational");
        if (d.functional != "point" && d.functional != "average")
            throw ConfigError(r.path("functional"), "expected point or average");
        out.push_back(d);
    }
    return out;
}

DynamicsConfig read_dynamics(const json* v) {
    DynamicsConfig d;
    if (!v) return d;
    Reader r(*v, "dynamics");
    d.k_damp = r.get("k_damp", d.k_damp);
    d.h = r.get("h", d.h);
    d.nonlinearity = read_force(r.child("nonlinearity"));
    d.delay = read_delay(r.child("delay"));
    r.finish();
    if (!(d.k_damp >= 0.0)) throw ConfigError("dynamics.k_damp", "damping must be >= 0");
    if (!(d.h > 0.0)) throw ConfigError("dynamics.h", "h must be positive");
    return d;
}

std::vector<ModeRef> read_modes(const json* v, const std::string& path) {
    std::vector<ModeRef> out;
    if (!v) return out;
    if (!v->is_array()) throw ConfigError(path, "expected an array of modes");
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(read_mode((*v)[i], index_path(path, i)));
    return out;
}

StepperBlock read_stepper(const json* v) {
    StepperBlock s;
    if (!v) return s;
    Reader r(*v, "stepper");
    s.dt = r.get("dt", s.dt);
    s.t_end = r.get("t_end", s.t_end);
    s.stride = r.get("stride", s.stride);
    s.trace_modes = read_modes(r.child("trace_modes"), r.path("trace_modes"));
    s.snapshot_every = r.get("snapshot_every", s.snapshot_every);
    r.finish();
    if (!(s.dt > 0.0)) throw ConfigError("stepper.dt", "dt must be positive");
    if (!(s.t_end >= 0.0)) throw ConfigError("stepper.t_end", "t_end must be >= 0");
    if (s.stride == 0) throw ConfigError("stepper.stride", "stride must be >= 1");
    if (s.snapshot_every % s.stride != 0)
        throw ConfigError("stepper.snapshot_every", "snapshot spacing must be a multiple of the stride");
    return s;
}

ExperimentBlock read_experiment(const json* v) {
    ExperimentBlock e;
    if (!v) return e;
    Reader r(*v, "experiment");
    e.sigma = r.get("sigma", e.sigma);
    e.delta = r.get("delta", e.delta);
    e.dt_levels = r.get("dt_levels", e.dt_levels);
    e.k_list = r.get("k_list", e.k_list);
    e.h_list = r.get("h_list", e.h_list);
    e.t_long = r.get("t_long", e.t_long);
    e.tail_fraction = r.get("tail_fraction", e.tail_fraction);
    e.max_spread = r.get("max_spread", e.max_spread);
    e.pairs = r.get("pairs", e.pairs);
    e.distance = r.get("distance", e.distance);
    e.lambda_spread = r.get("lambda_spread", e.lambda_spread);
    e.bundle = r.get("bundle", e.bundle);
    e.eps = r.get("eps", e.eps);
    e.psi = read_families(r.child("psi"), r.path("psi"));
    e.residual_time = r.get("residual_time", e.residual_time);
    e.k = r.get("k", e.k);
    e.a = r.get("a", e.a);
    e.tau_max = r.get("tau_max", e.tau_max);
    e.tau_step = r.get("tau_step", e.tau_step);
    e.burn_in = r.get("burn_in", e.burn_in);
    e.sample_stride = r.get("sample_stride", e.sample_stride);
    e.radii = r.get("radii", e.radii);
    e.min_points = r.get("min_points", e.min_points);
    e.min_order = r.get("min_order", e.min_order);
    r.finish();
    if (!(e.sigma > 0.0)) throw ConfigError("experiment.sigma", "sigma must be positive");
    if (!(e.delta > 0.0 && e.delta <= 0.5)) throw ConfigError("experiment.delta", "delta must lie in (0, 1/2]");
    if (e.dt_levels < 2) throw ConfigError("experiment.dt_levels", "need at least two step sizes");
    if (!(e.tail_fraction > 0.0 && e.tail_fraction <= 1.0))
        throw ConfigError("experiment.tail_fraction", "tail fraction must lie in (0, 1]");
    if (e.pairs < 1) throw ConfigError("experiment.pairs", "need at least one pair");
    if (!(e.distance >= 0.0)) throw ConfigError("experiment.distance", "distance must be >= 0");
    if (e.bundle < 4) throw ConfigError("experiment.bundle", "bundle needs at least 4 trajectories");
    for (double x : e.eps)
        if (!(x > 0.0)) throw ConfigError("experiment.eps", "eps must be positive");
    if (!(e.tau_max > 0.0)) throw ConfigError("experiment.tau_max", "tau_max must be positive");
    if (!(e.tau_step > 0.0)) throw ConfigError("experiment.tau_step", "tau_step must be positive");
    if (e.sample_stride == 0) throw ConfigError("experiment.sample_stride", "stride must be >= 1");
    if (e.radii < 2) throw ConfigError("experiment.radii", "need at least two radii");
    return e;
}

std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Byte offset of the n-th (1-based) occurrence of "key" used as an object key.
std::size_t key_offset(const std::string& text, const std::string& key, int n) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t pos = 0;
    for (int seen = 0;; ++pos) {
        pos = text.find(quoted, pos);
        if (pos == std::string::npos) return text.size();
        std::size_t after = pos + quoted.size();
        while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
        if (after < text.size() && text[after] == ':' && ++seen == n) return pos;
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::set<std::string>> open;
    std::map<std::string, int> occurrences;
    const json::parser_callback_t dup_check = [&](int, json::parse_event_t ev, json& parsed) {
        if (ev == json::parse_event_t::object_start) {
            open.emplace_back();
        } else if (ev == json::parse_event_t::object_end) {
            open.pop_back();
        } else if (ev == json::parse_event_t::key) {
            const auto key = parsed.get<std::string>();
            const int n = ++occurrences[key];
            if (!open.back().insert(key).second)
                throw ConfigError(key, "duplicate key at " + locate(text, key_offset(text, key, n)));
        }
        return true;
    };
    json root;
    try {
        root = json::parse(text, dup_check);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "parse error at " + locate(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
    }

    ExperimentConfig cfg;
    Reader r(root, "");
    cfg.description = r.get("description", cfg.description);
    cfg.seed = r.get("seed", cfg.seed);
    cfg.basis = read_basis(r.child("basis"));
    cfg.dynamics = read_dynamics(r.child("dynamics"));
    cfg.initial = read_families(r.child("initial"), "initial");
    cfg.stepper = read_stepper(r.child("stepper"));
    cfg.experiment = read_experiment(r.child("experiment"));
    r.finish();

    // Full semantic validation: the model and stepper must build.
    const Model model = build_model(cfg);
    build_stepper(cfg).validate(model);
    for (const auto& m : cfg.stepper.trace_modes) resolve_mode(*model.basis, m);
    for (const auto& f : cfg.experiment.psi) resolve_mode(*model.basis, f.mode);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["description"] = cfg.description;
    j["seed"] = cfg.seed;
    j["basis"] = {{"geometry", cfg.basis.geometry}, {"p", cfg.basis.p}, {"N", cfg.basis.N}, {"mu", cfg.basis.mu}};
    const auto& f = cfg.dynamics.nonlinearity;
    json force = {{"type", f.type},         {"kappa", f.kappa}, {"mu_b", f.mu_b},
                  {"coeffs", f.coeffs},     {"load", write_mode_values(f.load)},
                  {"c_nc", f.c_nc},         {"delta_hat", f.delta_hat}};
    json delay = json::array();
    for (const auto& d : cfg.dynamics.delay) {
        json samples = json::array();
        for (const auto& s : d.samples)
            samples.push_back({{"c", s.c}, {"sigma", s.sigma}, {"x", s.x}, {"xi", write_mode_values(s.xi)}});
        delay.push_back({{"response", d.response},
                         {"a", d.a},
                         {"offset", write_mode_values(d.offset)},
                         {"law", d.law},
                         {"tau0", d.tau0},
                         {"functional", d.functional},
                         {"samples", samples}});
    }
    j["dynamics"] = {{"k_damp", cfg.dynamics.k_damp}, {"h", cfg.dynamics.h}, {"nonlinearity", force}, {"delay", delay}};
    j["initial"] = write_families(cfg.initial);
    json modes = json::array();
    for (const auto& m : cfg.stepper.trace_modes) modes.push_back(write_mode(m));
    j["stepper"] = {{"dt", cfg.stepper.dt},
                    {"t_end", cfg.stepper.t_end},
                    {"stride", cfg.stepper.stride},
                    {"trace_modes", modes},
                    {"snapshot_every", cfg.stepper.snapshot_every}};
    const auto& e = cfg.experiment;
    j["experiment"] = {{"sigma", e.sigma},
                       {"delta", e.delta},
                       {"dt_levels", e.dt_levels},
                       {"k_list", e.k_list},
                       {"h_list", e.h_list},
                       {"t_long", e.t_long},
                       {"tail_fraction", e.tail_fraction},
                       {"max_spread", e.max_spread},
                       {"pairs", e.pairs},
                       {"distance", e.distance},
                       {"lambda_spread", e.lambda_spread},
                       {"bundle", e.bundle},
                       {"eps", e.eps},
                       {"psi", write_families(e.psi)},
                       {"residual_time", e.residual_time},
                       {"k", e.k},
                       {"a", e.a},
                       {"tau_max", e.tau_max},
                       {"tau_step", e.tau_step},
                       {"burn_in", e.burn_in},
                       {"sample_stride", e.sample_stride},
                       {"radii", e.radii},
                       {"min_points", e.min_points},
                       {"min_order", e.min_order}};
    return j.dump(2) + "\n";
}

std::shared_ptr<const SpectralBasis> build_basis(const BasisConfig& cfg) {
    if (cfg.geometry == "point") return std::make_shared<const SpectralBasis>(SpectralBasis::single_mode(cfg.mu));
    return std::make_shared<const SpectralBasis>(SpectralBasis::build(geometry_from_string(cfg.geometry), cfg.p, cfg.N));
}

std::size_t resolve_mode(const SpectralBasis& basis, const ModeRef& m) { return basis.index_of(m.k1, m.k2); }

namespace {

ModeVector mode_vector(const SpectralBasis& basis, const std::vector<ModeValue>& values) {
    if (values.empty()) return {};
    ModeVector out(basis.size(), 0.0);
    for (const auto& mv : values) out[resolve_mode(basis, mv.mode)] += mv.value;
    return out;
}

}  // namespace

InitialHistory build_initial(const SpectralBasis& basis, const std::vector<FamilyConfig>& families) {
    std::vector<HistoryFamily> fam;
    for (const auto& f : families) fam.push_back({resolve_mode(basis, f.mode), f.a, f.b, f.c, f.d});
    return InitialHistory(basis.size(), fam);
}

Model build_model(const ExperimentConfig& cfg) {
    const auto basis = build_basis(cfg.basis);
    const auto& fc = cfg.dynamics.nonlinearity;
    NonlinearitySpec force;
    if (fc.type == "berger")
        force.variant = BergerForce{fc.kappa, fc.mu_b};
    else if (fc.type == "kirchhoff")
        force.variant = KirchhoffForce{PolynomialForce{fc.coeffs}};
    else if (fc.type == "wave_poly")
        force.variant = WavePolyForce{PolynomialForce{fc.coeffs}};
    force.load = mode_vector(*basis, fc.load);
    force.c_nc = fc.c_nc;
    force.delta_hat = fc.delta_hat;

    DelaySpec delay;
    delay.horizon = cfg.dynamics.h;
    for (const auto& d : cfg.dynamics.delay) {
        DelayTerm term;
        if (d.response == "linear")
            term.response = LinearResponse{d.a, mode_vector(*basis, d.offset)};
        else
            term.response = TanhResponse{d.a};
        if (d.law == "constant")
            term.law = ConstantLaw{d.tau0};
        else if (d.law == "sigmoid")
            term.law = SigmoidLaw{};
        else
            term.law = RationalLaw{};
        if (d.functional == "point") {
            PointFunctional pf;
            for (const auto& s : d.samples) pf.samples.push_back(PointSample{s.c, s.sigma, {s.x[0], s.x[1]}});
            term.functional = pf;
        } else {
            AverageFunctional af;
            for (const auto& s : d.samples) af.samples.push_back(AverageSample{s.c, s.sigma, mode_vector(*basis, s.xi)});
            term.functional = af;
        }
        delay.terms.push_back(std::move(term));
    }
    return make_model(basis, std::move(force), std::move(delay), cfg.dynamics.k_damp,
                      build_initial(*basis, cfg.initial));
}

StepperConfig build_stepper(const ExperimentConfig& cfg) {
    return StepperConfig{cfg.stepper.dt, cfg.stepper.t_end, cfg.stepper.stride};
}

}  // namespace sdde
