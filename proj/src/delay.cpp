#include "sdde/delay.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdde/errors.hpp"

namespace sdde {

bool DelaySpec::has_state_dependent_law() const noexcept {
    return std::any_of(terms.begin(), terms.end(),
                       [](const DelayTerm& term) { return !std::holds_alternative<ConstantLaw>(term.law); });
}

void DelaySpec::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon", "delay horizon h must be positive");
    for (const auto& term : terms) {
        if (const auto* c = std::get_if<ConstantLaw>(&term.law)) {
            if (!(c->tau0 >= 0.0 && c->tau0 <= horizon)) throw ConfigError("tau0", "tau0 must lie in [0, h]");
        }
        auto check_sigma = [&](double sigma) {
            if (!(sigma >= 0.0 && sigma <= horizon)) throw ConfigError("sigma", "sigma must lie in [0, h]");
        };
        if (const auto* p = std::get_if<PointFunctional>(&term.functional))
            for (const auto& s : p->samples) check_sigma(s.sigma);
        if (const auto* a = std::get_if<AverageFunctional>(&term.functional))
            for (const auto& s : a->samples) check_sigma(s.sigma);
    }
}

double response_lipschitz(const Response& r) noexcept {
    return std::visit([](const auto& g) { return std::abs(g.a); }, r);
}

double apply_law(const DelayLaw& law, double q, double horizon) {
    if (const auto* c = std::get_if<ConstantLaw>(&law)) return c->tau0;
    if (std::holds_alternative<SigmoidLaw>(law)) return horizon * 0.5 * (1.0 + std::tanh(q));
    const double q2 = q * q;
    return horizon * q2 / (1.0 + q2);
}

DelayOperator::DelayOperator(DelaySpec spec, std::shared_ptr<const SpectralBasis> basis)
    : spec_(std::move(spec)), basis_(std::move(basis)) {
    spec_.validate();
    const std::size_t n = basis_->size();
    bool need_grid = false;
    for (auto& term : spec_.terms) {
        std::vector<std::vector<double>> values;
        if (auto* p = std::get_if<PointFunctional>(&term.functional)) {
            for (const auto& s : p->samples) {
                std::vector<double> e(n);
                for (std::size_t k = 0; k < n; ++k) e[k] = basis_->basis_value(k, s.x);
                values.push_back(std::move(e));
            }
        } else if (auto* a = std::get_if<AverageFunctional>(&term.functional)) {
            for (auto& s : a->samples) {
                if (s.xi.empty()) s.xi.assign(n, 0.0);
                if (s.xi.size() != n) throw ConfigError("xi", "averaging weight length does not match the basis");
            }
        }
        if (auto* lin = std::get_if<LinearResponse>(&term.response)) {
            if (!lin->offset.empty() && lin->offset.size() != n)
                throw ConfigError("offset", "response offset length does not match the basis");
        }
        if (std::holds_alternative<TanhResponse>(term.response)) need_grid = true;
        point_values_.push_back(std::move(values));
    }
    if (need_grid) grid_.emplace(*basis_);
}

double DelayOperator::eval_Q(std::size_t term, const HistorySegment& history, double t) const {
    const auto& spec_term = spec_.terms.at(term);
    std::vector<double> u(basis_->size());
    double q = 0.0;
    if (const auto* p = std::get_if<PointFunctional>(&spec_term.functional)) {
        for (std::size_t i = 0; i < p->samples.size(); ++i) {
            history.interpolate_u(t - p->samples[i].sigma, u);
            q += p->samples[i].c * inner_product(u, point_values_[term][i]);
        }
    } else {
        const auto& a = std::get<AverageFunctional>(spec_term.functional);
        for (const auto& s : a.samples) {
            history.interpolate_u(t - s.sigma, u);
            q += s.c * inner_product(u, s.xi);
        }
    }
    return q;
}

double DelayOperator::eval_tau(std::size_t term, const HistorySegment& history, double t) const {
    const auto& law = spec_.terms.at(term).law;
    const double q = std::holds_alternative<ConstantLaw>(law) ? 0.0 : eval_Q(term, history, t);
    const double tau = apply_law(law, q, spec_.horizon);
    if (!(tau >= 0.0 && tau <= spec_.horizon)) {
        std::ostringstream msg;
        msg << "delay law left [0, h]: tau=" << tau << " at t=" << t;
        throw ContractViolation(msg.str());
    }
    return tau;
}

void DelayOperator::add_response(std::size_t term, std::span<const double> w, std::span<double> out) const {
    const auto& response = spec_.terms.at(term).response;
    if (const auto* lin = std::get_if<LinearResponse>(&response)) {
        for (std::size_t k = 0; k < w.size(); ++k) out[k] += lin->a * w[k];
        for (std::size_t k = 0; k < lin->offset.size(); ++k) out[k] += lin->offset[k];
        return;
    }
    const double a = std::get<TanhResponse>(response).a;
    std::vector<double> values = grid_->to_physical(w);
    for (double& x : values) x = a * std::tanh(x);
    std::vector<double> proj = grid_->to_spectral(values);
    for (std::size_t k = 0; k < w.size(); ++k) out[k] += proj[k];
}

void DelayOperator::eval_M(const HistorySegment& history, double t, std::span<double> out,
                           std::span<double> taus) const {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> delayed(basis_->size());
    for (std::size_t i = 0; i < spec_.terms.size(); ++i) {
        const double tau = eval_tau(i, history, t);
        if (i < taus.size()) taus[i] = tau;
        history.interpolate_u(t - tau, delayed);
        add_response(i, delayed, out);
    }
}

ModeVector DelayOperator::eval_M(const HistorySegment& history, double t) const {
    ModeVector out(basis_->size());
    eval_M(history, t, out);
    return out;
}

DelayBoundConstants DelayOperator::bound_constants() const {
    // ||sum_{i=1}^m M_i||^2 <= m sum_i ||M_i||^2, so multi-term sums carry a factor m.
    DelayBoundConstants c;
    const double m = static_cast<double>(spec_.terms.size());
    for (const auto& term : spec_.terms) {
        double g_at_zero = 0.0;
        if (const auto* lin = std::get_if<LinearResponse>(&term.response))
            g_at_zero = inner_product(lin->offset, lin->offset);
        const double lip = response_lipschitz(term.response);
        c.g0 += 4.0 * g_at_zero;
        c.g1 += 4.0 * lip * lip;
        c.g2 += 2.0 * lip * lip * spec_.horizon;
    }
    c.g0 *= m;
    c.g1 *= m;
    c.g2 *= m;
    return c;
}

DelayBoundCheck DelayOperator::delay_bound_check(const HistorySegment& history, double t, double quad_step) const {
    DelayBoundCheck out;
    if (spec_.terms.empty()) return out;
    const ModeVector m = eval_M(history, t);
    out.lhs = inner_product(m, m);

    const std::size_t n = basis_->size();
    std::vector<double> u(n), v(n);
    history.interpolate(t, u, v);
    const double u_sq = inner_product(u, u);

    // Trapezoid for int_{t-h}^t ||u'||^2 on a grid of spacing <= quad_step.
    const double h = spec_.horizon;
    const auto pieces = static_cast<std::size_t>(std::ceil(h / quad_step - 1e-9));
    const double step = h / static_cast<double>(pieces);
    double integral = 0.0;
    for (std::size_t j = 0; j <= pieces; ++j) {
        history.interpolate(t - h + static_cast<double>(j) * step, u, v);
        const double w = (j == 0 || j == pieces) ? 0.5 : 1.0;
        integral += w * inner_product(v, v);
    }
    integral *= step;

    const auto c = bound_constants();
    out.rhs = c.g0 + c.g1 * u_sq + c.g2 * integral;
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
    return out;
}

namespace {

template <class Sampler>
double w_norm_impl(const SpectralBasis& basis, std::vector<double> times, Sampler&& sample) {
    const std::size_t n = basis.size();
    std::vector<double> u(n), v(n);
    double max_u = 0.0, max_v = 0.0;
    for (double s : times) {
        sample(s, u, v);
        max_u = std::max(max_u, norm_alpha(basis, u, 0.5));
        max_v = std::max(max_v, std::sqrt(inner_product(v, v)));
    }
    return max_u + max_v;
}

std::vector<double> uniform_times(double from, double to, std::size_t samples) {
    samples = std::max<std::size_t>(samples, 2);
    std::vector<double> times(samples);
    for (std::size_t j = 0; j < samples; ++j)
        times[j] = from + (to - from) * static_cast<double>(j) / static_cast<double>(samples - 1);
    return times;
}

}  // namespace

double w_norm(const HistorySegment& history, double t, const SpectralBasis& basis, std::size_t samples) {
    const double from = t - history.horizon();
    std::vector<double> times = uniform_times(from, t, samples);
    for (std::size_t i = 0; i < history.node_count(); ++i) {
        const double tn = history.node_time(i);
        if (tn >= from && tn <= t) times.push_back(tn);
    }
    return w_norm_impl(basis, std::move(times),
                       [&](double s, std::span<double> u, std::span<double> v) { history.interpolate(s, u, v); });
}

double w_norm(const InitialHistory& phi, double horizon, const SpectralBasis& basis, std::size_t samples) {
    return w_norm_impl(basis, uniform_times(-horizon, 0.0, samples),
                       [&](double s, std::span<double> u, std::span<double> v) { phi.eval(s, u, v); });
}

}  // namespace sdde
