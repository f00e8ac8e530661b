#pragma once

// State-dependent delay term M(u_t) = sum_i G_i(u(t - tau_i(u_t))) with
// tau_i = g_i(Q_i[u_t]).

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sdde/collocation.hpp"
#include "sdde/history.hpp"
#include "sdde/spectral.hpp"

namespace sdde {

// G(w) = a w + offset in coefficients (offset empty means G(0) = 0).
struct LinearResponse {
    double a = 0.0;
    ModeVector offset;
};
// G(w) = a tanh(w(x)), evaluated pseudospectrally.
struct TanhResponse {
    double a = 0.0;
};
using Response = std::variant<LinearResponse, TanhResponse>;

struct ConstantLaw {
    double tau0 = 0.0;
};
// g(q) = h (1 + tanh q) / 2
struct SigmoidLaw {};
// g(q) = h q^2 / (1 + q^2)
struct RationalLaw {};
using DelayLaw = std::variant<ConstantLaw, SigmoidLaw, RationalLaw>;

// sum_i c_i u(t - sigma_i, a_i)
struct PointSample {
    double c = 1.0;
    double sigma = 0.0;
    Point2 x{0.5, 0.5};
};
// sum_i c_i (u(t - sigma_i), xi_i)
struct AverageSample {
    double c = 1.0;
    double sigma = 0.0;
    ModeVector xi;
};
struct PointFunctional {
    std::vector<PointSample> samples;
};
struct AverageFunctional {
    std::vector<AverageSample> samples;
};
using DelayFunctional = std::variant<PointFunctional, AverageFunctional>;

struct DelayTerm {
    Response response = LinearResponse{};
    DelayLaw law = ConstantLaw{};
    DelayFunctional functional = PointFunctional{};
};

struct DelaySpec {
    double horizon = 0.1;
    std::vector<DelayTerm> terms;

    bool has_state_dependent_law() const noexcept;
    void validate() const;
};

// Constants of ||M||^2 <= g0 + g1 ||u(t)||^2 + g2 int_{t-h}^t ||u'||^2.
struct DelayBoundConstants {
    double g0 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
};

struct DelayBoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

// Lipschitz constant of a response on L2.
double response_lipschitz(const Response& r) noexcept;
double apply_law(const DelayLaw& law, double q, double horizon);

class DelayOperator {
public:
    DelayOperator(DelaySpec spec, std::shared_ptr<const SpectralBasis> basis);

    const DelaySpec& spec() const noexcept { return spec_; }
    const SpectralBasis& basis() const noexcept { return *basis_; }
    std::size_t term_count() const noexcept { return spec_.terms.size(); }
    bool empty() const noexcept { return spec_.terms.empty(); }

    double eval_Q(std::size_t term, const HistorySegment& history, double t) const;
    // Throws ContractViolation when g leaves [0, h].
    double eval_tau(std::size_t term, const HistorySegment& history, double t) const;

    // Writes M(u_t) into `out`; the per-term delays go to `taus` when non-empty.
    void eval_M(const HistorySegment& history, double t, std::span<double> out,
                std::span<double> taus = {}) const;
    ModeVector eval_M(const HistorySegment& history, double t) const;

    // G(w) for one term, added to `out`.
    void add_response(std::size_t term, std::span<const double> w, std::span<double> out) const;

    DelayBoundConstants bound_constants() const;
    DelayBoundCheck delay_bound_check(const HistorySegment& history, double t, double quad_step) const;

private:
    DelaySpec spec_;
    std::shared_ptr<const SpectralBasis> basis_;
    std::optional<CollocationGrid> grid_;
    // Basis values at each point sample, per term: [term][sample][mode].
    std::vector<std::vector<std::vector<double>>> point_values_;
};

// max_theta ||A^{1/2} u(t+theta)|| + max_theta ||v(t+theta)|| over [-h, 0],
// sampled on a uniform grid of `samples` points plus every stored node.
double w_norm(const HistorySegment& history, double t, const SpectralBasis& basis, std::size_t samples = 256);

// |phi|_W of an analytic initial function on [-h, 0].
double w_norm(const InitialHistory& phi, double horizon, const SpectralBasis& basis, std::size_t samples = 256);

}  // namespace sdde
