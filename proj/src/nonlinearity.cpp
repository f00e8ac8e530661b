#include "sdde/nonlinearity.hpp"

#include <cmath>
#include <string>

#include "sdde/errors.hpp"

namespace sdde {

int PolynomialForce::degree() const noexcept {
    for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j)
        if (coeffs[static_cast<std::size_t>(j)] != 0.0) return j;
    return -1;
}

double PolynomialForce::operator()(double s) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double PolynomialForce::antiderivative(double s) const noexcept {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * s + coeffs[j] / static_cast<double>(j + 1);
    return acc * s;
}

double PolynomialForce::leading_antiderivative(double s) const noexcept {
    const int d = degree();
    if (d < 0 || d % 2 == 0) return 0.0;
    return coeffs[static_cast<std::size_t>(d)] * std::pow(s, d + 1) / static_cast<double>(d + 1);
}

void NonlinearitySpec::validate() const {
    if (!(c_nc >= 0.0)) throw ConfigError("c_nc", "nonconservative coefficient must be >= 0");
    if (!(delta_hat > 0.0 && delta_hat <= 0.5)) throw ConfigError("delta_hat", "must lie in (0, 1/2]");
    if (const auto* b = std::get_if<BergerForce>(&variant)) {
        if (!(b->kappa > 0.0)) throw ConfigError("kappa", "Berger kappa must be positive");
    }
    if (const auto* k = std::get_if<KirchhoffForce>(&variant)) {
        const int d = k->f.degree();
        if (d < 1 || d % 2 == 0) throw ConfigError("coeffs", "Kirchhoff f must have odd degree");
        if (!(k->f.coeffs[static_cast<std::size_t>(d)] > 0.0))
            throw ConfigError("coeffs", "leading coefficient must be positive");
    }
    if (const auto* w = std::get_if<WavePolyForce>(&variant)) {
        const int d = w->f.degree();
        if (d < 1 || d > 3) throw ConfigError("coeffs", "wave polynomial degree must be in [1,3]");
        if (!(w->f.coeffs[static_cast<std::size_t>(d)] > 0.0))
            throw ConfigError("coeffs", "leading coefficient must be positive");
    }
}

Nonlinearity::Nonlinearity(NonlinearitySpec spec, std::shared_ptr<const SpectralBasis> basis)
    : spec_(std::move(spec)), basis_(std::move(basis)) {
    spec_.validate();
    const std::size_t n = basis_->size();
    if (!spec_.load.empty() && spec_.load.size() != n)
        throw ConfigError("load", "load length does not match the basis");
    if (spec_.load.empty()) spec_.load.assign(n, 0.0);
    if (std::holds_alternative<KirchhoffForce>(spec_.variant) ||
        std::holds_alternative<WavePolyForce>(spec_.variant))
        grid_.emplace(*basis_);
    fstar_scale_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        fstar_scale_[k] = spec_.c_nc * std::pow(basis_->mu(k), 0.5 - spec_.delta_hat);
}

bool Nonlinearity::is_zero() const noexcept {
    if (!std::holds_alternative<NoForce>(spec_.variant) || spec_.c_nc != 0.0) return false;
    for (double h : spec_.load)
        if (h != 0.0) return false;
    return true;
}

namespace {

const PolynomialForce* polynomial_of(const ForceVariant& v) {
    if (const auto* k = std::get_if<KirchhoffForce>(&v)) return &k->f;
    if (const auto* w = std::get_if<WavePolyForce>(&v)) return &w->f;
    return nullptr;
}

double berger_stretch(const SpectralBasis& basis, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += basis.lambda(k) * u[k] * u[k];
    return s;
}

}  // namespace

void Nonlinearity::add_gradient(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = u.size();
    for (std::size_t k = 0; k < n; ++k) out[k] -= spec_.load[k];

    if (const auto* b = std::get_if<BergerForce>(&spec_.variant)) {
        const double coef = b->kappa * berger_stretch(*basis_, u) - b->mu_b;
        for (std::size_t k = 0; k < n; ++k) out[k] += coef * basis_->lambda(k) * u[k];
    } else if (const auto* f = polynomial_of(spec_.variant)) {
        std::vector<double> values = grid_->to_physical(u);
        for (double& x : values) x = (*f)(x);
        std::vector<double> proj(n);
        grid_->to_spectral(values, proj);
        for (std::size_t k = 0; k < n; ++k) out[k] += proj[k];
    }
}

void Nonlinearity::eval_F(std::span<const double> u, std::span<double> out) const {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = fstar_scale_[k] * u[k];
    add_gradient(u, out);
    for (std::size_t k = 0; k < u.size(); ++k)
        if (!std::isfinite(out[k])) throw BlowUp("non-finite nonlinear force in mode " + std::to_string(k + 1));
}

ModeVector Nonlinearity::eval_F(std::span<const double> u) const {
    ModeVector out(u.size());
    eval_F(u, out);
    return out;
}

ModeVector Nonlinearity::eval_gradient(std::span<const double> u) const {
    ModeVector out(u.size(), 0.0);
    add_gradient(u, out);
    return out;
}

void Nonlinearity::eval_Fstar(std::span<const double> u, std::span<double> out) const {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = fstar_scale_[k] * u[k];
}

ModeVector Nonlinearity::eval_Fstar(std::span<const double> u) const {
    ModeVector out(u.size());
    eval_Fstar(u, out);
    return out;
}

Potentials Nonlinearity::eval_potentials(std::span<const double> u) const {
    Potentials p;
    const double load_work = inner_product(spec_.load, u);
    if (const auto* b = std::get_if<BergerForce>(&spec_.variant)) {
        const double s = berger_stretch(*basis_, u);
        p.pi0 = 0.25 * b->kappa * s * s;
        p.pi1 = -0.5 * b->mu_b * s;
    } else if (const auto* f = polynomial_of(spec_.variant)) {
        std::vector<double> values = grid_->to_physical(u);
        std::vector<double> lead(values.size()), rest(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            lead[j] = f->leading_antiderivative(values[j]);
            rest[j] = f->antiderivative(values[j]) - lead[j];
        }
        p.pi0 = grid_->integrate(lead);
        p.pi1 = grid_->integrate(rest);
    }
    p.pi1 -= load_work;
    return p;
}

double directional_derivative_check(const Nonlinearity& force, std::span<const double> u,
                                    std::span<const double> w, double eps) {
    if (!(eps > 0.0)) throw ConfigError("eps", "step must be positive");
    ModeVector shifted(u.begin(), u.end());
    for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] += eps * w[k];
    const double base = force.eval_potentials(u).total();
    const double moved = force.eval_potentials(shifted).total();
    const double slope = inner_product(force.eval_gradient(u), w);
    return std::abs(moved - base - eps * slope) / eps;
}

}  // namespace sdde
