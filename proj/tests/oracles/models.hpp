#pragma once

// Small model builders shared by the unit tests.

#include <memory>

#include "sdde/integrator.hpp"

namespace sdde::testing {

inline Model linear_mode(double mu, double k, InitialHistory phi, double h = 0.1) {
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::single_mode(mu));
    DelaySpec d;
    d.horizon = h;
    return make_model(basis, NonlinearitySpec{}, d, k, std::move(phi));
}

// Berger beam (interval, p = 2) with a sigmoid point-sampled linear delay term.
inline Model berger_sigmoid_beam(double k = 2.0, double h = 0.1, int N = 4, double gain = 30.0) {
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(Geometry::Interval, 2, N));
    NonlinearitySpec f;
    f.variant = BergerForce{1.0, 0.0};
    DelaySpec d;
    d.horizon = h;
    d.terms.push_back(
        DelayTerm{LinearResponse{gain, {}}, SigmoidLaw{}, PointFunctional{{PointSample{3.0, 0.0, {0.3, 0.0}}}}});
    InitialHistory phi(basis->size(), {{0, 0.2, 0.0, 0.05, 12.0}, {1, -0.05, 0.3, 0.0, 0.0}});
    return make_model(basis, f, d, k, phi);
}

// Loaded Berger plate whose trajectories settle on a non-trivial equilibrium.
inline Model loaded_berger_plate(double k = 2.0, double h = 0.05) {
    auto basis = std::make_shared<const SpectralBasis>(SpectralBasis::build(Geometry::Square, 2, 4));
    NonlinearitySpec f;
    f.variant = BergerForce{1.0, 0.0};
    f.load.assign(basis->size(), 0.0);
    f.load[basis->index_of(1, 1)] = 60.0;
    f.load[basis->index_of(1, 2)] = -25.0;
    DelaySpec d;
    d.horizon = h;
    d.terms.push_back(
        DelayTerm{LinearResponse{20.0, {}}, SigmoidLaw{}, PointFunctional{{PointSample{5.0, 0.0, {0.3, 0.4}}}}});
    InitialHistory phi(basis->size(), {{0, 0.3, 0.0, 0.05, 40.0}, {1, -0.1, 0, 0, 0}, {3, 0.05, 0, 0, 0}});
    return make_model(basis, f, d, k, phi);
}

}  // namespace sdde::testing
