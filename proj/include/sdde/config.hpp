#pragma once

// Experiment configuration: a single JSON document per experiment.
// Unknown and duplicate keys are rejected; every numeric range is checked.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sdde/integrator.hpp"

namespace sdde {

// Mode by wavenumbers; k2 = 0 on the interval and for point models.
struct ModeRef {
    int k1 = 1;
    int k2 = 0;
    bool operator==(const ModeRef&) const = default;
};

struct ModeValue {
    ModeRef mode;
    double value = 0.0;
    bool operator==(const ModeValue&) const = default;
};

struct BasisConfig {
    std::string geometry = "square";  // interval | square | point
    int p = 2;
    int N = 16;
    double mu = 1.0;  // point geometry only
    bool operator==(const BasisConfig&) const = default;
};

struct ForceConfig {
    std::string type = "none";  // none | berger | kirchhoff | wave_poly
    double kappa = 1.0;
    double mu_b = 0.0;
    std::vector<double> coeffs;  // f(s) = sum c_i s^i
    std::vector<ModeValue> load;
    double c_nc = 0.0;
    double delta_hat = 0.5;
    bool operator==(const ForceConfig&) const = default;
};

struct SampleConfig {
    double c = 1.0;
    double sigma = 0.0;
    std::array<double, 2> x{0.5, 0.5};  // point samples
    std::vector<ModeValue> xi;          // average samples
    bool operator==(const SampleConfig&) const = default;
};

struct DelayTermConfig {
    std::string response = "linear";  // linear | tanh
    double a = 0.0;
    std::vector<ModeValue> offset;
    std::string law = "constant";  // constant | sigmoid | rational
    double tau0 = 0.0;
    std::string functional = "point";  // point | average
    std::vector<SampleConfig> samples;
    bool operator==(const DelayTermConfig&) const = default;
};

struct DynamicsConfig {
    double k_damp = 1.0;
    double h = 0.1;
    ForceConfig nonlinearity;
    std::vector<DelayTermConfig> delay;
    bool operator==(const DynamicsConfig&) const = default;
};

struct FamilyConfig {
    ModeRef mode;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    bool operator==(const FamilyConfig&) const = default;
};

struct StepperBlock {
    double dt = 1e-3;
    double t_end = 1.0;
    std::size_t stride = 1;
    std::vector<ModeRef> trace_modes;  // empty: every mode
    std::size_t snapshot_every = 0;    // steps between snapshot blocks; 0: final state only
    bool operator==(const StepperBlock&) const = default;
};

// Parameters of every diagnostic; each subcommand reads the ones it needs.
struct ExperimentBlock {
    double sigma = 0.25;  // Lyapunov gamma scale
    double delta = 0.25;  // lower-order driver exponent
    int dt_levels = 2;    // step-halving levels for convergence checks
    // dissipativity
    std::vector<double> k_list{2.0, 4.0, 8.0};
    std::vector<double> h_list;  // empty: the dynamics horizon
    double t_long = 50.0;
    double tail_fraction = 0.25;
    double max_spread = 1.15;
    // quasi-stability / attraction rate
    int pairs = 5;
    double distance = 1e-3;
    double lambda_spread = 0.2;
    int bundle = 8;
    // lipschitz
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<FamilyConfig> psi;  // empty: seeded random direction
    // residual (0: t = 2h)
    double residual_time = 0.0;
    // ode-stability
    double k = 1.0;
    double a = 2.0;
    double tau_max = 50.0;
    double tau_step = 0.5;
    // attractor
    double burn_in = 50.0;
    std::size_t sample_stride = 100;
    std::size_t radii = 24;
    std::size_t min_points = 500;
    // convergence
    double min_order = 1.5;
    bool operator==(const ExperimentBlock&) const = default;
};

struct ExperimentConfig {
    std::string description;
    std::uint64_t seed = 0;
    BasisConfig basis;
    DynamicsConfig dynamics;
    std::vector<FamilyConfig> initial;
    StepperBlock stepper;
    ExperimentBlock experiment;
    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError; syntax errors carry "line L, column C" in the message.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::shared_ptr<const SpectralBasis> build_basis(const BasisConfig& cfg);
std::size_t resolve_mode(const SpectralBasis& basis, const ModeRef& m);
InitialHistory build_initial(const SpectralBasis& basis, const std::vector<FamilyConfig>& families);
Model build_model(const ExperimentConfig& cfg);
StepperConfig build_stepper(const ExperimentConfig& cfg);

}  // namespace sdde
