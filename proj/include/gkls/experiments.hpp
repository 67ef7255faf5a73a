#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkls/bath.hpp"
#include "gkls/jc.hpp"
#include "gkls/master_equation.hpp"
#include "gkls/time_grid.hpp"

namespace gkls {

const char* version();

// omega_eg or detuning (default detuning 0); g or rabi_frequency (default 2).
struct JCConfig {
    double omega_c = 1.0;
    std::optional<double> omega_eg;
    std::optional<double> detuning;
    std::optional<double> g;
    std::optional<double> rabi_frequency;
    cplx alpha = 5.0;

    JCParams resolve(cplx alpha_value) const;
    JCParams resolve() const { return resolve(alpha); }
};

// With normalized = true the grid is in units of 1/Ω, i.e. it holds t·Ω.
struct GridConfig {
    double t0 = 0.0;
    double t1 = 40.0;
    int steps = 2000;
    bool normalized = true;
};

struct SweepConfig {
    std::string parameter = "detuning";  // or "temperature"
    double from = -2.0;
    double to = 2.0;
    int points = 41;
};

struct TouchardConfig {
    std::vector<int> orders{2, 3, 4, 5, 6};
    std::vector<double> xs{1e2, 1e3, 1e4};
};

struct ExperimentConfig {
    std::string experiment = "fig2";
    JCConfig jc;
    std::vector<cplx> alphas{5.0, 25.0, 50.0, 100.0};
    std::optional<BathSpec> bath;
    GridConfig grid;
    std::string initial_state_name = "plus";
    Matrix initial_state;
    std::string output = "gkls-out";
    SweepConfig sweep;
    TouchardConfig touchard;
};

const std::vector<std::string>& experiment_names();
ExperimentConfig default_config(const std::string& experiment);
// Strict: unknown keys raise a config error naming the key.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& experiment);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Named qubit states: g, e, plus, minus, plus_y, minus_y.
Matrix named_qubit_state(const std::string& name);

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::vector<cplx>> alphas;
    std::optional<double> tmax;
    std::optional<int> steps;
};
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

struct RunResult {
    std::vector<std::string> files;
    nlohmann::json summary;
};

RunResult run_experiment(const ExperimentConfig& cfg);
RunResult run_fig2(const ExperimentConfig& cfg);
RunResult run_jc_sim(const ExperimentConfig& cfg);
RunResult run_eigenops(const ExperimentConfig& cfg);
RunResult run_attractor(const ExperimentConfig& cfg);
RunResult run_coefficients(const ExperimentConfig& cfg);
RunResult run_touchard(const ExperimentConfig& cfg);

struct Fig2Series {
    double alpha = 0.0;
    std::vector<double> t_normalized;
    std::vector<double> fidelity;
    // sx, sy, sz
    std::vector<std::vector<double>> autonomous;
    std::vector<std::vector<double>> semiclassical;
    double min_fidelity() const;
};
// grid in units of t·Ω.
Fig2Series fig2_series(const JCParams& p, const Matrix& rho0, const GridConfig& grid);

struct EnvelopeFit {
    double kappa = 0.0;  // ln A ≈ a − κ t²
    double intercept = 0.0;
    int points = 0;
};
// Fits |y| local maxima above threshold with t < t_max.
EnvelopeFit fit_gaussian_envelope(const std::vector<double>& t, const std::vector<double>& y,
                                  double threshold, double t_max);
// ⟨σ_z⟩ of the Kraus-reduced state from |e⟩ and its envelope fit over t < 2√2/g.
EnvelopeFit collapse_fit(const JCParams& p, int points_per_period = 64);

// Lindblad form with F_−, F_+ channel and F_0 dephasing at time t.
struct SemiclassicalDissipator {
    KineticCoefficients coefficients;
    DissipatorSpec spec;
};
SemiclassicalDissipator jc_semiclassical_dissipator(const JCParams& p, const BathSpec& bath,
                                                    double t);

}  // namespace gkls
