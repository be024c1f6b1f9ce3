#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "doeblin/channels.hpp"
#include "doeblin/sdp.hpp"

namespace doeblin {

struct Empirical {
    double measured = 0.0;
    bool respected = true;
    double slack = 0.0;
};

struct BoundReport {
    std::string bound_name;
    std::map<std::string, double> inputs;
    double value = 0.0;
    bool infinite = false;
    std::optional<std::string> degenerate_flag;
    std::map<std::string, double> extra;  // secondary values (e.g. upper bound, alternative lower bound)
    std::optional<Empirical> empirical;
};

double barren_plateau_constant();
double unital_barren_plateau_constant();

// i is 1-based; j is accepted for symmetry with the circuit indexing and does not enter the bound.
double barren_plateau_bound(const std::vector<double>& alphas, int i, int j, double norm_O, bool unital);

struct Concentration {
    double center;
    double radius;
};
Concentration cost_concentration_bound(const std::vector<double>& alphas, double norm_O, double trace_O, int dim_R,
                                       int dim_system);

struct SampleCount {
    double value = 0.0;
    bool infinite = false;
};
SampleCount error_mitigation_min_samples(const std::vector<double>& alphas, double delta);
// Layers of n identical local noise channels characterized by their alpha_wang values.
SampleCount error_mitigation_min_samples_local(const std::vector<double>& alpha_wang_layers, int n, double delta);

BoundReport hypothesis_testing_sc_bounds(const QuantumState& rho, const QuantumState& sigma, const Channel& ch,
                                         double epsilon, double beta, const SdpOptions& opts = {});

double fairness_beta(double gamma, double alpha);

struct TimeBound {
    long long value = 0;
    bool infinite = false;
};
TimeBound convergence_time_bound(double alpha, double delta);

enum class ConvergenceMode { Mixing, Decoupling };

BoundReport simulate_convergence(const Channel& ch, double delta, ConvergenceMode mode, int samples,
                                 std::uint64_t seed);

struct CircuitLayer {
    std::vector<HermitianOperator> generators;  // on the n-qudit system, ||H|| <= 1
    std::vector<double> thetas;
    Channel noise;
};

struct NoisyCircuitSpec {
    int n_qudits = 1;
    int d = 2;
    std::vector<CircuitLayer> layers;
    HermitianOperator observable;  // on R (x) system
    QuantumState initial = QuantumState::basis(2, 0);  // on R (x) system
    int dim_R = 1;

    void validate() const;
    int system_dim() const;
};

double circuit_cost(const NoisyCircuitSpec& spec, const std::vector<std::vector<double>>& thetas);

struct GradientOptions {
    int samples = 50;
    double h = 1e-4;
    double slack = 1e-3;
    double richardson_tol = 1e-5;
};

// i and j are 1-based layer and generator indices.
BoundReport simulate_gradient_check(const NoisyCircuitSpec& spec, int i, int j, std::uint64_t seed,
                                    const GradientOptions& opts = {});

}  // namespace doeblin
