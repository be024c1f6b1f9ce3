#include "doeblin/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "doeblin/divergences.hpp"
#include "doeblin/doeblin.hpp"
#include "doeblin/errors.hpp"
#include "doeblin/random.hpp"

namespace doeblin {

namespace {

void check_alphas(const std::vector<double>& alphas, double hi = 1.0) {
    for (double a : alphas)
        if (!(a >= -1e-12 && a <= hi + 1e-12)) throw InputError("alpha values must lie in [0, 1]");
}

double product_one_minus(const std::vector<double>& alphas, std::size_t from) {
    double prod = 1.0;
    for (std::size_t k = from; k < alphas.size(); ++k) prod *= std::max(0.0, 1.0 - alphas[k]);
    return prod;
}

double solved_value(const CoefficientReport& r) {
    if (r.status != SolveStatus::Optimal) {
        std::ostringstream os;
        os << r.name << ": solver ended with status " << to_string(r.status);
        throw NumericalError(os.str());
    }
    return r.value;
}

// (id_R (x) N)(rho) for rho on R (x) A.
ComplexMatrix apply_on_second(const Channel& ch, const ComplexMatrix& rho, int dim_r) {
    const int da = ch.d_in();
    const int db = ch.d_out();
    ComplexMatrix out = ComplexMatrix::Zero(dim_r * db, dim_r * db);
    for (int r = 0; r < dim_r; ++r)
        for (int s = 0; s < dim_r; ++s)
            out.block(r * db, s * db, db, db) = apply_matrix(ch, rho.block(r * da, s * da, da, da));
    return out;
}

}  // namespace

double barren_plateau_constant() { return std::cbrt(8.0 / 3.0) + (4.0 / 3.0) * std::pow(3.0 / 8.0, 2.0 / 3.0); }

double unital_barren_plateau_constant() { return 3.0 * std::cbrt(4.0 / 3.0); }

double barren_plateau_bound(const std::vector<double>& alphas, int i, int /*j*/, double norm_O, bool unital) {
    check_alphas(alphas);
    const int depth = static_cast<int>(alphas.size());
    if (i < 1 || i > depth) throw InputError("barren_plateau_bound: layer index out of range");
    if (unital) return unital_barren_plateau_constant() * norm_O * std::pow(product_one_minus(alphas, 0), 2.0 / 3.0);
    return barren_plateau_constant() * norm_O * std::pow(product_one_minus(alphas, i - 1), 2.0 / 3.0);
}

Concentration cost_concentration_bound(const std::vector<double>& alphas, double norm_O, double trace_O, int dim_R,
                                       int dim_system) {
    check_alphas(alphas);
    if (dim_R < 1 || dim_system < 1) throw InputError("cost_concentration_bound: dimensions must be positive");
    return {trace_O / (static_cast<double>(dim_R) * dim_system), 2.0 * norm_O * product_one_minus(alphas, 0)};
}

SampleCount error_mitigation_min_samples(const std::vector<double>& alphas, double delta) {
    check_alphas(alphas);
    if (!(delta >= 0.0 && delta <= 0.5)) throw InputError("error_mitigation_min_samples: delta must lie in [0, 1/2]");
    const double num = 1.0 - 2.0 * delta;
    if (num <= 0.0) return {0.0, false};
    const double prod = product_one_minus(alphas, 0);
    if (prod <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {num / prod, false};
}

SampleCount error_mitigation_min_samples_local(const std::vector<double>& alpha_wang_layers, int n, double delta) {
    if (n < 1) throw InputError("error_mitigation_min_samples_local: n must be >= 1");
    std::vector<double> effective;
    effective.reserve(alpha_wang_layers.size());
    for (double a : alpha_wang_layers) effective.push_back(std::pow(a, n));
    return error_mitigation_min_samples(effective, delta);
}

BoundReport hypothesis_testing_sc_bounds(const QuantumState& rho, const QuantumState& sigma, const Channel& ch,
                                         double epsilon, double beta, const SdpOptions& opts) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("hypothesis_testing: epsilon must lie in [0, 1]");
    if (!(beta > 0.0 && beta < 1.0)) throw InputError("hypothesis_testing: beta must lie in (0, 1)");
    if (rho.dim() != ch.d_in() || sigma.dim() != ch.d_in())
        throw InputError("hypothesis_testing: state dimension does not match channel input");

    BoundReport rep;
    rep.bound_name = "hypothesis_testing";
    rep.inputs = {{"epsilon", epsilon}, {"beta", beta}};

    const HermitianOperator out_rho = apply(ch, rho.density());
    const HermitianOperator out_sigma = apply(ch, sigma.density());
    const double overlap = (out_rho.mat() * out_sigma.mat()).norm();
    const double min_prior = std::min(beta, 1.0 - beta);

    if (overlap <= 1e-9 || epsilon >= 0.5 || epsilon >= min_prior) {
        rep.value = 1.0;
        rep.degenerate_flag = overlap <= 1e-9 ? "orthogonal_outputs" : "trivial_error";
        rep.extra["upper"] = 1.0;
        return rep;
    }
    if ((out_rho - out_sigma).mat().norm() <= 1e-9) {
        rep.value = std::numeric_limits<double>::infinity();
        rep.infinite = true;
        rep.degenerate_flag = "identical_outputs";
        return rep;
    }

    double one_minus_alpha = 0.0;
    double one_minus_reverse = 0.0;
    if (const auto* g = std::get_if<family::Gad>(&ch.family())) {
        one_minus_alpha = std::sqrt(g->eta);
        one_minus_reverse = g->eta;
    } else {
        one_minus_alpha = 1.0 - solved_value(alpha(ch, opts));
        one_minus_reverse = ch.d_in() == ch.d_out() ? 1.0 - solved_value(reverse_doeblin(ch, opts)) : 0.0;
    }
    rep.extra["one_minus_alpha"] = one_minus_alpha;
    rep.extra["one_minus_reverse"] = one_minus_reverse;

    const DivergenceValue h = hellinger_half(rho, sigma);
    const double t = trace_distance(rho, sigma);
    const double bb = beta * (1.0 - beta);
    const double inf = std::numeric_limits<double>::infinity();

    rep.value = (h.infinite || one_minus_alpha * h.value <= 0.0)
                    ? inf
                    : (1.0 - epsilon * (1.0 - epsilon) / bb) / (one_minus_alpha * h.value);
    rep.infinite = std::isinf(rep.value);
    rep.extra["hellinger_half"] = h.value;
    rep.extra["trace_distance"] = t;

    const double denom = one_minus_reverse * t;
    if (denom > 0.0) {
        const double f = 1.0 / denom;
        rep.extra["upper"] = std::ceil(2.0 * std::log(std::sqrt(bb) / epsilon) * f * f);
    } else {
        rep.extra["upper"] = inf;
    }

    const double lambda = std::max(out_rho.min_eigenvalue(), out_sigma.min_eigenvalue());
    if (lambda > 1e-12 && one_minus_alpha * t > 0.0) {
        const double f = 1.0 / (one_minus_alpha * t);
        rep.extra["lambda"] = lambda;
        rep.extra["alternative_lower"] = (lambda / 4.0) * std::log(bb / epsilon) * f * f;
    }
    return rep;
}

double fairness_beta(double gamma, double alpha) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("fairness_beta: gamma must lie in (0, 1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("fairness_beta: alpha must lie in [0, 1]");
    return gamma * (1.0 - alpha);
}

TimeBound convergence_time_bound(double alpha, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("convergence_time_bound: delta must lie in (0, 1)");
    if (!(alpha >= 0.0 && alpha <= 1.0 + 1e-12)) throw InputError("convergence_time_bound: alpha must lie in [0, 1]");
    if (alpha <= 0.0) return {0, true};
    if (alpha >= 1.0) return {1, false};
    const double n = std::log(1.0 / delta) / std::log(1.0 / (1.0 - alpha));
    return {std::max<long long>(1, static_cast<long long>(std::ceil(n - 1e-12))), false};
}

BoundReport simulate_convergence(const Channel& ch, double delta, ConvergenceMode mode, int samples,
                                 std::uint64_t seed) {
    if (ch.d_in() != ch.d_out()) throw InputError("simulate_convergence: channel must map a system to itself");
    if (samples < 0) throw InputError("simulate_convergence: samples must be non-negative");
    const FixedPoint fp = fixed_point(ch);
    if (!fp.unique) throw InputError("simulate_convergence: fixed point is not unique");

    const double a = solved_value(alpha(ch));
    const TimeBound bound = convergence_time_bound(std::clamp(a, 0.0, 1.0), delta);

    const int d = ch.d_in();
    const int dim_r = mode == ConvergenceMode::Mixing ? 1 : 2;
    Rng rng(seed);
    std::vector<ComplexMatrix> starts;
    if (mode == ConvergenceMode::Mixing) {
        for (int k = 0; k < d; ++k) starts.push_back(QuantumState::basis(d, k).density().mat());
    } else {
        // maximally entangled between R and the first two levels of A
        ComplexVector psi = ComplexVector::Zero(dim_r * d);
        for (int k = 0; k < std::min(dim_r, d); ++k) psi(k * d + k) = 1.0;
        starts.push_back(QuantumState::pure(psi).density().mat());
    }
    for (int s = 0; s < samples; ++s) starts.push_back(random_pure_state(dim_r * d, rng).density().mat());

    std::vector<ComplexMatrix> targets;
    targets.reserve(starts.size());
    for (const auto& st : starts) {
        if (dim_r == 1) {
            targets.push_back(fp.state.density().mat());
        } else {
            const ComplexMatrix rho_r = partial_trace(st, SubsystemDims{dim_r, d}, {0});
            targets.push_back(kron(rho_r, fp.state.density().mat()));
        }
    }

    const long long cap = bound.infinite ? 100000 : std::max<long long>(bound.value + 1, 1000);
    long long t_hat = -1;
    std::vector<ComplexMatrix> cur = starts;
    for (long long n = 1; n <= cap; ++n) {
        double worst = 0.0;
        const int count = static_cast<int>(cur.size());
#pragma omp parallel for reduction(max : worst) schedule(static)
        for (int s = 0; s < count; ++s) {
            cur[s] = apply_on_second(ch, cur[s], dim_r);
            const double dist = trace_distance(HermitianOperator::hermitize(cur[s]),
                                               HermitianOperator::hermitize(targets[s]));
            worst = std::max(worst, dist);
        }
        if (worst <= delta) {
            t_hat = n;
            break;
        }
    }

    BoundReport rep;
    rep.bound_name = mode == ConvergenceMode::Mixing ? "mixing_time" : "decoupling_time";
    rep.inputs = {{"delta", delta}, {"alpha", a}, {"samples", static_cast<double>(samples)}};
    rep.infinite = bound.infinite;
    rep.value = bound.infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(bound.value);
    Empirical emp;
    emp.measured = t_hat < 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(t_hat);
    emp.respected = bound.infinite || (t_hat >= 0 && t_hat <= bound.value);
    emp.slack = rep.value - emp.measured;
    rep.empirical = emp;
    return rep;
}

int NoisyCircuitSpec::system_dim() const {
    if (n_qudits < 1 || d < 1) throw InputError("circuit: n_qudits and d must be positive");
    int dim = 1;
    for (int k = 0; k < n_qudits; ++k) {
        dim *= d;
        if (dim > 64) throw InputError("circuit: system dimension exceeds 64");
    }
    return dim;
}

void NoisyCircuitSpec::validate() const {
    const int ds = system_dim();
    if (dim_R < 1) throw InputError("circuit: dim_R must be positive");
    if (dim_R * ds > 64) throw InputError("circuit: total density-matrix dimension exceeds 64");
    if (layers.empty()) throw InputError("circuit: at least one layer required");
    for (const auto& layer : layers) {
        if (layer.generators.size() != layer.thetas.size())
            throw InputError("circuit: each generator needs one parameter");
        for (const auto& h : layer.generators) {
            if (h.dim() != ds) throw InputError("circuit: generator dimension mismatch");
            if (h.norm_inf() > 1.0 + 1e-10) throw InputError("circuit: generator norm exceeds 1");
        }
        if (layer.noise.d_in() != ds || layer.noise.d_out() != ds)
            throw InputError("circuit: noise channel dimension mismatch");
    }
    if (observable.dim() != dim_R * ds) throw InputError("circuit: observable dimension mismatch");
    if (initial.dim() != dim_R * ds) throw InputError("circuit: initial state dimension mismatch");
}

double circuit_cost(const NoisyCircuitSpec& spec, const std::vector<std::vector<double>>& thetas) {
    const int ds = spec.system_dim();
    const ComplexMatrix id_r = ComplexMatrix::Identity(spec.dim_R, spec.dim_R);
    ComplexMatrix rho = spec.initial.density().mat();
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const auto& layer = spec.layers[l];
        ComplexMatrix u = ComplexMatrix::Identity(ds, ds);
        for (std::size_t j = 0; j < layer.generators.size(); ++j)
            u = u * matrix_exp_hermitian(layer.generators[j], cplx(0.0, -thetas[l][j] / 2.0));
        const ComplexMatrix full = kron(id_r, u);
        rho = full * rho * full.adjoint();
        rho = apply_on_second(layer.noise, rho, spec.dim_R);
    }
    return (spec.observable.mat() * rho).trace().real();
}

BoundReport simulate_gradient_check(const NoisyCircuitSpec& spec, int i, int j, std::uint64_t seed,
                                    const GradientOptions& opts) {
    spec.validate();
    const int depth = static_cast<int>(spec.layers.size());
    if (i < 1 || i > depth) throw InputError("simulate_gradient_check: layer index out of range");
    const auto& target = spec.layers[i - 1];
    if (j < 1 || j > static_cast<int>(target.generators.size()))
        throw InputError("simulate_gradient_check: generator index out of range");
    if (opts.samples < 1 || !(opts.h > 0.0)) throw InputError("simulate_gradient_check: bad sampling options");

    std::vector<double> alphas;
    for (const auto& layer : spec.layers) alphas.push_back(std::clamp(solved_value(alpha(layer.noise)), 0.0, 1.0));
    const double norm_o = spec.observable.norm_inf();
    const double bound = barren_plateau_bound(alphas, i, j, norm_o, false);

    Rng rng(seed);
    std::vector<std::vector<std::vector<double>>> points(opts.samples);
    for (auto& p : points) {
        p.resize(spec.layers.size());
        for (std::size_t l = 0; l < spec.layers.size(); ++l)
            for (std::size_t k = 0; k < spec.layers[l].generators.size(); ++k)
                p[l].push_back(rng.uniform(0.0, 2.0 * M_PI));
    }

    auto central = [&](std::vector<std::vector<double>> th, double h) {
        double& x = th[i - 1][j - 1];
        const double x0 = x;
        x = x0 + h;
        const double up = circuit_cost(spec, th);
        x = x0 - h;
        const double down = circuit_cost(spec, th);
        return (up - down) / (2.0 * h);
    };

    double worst = 0.0;
    bool richardson_ok = true;
    const int count = opts.samples;
#pragma omp parallel for reduction(max : worst) reduction(&& : richardson_ok) schedule(static)
    for (int s = 0; s < count; ++s) {
        const double g1 = central(points[s], opts.h);
        const double g2 = central(points[s], opts.h / 2.0);
        const double scale = std::max({std::abs(g2), norm_o, 1e-300});
        if (std::abs(g1 - g2) > opts.richardson_tol * scale) richardson_ok = false;
        const double g = (4.0 * g2 - g1) / 3.0;
        worst = std::max(worst, std::abs(g));
    }
    if (!richardson_ok)
        throw NumericalError("simulate_gradient_check: finite-difference estimates disagree at h and h/2");

    BoundReport rep;
    rep.bound_name = "barren_plateau_gradient";
    rep.inputs = {{"layer", static_cast<double>(i)},
                  {"generator", static_cast<double>(j)},
                  {"norm_O", norm_o},
                  {"samples", static_cast<double>(opts.samples)},
                  {"h", opts.h}};
    rep.value = bound;
    Empirical emp;
    emp.measured = worst;
    emp.respected = worst <= bound + opts.slack;
    emp.slack = bound - worst;
    rep.empirical = emp;
    return rep;
}

}  // namespace doeblin
