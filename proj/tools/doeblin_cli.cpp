// Command-line front end for the Doeblin coefficient library.
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "doeblin/applications.hpp"
#include "doeblin/doeblin.hpp"
#include "doeblin/errors.hpp"
#include "doeblin/io.hpp"
#include "doeblin/oracles.hpp"

using namespace doeblin;
using io::json;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("DOEBLIN_LOG");
    if (!env) return LogLevel::Error;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << '\n';
}

struct Config {
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    double tol_gap = 1e-8;
    double tol_feas = 1e-9;
    int max_iter = 200;

    std::string channel_path;
    std::string which = "alpha";
    int tensor_n = 1;

    std::vector<double> alphas;
    double alpha = 0.0;
    int depth = 1;
    int layer = 1;
    int generator = 1;
    double norm_o = 1.0;
    bool unital = false;
    double delta = 0.1;
    int local_n = 0;
    double gamma = 0.1;
    double epsilon = 0.05;
    double beta = 0.5;
    std::string rho;
    std::string sigma;

    int samples = 500;
    std::string circuit_path;
    std::string ensemble_path;
};

SdpOptions sdp_options(const Config& c) {
    SdpOptions o;
    o.tol_gap = c.tol_gap;
    o.tol_feas = c.tol_feas;
    o.max_iter = c.max_iter;
    if (log_level() >= LogLevel::Debug) o.trace = &std::cerr;
    return o;
}

// Inline JSON when the argument looks like JSON, otherwise a file path.
json load_json_arg(const std::string& arg) {
    const auto pos = arg.find_first_not_of(" \t\n");
    if (pos != std::string::npos && (arg[pos] == '[' || arg[pos] == '{')) return io::parse(arg);
    return io::read_file(arg);
}

std::vector<double> layer_alphas(const Config& c) {
    if (!c.alphas.empty()) return c.alphas;
    if (c.depth < 0) throw InputError("--depth must be non-negative");
    return std::vector<double>(static_cast<std::size_t>(c.depth), c.alpha);
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "inf";
    return v.dump();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
        return;
    }
    if (j.is_array()) {
        bool nested = false;
        for (const auto& e : j) nested = nested || e.is_array() || e.is_object();
        if (!nested) {
            rows.emplace_back(prefix, j.dump());
        } else {
            std::ostringstream os;
            os << "[" << j.size() << " entries]";
            rows.emplace_back(prefix, os.str());
        }
        return;
    }
    rows.emplace_back(prefix, scalar_text(j));
}

void emit(const json& j, const Config& c) {
    if (c.format == "table") {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(j, "", rows);
        std::size_t width = 0;
        for (const auto& r : rows) width = std::max(width, r.first.size());
        for (const auto& r : rows) std::cout << std::left << std::setw(static_cast<int>(width) + 2) << r.first << r.second << '\n';
    } else {
        std::cout << io::dump(j) << '\n';
    }
}

Channel load_channel(const Config& c) {
    if (c.channel_path.empty()) throw InputError("--channel is required");
    Channel ch = io::channel_from_json(load_json_arg(c.channel_path));
    if (c.tensor_n < 1) throw InputError("--tensor must be >= 1");
    if (c.tensor_n > 1) ch = tensor_power(ch, c.tensor_n);
    return ch;
}

int run_coeff(const Config& c) {
    const Channel ch = load_channel(c);
    const SdpOptions opts = sdp_options(c);
    auto compute = [&](const std::string& w) -> CoefficientReport {
        if (w == "alpha") return alpha(ch, opts);
        if (w == "alpha_wang") return alpha_wang(ch, opts);
        if (w == "alpha_plus") return alpha_plus(ch, opts);
        if (w == "ppt") return alpha_cone(ch, ConeKind::PPT, opts);
        if (w == "ppt_sym2") return alpha_cone(ch, ConeKind::PPT_SYM2, opts);
        if (w == "reverse") return reverse_doeblin(ch, opts);
        throw InputError("unknown coefficient selector \"" + w + "\"");
    };
    bool ok = true;
    json out;
    if (c.which == "all") {
        out = json::object();
        std::vector<std::string> names = {"alpha", "alpha_wang", "alpha_plus", "ppt"};
        if (ch.d_in() * ch.d_out() * ch.d_out() <= 64) names.push_back("ppt_sym2");
        if (ch.d_in() == ch.d_out()) names.push_back("reverse");
        for (const auto& n : names) {
            log_info("computing " + n);
            const CoefficientReport r = compute(n);
            ok = ok && r.status == SolveStatus::Optimal;
            out[n] = io::to_json(r);
        }
    } else {
        const CoefficientReport r = compute(c.which);
        ok = r.status == SolveStatus::Optimal;
        out = io::to_json(r);
    }
    emit(out, c);
    if (!ok) std::cerr << "solver did not reach optimality\n";
    return ok ? 0 : 1;
}

int run_contraction(const Config& c) {
    emit(io::to_json(contraction_bounds(load_channel(c), sdp_options(c))), c);
    return 0;
}

BoundReport simple_report(const std::string& name, std::map<std::string, double> inputs, double value) {
    BoundReport r;
    r.bound_name = name;
    r.inputs = std::move(inputs);
    r.value = value;
    r.infinite = std::isinf(value);
    return r;
}

int run_bound(const std::string& kind, const Config& c) {
    BoundReport r;
    if (kind == "barren") {
        const auto a = layer_alphas(c);
        r = simple_report("barren_plateau", {{"layer", c.layer}, {"norm_O", c.norm_o}, {"unital", c.unital ? 1.0 : 0.0}},
                          barren_plateau_bound(a, c.layer, 1, c.norm_o, c.unital));
        r.inputs["depth"] = static_cast<double>(a.size());
    } else if (kind == "mitigation") {
        const auto a = layer_alphas(c);
        const SampleCount s = c.local_n > 0 ? error_mitigation_min_samples_local(a, c.local_n, c.delta)
                                            : error_mitigation_min_samples(a, c.delta);
        r = simple_report("error_mitigation", {{"delta", c.delta}, {"depth", static_cast<double>(a.size())}}, s.value);
        if (c.local_n > 0) r.inputs["local_n"] = c.local_n;
        r.infinite = s.infinite;
    } else if (kind == "hypothesis") {
        if (c.rho.empty() || c.sigma.empty()) throw InputError("--rho and --sigma are required");
        const Channel ch = load_channel(c);
        r = hypothesis_testing_sc_bounds(io::state_from_json(load_json_arg(c.rho)),
                                         io::state_from_json(load_json_arg(c.sigma)), ch, c.epsilon, c.beta,
                                         sdp_options(c));
    } else if (kind == "fairness") {
        r = simple_report("fairness", {{"gamma", c.gamma}, {"alpha", c.alpha}}, fairness_beta(c.gamma, c.alpha));
    } else if (kind == "mixing" || kind == "decoupling") {
        const TimeBound t = convergence_time_bound(c.alpha, c.delta);
        r = simple_report(kind + "_time", {{"alpha", c.alpha}, {"delta", c.delta}},
                          t.infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(t.value));
    } else {
        throw InputError("unknown bound \"" + kind + "\"");
    }
    emit(io::to_json(r), c);
    return 0;
}

int run_simulate(const std::string& kind, const Config& c) {
    const std::uint64_t seed = c.seed.value_or(1);
    BoundReport r;
    if (kind == "mixing" || kind == "decoupling") {
        const ConvergenceMode mode = kind == "mixing" ? ConvergenceMode::Mixing : ConvergenceMode::Decoupling;
        r = simulate_convergence(load_channel(c), c.delta, mode, c.samples, seed);
    } else if (kind == "gradient") {
        if (c.circuit_path.empty()) throw InputError("--circuit is required");
        GradientOptions g;
        g.samples = c.samples;
        r = simulate_gradient_check(io::circuit_from_json(load_json_arg(c.circuit_path)), c.layer, c.generator, seed, g);
    } else {
        throw InputError("unknown simulation \"" + kind + "\"");
    }
    emit(io::to_json(r), c);
    return r.empirical && !r.empirical->respected ? 1 : 0;
}

int run_exclusion(const Config& c) {
    if (c.ensemble_path.empty()) throw InputError("--ensemble is required");
    const ExclusionResult r = exclusion(io::ensemble_from_json(load_json_arg(c.ensemble_path)), sdp_options(c));
    emit(io::to_json(r), c);
    return r.status == SolveStatus::Optimal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Doeblin coefficients and derived bounds"};
    app.require_subcommand(1);
    Config c;
    app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--tol-gap", c.tol_gap, "Relative duality gap tolerance");
    app.add_option("--tol-feas", c.tol_feas, "Feasibility tolerance");
    app.add_option("--max-iter", c.max_iter, "Interior-point iteration cap")->check(CLI::PositiveNumber);
    app.fallthrough();

    auto* coeff = app.add_subcommand("coeff", "Compute Doeblin-type coefficients");
    coeff->add_option("--channel", c.channel_path, "Channel JSON file")->required();
    coeff->add_option("--which", c.which, "Coefficient selector")
        ->check(CLI::IsMember({"alpha", "alpha_wang", "alpha_plus", "ppt", "ppt_sym2", "reverse", "all"}));
    coeff->add_option("--tensor", c.tensor_n, "Tensor power")->check(CLI::PositiveNumber);

    auto* contraction = app.add_subcommand("contraction", "Contraction and expansion bounds");
    contraction->add_option("--channel", c.channel_path, "Channel JSON file")->required();
    contraction->add_option("--tensor", c.tensor_n, "Tensor power")->check(CLI::PositiveNumber);

    auto* bound = app.add_subcommand("bound", "Evaluate an application bound");
    bound->require_subcommand(1);
    std::string bound_kind;
    const std::pair<const char*, const char*> bound_kinds[] = {
        {"barren", "Gradient magnitude bound for a noisy layered circuit"},
        {"mitigation", "Minimum sample count for error mitigation"},
        {"hypothesis", "Sample complexity of binary hypothesis testing through a channel"},
        {"fairness", "Fairness level after noise"},
        {"mixing", "Mixing time from alpha"},
        {"decoupling", "Decoupling time from alpha"},
    };
    for (const auto& [name, help] : bound_kinds) {
        auto* s = bound->add_subcommand(name, help);
        s->callback([&bound_kind, name] { bound_kind = name; });
        const std::string n(name);
        if (n == "barren" || n == "mitigation") {
            s->add_option("--alphas", c.alphas, "Per-layer coefficients");
            s->add_option("--alpha", c.alpha, "Coefficient repeated over --depth layers");
            s->add_option("--depth", c.depth, "Number of layers");
        }
        if (n == "barren") {
            s->add_option("--layer", c.layer, "Layer index (1-based)");
            s->add_option("--norm-o", c.norm_o, "Operator norm of the observable");
            s->add_flag("--unital", c.unital, "Use the unital-noise bound");
        }
        if (n == "mitigation") {
            s->add_option("--delta", c.delta, "Target error");
            s->add_option("--local-n", c.local_n, "Number of local channels per layer");
        }
        if (n == "hypothesis") {
            s->add_option("--channel", c.channel_path, "Channel JSON file")->required();
            s->add_option("--rho", c.rho, "First state (JSON or file)")->required();
            s->add_option("--sigma", c.sigma, "Second state (JSON or file)")->required();
            s->add_option("--epsilon", c.epsilon, "Error probability");
            s->add_option("--beta", c.beta, "Prior of the first hypothesis");
        }
        if (n == "fairness") {
            s->add_option("--gamma", c.gamma, "Fairness parameter");
            s->add_option("--alpha", c.alpha, "Doeblin coefficient");
        }
        if (n == "mixing" || n == "decoupling") {
            s->add_option("--alpha", c.alpha, "Doeblin coefficient")->required();
            s->add_option("--delta", c.delta, "Target distance")->required();
        }
    }

    auto* simulate = app.add_subcommand("simulate", "Run a simulator against its bound");
    simulate->require_subcommand(1);
    std::string sim_kind;
    const std::pair<const char*, const char*> sim_kinds[] = {
        {"mixing", "Iterate the channel on sampled states"},
        {"decoupling", "Iterate id (x) N on sampled bipartite states"},
        {"gradient", "Finite-difference gradients of a noisy circuit"},
    };
    for (const auto& [name, help] : sim_kinds) {
        auto* s = simulate->add_subcommand(name, help);
        s->callback([&sim_kind, name] { sim_kind = name; });
        const std::string n(name);
        s->add_option("--samples", c.samples, "Number of sampled states or parameter points");
        if (n == "gradient") {
            s->add_option("--circuit", c.circuit_path, "Circuit JSON file")->required();
            s->add_option("--layer", c.layer, "Layer index (1-based)");
            s->add_option("--generator", c.generator, "Generator index (1-based)");
        } else {
            s->add_option("--channel", c.channel_path, "Channel JSON file")->required();
            s->add_option("--delta", c.delta, "Target distance");
        }
    }

    auto* excl = app.add_subcommand("exclusion", "State exclusion SDP");
    excl->add_option("--ensemble", c.ensemble_path, "Ensemble JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        int code = 0;
        if (coeff->parsed()) code = run_coeff(c);
        else if (contraction->parsed()) code = run_contraction(c);
        else if (bound->parsed()) code = run_bound(bound_kind, c);
        else if (simulate->parsed()) code = run_simulate(sim_kind, c);
        else if (excl->parsed()) code = run_exclusion(c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log_info("finished in " + std::to_string(secs) + " s");
        return code;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
