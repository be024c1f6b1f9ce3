#include "doeblin/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doeblin/divergences.hpp"
#include "doeblin/random.hpp"

namespace doeblin {

void Ensemble::validate() const {
    if (priors.size() != states.size() || states.empty()) throw InputError("Ensemble: priors and states must match");
    double s = 0.0;
    for (double p : priors) {
        if (p < 0.0) throw InputError("Ensemble: negative prior");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-10) throw InputError("Ensemble: priors must sum to 1");
    for (const auto& st : states)
        if (st.dim() != states.front().dim()) throw InputError("Ensemble: states have unequal dimensions");
}

Ensemble Ensemble::uniform(std::vector<QuantumState> states) {
    const std::size_t n = states.size();
    return Ensemble{std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(states)};
}

ExclusionResult exclusion(const Ensemble& e, const SdpOptions& opts) {
    e.validate();
    const int d = e.states.front().dim();
    const int n = static_cast<int>(e.states.size());
    SdpProblem p;
    for (int x = 0; x < n; ++x) {
        p.add_block("Lambda" + std::to_string(x), d);
        p.set_objective(x, e.priors[x] * e.states[x].density());
    }
    for (const auto& h : hermitian_basis(d)) {
        LinearConstraint c{{}, h.trace()};
        for (int x = 0; x < n; ++x) c.terms.push_back({x, h});
        p.add_constraint(std::move(c));
    }
    p.set_warm_start(std::vector<HermitianOperator>(n, (1.0 / n) * HermitianOperator::identity(d)));
    const SdpSolution sol = solve(p, opts);
    return {std::clamp(sol.value, 0.0, 1.0), sol.primal, sol.status};
}

double exclusion_error(const Ensemble& e, const SdpOptions& opts) { return exclusion(e, opts).value; }

namespace {

double trace_norm(const ComplexMatrix& m) {
    if (m.rows() == 2) {
        const double a = m(0, 0).real(), d = m(1, 1).real();
        const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
        const double mid = 0.5 * (a + d);
        return std::abs(mid + disc) + std::abs(mid - disc);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

struct PairObjective {
    const Channel& ch;
    ComplexMatrix base;  // Haar unitary anchoring the chart

    // Trace distance of the outputs for the pair given by the first two columns of base * exp(iK(x)).
    double operator()(const RealVector& x) const {
        const int d = ch.d_in();
        ComplexMatrix k = ComplexMatrix::Zero(d, d);
        for (int j = 1; j < d; ++j) {
            const cplx z(x(2 * (j - 1)), x(2 * (j - 1) + 1));
            k(0, j) = z;
            k(j, 0) = std::conj(z);
        }
        const ComplexMatrix u = base * matrix_exp_hermitian(HermitianOperator::hermitize(k), cplx(0.0, 1.0));
        const ComplexVector psi = u.col(0), phi = u.col(1);
        const ComplexMatrix diff = psi * psi.adjoint() - phi * phi.adjoint();
        return 0.5 * trace_norm(apply_matrix(ch, diff));
    }
};

// Nelder-Mead maximization with an evaluation cap.
double nelder_mead_max(const PairObjective& f, int dim, int max_evals) {
    std::vector<RealVector> pts(dim + 1, RealVector::Zero(dim));
    std::vector<double> val(dim + 1);
    for (int i = 0; i < dim; ++i) pts[i + 1](i) = 0.4;
    int evals = 0;
    for (int i = 0; i <= dim; ++i) {
        val[i] = -f(pts[i]);
        ++evals;
    }
    std::vector<int> order(dim + 1);
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
        const int best = order.front(), worst = order.back(), second = order[dim - 1];
        double diam = 0.0;
        for (int i = 0; i <= dim; ++i) diam = std::max(diam, (pts[i] - pts[best]).norm());
        if (diam < 1e-10) break;
        RealVector centroid = RealVector::Zero(dim);
        for (int i = 0; i <= dim; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= dim;
        const RealVector xr = centroid + (centroid - pts[worst]);
        const double fr = -f(xr);
        ++evals;
        if (fr < val[best]) {
            const RealVector xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = -f(xe);
            ++evals;
            if (fe < fr) {
                pts[worst] = xe;
                val[worst] = fe;
            } else {
                pts[worst] = xr;
                val[worst] = fr;
            }
        } else if (fr < val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
        } else {
            const bool outside = fr < val[worst];
            const RealVector xc = outside ? RealVector(centroid + 0.5 * (xr - centroid))
                                          : RealVector(centroid + 0.5 * (pts[worst] - centroid));
            const double fc = -f(xc);
            ++evals;
            if (fc < std::min(fr, val[worst])) {
                pts[worst] = xc;
                val[worst] = fc;
            } else {
                for (int i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    val[i] = -f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    return -*std::min_element(val.begin(), val.end());
}

std::uint64_t restart_seed(std::uint64_t seed, int r) {
    // splitmix64 step so every restart has an independent stream.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double eta_tr_estimate(const Channel& ch, int restarts, std::uint64_t seed, int max_evals) {
    const int d = ch.d_in();
    if (d < 2) return 0.0;
    std::vector<double> best(std::max(restarts, 1), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < static_cast<int>(best.size()); ++r) {
        Rng rng(restart_seed(seed, r));
        const PairObjective f{ch, haar_unitary(d, rng)};
        best[r] = nelder_mead_max(f, 2 * (d - 1), max_evals);
    }
    double v = 0.0;
    for (double b : best) v = std::max(v, b);
    return std::min(v, 1.0);
}

SeesawResult alpha_I_seesaw_detailed(const Channel& ch, int restarts, std::uint64_t seed) {
    const int n = ch.d_out() * ch.d_out();
    const int d = ch.d_in();
    constexpr int kMaxRounds = 100;
    constexpr double kRelChange = 1e-9;
    std::vector<SeesawResult> runs(std::max(restarts, 1));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
        Rng rng(restart_seed(seed, r));
        std::vector<QuantumState> inputs;
        for (int x = 0; x < n; ++x) inputs.push_back(random_pure_state(d, rng));
        SeesawResult run;
        double prev = 1e300;
        for (int round = 0; round < kMaxRounds; ++round) {
            std::vector<QuantumState> outputs;
            for (const auto& s : inputs) outputs.push_back(apply(ch, s));
            const ExclusionResult ex = exclusion(Ensemble::uniform(outputs));
            // Best pure input for each POVM element: minimum eigenvector of the adjoint image.
            double value = 0.0;
            for (int x = 0; x < n; ++x) {
                const auto e = hermitian_eig(apply_adjoint(ch, ex.povm[x]));
                value += e.values(0);
                inputs[x] = QuantumState::pure(e.vectors.col(0));
            }
            run.history.push_back(value);
            if (std::abs(prev - value) <= kRelChange * std::max(1.0, std::abs(value))) break;
            prev = value;
        }
        run.value = run.history.back();
        runs[r] = std::move(run);
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].value < runs[best].value) best = r;
    return runs[best];
}

double alpha_I_seesaw(const Channel& ch, int restarts, std::uint64_t seed) {
    return alpha_I_seesaw_detailed(ch, restarts, seed).value;
}

}  // namespace doeblin
