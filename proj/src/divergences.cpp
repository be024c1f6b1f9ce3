#include "doeblin/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace doeblin {

namespace {

void check_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* what) {
    if (a.dim() != b.dim()) throw InputError(std::string(what) + ": dimension mismatch");
}

// Projector onto eigenvectors with eigenvalue <= threshold.
ComplexMatrix kernel_projector(const HermitianOperator& h, double threshold) {
    const auto e = hermitian_eig(h);
    ComplexMatrix p = ComplexMatrix::Zero(h.dim(), h.dim());
    for (int i = 0; i < h.dim(); ++i)
        if (e.values(i) <= threshold) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
    return p;
}

}  // namespace

double hockey_stick(const HermitianOperator& rho, const HermitianOperator& sigma, double gamma) {
    check_same_dim(rho, sigma, "hockey_stick");
    if (gamma < 0.0) throw InputError("hockey_stick: gamma must be >= 0");
    const double tp = positive_part(rho - gamma * sigma).trace_plus;
    return tp - std::max(0.0, 1.0 - gamma);
}

double hockey_stick(const QuantumState& rho, const QuantumState& sigma, double gamma) {
    return hockey_stick(rho.density(), sigma.density(), gamma);
}

double trace_distance(const HermitianOperator& rho, const HermitianOperator& sigma) {
    check_same_dim(rho, sigma, "trace_distance");
    const auto e = hermitian_eig(rho - sigma);
    return 0.5 * e.values.cwiseAbs().sum();
}

double trace_distance(const QuantumState& rho, const QuantumState& sigma) {
    return trace_distance(rho.density(), sigma.density());
}

double fidelity(const QuantumState& rho, const QuantumState& sigma) {
    check_same_dim(rho.density(), sigma.density(), "fidelity");
    const ComplexMatrix sr = psd_sqrt(rho.density());
    const auto inner_op = HermitianOperator::hermitize(sr * sigma.density().mat() * sr);
    const auto e = hermitian_eig(inner_op);
    const double root = e.values.cwiseMax(0.0).cwiseSqrt().sum();
    return std::min(1.0, root * root);
}

DivergenceValue d_max(const HermitianOperator& rho, const HermitianOperator& sigma) {
    check_same_dim(rho, sigma, "d_max");
    const auto e = hermitian_eig(sigma);
    const double thr = 1e-10;
    std::vector<int> supp;
    for (int i = 0; i < sigma.dim(); ++i)
        if (e.values(i) > thr) supp.push_back(i);
    const ComplexMatrix rho_eig = e.vectors.adjoint() * rho.mat() * e.vectors;
    // Any weight of rho outside the support of sigma makes the bound infeasible.
    for (int i = 0; i < sigma.dim(); ++i) {
        if (e.values(i) > thr) continue;
        for (int j = 0; j < sigma.dim(); ++j)
            if (std::abs(rho_eig(i, j)) > thr) return {std::numeric_limits<double>::infinity(), true, DivergenceMethod::Eigen};
    }
    const int k = static_cast<int>(supp.size());
    ComplexMatrix red(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            red(a, b) = rho_eig(supp[a], supp[b]) / std::sqrt(e.values(supp[a]) * e.values(supp[b]));
    const double lam = std::max(0.0, HermitianOperator::hermitize(red).max_eigenvalue());
    return {std::log(lam), false, DivergenceMethod::Eigen};
}

namespace {

struct HellingerIntegrand {
    const HermitianOperator& rho;
    const HermitianOperator& sigma;
    double at_zero;

    double operator()(double u) const {
        if (u <= 0.0) return at_zero;
        const double gamma = 1.0 / (u * u);
        return hockey_stick(rho, sigma, gamma) + hockey_stick(sigma, rho, gamma);
    }
};

struct Simpson {
    const HellingerIntegrand& f;
    int max_depth;
    bool failed = false;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        if (depth >= max_depth) {
            failed = true;
            return left + right + delta / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

DivergenceValue hellinger_half(const QuantumState& rho, const QuantumState& sigma, const QuadratureOptions& opts) {
    check_same_dim(rho.density(), sigma.density(), "hellinger_half");
    const auto& r = rho.density();
    const auto& s = sigma.density();
    // gamma -> infinity limit of E_gamma: weight of each state on the kernel of the other.
    const double lim = inner(HermitianOperator::hermitize(kernel_projector(s, 1e-12)), r) +
                       inner(HermitianOperator::hermitize(kernel_projector(r, 1e-12)), s);
    const HellingerIntegrand f{r, s, lim};
    Simpson simpson{f, opts.max_depth};
    // Start from a four-panel split so isolated kinks cannot fool the first comparison.
    double total = 0.0;
    constexpr int panels = 4;
    for (int k = 0; k < panels; ++k) {
        const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson.recurse(a, b, fa, fm, fb, whole, opts.abs_tol / panels, 0);
    }
    if (simpson.failed) throw NumericalError("hellinger_half: adaptive quadrature did not converge");
    return {std::clamp(total, 0.0, 2.0), false, DivergenceMethod::Quadrature};
}

}  // namespace doeblin
