#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "doeblin/divergences.hpp"
#include "doeblin/errors.hpp"
#include "doeblin/random.hpp"
#include "doeblin/sdp.hpp"

using namespace doeblin;

namespace {

QuantumState diag_state(std::initializer_list<double> p) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<int>(p.size()), static_cast<int>(p.size()));
    int k = 0;
    for (double x : p) m(k, k) = x, ++k;
    return QuantumState(HermitianOperator(m));
}

QuantumState plus_state() {
    ComplexVector v(2);
    v << 1.0, 1.0;
    return QuantumState::pure(v);
}

// Variational form: max over 0 <= M <= I of Tr[M(rho - gamma sigma)] - (1 - gamma)_+.
double hockey_stick_sdp(const HermitianOperator& rho, const HermitianOperator& sigma, double gamma) {
    const int d = rho.dim();
    SdpProblem p;
    const int m = p.add_block("M", d);
    const int s = p.add_block("S", d);
    p.set_objective(m, -(rho - gamma * sigma));
    p.set_objective(s, HermitianOperator::zero(d));
    for (const auto& h : hermitian_basis(d))
        p.add_constraint(LinearConstraint{{{m, h}, {s, h}}, h.trace()});  // M + S = I
    SdpOptions opts;
    opts.tol_gap = 1e-11;
    opts.tol_feas = 1e-11;
    const SdpSolution sol = solve(p, opts);
    REQUIRE(sol.status == SolveStatus::Optimal);
    return -sol.value - std::max(0.0, 1.0 - gamma);
}

QuantumState random_diag(int d, Rng& rng) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
        const double x = -std::log(rng.uniform(1e-12, 1.0));
        m(k, k) = x;
        total += x;
    }
    return QuantumState(HermitianOperator(m / total));
}

}  // namespace

TEST_CASE("hockey-stick examples") {
    Rng rng(1);
    const auto rho = random_state(3, rng);
    CHECK(std::abs(hockey_stick(rho, rho, 1.0)) < 1e-12);
    CHECK(hockey_stick(QuantumState::basis(2, 0), QuantumState::basis(2, 1), 1.0) == doctest::Approx(1.0));
    CHECK(hockey_stick(QuantumState::basis(2, 0), QuantumState::maximally_mixed(2), 2.0) == doctest::Approx(0.0));
}

TEST_CASE("hockey-stick matches its variational SDP and decreases in gamma above one") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_state(3, rng), sigma = random_state(3, rng);
        CHECK(std::abs(hockey_stick(rho, sigma, 0.5) - hockey_stick_sdp(rho.density(), sigma.density(), 0.5)) < 1e-8);
        double prev = 2.0;
        for (double g : {1.0, 1.5, 2.0, 4.0}) {
            const double e = hockey_stick(rho, sigma, g);
            CHECK(std::abs(e - hockey_stick_sdp(rho.density(), sigma.density(), g)) < 1e-8);
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
}

TEST_CASE("quasi-state first argument is accepted") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    const HermitianOperator q(m);
    const HermitianOperator mm = 0.5 * HermitianOperator::identity(2);
    CHECK(hockey_stick(q, mm, 1.0) == doctest::Approx(1.0));
    CHECK(d_max(q, mm).value == doctest::Approx(std::log(3.0)));
}

TEST_CASE("trace distance and fidelity examples") {
    Rng rng(3);
    const auto rho = random_state(2, rng);
    CHECK(trace_distance(rho, rho) < 1e-12);
    CHECK(trace_distance(QuantumState::basis(2, 0), plus_state()) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(trace_distance(QuantumState::basis(2, 0), QuantumState::basis(2, 1)) == doctest::Approx(1.0));
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0));
    CHECK(fidelity(QuantumState::basis(2, 0), QuantumState::maximally_mixed(2)) == doctest::Approx(0.5));
    CHECK(fidelity(QuantumState::basis(2, 0), QuantumState::basis(2, 1)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(trace_distance(rho, QuantumState::basis(3, 0)), InputError);
}

TEST_CASE("trace distance equals hockey-stick at one and obeys Fuchs-van de Graaf") {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rho = random_state(3, rng), sigma = random_state(3, rng);
        const double t = trace_distance(rho, sigma);
        const double f = fidelity(rho, sigma);
        CHECK(std::abs(t - hockey_stick(rho, sigma, 1.0)) < 1e-10);
        CHECK(1.0 - std::sqrt(f) <= t + 1e-8);
        CHECK(t <= std::sqrt(1.0 - f) + 1e-8);
    }
}

TEST_CASE("data processing under random channels") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_state(2, rng), sigma = random_state(2, rng);
        const Channel ch = random_channel(2, 3, rng);
        const auto nr = apply(ch, rho), ns = apply(ch, sigma);
        for (double g : {1.0, 1.5, 3.0}) CHECK(hockey_stick(nr, ns, g) <= hockey_stick(rho, sigma, g) + 1e-8);
        CHECK(trace_distance(nr, ns) <= trace_distance(rho, sigma) + 1e-8);
        CHECK(fidelity(nr, ns) >= fidelity(rho, sigma) - 1e-8);
    }
}

TEST_CASE("max-divergence") {
    Rng rng(6);
    const auto rho = random_state(3, rng);
    CHECK(std::abs(d_max(rho.density(), rho.density()).value) < 1e-9);
    CHECK(d_max(QuantumState::basis(2, 0).density(), QuantumState::maximally_mixed(2).density()).value ==
          doctest::Approx(std::log(2.0)));
    const auto inf = d_max(QuantumState::basis(2, 0).density(), QuantumState::basis(2, 1).density());
    CHECK(inf.infinite);
}

TEST_CASE("Hellinger examples") {
    Rng rng(7);
    const auto rho = random_state(2, rng);
    CHECK(std::abs(hellinger_half(rho, rho).value) < 1e-9);
    const auto orth = hellinger_half(QuantumState::basis(2, 0), QuantumState::basis(2, 1));
    CHECK(std::abs(orth.value - 2.0) < 1e-8);
    const double expect = 2.0 * (1.0 - 2.0 * std::sqrt(0.24));
    CHECK(std::abs(hellinger_half(diag_state({0.6, 0.4}), diag_state({0.4, 0.6})).value - expect) < 1e-9);
}

TEST_CASE("Hellinger quadrature against the commuting closed form") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 3;
        const auto p = random_diag(d, rng), q = random_diag(d, rng);
        double bc = 0.0;
        for (int k = 0; k < d; ++k) bc += std::sqrt(p.density()(k, k).real() * q.density()(k, k).real());
        const auto h = hellinger_half(p, q);
        CHECK(h.method == DivergenceMethod::Quadrature);
        CHECK(std::abs(h.value - 2.0 * (1.0 - bc)) <= 1e-7);
    }
}

TEST_CASE("Hellinger lower bound by fidelity on non-commuting pairs") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_state(2 + trial % 2, rng), sigma = random_state(2 + trial % 2, rng);
        const double h = hellinger_half(rho, sigma).value;
        CHECK(h >= 2.0 * (1.0 - std::sqrt(fidelity(rho, sigma))) - 1e-7);
        CHECK(h <= 2.0 + 1e-12);
    }
}
