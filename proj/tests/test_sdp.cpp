#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "doeblin/channels.hpp"
#include "doeblin/errors.hpp"
#include "doeblin/random.hpp"
#include "doeblin/sdp.hpp"

using namespace doeblin;

namespace {

HermitianOperator random_hermitian(int d, Rng& rng) { return HermitianOperator::hermitize(ginibre(d, d, rng)); }

HermitianOperator random_psd(int d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, d, rng);
    return HermitianOperator::hermitize(g * g.adjoint() + 0.1 * ComplexMatrix::Identity(d, d));
}

// Strictly feasible on both sides by construction.
SdpProblem random_problem(Rng& rng, int d1, int d2, int m) {
    SdpProblem p;
    const int b1 = p.add_block("X1", d1);
    const int b2 = p.add_block("X2", d2);
    const HermitianOperator x1 = random_psd(d1, rng), x2 = random_psd(d2, rng);
    HermitianOperator c1 = random_psd(d1, rng), c2 = random_psd(d2, rng);
    for (int i = 0; i < m; ++i) {
        const HermitianOperator a1 = random_hermitian(d1, rng), a2 = random_hermitian(d2, rng);
        p.add_constraint(LinearConstraint{{{b1, a1}, {b2, a2}}, inner(a1, x1) + inner(a2, x2)});
        const double y = rng.normal();
        c1 += y * a1;
        c2 += y * a2;
    }
    p.set_objective(b1, c1);
    p.set_objective(b2, c2);
    return p;
}

double primal_objective(const SdpProblem& p, const SdpSolution& s) {
    double v = 0.0;
    for (int k = 0; k < p.num_blocks(); ++k) v += inner(p.objective(k), s.primal[k]);
    return v;
}

}  // namespace

TEST_CASE("trace minimization over density matrices") {
    SdpProblem p;
    const int b = p.add_block("X", 2);
    p.set_objective(b, HermitianOperator::identity(2));
    p.add_constraint(b, HermitianOperator::identity(2), 1.0);
    const SdpSolution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.primal[0].trace() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.primal[0].min_eigenvalue() >= -1e-8);
}

TEST_CASE("GAD Doeblin dual program") {
    const Channel g = make_channel(family::Gad{0.3, 0.25});
    SdpProblem p;
    const int b = p.add_block("Y", 4);
    p.set_objective(b, g.choi());
    // Tr_A Y = I_B expressed against the Hermitian basis of B
    for (const auto& h : hermitian_basis(2)) p.add_constraint(b, kron(HermitianOperator::identity(2), h), h.trace());
    const SdpSolution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.value - 0.25) < 1e-7);
    CHECK(std::abs(s.value - s.dual_value) / (1 + std::abs(s.value)) <= 1e-7);
    CHECK(s.primal[0].min_eigenvalue() >= -1e-8);
    CHECK(s.primal_residual <= 1e-8);
    CHECK(s.dual_residual <= 1e-8);
}

TEST_CASE("infeasibility detection") {
    SdpProblem p;
    const int b = p.add_block("x", 1);
    p.set_objective(b, HermitianOperator::zero(1));
    p.add_constraint(b, HermitianOperator::identity(1), -1.0);
    CHECK(solve(p).status == SolveStatus::PrimalInfeasible);

    // min -x1 subject to x1 - x2 = 0: unbounded below
    SdpProblem q;
    const int u = q.add_block("u", 1), v = q.add_block("v", 1);
    q.set_objective(u, -HermitianOperator::identity(1));
    q.set_objective(v, HermitianOperator::zero(1));
    q.add_constraint(LinearConstraint{{{u, HermitianOperator::identity(1)}, {v, -HermitianOperator::identity(1)}}, 0.0});
    CHECK(solve(q).status == SolveStatus::DualInfeasible);
}

TEST_CASE("free blocks") {
    // min <C, Z> over free 2x2 Z with Z = diag(1, -2) imposed entrywise
    SdpProblem p;
    const int z = p.add_block("Z", 2, Cone::FREE);
    const int w = p.add_block("W", 1);
    p.set_objective(z, HermitianOperator::identity(2));
    p.set_objective(w, HermitianOperator::identity(1));
    const auto basis = hermitian_basis(2);
    ComplexMatrix target = ComplexMatrix::Zero(2, 2);
    target(0, 0) = 1.0;
    target(1, 1) = -2.0;
    const HermitianOperator t(target);
    for (const auto& h : basis) p.add_constraint(z, h, inner(h, t));
    p.add_constraint(w, HermitianOperator::identity(1), 3.0);
    const SdpSolution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK((s.primal[z].mat() - target).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("random strictly feasible problems: optimality, duality and PSD iterates") {
    Rng rng(101);
    for (int trial = 0; trial < 15; ++trial) {
        const SdpProblem p = random_problem(rng, 2 + trial % 3, 3, 3 + trial % 4);
        const SdpSolution s = solve(p);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(std::abs(s.value - s.dual_value) / (1 + std::abs(s.value)) <= 1e-7);
        CHECK(s.dual_value <= s.value + 1e-7);
        CHECK(primal_objective(p, s) == doctest::Approx(s.value).epsilon(1e-9));
        for (const auto& x : s.primal) CHECK(x.min_eigenvalue() >= -1e-8);
        for (const auto& z : s.slack) CHECK(z.min_eigenvalue() >= -1e-8);
        CHECK(s.primal_residual <= 1e-8);
        CHECK(s.dual_residual <= 1e-8);
    }
}

TEST_CASE("solves are deterministic and the Schur assembly paths agree") {
    Rng rng(202);
    const SdpProblem p = random_problem(rng, 4, 3, 6);
    SdpOptions serial;
    serial.parallel = false;
    std::ostringstream t1, t2;
    SdpOptions a = serial, b = serial;
    a.trace = &t1;
    b.trace = &t2;
    const SdpSolution s1 = solve(p, a), s2 = solve(p, b);
    CHECK(t1.str() == t2.str());
    CHECK(s1.value == s2.value);
    CHECK(s1.iterations == s2.iterations);
    const SdpSolution s3 = solve(p);
    CHECK(s3.value == s1.value);

    std::vector<detail::StandardBlock> blocks(2);
    std::vector<ComplexMatrix> w;
    const int m = 7;
    for (int k = 0; k < 2; ++k) {
        blocks[k].dim = 3 + k;
        for (int i = 0; i < m; ++i) {
            if ((i + k) % 3 == 0) continue;
            blocks[k].rows.push_back(i);
            blocks[k].coeffs.push_back(random_hermitian(3 + k, rng).mat());
        }
        w.push_back(random_psd(3 + k, rng).mat());
    }
    const Eigen::MatrixXd ms = detail::schur_serial(blocks, w, m);
    const Eigen::MatrixXd mp = detail::schur_parallel(blocks, w, m);
    CHECK((ms - mp).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ms - ms.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ms).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("rank checks and redundancy removal") {
    SdpProblem p;
    const int b = p.add_block("X", 2);
    p.set_objective(b, HermitianOperator::identity(2));
    p.add_constraint(b, HermitianOperator::identity(2), 1.0);
    p.add_constraint(b, 2.0 * HermitianOperator::identity(2), 2.0);
    CHECK_THROWS_AS(p.check_rank(), InputError);
    CHECK_THROWS_AS(solve(p), InputError);
    SdpProblem q = p;
    CHECK(q.remove_redundant_constraints() == 1);
    CHECK_NOTHROW(q.check_rank());
    CHECK(solve(q).value == doctest::Approx(1.0).epsilon(1e-8));

    SdpProblem r = p;
    r.add_constraint(b, 3.0 * HermitianOperator::identity(2), 5.0);
    CHECK_THROWS_AS(r.remove_redundant_constraints(), InputError);
}

TEST_CASE("warm start matches cold start") {
    const Channel g = make_channel(family::Gad{0.7, 0.49});
    SdpProblem p;
    const int b = p.add_block("Y", 4);
    p.set_objective(b, g.choi());
    for (const auto& h : hermitian_basis(2)) p.add_constraint(b, kron(HermitianOperator::identity(2), h), h.trace());
    const SdpSolution cold = solve(p);
    p.set_warm_start({0.5 * HermitianOperator::identity(4)});
    const SdpSolution warm = solve(p);
    REQUIRE(warm.status == SolveStatus::Optimal);
    CHECK(std::abs(cold.value - warm.value) < 1e-8);
    CHECK(std::abs(warm.value - 0.09) < 1e-7);
}
