#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "doeblin/errors.hpp"
#include "doeblin/linalg.hpp"
#include "doeblin/random.hpp"

using namespace doeblin;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix diag(std::initializer_list<double> v) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
    int k = 0;
    for (double x : v) m(k, k) = x, ++k;
    return m;
}

HermitianOperator random_hermitian(int d, Rng& rng) {
    return HermitianOperator::hermitize(ginibre(d, d, rng));
}

HermitianOperator phi2() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    return HermitianOperator(m);
}

const ComplexMatrix kZ = diag({1, -1});

ComplexMatrix pauli_x() {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

}  // namespace

TEST_CASE("eigendecomposition of small known matrices") {
    auto z = hermitian_eig(HermitianOperator(kZ));
    CHECK(z.values(0) == doctest::Approx(-1.0));
    CHECK(z.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(z.vectors(1, 0)) == doctest::Approx(1.0));  // |1> for -1
    CHECK(std::abs(z.vectors(0, 1)) == doctest::Approx(1.0));

    auto x = hermitian_eig(HermitianOperator(pauli_x()));
    CHECK(x.values(0) == doctest::Approx(-1.0));
    const cplx ratio = x.vectors(1, 0) / x.vectors(0, 0);
    CHECK(std::abs(ratio + 1.0) < 1e-12);  // |->

    auto id = hermitian_eig(HermitianOperator::identity(3));
    for (int k = 0; k < 3; ++k) CHECK(id.values(k) == doctest::Approx(1.0));
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 7;
        const HermitianOperator h = random_hermitian(d, rng);
        const auto e = hermitian_eig(h);
        const ComplexMatrix rec = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
        CHECK(max_abs(rec - h.mat()) <= 1e-10 * d * h.norm_inf());
        for (int k = 1; k < d; ++k) CHECK(e.values(k - 1) <= e.values(k));
    }
}

TEST_CASE("positive part examples") {
    auto p = positive_part(HermitianOperator(diag({2, -1})));
    CHECK(p.trace_plus == doctest::Approx(2.0));
    CHECK(max_abs(p.part.mat() - diag({2, 0})) < 1e-14);
    CHECK(positive_part(-HermitianOperator::identity(3)).trace_plus == 0.0);
    CHECK(positive_part(HermitianOperator(diag({0, -1}))).trace_plus == 0.0);
}

TEST_CASE("positive part properties on random inputs") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator h = random_hermitian(4, rng);
        const auto plus = positive_part(h);
        const auto minus = positive_part(-h);
        CHECK(plus.part.min_eigenvalue() >= -1e-10);
        CHECK((plus.part - h).min_eigenvalue() >= -1e-10);
        CHECK(h.trace() == doctest::Approx(plus.trace_plus - minus.trace_plus).epsilon(1e-12));
    }
}

TEST_CASE("kron examples and mixed product") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(max_abs(kron(i2, kZ) - diag({1, -1, 1, -1})) == 0.0);
    CHECK(max_abs(kron(kZ, i2) - diag({1, 1, -1, -1})) == 0.0);
    const ComplexMatrix k = kron(diag({1, 0}), diag({0, 1}));
    CHECK(k(1, 1) == cplx(1.0));
    CHECK(k.cwiseAbs().sum() == 1.0);

    Rng rng(3);
    const ComplexMatrix a = ginibre(2, 3, rng), b = ginibre(3, 2, rng), c = ginibre(3, 2, rng), d = ginibre(2, 2, rng);
    CHECK(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-10);
    const ComplexMatrix e = ginibre(2, 2, rng);
    CHECK(max_abs(kron(kron(a, b), e) - kron(a, kron(b, e))) < 1e-10);
}

TEST_CASE("partial trace examples") {
    const auto marginal = partial_trace(phi2(), SubsystemDims{2, 2}, {1});
    CHECK(max_abs(marginal.mat() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);

    Rng rng(9);
    const ComplexMatrix rho = random_state(2, rng).density().mat();
    const ComplexMatrix sigma = random_state(3, rng).density().mat();
    CHECK(max_abs(partial_trace(kron(rho, sigma), SubsystemDims{2, 3}, {0}) - rho) < 1e-12);
    CHECK(max_abs(partial_trace(kron(rho, sigma), SubsystemDims{2, 3}, {1}) - sigma) < 1e-12);

    const HermitianOperator mixed = 0.25 * HermitianOperator::identity(4);
    CHECK(max_abs(partial_trace(mixed, SubsystemDims{2, 2}, {0}).mat() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);
    CHECK_THROWS_AS(partial_trace(mixed, SubsystemDims{2, 3}, {0}), InputError);
}

TEST_CASE("partial transpose examples and involution") {
    const auto pt = partial_transpose(phi2(), SubsystemDims{2, 2}, 1);
    const auto e = hermitian_eig(pt);
    CHECK(e.values(0) == doctest::Approx(-0.5));
    for (int k = 1; k < 4; ++k) CHECK(e.values(k) == doctest::Approx(0.5));

    Rng rng(4);
    const ComplexMatrix rho = random_state(2, rng).density().mat();
    const ComplexMatrix sigma = random_state(2, rng).density().mat();
    CHECK(max_abs(partial_transpose(kron(rho, sigma), SubsystemDims{2, 2}, 1) - kron(rho, sigma.transpose())) < 1e-14);

    const HermitianOperator mixed = 0.25 * HermitianOperator::identity(4);
    CHECK(max_abs(partial_transpose(mixed, SubsystemDims{2, 2}, 0).mat() - mixed.mat()) == 0.0);

    for (int trial = 0; trial < 10; ++trial) {
        const SubsystemDims dims{2, 3};
        const HermitianOperator h = random_hermitian(6, rng);
        const auto twice = partial_transpose(partial_transpose(h, dims, 1), dims, 1);
        CHECK(max_abs(twice.mat() - h.mat()) < 1e-14);
        // tracing out B commutes with transposing A
        const auto lhs = partial_trace(partial_transpose(h, dims, 0), dims, {0});
        const auto rhs = partial_trace(h, dims, {0}).transpose();
        CHECK(max_abs(lhs.mat() - rhs.mat()) < 1e-12);
    }
    CHECK_THROWS_AS(partial_transpose(mixed, SubsystemDims{2, 2}, 2), InputError);
}

TEST_CASE("permute subsystems examples") {
    Rng rng(8);
    const ComplexMatrix rho = random_state(2, rng).density().mat();
    const ComplexMatrix sigma = random_state(3, rng).density().mat();
    const SubsystemDims dims{2, 3};
    CHECK(max_abs(permute_subsystems(kron(rho, sigma), dims, {1, 0}) - kron(sigma, rho)) < 1e-14);
    CHECK(max_abs(permute_subsystems(kron(rho, sigma), dims, {0, 1}) - kron(rho, sigma)) == 0.0);
    CHECK(max_abs(permute_subsystems(phi2(), SubsystemDims{2, 2}, {1, 0}).mat() - phi2().mat()) < 1e-15);
    CHECK_THROWS_AS(permute_subsystems(kron(rho, sigma), dims, {0, 0}), InputError);

    // three factors: the unitary is a permutation matrix and the action is conjugation
    const ComplexMatrix t = random_state(2, rng).density().mat();
    const SubsystemDims d3{2, 3, 2};
    const ComplexMatrix w = permutation_unitary(d3, {2, 0, 1});
    CHECK(max_abs(w * w.adjoint() - ComplexMatrix::Identity(12, 12)) < 1e-14);
    CHECK(max_abs(permute_subsystems(kron(kron(rho, sigma), t), d3, {2, 0, 1}) - kron(kron(t, rho), sigma)) < 1e-14);
}

TEST_CASE("Hermitian operator validation and basis") {
    ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianOperator{bad}, InputError);

    const auto basis = hermitian_basis(3);
    REQUIRE(basis.size() == 9);
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b)
            CHECK(inner(basis[a], basis[b]) == doctest::Approx(a == b ? 1.0 : 0.0));
}

TEST_CASE("matrix functions") {
    Rng rng(21);
    const HermitianOperator h = random_hermitian(3, rng);
    const ComplexMatrix u = matrix_exp_hermitian(h, cplx(0.0, -0.7));
    CHECK(max_abs(u * u.adjoint() - ComplexMatrix::Identity(3, 3)) < 1e-12);
    const ComplexMatrix back = matrix_exp_hermitian(h, cplx(0.0, 0.7));
    CHECK(max_abs(u * back - ComplexMatrix::Identity(3, 3)) < 1e-12);

    const QuantumState rho = random_state(3, rng);  // from random.hpp via channels
    const ComplexMatrix s = psd_sqrt(rho.density());
    CHECK(max_abs(s * s - rho.density().mat()) < 1e-12);
}
