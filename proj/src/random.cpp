#include "doeblin/random.hpp"

#include <cmath>

namespace doeblin {

ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
    ComplexMatrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
    return g;
}

ComplexMatrix haar_unitary(int d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const cplx rj = r(j, j);
        const double a = std::abs(rj);
        if (a > 0.0) q.col(j) *= rj / a;
    }
    return q;
}

ComplexVector random_unit_vector(int d, Rng& rng) {
    ComplexVector v = ginibre(d, 1, rng).col(0);
    return v / v.norm();
}

QuantumState random_pure_state(int d, Rng& rng) { return QuantumState::pure(random_unit_vector(d, rng)); }

QuantumState random_state(int d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, d, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return QuantumState(HermitianOperator::hermitize(rho));
}

Channel random_channel(int d_in, int d_out, Rng& rng, int kraus_rank) {
    int r = kraus_rank > 0 ? kraus_rank : d_in * d_out;
    while (r * d_out < d_in) ++r;
    const ComplexMatrix u = haar_unitary(r * d_out, rng);
    std::vector<ComplexMatrix> kraus;
    for (int k = 0; k < r; ++k) kraus.push_back(u.block(k * d_out, 0, d_out, d_in));
    return channel_from_kraus(kraus, d_in, d_out);
}

std::vector<HermitianOperator> random_povm(int d, int outcomes, Rng& rng) {
    std::vector<ComplexMatrix> a;
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (int y = 0; y < outcomes; ++y) {
        const ComplexMatrix g = ginibre(d, y == 0 ? d : rng.integer(1, d), rng);
        a.push_back(g * g.adjoint());
        sum += a.back();
    }
    const auto e = hermitian_eig(HermitianOperator::hermitize(sum));
    const ComplexMatrix isq = e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal() * e.vectors.adjoint();
    std::vector<HermitianOperator> povm;
    for (const auto& m : a) povm.push_back(HermitianOperator::hermitize(isq * m * isq));
    return povm;
}

}  // namespace doeblin
