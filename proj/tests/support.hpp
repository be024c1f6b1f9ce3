// Fixtures shared by the unit tests and the acceptance runner.
#pragma once

#include <cmath>

#include "doeblin/channels.hpp"

namespace fixtures {

using namespace doeblin;

inline ComplexVector ket2(cplx a, cplx b) {
    ComplexVector v(2);
    v << a, b;
    return v;
}

inline HermitianOperator proj(const ComplexVector& v) { return QuantumState::pure(v).density(); }

// cq channel |0><0| -> |0><0|, |1><1| -> |+><+|
inline Channel pbr() {
    const double s = 1.0 / std::sqrt(2.0);
    return make_channel(family::Cq{{proj(ket2(1, 0)), proj(ket2(s, s))}});
}

// Explicit dual witness for alpha(pbr (x) pbr) = 0, factors ordered A1 A2 B1 B2.
inline HermitianOperator pbr_square_witness() {
    Eigen::Matrix4d b00, b01, b10, b11;
    b00 << 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0;
    b01 << 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, 1, 1, 1, -1, 1, 1;
    b10 << 1, 1, -1, 1, 1, 1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1;
    b11 << 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1;
    ComplexMatrix y = ComplexMatrix::Zero(16, 16);
    y.block(0, 0, 4, 4) = (0.5 * b00).cast<cplx>();
    y.block(4, 4, 4, 4) = (0.25 * b01).cast<cplx>();
    y.block(8, 8, 4, 4) = (0.25 * b10).cast<cplx>();
    y.block(12, 12, 4, 4) = (0.5 * b11).cast<cplx>();
    return HermitianOperator(y);
}

// Three-branch closed form for alpha_wang of the GAD channel.
inline double gad_alpha_wang(double p, double eta) {
    const double r = std::sqrt(eta);
    const double edge = r / (2.0 * (1.0 + r));
    const double e2 = (1.0 - eta) * (1.0 - eta);
    if (p <= edge) return 2.0 * p * (1.0 - 2.0 * p) * e2 / (eta + 2.0 * p * (1.0 - eta));
    if (p >= 1.0 - edge) return 2.0 * (1.0 - p) * (2.0 * p - 1.0) * e2 / (eta + 2.0 * (1.0 - p) * (1.0 - eta));
    return (1.0 - r) * (1.0 - r);
}

inline double gad_alpha(double eta) { return (1.0 - std::sqrt(eta)) * (1.0 - std::sqrt(eta)); }

}  // namespace fixtures
