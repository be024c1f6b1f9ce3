#pragma once

#include "doeblin/channels.hpp"

namespace doeblin {

enum class DivergenceMethod { ClosedForm, Eigen, Quadrature };

struct DivergenceValue {
    double value = 0.0;
    bool infinite = false;
    DivergenceMethod method = DivergenceMethod::Eigen;
};

// First argument may be any unit-trace Hermitian operator.
double hockey_stick(const HermitianOperator& rho, const HermitianOperator& sigma, double gamma);
double hockey_stick(const QuantumState& rho, const QuantumState& sigma, double gamma);

double trace_distance(const HermitianOperator& rho, const HermitianOperator& sigma);
double trace_distance(const QuantumState& rho, const QuantumState& sigma);

double fidelity(const QuantumState& rho, const QuantumState& sigma);

DivergenceValue d_max(const HermitianOperator& rho, const HermitianOperator& sigma);

struct QuadratureOptions {
    double abs_tol = 1e-9;
    int max_depth = 50;
};

DivergenceValue hellinger_half(const QuantumState& rho, const QuantumState& sigma, const QuadratureOptions& opts = {});

}  // namespace doeblin
