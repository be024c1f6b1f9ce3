#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doeblin/channels.hpp"
#include "doeblin/sdp.hpp"

namespace doeblin {

enum class ConeKind { POS, PPT, PPT_SYM2 };

const char* to_string(ConeKind c);

struct CoefficientReport {
    std::string name;
    double value = 0.0;
    std::optional<HermitianOperator> primal_witness;  // optimizing X
    std::vector<HermitianOperator> dual_witness;      // Y, or (Y1, Y2)
    // alpha_wang with a singular Choi matrix is solved on range(J): its (Y1, Y2) then
    // satisfy the marginal rows only along admissible X, and are empty when X = 0 is forced.
    double gap = 0.0;
    SolveStatus status = SolveStatus::NumericalLimit;
    int iterations = 0;
    bool witness_verified = false;  // primal constraints and value agreement at 1e-7
    std::optional<double> analytic_value;
    std::optional<double> analytic_agreement;
};

CoefficientReport alpha(const Channel& ch, const SdpOptions& opts = {});
CoefficientReport alpha_wang(const Channel& ch, const SdpOptions& opts = {});
CoefficientReport alpha_plus(const Channel& ch, const SdpOptions& opts = {});
CoefficientReport alpha_cone(const Channel& ch, ConeKind cone, const SdpOptions& opts = {});
CoefficientReport reverse_doeblin(const Channel& ch, const SdpOptions& opts = {});

std::optional<double> alpha_analytic(const Channel& ch);

// Signed singular values of T from T = R1 diag(t') R2 with R1, R2 rotations; the sign of
// det T sits on the smallest entry. Sorted by decreasing magnitude.
RealVector3 signed_singular_values(const RealMatrix3& T);
// 1 + min over the tetrahedron vertices (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1) of <t', v>.
double qubit_alpha_normal_form(const RealMatrix3& T);
double operator_norm(const RealMatrix3& T);
double min_singular_value(const RealMatrix3& T);

struct QubitExact {
    double eta_tr;     // ||T||_inf
    double expansion;  // sigma_min(T)
};

struct ContractionBoundReport {
    double tr_upper_from_alpha = 1.0;
    double tr_upper_from_cone = 1.0;
    ConeKind cone_used = ConeKind::PPT_SYM2;
    double hs_upper_from_alpha_plus = 1.0;
    std::optional<double> expansion_lower;  // needs d_in == d_out
    std::optional<QubitExact> qubit_exact;
};

ContractionBoundReport contraction_bounds(const Channel& ch, const SdpOptions& opts = {});

struct TensorContractionBound {
    double norm_bound;  // min(1, 4 n ||T||_inf)
    double wang_bound;  // 1 - alpha_wang(N)^n
};

TensorContractionBound qubit_tensor_contraction_bound(const Channel& ch, int n, const SdpOptions& opts = {});

Channel tensor_power(const Channel& ch, int n);

}  // namespace doeblin
