#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "doeblin/linalg.hpp"

namespace doeblin {

enum class Cone { PSD, FREE };
enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalLimit };

const char* to_string(SolveStatus s);

struct BlockSpec {
    std::string name;
    int dim = 1;
    Cone cone = Cone::PSD;
};

// sum over terms of <A_j, X_j> = rhs
struct LinearConstraint {
    std::vector<std::pair<int, HermitianOperator>> terms;
    double rhs = 0.0;
};

// minimize sum_j <C_j, X_j> subject to the linear constraints, X_j PSD or free Hermitian.
class SdpProblem {
public:
    int add_block(std::string name, int dim, Cone cone = Cone::PSD);
    void set_objective(int block, const HermitianOperator& c);
    void add_constraint(LinearConstraint con);
    void add_constraint(int block, const HermitianOperator& a, double rhs);
    void set_warm_start(std::vector<HermitianOperator> x);

    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const BlockSpec& block(int k) const { return blocks_.at(k); }
    const HermitianOperator& objective(int k) const { return objective_.at(k); }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::optional<std::vector<HermitianOperator>>& warm_start() const { return warm_; }

    // Drops rows that are linear combinations of earlier rows; throws InputError if a dropped
    // row has a right-hand side inconsistent with the combination. Returns the number dropped.
    int remove_redundant_constraints(double tol = 1e-10);

    // Throws InputError when constraint rows are linearly dependent within tol.
    void check_rank(double tol = 1e-10) const;

private:
    std::vector<BlockSpec> blocks_;
    std::vector<HermitianOperator> objective_;
    std::vector<LinearConstraint> constraints_;
    std::optional<std::vector<HermitianOperator>> warm_;
};

struct SdpOptions {
    double tol_gap = 1e-8;
    double tol_feas = 1e-9;
    int max_iter = 200;
    bool parallel = true;            // OpenMP Schur assembly
    std::ostream* trace = nullptr;   // JSON line per iteration when set
};

struct SdpSolution {
    SolveStatus status = SolveStatus::NumericalLimit;
    double value = 0.0;        // primal objective
    double dual_value = 0.0;   // b^T y
    double gap = 0.0;          // |primal - dual| / (1 + |primal| + |dual|)
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    std::vector<HermitianOperator> primal;  // one per block
    std::vector<HermitianOperator> slack;   // C_j - sum_i y_i A_ij, one per block
    RealVector y;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

namespace detail {

// Dense coefficient storage after splitting free blocks into PSD halves.
struct StandardBlock {
    int dim = 0;
    std::vector<int> rows;              // constraint indices with nonzero coefficient
    std::vector<ComplexMatrix> coeffs;  // matching A_ik
};

// M_ij = sum_k <A_ik, W_k A_jk W_k>.
Eigen::MatrixXd schur_serial(const std::vector<StandardBlock>& blocks, const std::vector<ComplexMatrix>& w, int m);
Eigen::MatrixXd schur_parallel(const std::vector<StandardBlock>& blocks, const std::vector<ComplexMatrix>& w, int m);

}  // namespace detail

}  // namespace doeblin
