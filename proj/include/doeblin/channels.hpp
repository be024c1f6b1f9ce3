#pragma once

#include <array>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "doeblin/linalg.hpp"

namespace doeblin {

inline constexpr double kChannelTol = 1e-9;
inline constexpr double kStateTol = 1e-10;

class QuantumState {
public:
    explicit QuantumState(const HermitianOperator& rho, double tol = kStateTol);
    static QuantumState pure(const ComplexVector& psi);  // normalizes psi
    static QuantumState maximally_mixed(int dim);
    static QuantumState basis(int dim, int k);

    int dim() const { return rho_.dim(); }
    const HermitianOperator& density() const { return rho_; }

private:
    HermitianOperator rho_;
};

using RealMatrix3 = Eigen::Matrix3d;
using RealVector3 = Eigen::Vector3d;

namespace family {
struct Generic {};
struct Gad {
    double p = 0.0;
    double eta = 0.0;
};
struct Cq {
    std::vector<HermitianOperator> states;
};
struct Measurement {
    std::vector<HermitianOperator> povm;
};
struct Dephasing {
    std::vector<ComplexVector> vectors;
};
struct Depolarizing {
    int dim = 2;
    double q = 0.0;
};
struct Replacer {
    int d_in = 1;
    HermitianOperator state;
};
struct Stokes {
    RealVector3 t = RealVector3::Zero();
    RealMatrix3 T = RealMatrix3::Identity();
};
// W(x, y) = probability of output y given input x; rows sum to one.
struct Classical {
    Eigen::MatrixXd W;
};
}  // namespace family

using Family = std::variant<family::Generic, family::Gad, family::Cq, family::Measurement, family::Dephasing,
                            family::Depolarizing, family::Replacer, family::Stokes, family::Classical>;

// CPTP map stored by its Choi operator sum_ij |i><j| (x) N(|i><j|), input factor first.
class Channel {
public:
    // Validates complete positivity and trace preservation.
    static Channel from_choi(int d_in, int d_out, const HermitianOperator& choi, Family family = family::Generic{});

    int d_in() const { return d_in_; }
    int d_out() const { return d_out_; }
    const HermitianOperator& choi() const { return choi_; }
    const Family& family() const { return family_; }
    SubsystemDims dims() const { return SubsystemDims{d_in_, d_out_}; }

    bool is_unital(double tol = kChannelTol) const;

private:
    Channel(int d_in, int d_out, HermitianOperator choi, Family family)
        : d_in_(d_in), d_out_(d_out), choi_(std::move(choi)), family_(std::move(family)) {}

    int d_in_;
    int d_out_;
    HermitianOperator choi_;
    Family family_;
};

// Choi matrix of an arbitrary linear map given as a function on d_in x d_in matrices.
ComplexMatrix choi_of_map(int d_in, int d_out, const std::function<ComplexMatrix(const ComplexMatrix&)>& map);

Channel channel_from_kraus(const std::vector<ComplexMatrix>& kraus, int d_in, int d_out);
Channel make_channel(const Family& spec);
Channel identity_channel(int d);
Channel unitary_channel(const ComplexMatrix& u);

std::vector<ComplexMatrix> gad_kraus(double p, double eta);

// Action on arbitrary (not necessarily Hermitian) operators: Tr_A[(M^T (x) I) Gamma].
ComplexMatrix apply_matrix(const Channel& ch, const ComplexMatrix& m);
HermitianOperator apply(const Channel& ch, const HermitianOperator& h);
QuantumState apply(const Channel& ch, const QuantumState& rho);
// Heisenberg-picture adjoint: Tr[L N(rho)] = Tr[N^dagger(L) rho].
HermitianOperator apply_adjoint(const Channel& ch, const HermitianOperator& l);

Channel compose(const Channel& second, const Channel& first);
Channel tensor(const Channel& a, const Channel& b);
Channel convex_mixture(const std::vector<double>& weights, const std::vector<Channel>& channels);

struct StokesForm {
    RealVector3 t;
    RealMatrix3 T;
};
StokesForm stokes_of_qubit(const Channel& ch);

struct FixedPoint {
    QuantumState state;
    bool unique;
};
FixedPoint fixed_point(const Channel& ch);

const std::array<ComplexMatrix, 4>& pauli();  // I, X, Y, Z

}  // namespace doeblin
