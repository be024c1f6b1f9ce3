#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "doeblin/errors.hpp"

namespace doeblin {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kClipThreshold = 1e-12;

// Dense Hermitian matrix. Stored form is exactly (M + M^dagger)/2.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const ComplexMatrix& m, double tol = kHermiticityTol);

    static HermitianOperator zero(int dim);
    static HermitianOperator identity(int dim);
    // Symmetrizes without the asymmetry check; for results known Hermitian up to rounding.
    static HermitianOperator hermitize(const ComplexMatrix& m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const ComplexMatrix& mat() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

    double trace() const { return m_.trace().real(); }
    double norm_inf() const;  // operator norm
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    HermitianOperator transpose() const;  // Hermitian transpose == complex conjugate

    HermitianOperator& operator+=(const HermitianOperator& o);
    HermitianOperator& operator-=(const HermitianOperator& o);
    HermitianOperator& operator*=(double s);

    friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
    friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
    friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
    friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }
    HermitianOperator operator-() const { return (-1.0) * *this; }

private:
    ComplexMatrix m_;
};

// Hilbert-Schmidt inner product Re Tr[A^dagger B]; real for Hermitian arguments.
double inner(const HermitianOperator& a, const HermitianOperator& b);
double inner(const ComplexMatrix& a, const ComplexMatrix& b);

struct SubsystemDims {
    std::vector<int> dims;

    SubsystemDims() = default;
    SubsystemDims(std::initializer_list<int> d) : dims(d) {}
    explicit SubsystemDims(std::vector<int> d) : dims(std::move(d)) {}

    int total() const;
    int size() const { return static_cast<int>(dims.size()); }
    void validate(int operator_dim) const;
};

struct Eigensystem {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns, unitary
};

Eigensystem hermitian_eig(const HermitianOperator& h);

struct PositivePart {
    HermitianOperator part;
    double trace_plus = 0.0;
};

PositivePart positive_part(const HermitianOperator& h);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// keep lists the factor indices that survive, in increasing order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims, const std::vector<int>& keep);
HermitianOperator partial_trace(const HermitianOperator& m, const SubsystemDims& dims, const std::vector<int>& keep);

ComplexMatrix partial_transpose(const ComplexMatrix& m, const SubsystemDims& dims, int subsystem);
HermitianOperator partial_transpose(const HermitianOperator& m, const SubsystemDims& dims, int subsystem);

// perm[k] is the old factor placed at new position k.
ComplexMatrix permutation_unitary(const SubsystemDims& dims, const std::vector<int>& perm);
ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemDims& dims, const std::vector<int>& perm);
HermitianOperator permute_subsystems(const HermitianOperator& m, const SubsystemDims& dims,
                                     const std::vector<int>& perm);

// Orthonormal basis of Herm(d) under the Hilbert-Schmidt inner product:
// E_kk, then (E_kl + E_lk)/sqrt2 and i(E_kl - E_lk)/sqrt2 for k < l.
std::vector<HermitianOperator> hermitian_basis(int d);

// Principal square root and inverse square root of a positive definite operator.
ComplexMatrix psd_sqrt(const HermitianOperator& h);

ComplexMatrix matrix_exp_hermitian(const HermitianOperator& h, cplx factor);  // exp(factor * H)

}  // namespace doeblin
