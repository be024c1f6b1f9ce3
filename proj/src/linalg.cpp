#include "doeblin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace doeblin {

namespace {

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
    return s;
}

std::vector<int> digits_of(int index, const std::vector<int>& dims) {
    std::vector<int> d(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        d[k] = index % dims[k];
        index /= dims[k];
    }
    return d;
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InputError("HermitianOperator: matrix must be square and nonempty");
    if (!all_finite(m)) throw InputError("HermitianOperator: non-finite entry");
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        std::ostringstream os;
        os << "HermitianOperator: asymmetry " << asym << " exceeds " << tol;
        throw InputError(os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(int dim) { return hermitize(ComplexMatrix::Zero(dim, dim)); }

HermitianOperator HermitianOperator::identity(int dim) { return hermitize(ComplexMatrix::Identity(dim, dim)); }

HermitianOperator HermitianOperator::hermitize(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InputError("hermitize: matrix must be square and nonempty");
    HermitianOperator h;
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
}

double HermitianOperator::norm_inf() const {
    const auto e = hermitian_eig(*this);
    return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

double HermitianOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double HermitianOperator::max_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

HermitianOperator HermitianOperator::transpose() const {
    HermitianOperator h;
    h.m_ = m_.transpose();
    return h;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
    if (o.dim() != dim()) throw InputError("HermitianOperator: dimension mismatch in +");
    m_ += o.m_;
    return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
    if (o.dim() != dim()) throw InputError("HermitianOperator: dimension mismatch in -");
    m_ -= o.m_;
    return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
    m_ *= s;
    return *this;
}

double inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("inner: dimension mismatch");
    return (a.array().conjugate() * b.array()).sum().real();
}

double inner(const HermitianOperator& a, const HermitianOperator& b) { return inner(a.mat(), b.mat()); }

int SubsystemDims::total() const {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

void SubsystemDims::validate(int operator_dim) const {
    if (dims.empty()) throw InputError("SubsystemDims: empty");
    for (int d : dims)
        if (d < 1) throw InputError("SubsystemDims: factor dimension < 1");
    if (total() != operator_dim) {
        std::ostringstream os;
        os << "SubsystemDims: product " << total() << " != operator dimension " << operator_dim;
        throw InputError(os.str());
    }
}

Eigensystem hermitian_eig(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.mat());
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

PositivePart positive_part(const HermitianOperator& h) {
    const auto e = hermitian_eig(h);
    ComplexMatrix p = ComplexMatrix::Zero(h.dim(), h.dim());
    double tr = 0.0;
    for (int i = 0; i < h.dim(); ++i) {
        const double lam = e.values(i);
        if (lam > kClipThreshold) {
            p += lam * e.vectors.col(i) * e.vectors.col(i).adjoint();
            tr += lam;
        }
    }
    return {HermitianOperator::hermitize(p), tr};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator::hermitize(kron(a.mat(), b.mat()));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims, const std::vector<int>& keep) {
    if (m.rows() != m.cols()) throw InputError("partial_trace: matrix must be square");
    dims.validate(static_cast<int>(m.rows()));
    const int n = dims.size();
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n || kept[k]) throw InputError("partial_trace: invalid keep index");
        kept[k] = true;
    }
    std::vector<int> kdims, tdims, kpos, tpos;
    for (int k = 0; k < n; ++k) {
        if (kept[k]) {
            kdims.push_back(dims.dims[k]);
            kpos.push_back(k);
        } else {
            tdims.push_back(dims.dims[k]);
            tpos.push_back(k);
        }
    }
    const auto full_stride = strides_of(dims.dims);
    const int dk = std::accumulate(kdims.begin(), kdims.end(), 1, std::multiplies<>());
    const int dt = std::accumulate(tdims.begin(), tdims.end(), 1, std::multiplies<>());

    std::vector<int> koff(dk, 0), toff(dt, 0);
    for (int a = 0; a < dk; ++a) {
        const auto dg = digits_of(a, kdims);
        for (std::size_t q = 0; q < kpos.size(); ++q) koff[a] += dg[q] * full_stride[kpos[q]];
    }
    for (int t = 0; t < dt; ++t) {
        const auto dg = digits_of(t, tdims);
        for (std::size_t q = 0; q < tpos.size(); ++q) toff[t] += dg[q] * full_stride[tpos[q]];
    }
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            cplx s = 0.0;
            for (int t = 0; t < dt; ++t) s += m(koff[a] + toff[t], koff[b] + toff[t]);
            out(a, b) = s;
        }
    return out;
}

HermitianOperator partial_trace(const HermitianOperator& m, const SubsystemDims& dims, const std::vector<int>& keep) {
    return HermitianOperator::hermitize(partial_trace(m.mat(), dims, keep));
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const SubsystemDims& dims, int subsystem) {
    if (m.rows() != m.cols()) throw InputError("partial_transpose: matrix must be square");
    dims.validate(static_cast<int>(m.rows()));
    if (subsystem < 0 || subsystem >= dims.size()) throw InputError("partial_transpose: invalid subsystem");
    const auto stride = strides_of(dims.dims);
    const int s = stride[subsystem];
    const int ds = dims.dims[subsystem];
    const int d = static_cast<int>(m.rows());
    ComplexMatrix out(d, d);
    for (int r = 0; r < d; ++r) {
        const int rd = (r / s) % ds;
        for (int c = 0; c < d; ++c) {
            const int cd = (c / s) % ds;
            out(r - rd * s + cd * s, c - cd * s + rd * s) = m(r, c);
        }
    }
    return out;
}

HermitianOperator partial_transpose(const HermitianOperator& m, const SubsystemDims& dims, int subsystem) {
    return HermitianOperator::hermitize(partial_transpose(m.mat(), dims, subsystem));
}

namespace {

std::vector<int> permuted_indices(const SubsystemDims& dims, const std::vector<int>& perm) {
    const int n = dims.size();
    if (static_cast<int>(perm.size()) != n) throw InputError("permute_subsystems: permutation has wrong length");
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < n; ++k)
        if (sorted[k] != k) throw InputError("permute_subsystems: not a permutation");
    std::vector<int> new_dims(n);
    for (int k = 0; k < n; ++k) new_dims[k] = dims.dims[perm[k]];
    const auto new_stride = strides_of(new_dims);
    const int d = dims.total();
    std::vector<int> map(d);
    for (int r = 0; r < d; ++r) {
        const auto dg = digits_of(r, dims.dims);
        int idx = 0;
        for (int k = 0; k < n; ++k) idx += dg[perm[k]] * new_stride[k];
        map[r] = idx;
    }
    return map;
}

}  // namespace

ComplexMatrix permutation_unitary(const SubsystemDims& dims, const std::vector<int>& perm) {
    const auto map = permuted_indices(dims, perm);
    const int d = dims.total();
    ComplexMatrix w = ComplexMatrix::Zero(d, d);
    for (int r = 0; r < d; ++r) w(map[r], r) = 1.0;
    return w;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemDims& dims, const std::vector<int>& perm) {
    if (m.rows() != m.cols()) throw InputError("permute_subsystems: matrix must be square");
    dims.validate(static_cast<int>(m.rows()));
    const auto map = permuted_indices(dims, perm);
    const int d = static_cast<int>(m.rows());
    ComplexMatrix out(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

HermitianOperator permute_subsystems(const HermitianOperator& m, const SubsystemDims& dims,
                                     const std::vector<int>& perm) {
    return HermitianOperator::hermitize(permute_subsystems(m.mat(), dims, perm));
}

std::vector<HermitianOperator> hermitian_basis(int d) {
    std::vector<HermitianOperator> basis;
    basis.reserve(static_cast<std::size_t>(d) * d);
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < d; ++k) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(k, k) = 1.0;
        basis.push_back(HermitianOperator::hermitize(e));
    }
    for (int k = 0; k < d; ++k)
        for (int l = k + 1; l < d; ++l) {
            ComplexMatrix s = ComplexMatrix::Zero(d, d);
            s(k, l) = r;
            s(l, k) = r;
            basis.push_back(HermitianOperator::hermitize(s));
            ComplexMatrix a = ComplexMatrix::Zero(d, d);
            a(k, l) = cplx(0.0, -r);
            a(l, k) = cplx(0.0, r);
            basis.push_back(HermitianOperator::hermitize(a));
        }
    return basis;
}

ComplexMatrix psd_sqrt(const HermitianOperator& h) {
    const auto e = hermitian_eig(h);
    RealVector s = e.values.cwiseMax(0.0).cwiseSqrt();
    return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

ComplexMatrix matrix_exp_hermitian(const HermitianOperator& h, cplx factor) {
    const auto e = hermitian_eig(h);
    ComplexVector x(h.dim());
    for (int i = 0; i < h.dim(); ++i) x(i) = std::exp(factor * e.values(i));
    return e.vectors * x.asDiagonal() * e.vectors.adjoint();
}

}  // namespace doeblin
