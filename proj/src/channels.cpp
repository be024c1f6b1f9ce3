#include "doeblin/channels.hpp"

#include <cmath>
#include <sstream>

namespace doeblin {

namespace {

QuantumState checked_state(const HermitianOperator& rho, const char* what) {
    try {
        return QuantumState(rho);
    } catch (const InputError& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

QuantumState::QuantumState(const HermitianOperator& rho, double tol) : rho_(rho) {
    if (std::abs(rho.trace() - 1.0) > tol) {
        std::ostringstream os;
        os << "QuantumState: trace " << rho.trace() << " != 1";
        throw InputError(os.str());
    }
    const double mn = rho.min_eigenvalue();
    if (mn < -tol) {
        std::ostringstream os;
        os << "QuantumState: negative eigenvalue " << mn;
        throw InputError(os.str());
    }
}

QuantumState QuantumState::pure(const ComplexVector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw InputError("QuantumState::pure: zero vector");
    const ComplexVector v = psi / n;
    return QuantumState(HermitianOperator::hermitize(v * v.adjoint()));
}

QuantumState QuantumState::maximally_mixed(int dim) {
    return QuantumState((1.0 / dim) * HermitianOperator::identity(dim));
}

QuantumState QuantumState::basis(int dim, int k) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return pure(v);
}

Channel Channel::from_choi(int d_in, int d_out, const HermitianOperator& choi, Family family) {
    if (d_in < 1 || d_out < 1) throw InputError("Channel: dimensions must be >= 1");
    if (choi.dim() != d_in * d_out) throw InputError("Channel: Choi dimension does not match d_in * d_out");
    const double mn = choi.min_eigenvalue();
    if (mn < -kChannelTol) {
        std::ostringstream os;
        os << "Channel: not completely positive (Choi min eigenvalue " << mn << ")";
        throw InputError(os.str());
    }
    const ComplexMatrix ta = partial_trace(choi.mat(), SubsystemDims{d_in, d_out}, {0});
    const double tp = (ta - ComplexMatrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
    if (tp > kChannelTol) {
        std::ostringstream os;
        os << "Channel: not trace preserving (max |Tr_B Gamma - I| = " << tp << ")";
        throw InputError(os.str());
    }
    return Channel(d_in, d_out, choi, std::move(family));
}

bool Channel::is_unital(double tol) const {
    const ComplexMatrix tb = partial_trace(choi_.mat(), dims(), {1});
    return (tb - ComplexMatrix::Identity(d_out_, d_out_)).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix choi_of_map(int d_in, int d_out, const std::function<ComplexMatrix(const ComplexMatrix&)>& map) {
    ComplexMatrix g = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
    for (int i = 0; i < d_in; ++i)
        for (int j = 0; j < d_in; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(d_in, d_in);
            e(i, j) = 1.0;
            const ComplexMatrix out = map(e);
            if (out.rows() != d_out || out.cols() != d_out) throw InputError("choi_of_map: output has wrong dimension");
            g.block(i * d_out, j * d_out, d_out, d_out) = out;
        }
    return g;
}

Channel channel_from_kraus(const std::vector<ComplexMatrix>& kraus, int d_in, int d_out) {
    if (kraus.empty()) throw InputError("channel_from_kraus: empty Kraus list");
    ComplexMatrix completeness = ComplexMatrix::Zero(d_in, d_in);
    for (const auto& k : kraus) {
        if (k.rows() != d_out || k.cols() != d_in) throw InputError("channel_from_kraus: Kraus operator has wrong shape");
        completeness += k.adjoint() * k;
    }
    const double dev = HermitianOperator::hermitize(completeness - ComplexMatrix::Identity(d_in, d_in)).norm_inf();
    if (dev > kChannelTol) {
        std::ostringstream os;
        os << "channel_from_kraus: ||sum K^dagger K - I||_inf = " << dev;
        throw InputError(os.str());
    }
    const auto g = choi_of_map(d_in, d_out, [&](const ComplexMatrix& e) {
        ComplexMatrix out = ComplexMatrix::Zero(d_out, d_out);
        for (const auto& k : kraus) out += k * e * k.adjoint();
        return out;
    });
    return Channel::from_choi(d_in, d_out, HermitianOperator::hermitize(g));
}

std::vector<ComplexMatrix> gad_kraus(double p, double eta) {
    const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
    const double se = std::sqrt(eta), sd = std::sqrt(1.0 - eta);
    ComplexMatrix k1(2, 2), k2(2, 2), k3(2, 2), k4(2, 2);
    k1 << sp, 0.0, 0.0, sp * se;
    k2 << 0.0, sp * sd, 0.0, 0.0;
    k3 << sq * se, 0.0, 0.0, sq;
    k4 << 0.0, 0.0, sq * sd, 0.0;
    return {k1, k2, k3, k4};
}

const std::array<ComplexMatrix, 4>& pauli() {
    static const std::array<ComplexMatrix, 4> s = [] {
        std::array<ComplexMatrix, 4> p;
        for (auto& m : p) m = ComplexMatrix::Zero(2, 2);
        p[0] << 1.0, 0.0, 0.0, 1.0;
        p[1] << 0.0, 1.0, 1.0, 0.0;
        p[2] << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
        p[3] << 1.0, 0.0, 0.0, -1.0;
        return p;
    }();
    return s;
}

namespace {

void check_unit_interval(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw InputError(std::string(name) + " must lie in [0, 1]");
}

ComplexMatrix stokes_choi(const family::Stokes& s) {
    const auto& sig = pauli();
    // Images of the Pauli basis under the affine Bloch map w -> t + T w.
    std::array<ComplexMatrix, 4> img;
    img[0] = sig[0];
    for (int k = 0; k < 3; ++k) img[0] += s.t(k) * sig[k + 1];
    for (int j = 0; j < 3; ++j) {
        img[j + 1] = ComplexMatrix::Zero(2, 2);
        for (int k = 0; k < 3; ++k) img[j + 1] += s.T(k, j) * sig[k + 1];
    }
    return choi_of_map(2, 2, [&](const ComplexMatrix& e) {
        ComplexMatrix out = ComplexMatrix::Zero(2, 2);
        for (int mu = 0; mu < 4; ++mu) out += 0.5 * (sig[mu] * e).trace() * img[mu];
        return out;
    });
}

}  // namespace

Channel make_channel(const Family& spec) {
    return std::visit(
        overloaded{
            [](const family::Generic&) -> Channel {
                throw InputError("make_channel: Generic family carries no parameters");
            },
            [&](const family::Gad& g) {
                check_unit_interval(g.p, "GAD p");
                check_unit_interval(g.eta, "GAD eta");
                const Channel c = channel_from_kraus(gad_kraus(g.p, g.eta), 2, 2);
                return Channel::from_choi(2, 2, c.choi(), spec);
            },
            [&](const family::Cq& c) {
                if (c.states.empty()) throw InputError("cq channel: empty state list");
                const int n = static_cast<int>(c.states.size());
                const int d = c.states.front().dim();
                ComplexMatrix g = ComplexMatrix::Zero(n * d, n * d);
                for (int i = 0; i < n; ++i) {
                    if (c.states[i].dim() != d) throw InputError("cq channel: states have unequal dimensions");
                    checked_state(c.states[i], "cq channel state");
                    g.block(i * d, i * d, d, d) = c.states[i].mat();
                }
                return Channel::from_choi(n, d, HermitianOperator::hermitize(g), spec);
            },
            [&](const family::Measurement& m) {
                if (m.povm.empty()) throw InputError("measurement channel: empty POVM");
                const int d = m.povm.front().dim();
                const int n = static_cast<int>(m.povm.size());
                ComplexMatrix sum = ComplexMatrix::Zero(d, d);
                ComplexMatrix g = ComplexMatrix::Zero(d * n, d * n);
                for (int y = 0; y < n; ++y) {
                    const auto& e = m.povm[y];
                    if (e.dim() != d) throw InputError("measurement channel: POVM elements have unequal dimensions");
                    if (e.min_eigenvalue() < -kChannelTol) throw InputError("measurement channel: POVM element not PSD");
                    sum += e.mat();
                    ComplexMatrix proj = ComplexMatrix::Zero(n, n);
                    proj(y, y) = 1.0;
                    g += kron(e.mat().transpose(), proj);
                }
                if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kChannelTol)
                    throw InputError("measurement channel: POVM does not sum to identity");
                return Channel::from_choi(d, n, HermitianOperator::hermitize(g), spec);
            },
            [&](const family::Dephasing& dp) {
                const int n = static_cast<int>(dp.vectors.size());
                if (n < 1) throw InputError("dephasing channel: empty vector list");
                for (const auto& v : dp.vectors)
                    if (std::abs(v.norm() - 1.0) > kChannelTol) throw InputError("dephasing channel: vectors must be unit");
                ComplexMatrix g = ComplexMatrix::Zero(n * n, n * n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (dp.vectors[i].size() != dp.vectors[j].size())
                            throw InputError("dephasing channel: vectors have unequal dimensions");
                        g(i * n + i, j * n + j) = dp.vectors[j].dot(dp.vectors[i]);  // <psi_j|psi_i>
                    }
                return Channel::from_choi(n, n, HermitianOperator::hermitize(g), spec);
            },
            [&](const family::Depolarizing& dp) {
                const int d = dp.dim;
                if (d < 1) throw InputError("depolarizing channel: dimension must be >= 1");
                const auto g = choi_of_map(d, d, [&](const ComplexMatrix& e) -> ComplexMatrix {
                    return (1.0 - dp.q) * e + dp.q * e.trace() / static_cast<double>(d) * ComplexMatrix::Identity(d, d);
                });
                return Channel::from_choi(d, d, HermitianOperator::hermitize(g), spec);
            },
            [&](const family::Replacer& r) {
                checked_state(r.state, "replacer state");
                const ComplexMatrix g = kron(ComplexMatrix::Identity(r.d_in, r.d_in), r.state.mat());
                return Channel::from_choi(r.d_in, r.state.dim(), HermitianOperator::hermitize(g), spec);
            },
            [&](const family::Stokes& s) {
                const auto g = HermitianOperator::hermitize(stokes_choi(s));
                const double mn = g.min_eigenvalue();
                if (mn < -kChannelTol) {
                    std::ostringstream os;
                    os << "Stokes parameters are not completely positive (Choi min eigenvalue " << mn << ")";
                    throw InputError(os.str());
                }
                return Channel::from_choi(2, 2, g, spec);
            },
            [&](const family::Classical& c) {
                const int nx = static_cast<int>(c.W.rows()), ny = static_cast<int>(c.W.cols());
                if (nx < 1 || ny < 1) throw InputError("classical channel: empty matrix");
                ComplexMatrix g = ComplexMatrix::Zero(nx * ny, nx * ny);
                for (int x = 0; x < nx; ++x) {
                    double row = 0.0;
                    for (int y = 0; y < ny; ++y) {
                        if (c.W(x, y) < 0.0) throw InputError("classical channel: negative probability");
                        row += c.W(x, y);
                        g(x * ny + y, x * ny + y) = c.W(x, y);
                    }
                    if (std::abs(row - 1.0) > kChannelTol) throw InputError("classical channel: rows must sum to 1");
                }
                return Channel::from_choi(nx, ny, HermitianOperator::hermitize(g), spec);
            },
        },
        spec);
}

Channel identity_channel(int d) {
    return channel_from_kraus({ComplexMatrix::Identity(d, d)}, d, d);
}

Channel unitary_channel(const ComplexMatrix& u) {
    return channel_from_kraus({u}, static_cast<int>(u.cols()), static_cast<int>(u.rows()));
}

ComplexMatrix apply_matrix(const Channel& ch, const ComplexMatrix& m) {
    if (m.rows() != ch.d_in() || m.cols() != ch.d_in()) throw InputError("apply: input dimension mismatch");
    const int d = ch.d_out();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    const ComplexMatrix& g = ch.choi().mat();
    for (int i = 0; i < ch.d_in(); ++i)
        for (int j = 0; j < ch.d_in(); ++j)
            if (m(i, j) != cplx(0.0)) out += m(i, j) * g.block(i * d, j * d, d, d);
    return out;
}

HermitianOperator apply(const Channel& ch, const HermitianOperator& h) {
    return HermitianOperator::hermitize(apply_matrix(ch, h.mat()));
}

QuantumState apply(const Channel& ch, const QuantumState& rho) {
    return QuantumState(apply(ch, rho.density()), 1e-9);
}

HermitianOperator apply_adjoint(const Channel& ch, const HermitianOperator& l) {
    if (l.dim() != ch.d_out()) throw InputError("apply_adjoint: dimension mismatch");
    const int d = ch.d_out();
    const ComplexMatrix& g = ch.choi().mat();
    ComplexMatrix out(ch.d_in(), ch.d_in());
    for (int i = 0; i < ch.d_in(); ++i)
        for (int j = 0; j < ch.d_in(); ++j) out(j, i) = (l.mat() * g.block(i * d, j * d, d, d)).trace();
    return HermitianOperator::hermitize(out);
}

Channel compose(const Channel& second, const Channel& first) {
    if (first.d_out() != second.d_in()) throw InputError("compose: dimension mismatch");
    const int a = first.d_in(), b = first.d_out(), c = second.d_out();
    // Link product Tr_B[(G1_AB (x) I_C)(I_A (x) G2_BC^{T_B})].
    const ComplexMatrix left = kron(first.choi().mat(), ComplexMatrix::Identity(c, c));
    const ComplexMatrix g2tb = partial_transpose(second.choi().mat(), SubsystemDims{b, c}, 0);
    const ComplexMatrix right = kron(ComplexMatrix::Identity(a, a), g2tb);
    const ComplexMatrix link = partial_trace(ComplexMatrix(left * right), SubsystemDims{a, b, c}, {0, 2});
    return Channel::from_choi(a, c, HermitianOperator::hermitize(link));
}

Channel tensor(const Channel& x, const Channel& y) {
    const ComplexMatrix g = kron(x.choi().mat(), y.choi().mat());
    const SubsystemDims dims{x.d_in(), x.d_out(), y.d_in(), y.d_out()};
    const ComplexMatrix p = permute_subsystems(g, dims, {0, 2, 1, 3});
    return Channel::from_choi(x.d_in() * y.d_in(), x.d_out() * y.d_out(), HermitianOperator::hermitize(p));
}

Channel convex_mixture(const std::vector<double>& weights, const std::vector<Channel>& channels) {
    if (weights.size() != channels.size() || channels.empty()) throw InputError("convex_mixture: size mismatch");
    ComplexMatrix g = ComplexMatrix::Zero(channels[0].choi().dim(), channels[0].choi().dim());
    double total = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        if (channels[k].d_in() != channels[0].d_in() || channels[k].d_out() != channels[0].d_out())
            throw InputError("convex_mixture: dimension mismatch");
        if (weights[k] < 0.0) throw InputError("convex_mixture: negative weight");
        g += weights[k] * channels[k].choi().mat();
        total += weights[k];
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("convex_mixture: weights must sum to 1");
    return Channel::from_choi(channels[0].d_in(), channels[0].d_out(), HermitianOperator::hermitize(g));
}

StokesForm stokes_of_qubit(const Channel& ch) {
    if (ch.d_in() != 2 || ch.d_out() != 2) throw InputError("stokes_of_qubit: qubit channel required");
    const auto& sig = pauli();
    StokesForm s;
    const ComplexMatrix half = apply_matrix(ch, 0.5 * sig[0]);
    for (int k = 0; k < 3; ++k) {
        s.t(k) = (sig[k + 1] * half).trace().real();
        for (int j = 0; j < 3; ++j) s.T(k, j) = 0.5 * (sig[k + 1] * apply_matrix(ch, sig[j + 1])).trace().real();
    }
    return s;
}

FixedPoint fixed_point(const Channel& ch) {
    if (ch.d_in() != ch.d_out()) throw InputError("fixed_point: channel must map a system to itself");
    const int d = ch.d_in();
    const int d2 = d * d;
    const ComplexMatrix& g = ch.choi().mat();
    // Row (a,b) of the transfer matrix holds <a|N(|i><j|)|b> in column (i,j).
    ComplexMatrix s(d2, d2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) s(a * d + b, i * d + j) = g(i * d + a, j * d + b);

    Eigen::ComplexEigenSolver<ComplexMatrix> es(s, false);
    if (es.info() != Eigen::Success) throw NumericalError("fixed_point: eigensolver did not converge");
    int ones = 0;
    for (int k = 0; k < d2; ++k)
        if (std::abs(es.eigenvalues()(k) - cplx(1.0)) <= 1e-9) ++ones;

    // Minimum-norm solution of (S - I) v = 0 with Tr v = 1.
    ComplexMatrix a = ComplexMatrix::Zero(d2 + 1, d2);
    a.topRows(d2) = s - ComplexMatrix::Identity(d2, d2);
    for (int i = 0; i < d; ++i) a(d2, i * d + i) = 1.0;
    ComplexVector rhs = ComplexVector::Zero(d2 + 1);
    rhs(d2) = 1.0;
    const ComplexVector v = a.completeOrthogonalDecomposition().solve(rhs);
    ComplexMatrix rho(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
    HermitianOperator h = HermitianOperator::hermitize(rho);
    h *= 1.0 / h.trace();
    return {QuantumState(h, 1e-8), ones == 1};
}

}  // namespace doeblin
