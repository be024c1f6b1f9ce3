#include "doeblin/doeblin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace doeblin {

const char* to_string(ConeKind c) {
    switch (c) {
        case ConeKind::POS: return "pos";
        case ConeKind::PPT: return "ppt";
        case ConeKind::PPT_SYM2: return "ppt_sym2";
    }
    return "unknown";
}

namespace {

constexpr double kWitnessTol = 1e-7;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

HermitianOperator eye_kron(int d, const HermitianOperator& h) {
    return HermitianOperator::hermitize(kron(ComplexMatrix::Identity(d, d), h.mat()));
}

HermitianOperator kron_eye(const HermitianOperator& h, int d) {
    return HermitianOperator::hermitize(kron(h.mat(), ComplexMatrix::Identity(d, d)));
}

HermitianOperator combine(const std::vector<HermitianOperator>& basis, const RealVector& y, int offset) {
    ComplexMatrix x = ComplexMatrix::Zero(basis.front().dim(), basis.front().dim());
    for (std::size_t k = 0; k < basis.size(); ++k) x += y(offset + static_cast<int>(k)) * basis[k].mat();
    return HermitianOperator::hermitize(x);
}

void fill_from_solution(CoefficientReport& r, const SdpSolution& sol) {
    r.value = sol.value;
    r.gap = sol.gap;
    r.status = sol.status;
    r.iterations = sol.iterations;
}

void attach_analytic(CoefficientReport& r, std::optional<double> analytic) {
    if (!analytic) return;
    r.analytic_value = analytic;
    r.analytic_agreement = std::abs(r.value - *analytic);
}

// Adds Tr_A[Y] = I_B rows for a block on A (x) B (times an optional trailing identity factor).
void add_marginal_rows(SdpProblem& p, int block, int d_a, int /*d_b*/, int trailing, double sign,
                       std::vector<LinearConstraint>& rows, const std::vector<HermitianOperator>& basis_b) {
    for (std::size_t k = 0; k < basis_b.size(); ++k) {
        HermitianOperator a = eye_kron(d_a, basis_b[k]);
        if (trailing > 1) a = kron_eye(a, trailing);
        if (rows.size() <= k) rows.push_back(LinearConstraint{{}, basis_b[k].trace()});
        rows[k].terms.push_back({block, sign * a});
    }
    (void)p;
}

}  // namespace

CoefficientReport alpha(const Channel& ch, const SdpOptions& opts) {
    const int da = ch.d_in(), db = ch.d_out();
    const auto basis = hermitian_basis(db);
    SdpProblem p;
    const int y = p.add_block("Y", da * db);
    p.set_objective(y, ch.choi());
    std::vector<LinearConstraint> rows;
    add_marginal_rows(p, y, da, db, 1, 1.0, rows, basis);
    for (auto& r : rows) p.add_constraint(std::move(r));
    p.set_warm_start({(1.0 / da) * HermitianOperator::identity(da * db)});
    const SdpSolution sol = solve(p, opts);

    CoefficientReport r;
    r.name = "alpha";
    fill_from_solution(r, sol);
    r.dual_witness = {sol.primal[y]};
    const HermitianOperator x = combine(basis, sol.y, 0);
    r.primal_witness = x;
    const double feas = (ch.choi() - eye_kron(da, x)).min_eigenvalue();
    r.witness_verified = feas >= -kWitnessTol && std::abs(x.trace() - sol.value) <= kWitnessTol * (1.0 + std::abs(sol.value));
    attach_analytic(r, alpha_analytic(ch));
    return r;
}

namespace {

// Both slacks J +- I(x)X sum to 2J, so their ranges sit inside range(J). When J is
// singular we solve on that face: blocks live on range(J) and X must annihilate
// ker(J) through I(x)X. Without this the dual has no interior and the solver stalls.
struct WangFace {
    ComplexMatrix range;                  // isometry onto range(J)
    std::vector<HermitianOperator> xs;    // basis of admissible X
};

WangFace wang_face(const Channel& ch) {
    const int da = ch.d_in(), db = ch.d_out(), d = da * db;
    const auto basis = hermitian_basis(db);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ch.choi().mat());
    const RealVector& ev = es.eigenvalues();
    const double cut = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<int> keep, drop;
    for (int i = 0; i < d; ++i) (ev(i) > cut ? keep : drop).push_back(i);
    WangFace f{ComplexMatrix::Identity(d, d), basis};
    if (drop.empty()) return f;
    f.range.resize(d, 0);
    f.xs.clear();
    ComplexMatrix range(d, static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) range.col(static_cast<int>(i)) = es.eigenvectors().col(keep[i]);
    ComplexMatrix ker(d, static_cast<int>(drop.size()));
    for (std::size_t i = 0; i < drop.size(); ++i) ker.col(static_cast<int>(i)) = es.eigenvectors().col(drop[i]);

    const int rows = d * static_cast<int>(drop.size());
    Eigen::MatrixXd lin(2 * rows, static_cast<int>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const ComplexMatrix img = eye_kron(da, basis[k]).mat() * ker;
        const Eigen::Map<const ComplexVector> v(img.data(), rows);
        lin.col(static_cast<int>(k)) << v.real(), v.imag();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lin, Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    const double scut = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::vector<HermitianOperator> xs;
    for (int j = 0; j < static_cast<int>(basis.size()); ++j) {
        if (j < sv.size() && sv(j) > scut) continue;
        xs.push_back(combine(basis, svd.matrixV().col(j), 0));
    }
    if (xs.empty()) return f;  // only X = 0
    f.range = std::move(range);
    f.xs = std::move(xs);
    return f;
}

}  // namespace

CoefficientReport alpha_wang(const Channel& ch, const SdpOptions& opts) {
    const int da = ch.d_in();
    const WangFace face = wang_face(ch);
    if (face.xs.empty()) {
        CoefficientReport rep;
        rep.name = "alpha_wang";
        rep.value = 0.0;
        rep.status = SolveStatus::Optimal;
        rep.primal_witness = HermitianOperator::zero(ch.d_out());
        rep.witness_verified = true;
        return rep;
    }
    const ComplexMatrix& v = face.range;
    const HermitianOperator jr = HermitianOperator::hermitize(v.adjoint() * ch.choi().mat() * v);
    const int r = jr.dim();

    SdpProblem p;
    const int y1 = p.add_block("Y1", r);
    const int y2 = p.add_block("Y2", r);
    p.set_objective(y1, jr);
    p.set_objective(y2, jr);
    for (const auto& g : face.xs) {
        const HermitianOperator a = HermitianOperator::hermitize(v.adjoint() * eye_kron(da, g).mat() * v);
        p.add_constraint(LinearConstraint{{{y2, a}, {y1, -a}}, g.trace()});
    }
    const double eps = 0.1;
    const HermitianOperator base = (1.0 / da) * HermitianOperator::identity(r);
    p.set_warm_start({eps * base, (1.0 + eps) * base});
    const SdpSolution sol = solve(p, opts);

    CoefficientReport rep;
    rep.name = "alpha_wang";
    fill_from_solution(rep, sol);
    rep.dual_witness = {HermitianOperator::hermitize(v * sol.primal[y1].mat() * v.adjoint()),
                        HermitianOperator::hermitize(v * sol.primal[y2].mat() * v.adjoint())};
    const HermitianOperator x = combine(face.xs, sol.y, 0);
    rep.primal_witness = x;
    const HermitianOperator ix = eye_kron(da, x);
    const double upper = (ch.choi() - ix).min_eigenvalue();
    const double lower = (ch.choi() + ix).min_eigenvalue();
    rep.witness_verified = std::min(upper, lower) >= -kWitnessTol &&
                           std::abs(x.trace() - sol.value) <= kWitnessTol * (1.0 + std::abs(sol.value));
    return rep;
}

CoefficientReport alpha_plus(const Channel& ch, const SdpOptions& opts) {
    const int da = ch.d_in(), db = ch.d_out();
    const auto basis = hermitian_basis(db);
    SdpProblem p;
    const int y = p.add_block("Y", da * db);
    const int z = p.add_block("slack", db);
    p.set_objective(y, ch.choi());
    for (const auto& h : basis)
        p.add_constraint(LinearConstraint{{{y, eye_kron(da, h)}, {z, -h}}, h.trace()});
    p.set_warm_start({(2.0 / da) * HermitianOperator::identity(da * db), HermitianOperator::identity(db)});
    const SdpSolution sol = solve(p, opts);

    CoefficientReport r;
    r.name = "alpha_plus";
    fill_from_solution(r, sol);
    r.dual_witness = {sol.primal[y]};
    const HermitianOperator x = combine(basis, sol.y, 0);
    r.primal_witness = x;
    const double feas = std::min((ch.choi() - eye_kron(da, x)).min_eigenvalue(), x.min_eigenvalue());
    r.witness_verified = feas >= -kWitnessTol && std::abs(x.trace() - sol.value) <= kWitnessTol * (1.0 + std::abs(sol.value));
    return r;
}

CoefficientReport alpha_cone(const Channel& ch, ConeKind cone, const SdpOptions& opts) {
    if (cone == ConeKind::POS) {
        CoefficientReport r = alpha(ch, opts);
        r.name = "alpha_pos";
        return r;
    }
    const int da = ch.d_in(), db = ch.d_out();
    const auto basis_b = hermitian_basis(db);
    const auto basis_ab = hermitian_basis(da * db);
    const SubsystemDims ab{da, db};

    if (cone == ConeKind::PPT) {
        SdpProblem p;
        const int y = p.add_block("Y", da * db);
        const int z = p.add_block("Y_TB", da * db);
        p.set_objective(y, ch.choi());
        std::vector<LinearConstraint> rows;
        add_marginal_rows(p, y, da, db, 1, 1.0, rows, basis_b);
        for (auto& r : rows) p.add_constraint(std::move(r));
        for (const auto& h : basis_ab)
            p.add_constraint(LinearConstraint{{{z, h}, {y, -partial_transpose(h, ab, 1)}}, 0.0});
        const HermitianOperator base = (1.0 / da) * HermitianOperator::identity(da * db);
        p.set_warm_start({base, base});
        const SdpSolution sol = solve(p, opts);
        CoefficientReport r;
        r.name = "alpha_ppt";
        fill_from_solution(r, sol);
        r.dual_witness = {sol.primal[y]};
        const HermitianOperator x = combine(basis_b, sol.y, 0);
        r.primal_witness = x;
        r.witness_verified = std::abs(x.trace() - sol.value) <= kWitnessTol * (1.0 + std::abs(sol.value));
        return r;
    }

    // PPT intersected with two-copy symmetric extendibility.
    const int dext = da * db * db;
    if (dext > 64) throw InputError("alpha_cone: PPT_SYM2 requires d_in * d_out^2 <= 64");
    const SubsystemDims abb{da, db, db};
    SdpProblem p;
    const int ext = p.add_block("P", dext);
    const int z = p.add_block("Y_TB", da * db);
    p.set_objective(ext, kron_eye(ch.choi(), db));
    std::vector<LinearConstraint> rows;
    add_marginal_rows(p, ext, da, db, db, 1.0, rows, basis_b);
    for (auto& r : rows) p.add_constraint(std::move(r));
    for (const auto& h : hermitian_basis(dext)) {
        const HermitianOperator swapped = permute_subsystems(h, abb, {0, 2, 1});
        const HermitianOperator diff = h - swapped;
        if (diff.mat().cwiseAbs().maxCoeff() < 1e-14) continue;
        p.add_constraint(ext, diff, 0.0);
    }
    for (const auto& h : basis_ab)
        p.add_constraint(LinearConstraint{{{z, h}, {ext, -kron_eye(partial_transpose(h, ab, 1), db)}}, 0.0});
    p.remove_redundant_constraints();
    p.set_warm_start({(1.0 / (da * db)) * HermitianOperator::identity(dext),
                      (1.0 / da) * HermitianOperator::identity(da * db)});
    const SdpSolution sol = solve(p, opts);
    CoefficientReport r;
    r.name = "alpha_ppt_sym2";
    fill_from_solution(r, sol);
    r.dual_witness = {partial_trace(sol.primal[ext], abb, {0, 1}), sol.primal[ext]};
    const HermitianOperator x = combine(basis_b, sol.y, 0);
    r.primal_witness = x;
    r.witness_verified = std::abs(x.trace() - sol.value) <= kWitnessTol * (1.0 + std::abs(sol.value));
    return r;
}

CoefficientReport reverse_doeblin(const Channel& ch, const SdpOptions& opts) {
    if (ch.d_in() != ch.d_out()) throw InputError("reverse_doeblin: channel must map a system to itself");
    const int d = ch.d_in();
    const SubsystemDims abc{d, d, d};
    const SubsystemDims bc{d, d};
    const HermitianOperator gid = identity_channel(d).choi();
    const ComplexMatrix left = kron(ch.choi().mat(), ComplexMatrix::Identity(d, d));
    // Choi of the composition with a degrading map whose Choi (on B (x) C) is g.
    auto link = [&](const HermitianOperator& g) {
        const ComplexMatrix right = kron(ComplexMatrix::Identity(d, d), partial_transpose(g.mat(), bc, 0));
        return HermitianOperator::hermitize(partial_trace(ComplexMatrix(left * right), abc, {0, 2}));
    };
    const auto basis_bc = hermitian_basis(d * d);
    std::vector<HermitianOperator> images;
    images.reserve(basis_bc.size());
    for (const auto& g : basis_bc) images.push_back(link(g));

    SdpProblem p;
    const int ga = p.add_block("degrading_choi", d * d);
    const int zb = p.add_block("Z", d, Cone::FREE);
    p.set_objective(zb, HermitianOperator::identity(d));
    for (const auto& h : hermitian_basis(d)) p.add_constraint(ga, kron_eye(h, d), h.trace());
    for (const auto& e : hermitian_basis(d * d)) {
        ComplexMatrix adj = ComplexMatrix::Zero(d * d, d * d);
        for (std::size_t l = 0; l < basis_bc.size(); ++l) adj += inner(e, images[l]) * basis_bc[l].mat();
        const double overlap = inner(e, gid);
        const HermitianOperator zcoef =
            overlap * HermitianOperator::identity(d) - partial_trace(e, SubsystemDims{d, d}, {1});
        p.add_constraint(LinearConstraint{{{ga, HermitianOperator::hermitize(adj)}, {zb, zcoef}}, overlap});
    }
    p.remove_redundant_constraints();
    p.set_warm_start({(1.0 / d) * HermitianOperator::identity(d * d), (1.0 / d) * HermitianOperator::identity(d)});
    const SdpSolution sol = solve(p, opts);
    CoefficientReport r;
    r.name = "reverse";
    fill_from_solution(r, sol);
    r.dual_witness = {sol.primal[ga], sol.primal[zb]};
    // Degrading map must be CPTP and reproduce the target within tolerance.
    const HermitianOperator target =
        (1.0 - sol.primal[zb].trace()) * gid + eye_kron(d, sol.primal[zb]);
    const double mismatch = (link(sol.primal[ga]) - target).mat().cwiseAbs().maxCoeff();
    r.witness_verified = sol.primal[ga].min_eigenvalue() >= -kWitnessTol && mismatch <= 1e-6;
    if (std::holds_alternative<family::Gad>(ch.family())) attach_analytic(r, 1.0 - std::get<family::Gad>(ch.family()).eta);
    return r;
}

RealVector3 signed_singular_values(const RealMatrix3& T) {
    Eigen::JacobiSVD<RealMatrix3> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector3 s = svd.singularValues();
    const double du = svd.matrixU().determinant();
    const double dv = svd.matrixV().determinant();
    if (du * dv < 0.0) s(2) = -s(2);
    return s;
}

double qubit_alpha_normal_form(const RealMatrix3& T) {
    const RealVector3 t = signed_singular_values(T);
    static const double verts[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    double best = 1e300;
    for (const auto& v : verts) best = std::min(best, t(0) * v[0] + t(1) * v[1] + t(2) * v[2]);
    return 1.0 + best;
}

double operator_norm(const RealMatrix3& T) {
    return Eigen::JacobiSVD<RealMatrix3>(T).singularValues()(0);
}

double min_singular_value(const RealMatrix3& T) {
    return Eigen::JacobiSVD<RealMatrix3>(T).singularValues()(2);
}

namespace {

double cq_alpha(const std::vector<HermitianOperator>& states) {
    // sup Tr X subject to X <= rho_i for every i, solved through its dual.
    const int d = states.front().dim();
    SdpProblem p;
    std::vector<int> blocks;
    for (std::size_t i = 0; i < states.size(); ++i) {
        blocks.push_back(p.add_block("Y" + std::to_string(i), d));
        p.set_objective(blocks.back(), states[i]);
    }
    for (const auto& h : hermitian_basis(d)) {
        LinearConstraint c{{}, h.trace()};
        for (int b : blocks) c.terms.push_back({b, h});
        p.add_constraint(std::move(c));
    }
    std::vector<HermitianOperator> warm(states.size(), (1.0 / states.size()) * HermitianOperator::identity(d));
    p.set_warm_start(warm);
    return solve(p).value;
}

}  // namespace

std::optional<double> alpha_analytic(const Channel& ch) {
    return std::visit(
        overloaded{
            [](const family::Generic&) -> std::optional<double> { return std::nullopt; },
            [](const family::Gad& g) -> std::optional<double> {
                const double c = 1.0 - std::sqrt(g.eta);
                return c * c;
            },
            [](const family::Cq& c) -> std::optional<double> { return cq_alpha(c.states); },
            [](const family::Measurement& m) -> std::optional<double> {
                double s = 0.0;
                for (const auto& e : m.povm) s += e.min_eigenvalue();
                return s;
            },
            [](const family::Dephasing&) -> std::optional<double> { return 0.0; },
            [](const family::Depolarizing& dp) -> std::optional<double> {
                const double d2 = static_cast<double>(dp.dim) * dp.dim;
                return std::min(dp.q, dp.q - (dp.q - 1.0) * d2);
            },
            [](const family::Replacer&) -> std::optional<double> { return 1.0; },
            [](const family::Stokes& s) -> std::optional<double> { return qubit_alpha_normal_form(s.T); },
            [](const family::Classical& c) -> std::optional<double> {
                return c.W.colwise().minCoeff().sum();
            },
        },
        ch.family());
}

ContractionBoundReport contraction_bounds(const Channel& ch, const SdpOptions& opts) {
    ContractionBoundReport r;
    r.tr_upper_from_alpha = std::clamp(1.0 - alpha(ch, opts).value, 0.0, 1.0);
    r.cone_used = ch.d_in() * ch.d_out() * ch.d_out() <= 64 ? ConeKind::PPT_SYM2 : ConeKind::PPT;
    r.tr_upper_from_cone = std::clamp(1.0 - alpha_cone(ch, r.cone_used, opts).value, 0.0, 1.0);
    r.hs_upper_from_alpha_plus = std::clamp(1.0 - alpha_plus(ch, opts).value, 0.0, 1.0);
    if (ch.d_in() == ch.d_out()) r.expansion_lower = std::clamp(1.0 - reverse_doeblin(ch, opts).value, 0.0, 1.0);
    if (ch.d_in() == 2 && ch.d_out() == 2) {
        const StokesForm s = stokes_of_qubit(ch);
        r.qubit_exact = QubitExact{operator_norm(s.T), min_singular_value(s.T)};
        if (r.tr_upper_from_cone < r.qubit_exact->eta_tr - 1e-6) {
            std::ostringstream os;
            os << "contraction_bounds: cone bound " << r.tr_upper_from_cone << " below exact contraction "
               << r.qubit_exact->eta_tr;
            throw NumericalError(os.str());
        }
    }
    return r;
}

TensorContractionBound qubit_tensor_contraction_bound(const Channel& ch, int n, const SdpOptions& opts) {
    if (ch.d_in() != 2 || ch.d_out() != 2) throw InputError("qubit_tensor_contraction_bound: qubit channel required");
    if (n < 1) throw InputError("qubit_tensor_contraction_bound: n must be >= 1");
    const double tn = operator_norm(stokes_of_qubit(ch).T);
    const double aw = std::clamp(alpha_wang(ch, opts).value, 0.0, 1.0);
    return {std::min(1.0, 4.0 * n * tn), 1.0 - std::pow(aw, n)};
}

Channel tensor_power(const Channel& ch, int n) {
    if (n < 1) throw InputError("tensor_power: n must be >= 1");
    if (std::pow(static_cast<double>(ch.d_in() * ch.d_out()), n) > 64.0 + 1e-9)
        throw InputError("tensor_power: total Choi dimension exceeds 64");
    Channel out = ch;
    for (int k = 1; k < n; ++k) out = tensor(out, ch);
    return out;
}

}  // namespace doeblin
