#include "doeblin/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace doeblin {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
        case SolveStatus::DualInfeasible: return "DualInfeasible";
        case SolveStatus::NumericalLimit: return "NumericalLimit";
    }
    return "Unknown";
}

int SdpProblem::add_block(std::string name, int dim, Cone cone) {
    if (dim < 1) throw InputError("SdpProblem: block dimension must be >= 1");
    blocks_.push_back({std::move(name), dim, cone});
    objective_.push_back(HermitianOperator::zero(dim));
    return num_blocks() - 1;
}

void SdpProblem::set_objective(int block, const HermitianOperator& c) {
    if (block < 0 || block >= num_blocks() || c.dim() != blocks_[block].dim)
        throw InputError("SdpProblem: objective does not match block");
    objective_[block] = c;
}

void SdpProblem::add_constraint(LinearConstraint con) {
    for (const auto& [k, a] : con.terms)
        if (k < 0 || k >= num_blocks() || a.dim() != blocks_[k].dim)
            throw InputError("SdpProblem: constraint term does not match block");
    constraints_.push_back(std::move(con));
}

void SdpProblem::add_constraint(int block, const HermitianOperator& a, double rhs) {
    add_constraint(LinearConstraint{{{block, a}}, rhs});
}

void SdpProblem::set_warm_start(std::vector<HermitianOperator> x) {
    if (static_cast<int>(x.size()) != num_blocks()) throw InputError("SdpProblem: warm start needs one value per block");
    for (int k = 0; k < num_blocks(); ++k)
        if (x[k].dim() != blocks_[k].dim) throw InputError("SdpProblem: warm start block has wrong dimension");
    warm_ = std::move(x);
}

namespace {

// Real coordinates of a constraint row such that Euclidean products equal Hilbert-Schmidt products.
RealVector row_vector(const SdpProblem& p, const LinearConstraint& con, const std::vector<int>& offset, int total) {
    RealVector v = RealVector::Zero(total);
    const double r2 = std::sqrt(2.0);
    for (const auto& [k, a] : con.terms) {
        const int n = p.block(k).dim;
        int pos = offset[k];
        for (int i = 0; i < n; ++i) v(pos++) += a(i, i).real();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                v(pos++) += r2 * a(i, j).real();
                v(pos++) += r2 * a(i, j).imag();
            }
    }
    return v;
}

// Returns a keep mask. Throws on inconsistent dependent rows when check_rhs is set.
std::vector<bool> independent_rows(const SdpProblem& p, double tol, bool check_rhs) {
    std::vector<int> offset(p.num_blocks());
    int total = 0;
    for (int k = 0; k < p.num_blocks(); ++k) {
        offset[k] = total;
        total += p.block(k).dim * p.block(k).dim;
    }
    std::vector<RealVector> q;
    std::vector<double> qrhs;
    std::vector<bool> keep;
    for (const auto& con : p.constraints()) {
        RealVector v = row_vector(p, con, offset, total);
        double b = con.rhs;
        const double norm0 = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t t = 0; t < q.size(); ++t) {
                const double c = q[t].dot(v);
                v -= c * q[t];
                b -= c * qrhs[t];
            }
        const double nr = v.norm();
        if (nr <= tol * std::max(1.0, norm0)) {
            if (check_rhs && std::abs(b) > 1e-8 * std::max(1.0, std::abs(con.rhs)))
                throw InputError("SdpProblem: dependent constraint with inconsistent right-hand side");
            keep.push_back(false);
        } else {
            q.push_back(v / nr);
            qrhs.push_back(b / nr);
            keep.push_back(true);
        }
    }
    return keep;
}

}  // namespace

int SdpProblem::remove_redundant_constraints(double tol) {
    const auto keep = independent_rows(*this, tol, true);
    std::vector<LinearConstraint> kept;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) kept.push_back(std::move(constraints_[i]));
    const int dropped = num_constraints() - static_cast<int>(kept.size());
    constraints_ = std::move(kept);
    return dropped;
}

void SdpProblem::check_rank(double tol) const {
    const auto keep = independent_rows(*this, tol, false);
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (!keep[i]) {
            std::ostringstream os;
            os << "SdpProblem: constraint " << i << " is linearly dependent on earlier rows";
            throw InputError(os.str());
        }
}

namespace detail {

namespace {

void schur_block(const StandardBlock& blk, const ComplexMatrix& w, Eigen::MatrixXd& m, bool parallel) {
    const int nr = static_cast<int>(blk.rows.size());
    if (nr == 0) return;
    std::vector<ComplexMatrix> waw(nr);
#pragma omp parallel for schedule(static) if (parallel)
    for (int b = 0; b < nr; ++b) waw[b] = w * blk.coeffs[b] * w;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int a = 0; a < nr; ++a)
        for (int b = a; b < nr; ++b) {
            const double v = inner(blk.coeffs[a], waw[b]);
            m(blk.rows[a], blk.rows[b]) += v;
            if (a != b) m(blk.rows[b], blk.rows[a]) += v;
        }
}

}  // namespace

Eigen::MatrixXd schur_serial(const std::vector<StandardBlock>& blocks, const std::vector<ComplexMatrix>& w, int m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < blocks.size(); ++k) schur_block(blocks[k], w[k], out, false);
    return out;
}

Eigen::MatrixXd schur_parallel(const std::vector<StandardBlock>& blocks, const std::vector<ComplexMatrix>& w, int m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < blocks.size(); ++k) schur_block(blocks[k], w[k], out, true);
    return out;
}

}  // namespace detail

namespace {

using detail::StandardBlock;

constexpr double kFreeReg = 1e-12;
constexpr double kStepFraction = 0.98;
constexpr double kDivergence = 1e10;
constexpr double kInfeasRatio = 1e-8;

ComplexMatrix herm(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

struct Standard {
    std::vector<StandardBlock> blocks;
    std::vector<ComplexMatrix> c;
    std::vector<int> source;     // user block index
    std::vector<double> sign;    // +1, or -1 for the negative half of a free block
    RealVector b;
    int m = 0;
    int n_total = 0;
};

Standard to_standard(const SdpProblem& p) {
    Standard s;
    s.m = p.num_constraints();
    s.b.resize(s.m);
    for (int i = 0; i < s.m; ++i) s.b(i) = p.constraints()[i].rhs;
    std::vector<std::vector<int>> internal(p.num_blocks());
    for (int k = 0; k < p.num_blocks(); ++k) {
        const int n = p.block(k).dim;
        const ComplexMatrix& c = p.objective(k).mat();
        if (p.block(k).cone == Cone::PSD) {
            internal[k] = {static_cast<int>(s.blocks.size())};
            s.blocks.push_back({n, {}, {}});
            s.c.push_back(c);
            s.source.push_back(k);
            s.sign.push_back(1.0);
        } else {
            const ComplexMatrix reg = kFreeReg * ComplexMatrix::Identity(n, n);
            internal[k] = {static_cast<int>(s.blocks.size()), static_cast<int>(s.blocks.size()) + 1};
            s.blocks.push_back({n, {}, {}});
            s.c.push_back(c + reg);
            s.source.push_back(k);
            s.sign.push_back(1.0);
            s.blocks.push_back({n, {}, {}});
            s.c.push_back(-c + reg);
            s.source.push_back(k);
            s.sign.push_back(-1.0);
        }
        s.n_total += n * static_cast<int>(internal[k].size());
    }
    for (int i = 0; i < s.m; ++i) {
        // Merge repeated terms on the same block.
        std::vector<std::optional<ComplexMatrix>> acc(p.num_blocks());
        for (const auto& [k, a] : p.constraints()[i].terms) {
            if (acc[k]) *acc[k] += a.mat();
            else acc[k] = a.mat();
        }
        for (int k = 0; k < p.num_blocks(); ++k) {
            if (!acc[k] || acc[k]->cwiseAbs().maxCoeff() == 0.0) continue;
            for (int t : internal[k]) {
                s.blocks[t].rows.push_back(i);
                s.blocks[t].coeffs.push_back(s.sign[t] * *acc[k]);
            }
        }
    }
    return s;
}

using Blocks = std::vector<ComplexMatrix>;

RealVector apply_a(const Standard& s, const Blocks& x) {
    RealVector r = RealVector::Zero(s.m);
    for (std::size_t k = 0; k < s.blocks.size(); ++k)
        for (std::size_t a = 0; a < s.blocks[k].rows.size(); ++a)
            r(s.blocks[k].rows[a]) += inner(s.blocks[k].coeffs[a], x[k]);
    return r;
}

Blocks apply_at(const Standard& s, const RealVector& y) {
    Blocks out(s.blocks.size());
    for (std::size_t k = 0; k < s.blocks.size(); ++k) {
        out[k] = ComplexMatrix::Zero(s.blocks[k].dim, s.blocks[k].dim);
        for (std::size_t a = 0; a < s.blocks[k].rows.size(); ++a)
            out[k] += y(s.blocks[k].rows[a]) * s.blocks[k].coeffs[a];
    }
    return out;
}

double dot(const Blocks& a, const Blocks& b) {
    double v = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) v += inner(a[k], b[k]);
    return v;
}

double fro(const Blocks& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

double max_abs(const Blocks& a) {
    double v = 0.0;
    for (const auto& m : a) v = std::max(v, m.cwiseAbs().maxCoeff());
    return v;
}

// Scaling data for one block: W = R R^*, R^* S R = R^{-1} X R^{-*} = diag(v).
struct Scaling {
    ComplexMatrix r, rinv, w;
    RealVector v;
};

bool nt_scaling(const ComplexMatrix& x, const ComplexMatrix& s, Scaling& out) {
    Eigen::LLT<ComplexMatrix> llt(x);
    if (llt.info() != Eigen::Success) return false;
    const ComplexMatrix l = llt.matrixL();
    const ComplexMatrix lsl = herm(l.adjoint() * s * l);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(lsl);
    if (es.info() != Eigen::Success) return false;
    const RealVector lam = es.eigenvalues();
    if (lam.minCoeff() <= 0.0) return false;
    const ComplexMatrix& q = es.eigenvectors();
    const RealVector q4 = lam.array().pow(-0.25);
    out.r = l * q * q4.asDiagonal();
    const RealVector q4i = lam.array().pow(0.25);
    out.rinv = q4i.asDiagonal() * q.adjoint() * l.triangularView<Eigen::Lower>().solve(
                                                     ComplexMatrix::Identity(x.rows(), x.cols()));
    out.w = herm(out.r * out.r.adjoint());
    out.v = lam.cwiseSqrt();
    return true;
}

// Largest step t <= 1 (times the boundary fraction) such that diag(v) + t*D stays PD.
double step_length(const RealVector& v, const ComplexMatrix& d) {
    const RealVector vis = v.cwiseSqrt().cwiseInverse();
    const ComplexMatrix m = herm(vis.asDiagonal() * d * vis.asDiagonal());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues()(0);
    if (mn >= 0.0) return 1.0;
    return std::min(1.0, kStepFraction * (-1.0 / mn));
}

struct Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool use_llt = true;
    RealVector solve(const RealVector& r) const { return use_llt ? RealVector(llt.solve(r)) : RealVector(ldlt.solve(r)); }
};

bool factorize(Eigen::MatrixXd m, Factor& f) {
    f.llt.compute(m);
    if (f.llt.info() == Eigen::Success) {
        f.use_llt = true;
        return true;
    }
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    m.diagonal().array() += 1e-14 * scale;
    f.llt.compute(m);
    if (f.llt.info() == Eigen::Success) {
        f.use_llt = true;
        return true;
    }
    f.ldlt.compute(m);
    f.use_llt = false;
    return f.ldlt.info() == Eigen::Success;
}

struct Direction {
    Blocks dx, ds;
    RealVector dy;
};

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
    problem.check_rank();
    const Standard s = to_standard(problem);
    const int nb = static_cast<int>(s.blocks.size());
    const int m = s.m;

    double cnorm = 0.0, anorm_max = 0.0;
    for (int k = 0; k < nb; ++k) {
        cnorm += s.c[k].squaredNorm();
        for (const auto& a : s.blocks[k].coeffs) anorm_max = std::max(anorm_max, a.norm());
    }
    cnorm = std::sqrt(cnorm);
    const double bnorm = s.b.norm();

    // Initial point.
    Blocks x(nb), sv(nb);
    RealVector y = RealVector::Zero(m);
    for (int k = 0; k < nb; ++k) {
        const int n = s.blocks[k].dim;
        double bmax = 0.0;
        for (std::size_t a = 0; a < s.blocks[k].rows.size(); ++a)
            bmax = std::max(bmax, (1.0 + std::abs(s.b(s.blocks[k].rows[a]))) / (1.0 + s.blocks[k].coeffs[a].norm()));
        const double xi = std::max({10.0, std::sqrt(static_cast<double>(n)), n * bmax});
        double amax = s.c[k].norm();
        for (const auto& a : s.blocks[k].coeffs) amax = std::max(amax, a.norm());
        const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), 1.0 + amax});
        x[k] = xi * ComplexMatrix::Identity(n, n);
        sv[k] = eta * ComplexMatrix::Identity(n, n);
    }
    if (problem.warm_start()) {
        const auto& ws = *problem.warm_start();
        for (int k = 0; k < nb; ++k) {
            const int n = s.blocks[k].dim;
            ComplexMatrix w0 = s.sign[k] * ws[s.source[k]].mat();
            if (problem.block(s.source[k]).cone == Cone::FREE) {
                // Split the warm value into positive and negative parts plus a shared shift.
                Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm(w0));
                const RealVector pos = es.eigenvalues().cwiseMax(0.0);
                w0 = es.eigenvectors() * pos.asDiagonal() * es.eigenvectors().adjoint() +
                     ComplexMatrix::Identity(n, n);
            }
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm(w0), Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) > 1e-8) x[k] = herm(w0);
        }
        // Balance the dual start against the warm primal point.
        double tx = 0.0;
        for (int k = 0; k < nb; ++k) tx += x[k].trace().real();
        const double mu_target = std::max(1.0, cnorm) * std::max(1.0, tx) / s.n_total;
        for (int k = 0; k < nb; ++k) {
            const int n = s.blocks[k].dim;
            const double eta = std::max(1.0 + s.c[k].norm(), mu_target * n / std::max(1e-12, x[k].trace().real()));
            sv[k] = eta * ComplexMatrix::Identity(n, n);
        }
    }

    SdpSolution sol;
    std::vector<Scaling> sc(nb);
    Blocks best_x = x, best_s = sv;
    RealVector best_y = y;
    double best_merit = std::numeric_limits<double>::infinity();
    int stall = 0;

    auto objective = [&](const Blocks& xx) {
        double v = 0.0;
        for (int k = 0; k < nb; ++k) {
            const int n = s.blocks[k].dim;
            ComplexMatrix c = s.c[k];
            if (problem.block(s.source[k]).cone == Cone::FREE) c -= kFreeReg * ComplexMatrix::Identity(n, n);
            v += inner(c, xx[k]);
        }
        return v;
    };

    auto finish = [&](SolveStatus st, const Blocks& xx, const Blocks& ss, const RealVector& yy, int iters) {
        sol.status = st;
        sol.iterations = iters;
        sol.y = yy;
        sol.value = objective(xx);
        sol.dual_value = s.b.dot(yy);
        sol.gap = std::abs(sol.value - sol.dual_value) / (1.0 + std::abs(sol.value) + std::abs(sol.dual_value));
        const RealVector rp = s.b - apply_a(s, xx);
        const Blocks aty = apply_at(s, yy);
        Blocks rd(nb);
        for (int k = 0; k < nb; ++k) rd[k] = s.c[k] - aty[k] - ss[k];
        sol.primal_residual = rp.norm() / (1.0 + bnorm);
        sol.dual_residual = fro(rd) / (1.0 + cnorm);
        sol.primal.clear();
        sol.slack.clear();
        for (int k = 0; k < problem.num_blocks(); ++k) {
            const int n = problem.block(k).dim;
            sol.primal.push_back(HermitianOperator::zero(n));
        }
        for (int k = 0; k < nb; ++k) {
            ComplexMatrix acc = sol.primal[s.source[k]].mat() + s.sign[k] * xx[k];
            sol.primal[s.source[k]] = HermitianOperator::hermitize(acc);
        }
        for (int k = 0; k < problem.num_blocks(); ++k) {
            ComplexMatrix slack = problem.objective(k).mat();
            for (int i = 0; i < m; ++i)
                for (const auto& [blk, a] : problem.constraints()[i].terms)
                    if (blk == k) slack -= yy(i) * a.mat();
            sol.slack.push_back(HermitianOperator::hermitize(slack));
        }
        return sol;
    };

    for (int iter = 0; iter <= options.max_iter; ++iter) {
        const RealVector rp = s.b - apply_a(s, x);
        const Blocks aty = apply_at(s, y);
        Blocks rd(nb);
        for (int k = 0; k < nb; ++k) rd[k] = s.c[k] - aty[k] - sv[k];
        const double pobj = objective(x);
        const double dobj = s.b.dot(y);
        const double mu = dot(x, sv) / s.n_total;
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double pinf = rp.norm() / (1.0 + bnorm);
        const double dinf = fro(rd) / (1.0 + cnorm);

        if (options.trace) {
            *options.trace << "{\"iter\":" << iter << ",\"pobj\":" << pobj << ",\"dobj\":" << dobj
                           << ",\"mu\":" << mu << ",\"pinf\":" << pinf << ",\"dinf\":" << dinf << "}\n";
        }

        const double merit = std::max({relgap, pinf, dinf});
        if (merit < best_merit) {
            best_merit = merit;
            best_x = x;
            best_s = sv;
            best_y = y;
        }
        if (relgap <= options.tol_gap && pinf <= options.tol_feas && dinf <= options.tol_feas)
            return finish(SolveStatus::Optimal, x, sv, y, iter);

        // Infeasibility certificates, consulted once the iterates have grown large.
        const double size = std::max({max_abs(x), max_abs(sv), y.size() ? y.cwiseAbs().maxCoeff() : 0.0});
        if (size > 1e6) {
            if (dobj > 0.0) {
                Blocks ray(nb);
                for (int k = 0; k < nb; ++k) ray[k] = aty[k] + sv[k];
                if (fro(ray) / dobj < kInfeasRatio) return finish(SolveStatus::PrimalInfeasible, x, sv, y, iter);
            }
            if (pobj < 0.0 && apply_a(s, x).norm() / -pobj < kInfeasRatio)
                return finish(SolveStatus::DualInfeasible, x, sv, y, iter);
        }
        if (size > kDivergence) {
            if (dobj > 0.0 && dobj > std::abs(pobj)) return finish(SolveStatus::PrimalInfeasible, x, sv, y, iter);
            if (pobj < 0.0 && -pobj > std::abs(dobj)) return finish(SolveStatus::DualInfeasible, x, sv, y, iter);
            return finish(SolveStatus::NumericalLimit, best_x, best_s, best_y, iter);
        }
        if (iter == options.max_iter) break;

        bool ok = true;
        for (int k = 0; k < nb && ok; ++k) ok = nt_scaling(x[k], sv[k], sc[k]);
        if (!ok) return finish(SolveStatus::NumericalLimit, best_x, best_s, best_y, iter);

        std::vector<ComplexMatrix> w(nb);
        for (int k = 0; k < nb; ++k) w[k] = sc[k].w;
        const Eigen::MatrixXd schur = options.parallel ? detail::schur_parallel(s.blocks, w, m)
                                                       : detail::schur_serial(s.blocks, w, m);
        Factor fac;
        if (!factorize(schur, fac)) return finish(SolveStatus::NumericalLimit, best_x, best_s, best_y, iter);

        Blocks wrdw(nb);
        for (int k = 0; k < nb; ++k) wrdw[k] = herm(w[k] * rd[k] * w[k]);
        const RealVector a_wrdw = apply_a(s, wrdw);

        // rc_scaled -> direction; rc is expressed in the scaled (diagonal) frame of each block.
        auto direction = [&](const Blocks& rc_scaled) {
            Direction dir;
            Blocks kmat(nb);
            for (int k = 0; k < nb; ++k) {
                const RealVector& v = sc[k].v;
                const int n = s.blocks[k].dim;
                ComplexMatrix dsum(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) dsum(i, j) = 2.0 * rc_scaled[k](i, j) / (v(i) + v(j));
                kmat[k] = herm(sc[k].r * dsum * sc[k].r.adjoint());
            }
            dir.dy = fac.solve(rp - apply_a(s, kmat) + a_wrdw);
            dir.ds.resize(nb);
            dir.dx.resize(nb);
            auto fill = [&] {
                const Blocks atdy = apply_at(s, dir.dy);
                for (int k = 0; k < nb; ++k) {
                    dir.ds[k] = herm(rd[k] - atdy[k]);
                    dir.dx[k] = herm(kmat[k] - w[k] * dir.ds[k] * w[k]);
                }
            };
            fill();
            // Refine against the operator itself: A(dX) must reproduce rp.
            for (int pass = 0; pass < 3; ++pass) {
                const RealVector res = rp - apply_a(s, dir.dx);
                if (res.norm() <= 1e-14 * (1.0 + rp.norm() + bnorm)) break;
                dir.dy += fac.solve(res);
                fill();
            }
            return dir;
        };
        auto steps = [&](const Direction& dir, double& ap, double& ad, Blocks& dxs, Blocks& dss) {
            ap = 1.0;
            ad = 1.0;
            dxs.resize(nb);
            dss.resize(nb);
            for (int k = 0; k < nb; ++k) {
                dxs[k] = herm(sc[k].rinv * dir.dx[k] * sc[k].rinv.adjoint());
                dss[k] = herm(sc[k].r.adjoint() * dir.ds[k] * sc[k].r);
                ap = std::min(ap, step_length(sc[k].v, dxs[k]));
                ad = std::min(ad, step_length(sc[k].v, dss[k]));
            }
        };

        // Predictor.
        Blocks rc(nb);
        for (int k = 0; k < nb; ++k) {
            const RealVector& v = sc[k].v;
            rc[k] = ComplexMatrix((-v.array().square()).matrix().cast<cplx>().asDiagonal());
        }
        const Direction pred = direction(rc);
        double ap = 1.0, ad = 1.0;
        Blocks dxs, dss;
        steps(pred, ap, ad, dxs, dss);
        double mu_aff = 0.0;
        for (int k = 0; k < nb; ++k)
            mu_aff += inner(ComplexMatrix(x[k] + ap * pred.dx[k]), ComplexMatrix(sv[k] + ad * pred.ds[k]));
        mu_aff /= s.n_total;
        const double ratio = std::max(0.0, mu_aff / mu);
        const double expon = std::min(ap, ad) > 0.5 ? 3.0 : 2.0;
        const double sigma = std::min(1.0, std::pow(ratio, expon));

        // Corrector.
        for (int k = 0; k < nb; ++k) {
            const RealVector& v = sc[k].v;
            const int n = s.blocks[k].dim;
            const ComplexMatrix cross = herm(dxs[k] * dss[k]);
            rc[k] = sigma * mu * ComplexMatrix::Identity(n, n) - ComplexMatrix((v.array().square()).matrix().asDiagonal()) - cross;
        }
        const Direction corr = direction(rc);
        steps(corr, ap, ad, dxs, dss);

        for (int k = 0; k < nb; ++k) {
            x[k] = herm(x[k] + ap * corr.dx[k]);
            sv[k] = herm(sv[k] + ad * corr.ds[k]);
        }
        y += ad * corr.dy;

        if (std::max(ap, ad) < 1e-10) {
            if (++stall >= 5) return finish(SolveStatus::NumericalLimit, best_x, best_s, best_y, iter + 1);
        } else {
            stall = 0;
        }
    }
    return finish(SolveStatus::NumericalLimit, best_x, best_s, best_y, options.max_iter);
}

}  // namespace doeblin
