// SPDX-License-Identifier: Apache-2.0
#include "cranmc/conic/solver.hpp"

#include "cranmc/conic/cone.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cranmc::conic {

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Reduced KKT solver for
//   [ 0  A'  G'   ] [dx]   [bx]
//   [ A  0   0    ] [dy] = [by]
//   [ G  0  -W'W  ] [dz]   [bz]
class KktSolver {
public:
    KktSolver(const MatrixXd& A, const MatrixXd& G, const NtScaling* w) : A_(A), G_(G), w_(w) {
        gs_ = w ? w->apply_inverse(G) : G;
        H_.noalias() = gs_.transpose() * gs_;
        const auto n = H_.rows();
        const auto p = A.rows();
        const double reg = 1e-13 * std::max(1.0, H_.diagonal().cwiseAbs().maxCoeff());
        if (p == 0) {
            llt_.compute(H_ + reg * MatrixXd::Identity(n, n));
            use_llt_ = llt_.info() == Eigen::Success;
        }
        if (!use_llt_) {
            MatrixXd k = MatrixXd::Zero(n + p, n + p);
            k.topLeftCorner(n, n) = H_ + reg * MatrixXd::Identity(n, n);
            k.topRightCorner(n, p) = A.transpose();
            k.bottomLeftCorner(p, n) = A;
            k.bottomRightCorner(p, p) = -reg * MatrixXd::Identity(p, p);
            lu_.compute(k);
        }
    }

    // Reduced solve followed by iterative refinement on the full system; the
    // normal equations alone lose accuracy as W becomes ill-conditioned.
    void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& dx, VectorXd& dy,
               VectorXd& dz) const {
        reduced_solve(bx, by, bz, dx, dy, dz);
        const double scale = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(), by.lpNorm<Eigen::Infinity>(),
                                             bz.lpNorm<Eigen::Infinity>()});
        for (int pass = 0; pass < 3; ++pass) {
            const VectorXd rx = bx - A_.transpose() * dy - G_.transpose() * dz;
            const VectorXd ry = by - A_ * dx;
            const VectorXd rz = bz - G_ * dx + (w_ ? w_->apply(w_->apply(dz)) : dz);
            const double err = std::max({rx.lpNorm<Eigen::Infinity>(), ry.lpNorm<Eigen::Infinity>(),
                                         rz.lpNorm<Eigen::Infinity>()});
            if (!(err > 1e-15 * scale)) break;
            VectorXd cx, cy, cz;
            reduced_solve(rx, ry, rz, cx, cy, cz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
    }

private:
    void reduced_solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& dx, VectorXd& dy,
                       VectorXd& dz) const {
        const auto n = H_.rows();
        const auto p = A_.rows();
        const VectorXd wbz = w_ ? w_->apply_inverse(bz) : bz;
        VectorXd rhs(n + p);
        rhs << bx + gs_.transpose() * wbz, by;
        const VectorXd sol = raw_solve(rhs);
        dx = sol.head(n);
        dy = sol.tail(p);
        const VectorXd t = gs_ * dx - wbz;
        dz = w_ ? w_->apply_inverse(t) : t;
    }

    VectorXd raw_solve(const VectorXd& r) const { return use_llt_ ? VectorXd(llt_.solve(r)) : VectorXd(lu_.solve(r)); }

    const MatrixXd& A_;
    const MatrixXd& G_;
    const NtScaling* w_;
    MatrixXd gs_;
    MatrixXd H_;
    Eigen::LLT<MatrixXd> llt_;
    Eigen::PartialPivLU<MatrixXd> lu_;
    bool use_llt_ = false;
};

struct Scaled {
    VectorXd c;
    MatrixXd A;
    VectorXd b;
    MatrixXd G;
    VectorXd h;
    VectorXd row_scale_g;          // s_scaled = row_scale_g .* s
    VectorXd row_scale_a;          // per kept equality row
    std::vector<Eigen::Index> kept;  // original indices of kept equality rows
    double c_scale = 1.0;
};

double safe_inv_max(double m) { return m > 0.0 ? 1.0 / m : 1.0; }

}  // namespace

SolveReport solve(const ConicProblem& problem, const SolverOptions& opt) {
    problem.check();
    const ConeSpec& k = problem.cones;
    const auto n = problem.G.cols();
    const auto m = problem.G.rows();
    SolveReport report;

    // Presolve: keep a maximal independent set of equality rows.
    Scaled sp;
    if (problem.A.rows() > 0) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(problem.A.transpose());
        qr.setThreshold(opt.presolve_tol);
        const auto rank = qr.rank();
        for (Eigen::Index r = 0; r < rank; ++r) sp.kept.push_back(qr.colsPermutation().indices()[r]);
        std::sort(sp.kept.begin(), sp.kept.end());
        MatrixXd ak(static_cast<Eigen::Index>(sp.kept.size()), n);
        VectorXd bk(static_cast<Eigen::Index>(sp.kept.size()));
        for (std::size_t r = 0; r < sp.kept.size(); ++r) {
            ak.row(static_cast<Eigen::Index>(r)) = problem.A.row(sp.kept[r]);
            bk[static_cast<Eigen::Index>(r)] = problem.b[sp.kept[r]];
        }
        if (rank < problem.A.rows()) {
            const VectorXd xls = ak.completeOrthogonalDecomposition().solve(bk);
            const double viol = (problem.A * xls - problem.b).lpNorm<Eigen::Infinity>();
            if (viol > 1e-8 * (1.0 + problem.b.lpNorm<Eigen::Infinity>())) {
                report.status = SolveStatus::Infeasible;
                report.diagnostics = "presolve: inconsistent dependent equality rows";
                return report;
            }
        }
        sp.A = ak;
        sp.b = bk;
    } else {
        sp.A.resize(0, n);
        sp.b.resize(0);
    }
    const auto p = sp.A.rows();

    // Row scaling: one factor per orthant row, one per SOC block.
    sp.row_scale_g = VectorXd::Ones(m);
    for (int i = 0; i < k.orthant; ++i) {
        sp.row_scale_g[i] = safe_inv_max(problem.G.row(i).lpNorm<Eigen::Infinity>());
    }
    {
        int off = k.orthant;
        for (int q : k.soc) {
            const double mx = problem.G.middleRows(off, q).lpNorm<Eigen::Infinity>();
            sp.row_scale_g.segment(off, q).setConstant(safe_inv_max(mx));
            off += q;
        }
    }
    sp.G = sp.row_scale_g.asDiagonal() * problem.G;
    sp.h = sp.row_scale_g.cwiseProduct(problem.h);
    sp.row_scale_a = VectorXd::Ones(p);
    for (Eigen::Index r = 0; r < p; ++r) sp.row_scale_a[r] = safe_inv_max(sp.A.row(r).lpNorm<Eigen::Infinity>());
    sp.A = sp.row_scale_a.asDiagonal() * sp.A;
    sp.b = sp.row_scale_a.cwiseProduct(sp.b);
    sp.c_scale = safe_inv_max(problem.c.lpNorm<Eigen::Infinity>());
    sp.c = sp.c_scale * problem.c;

    const VectorXd& c = sp.c;
    const MatrixXd& A = sp.A;
    const VectorXd& b = sp.b;
    const MatrixXd& G = sp.G;
    const VectorXd& h = sp.h;
    const double deg = static_cast<double>(k.degree());
    const VectorXd e = cone_identity(k);
    const double nb = std::max(1.0, b.norm());
    const double nh = std::max(1.0, h.norm());
    const double nc = std::max(1.0, c.norm());

    // Starting point: least-squares primal and minimum-norm dual, pushed into K.
    VectorXd x, y, z, s;
    {
        KktSolver kkt(A, G, nullptr);
        VectorXd dy, dz;
        kkt.solve(VectorXd::Zero(n), b, h, x, dy, dz);
        s = -dz;
        VectorXd dx;
        kkt.solve(-c, VectorXd::Zero(p), VectorXd::Zero(m), dx, y, z);
        const double as = min_eigenvalue(k, s);
        if (m > 0 && as <= 1e-8 * std::max(1.0, s.norm())) s += (1.0 - as) * e;
        const double az = min_eigenvalue(k, z);
        if (m > 0 && az <= 1e-8 * std::max(1.0, z.norm())) z += (1.0 - az) * e;
    }
    double tau = 1.0;
    double kappa = 1.0;

    // Best iterate by max(pres, dres, gap); returned if the method stalls.
    struct Snapshot {
        VectorXd x, y, z, s;
        double tau = 1.0, kappa = 1.0;
        IterationInfo info;
        double merit = std::numeric_limits<double>::infinity();
    } best;
    auto give_up = [&](const std::string& why) {
        report.diagnostics = why;
        if (std::isfinite(best.merit)) {
            x = best.x;
            y = best.y;
            z = best.z;
            s = best.s;
            tau = best.tau;
            kappa = best.kappa;
            report.gap = best.info.gap;
            report.primal_residual = best.info.primal_residual;
            report.dual_residual = best.info.dual_residual;
        }
    };

    auto finish = [&](SolveStatus status) {
        report.status = status;
        const double denom = (status == SolveStatus::Optimal || status == SolveStatus::MaxIterations) ? tau : 1.0;
        VectorXd xs = x / denom;
        VectorXd zs = z / denom;
        VectorXd ss = s / denom;
        VectorXd ys = y / denom;
        report.x = xs;
        report.s = ss.cwiseQuotient(sp.row_scale_g);
        report.z = sp.row_scale_g.cwiseProduct(zs) / sp.c_scale;
        report.y = VectorXd::Zero(problem.A.rows());
        for (std::size_t r = 0; r < sp.kept.size(); ++r) {
            report.y[sp.kept[r]] = sp.row_scale_a[static_cast<Eigen::Index>(r)] * ys[static_cast<Eigen::Index>(r)] / sp.c_scale;
        }
        report.primal_objective = problem.c.dot(report.x);
        report.dual_objective = -problem.b.dot(report.y) - problem.h.dot(report.z);
        return report;
    };

    for (int it = 0;; ++it) {
        const VectorXd rx = A.transpose() * y + G.transpose() * z + tau * c;
        const VectorXd ry = A * x - tau * b;
        const VectorXd rz = s + G * x - tau * h;
        const double cx = c.dot(x);
        const double byhz = b.dot(y) + h.dot(z);
        const double rt = kappa + cx + byhz;
        const double sz = s.dot(z);
        const double mu = (sz + tau * kappa) / (deg + 1.0);

        IterationInfo info;
        info.primal_objective = cx / tau / sp.c_scale;
        info.dual_objective = -byhz / tau / sp.c_scale;
        info.gap = sz / (tau * tau);
        info.primal_residual = std::max(ry.norm() / nb, rz.norm() / nh) / tau;
        info.dual_residual = rx.norm() / nc / tau;
        report.gap = info.gap;
        report.primal_residual = info.primal_residual;
        report.dual_residual = info.dual_residual;
        report.iterations = it;

        if (!std::isfinite(mu) || !std::isfinite(info.gap) || !std::isfinite(info.primal_residual) ||
            !std::isfinite(info.dual_residual)) {
            give_up("numerical breakdown (non-finite iterate)");
            return finish(SolveStatus::MaxIterations);
        }
        const double merit = std::max({info.primal_residual, info.dual_residual, info.gap});
        if (merit < best.merit) best = {x, y, z, s, tau, kappa, info, merit};
        if (info.primal_residual <= opt.feas_tol && info.dual_residual <= opt.feas_tol && info.gap <= opt.gap_tol) {
            return finish(SolveStatus::Optimal);
        }
        if (byhz < 0.0) {
            const double pinf = (A.transpose() * y + G.transpose() * z).norm() / nc / (-byhz);
            if (pinf <= opt.feas_tol) {
                report.diagnostics = "primal infeasibility certificate";
                return finish(SolveStatus::Infeasible);
            }
        }
        if (cx < 0.0) {
            const double dinf = std::max((A * x).norm() / nb, (G * x + s).norm() / nh) / (-cx);
            if (dinf <= opt.feas_tol) {
                report.diagnostics = "dual infeasibility certificate";
                return finish(SolveStatus::Unbounded);
            }
        }
        if (it >= opt.max_iterations) {
            give_up("iteration limit");
            return finish(SolveStatus::MaxIterations);
        }

        const NtScaling w(k, s, z);
        const VectorXd& lambda = w.lambda();
        const KktSolver kkt(A, G, &w);
        VectorXd x1, y1, z1;
        kkt.solve(-c, b, h, x1, y1, z1);
        const double denom1 = c.dot(x1) + b.dot(y1) + h.dot(z1) - kappa / tau;

        struct Direction {
            VectorXd dx, dy, dz, ds;
            double dtau = 0.0, dkappa = 0.0;
        };
        auto direction = [&](const VectorXd& d_s, double d_k, double eta) {
            Direction d;
            const VectorXd u = jordan_divide(k, lambda, d_s);
            VectorXd x2, y2, z2;
            kkt.solve(-eta * rx, -eta * ry, -eta * rz - w.apply(u), x2, y2, z2);
            d.dtau = (-eta * rt - d_k / tau - (c.dot(x2) + b.dot(y2) + h.dot(z2))) / denom1;
            d.dx = x2 + d.dtau * x1;
            d.dy = y2 + d.dtau * y1;
            d.dz = z2 + d.dtau * z1;
            d.dkappa = (d_k - kappa * d.dtau) / tau;
            d.ds = w.apply(u - w.apply(d.dz));
            return d;
        };
        auto step_to_boundary = [&](const Direction& d) {
            double a = std::min(max_step(k, s, d.ds), max_step(k, z, d.dz));
            if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
            return a;
        };

        const VectorXd ll = jordan_product(k, lambda, lambda);
        const Direction aff = direction(-ll, -tau * kappa, 1.0);
        const double a_aff = std::min(1.0, step_to_boundary(aff));
        const double sigma = std::pow(1.0 - a_aff, 3);

        const VectorXd corr = jordan_product(k, w.apply_inverse(aff.ds), w.apply(aff.dz));
        const Direction d = direction(-ll - corr + sigma * mu * e, -tau * kappa - aff.dtau * aff.dkappa + sigma * mu,
                                      1.0 - sigma);
        // 0.99 loses centrality on quadratic epigraphs; x then only converges like sqrt(gap).
        const double alpha = std::min(1.0, 0.95 * step_to_boundary(d));
        info.step = alpha;
        report.trace.push_back(info);

        if (!(alpha > 1e-12)) {
            std::ostringstream os;
            os << "stalled at iteration " << it << " (step " << alpha << ")";
            give_up(os.str());
            return finish(SolveStatus::MaxIterations);
        }
        x += alpha * d.dx;
        y += alpha * d.dy;
        z += alpha * d.dz;
        s += alpha * d.ds;
        tau += alpha * d.dtau;
        kappa += alpha * d.dkappa;
    }
}

}  // namespace cranmc::conic
