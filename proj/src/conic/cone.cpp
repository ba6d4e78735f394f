// SPDX-License-Identifier: Apache-2.0
#include "cranmc/conic/cone.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cranmc::conic {

int ConeSpec::dim() const { return orthant + std::accumulate(soc.begin(), soc.end(), 0); }

int ConeSpec::degree() const { return orthant + static_cast<int>(soc.size()); }

void ConicProblem::check() const {
    const auto n = c.size();
    if (A.cols() != n && A.rows() > 0) throw std::invalid_argument("conic: A has wrong column count");
    if (A.rows() != b.size()) throw std::invalid_argument("conic: A and b disagree");
    if (G.cols() != n) throw std::invalid_argument("conic: G has wrong column count");
    if (G.rows() != h.size()) throw std::invalid_argument("conic: G and h disagree");
    if (cones.dim() != G.rows()) throw std::invalid_argument("conic: cone dimensions do not sum to rows of G");
    if (cones.orthant < 0) throw std::invalid_argument("conic: negative orthant dimension");
    for (int q : cones.soc) {
        if (q < 1) throw std::invalid_argument("conic: SOC dimension must be >= 1");
    }
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != n) {
        throw std::invalid_argument("conic: one name per variable expected");
    }
}

namespace {

// Calls f(offset, dim) for every SOC block.
template <class F>
void for_each_soc(const ConeSpec& k, F&& f) {
    int off = k.orthant;
    for (int q : k.soc) {
        f(off, q);
        off += q;
    }
}

double jdot(const Eigen::VectorXd& x, int off, int q) {
    // x' J x on a block
    return x[off] * x[off] - x.segment(off + 1, q - 1).squaredNorm();
}

}  // namespace

Eigen::VectorXd cone_identity(const ConeSpec& k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k.dim());
    e.head(k.orthant).setOnes();
    for_each_soc(k, [&](int off, int) { e[off] = 1.0; });
    return e;
}

double min_eigenvalue(const ConeSpec& k, const Eigen::VectorXd& x) {
    double m = std::numeric_limits<double>::infinity();
    if (k.orthant > 0) m = x.head(k.orthant).minCoeff();
    for_each_soc(k, [&](int off, int q) { m = std::min(m, x[off] - x.segment(off + 1, q - 1).norm()); });
    return m;
}

Eigen::VectorXd jordan_product(const ConeSpec& k, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd r(x.size());
    r.head(k.orthant) = x.head(k.orthant).cwiseProduct(y.head(k.orthant));
    for_each_soc(k, [&](int off, int q) {
        r[off] = x.segment(off, q).dot(y.segment(off, q));
        r.segment(off + 1, q - 1) = x[off] * y.segment(off + 1, q - 1) + y[off] * x.segment(off + 1, q - 1);
    });
    return r;
}

Eigen::VectorXd jordan_divide(const ConeSpec& k, const Eigen::VectorXd& l, const Eigen::VectorXd& d) {
    Eigen::VectorXd u(l.size());
    u.head(k.orthant) = d.head(k.orthant).cwiseQuotient(l.head(k.orthant));
    for_each_soc(k, [&](int off, int q) {
        const double l0 = l[off];
        const auto l1 = l.segment(off + 1, q - 1);
        const auto d1 = d.segment(off + 1, q - 1);
        const double det = jdot(l, off, q);
        const double u0 = (l0 * d[off] - l1.dot(d1)) / det;
        u[off] = u0;
        u.segment(off + 1, q - 1) = (d1 - u0 * l1) / l0;
    });
    return u;
}

double max_step(const ConeSpec& k, const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
    double a = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k.orthant; ++i) {
        if (d[i] < 0.0) a = std::min(a, -x[i] / d[i]);
    }
    for_each_soc(k, [&](int off, int q) {
        // det(x + t d) = qa t^2 + 2 qb t + qc, qc > 0 for interior x.
        const double qa = jdot(d, off, q);
        const double qb = x[off] * d[off] - x.segment(off + 1, q - 1).dot(d.segment(off + 1, q - 1));
        const double qc = jdot(x, off, q);
        double root = std::numeric_limits<double>::infinity();
        if (std::abs(qa) < 1e-300) {
            if (qb < 0.0) root = -qc / (2.0 * qb);
        } else {
            const double disc = qb * qb - qa * qc;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                // Stable pair of roots of qa t^2 + 2 qb t + qc.
                const double t1 = (qb >= 0.0) ? -(qb + sq) / qa : qc / (-qb + sq);
                const double t2 = (qb >= 0.0) ? -qc / (qb + sq) : (-qb + sq) / qa;
                for (double t : {t1, t2}) {
                    if (t > 0.0) root = std::min(root, t);
                }
            }
        }
        if (d[off] < 0.0) root = std::min(root, -x[off] / d[off]);
        a = std::min(a, root);
    });
    return a;
}

NtScaling::NtScaling(const ConeSpec& k, const Eigen::VectorXd& s, const Eigen::VectorXd& z) : k_(&k) {
    const int l = k.orthant;
    d_ = (s.head(l).array() / z.head(l).array()).sqrt().matrix();
    lambda_.resize(s.size());
    lambda_.head(l) = (s.head(l).array() * z.head(l).array()).sqrt().matrix();
    for_each_soc(k, [&](int off, int q) {
        const double sn = std::sqrt(jdot(s, off, q));
        const double zn = std::sqrt(jdot(z, off, q));
        const Eigen::VectorXd sb = s.segment(off, q) / sn;
        const Eigen::VectorXd zb = z.segment(off, q) / zn;
        const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
        Eigen::VectorXd w = sb;
        w[0] += zb[0];
        w.tail(q - 1) -= zb.tail(q - 1);
        w /= 2.0 * gamma;  // w' J w = 1, w0 >= 1
        SocBlock blk;
        blk.offset = off;
        blk.dim = q;
        blk.beta = std::sqrt(sn / zn);
        blk.v = w;
        blk.v[0] += 1.0;
        blk.v /= std::sqrt(2.0 * (w[0] + 1.0));
        blocks_.push_back(std::move(blk));
    });
    // lambda = W z
    Eigen::VectorXd wz = apply(z);
    lambda_.tail(s.size() - l) = wz.tail(s.size() - l);
}

Eigen::VectorXd NtScaling::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(x.size());
    const int l = k_->orthant;
    r.head(l) = d_.cwiseProduct(x.head(l));
    for (const auto& b : blocks_) {
        const auto xb = x.segment(b.offset, b.dim);
        const double vx = b.v.dot(xb);
        Eigen::VectorXd out = 2.0 * vx * b.v;
        out[0] -= xb[0];
        out.tail(b.dim - 1) += xb.tail(b.dim - 1);
        r.segment(b.offset, b.dim) = b.beta * out;
    }
    return r;
}

Eigen::VectorXd NtScaling::apply_inverse(const Eigen::VectorXd& x) const {
    // W^{-1} = (1/beta) (2 J v v' J - J)
    Eigen::VectorXd r(x.size());
    const int l = k_->orthant;
    r.head(l) = x.head(l).cwiseQuotient(d_);
    for (const auto& b : blocks_) {
        const auto xb = x.segment(b.offset, b.dim);
        Eigen::VectorXd jv = b.v;
        jv.tail(b.dim - 1) = -jv.tail(b.dim - 1);
        const double vx = jv.dot(xb);
        Eigen::VectorXd out = 2.0 * vx * jv;
        out[0] -= xb[0];
        out.tail(b.dim - 1) += xb.tail(b.dim - 1);
        r.segment(b.offset, b.dim) = out / b.beta;
    }
    return r;
}

Eigen::MatrixXd NtScaling::apply_inverse(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd r(m.rows(), m.cols());
    const int l = k_->orthant;
    r.topRows(l) = d_.cwiseInverse().asDiagonal() * m.topRows(l);
    for (const auto& b : blocks_) {
        const auto mb = m.middleRows(b.offset, b.dim);
        Eigen::VectorXd jv = b.v;
        jv.tail(b.dim - 1) = -jv.tail(b.dim - 1);
        Eigen::MatrixXd out = mb;  // -J m
        out.row(0) *= -1.0;
        out.noalias() += (2.0 * jv) * (jv.transpose() * mb);
        r.middleRows(b.offset, b.dim) = out / b.beta;
    }
    return r;
}

}  // namespace cranmc::conic
