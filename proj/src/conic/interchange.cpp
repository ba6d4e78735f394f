// SPDX-License-Identifier: Apache-2.0
#include "cranmc/conic/interchange.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cranmc::conic {

namespace {

void write_vector(std::ostream& out, const char* tag, const Eigen::VectorXd& v) {
    out << tag;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
    out << '\n';
}

void write_triplets(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
    Eigen::Index nnz = (m.array() != 0.0).count();
    out << tag << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << m(i, j) << '\n';
}

void expect(std::istream& in, const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) throw std::runtime_error("conic interchange: expected '" + word + "'");
}

Eigen::VectorXd read_vector(std::istream& in, const char* tag, Eigen::Index n) {
    expect(in, tag);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(in >> v[i])) throw std::runtime_error(std::string("conic interchange: short vector ") + tag);
    }
    return v;
}

Eigen::MatrixXd read_triplets(std::istream& in, const char* tag, Eigen::Index rows, Eigen::Index cols) {
    expect(in, tag);
    Eigen::Index nnz = 0;
    if (!(in >> nnz) || nnz < 0) throw std::runtime_error(std::string("conic interchange: bad count for ") + tag);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index t = 0; t < nnz; ++t) {
        Eigen::Index i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols) {
            throw std::runtime_error(std::string("conic interchange: bad entry in ") + tag);
        }
        m(i, j) = v;
    }
    return m;
}

}  // namespace

void write_problem(std::ostream& out, const ConicProblem& pr) {
    pr.check();
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << "conic 1\n";
    out << "dims " << pr.c.size() << ' ' << pr.A.rows() << ' ' << pr.G.rows() << '\n';
    out << "cones " << pr.cones.orthant << ' ' << pr.cones.soc.size();
    for (int q : pr.cones.soc) out << ' ' << q;
    out << '\n';
    write_vector(out, "c", pr.c);
    write_vector(out, "b", pr.b);
    write_vector(out, "h", pr.h);
    write_triplets(out, "A", pr.A);
    write_triplets(out, "G", pr.G);
    out.flags(flags);
    out.precision(prec);
}

ConicProblem read_problem(std::istream& in) {
    expect(in, "conic");
    int version = 0;
    if (!(in >> version) || version != 1) throw std::runtime_error("conic interchange: unsupported version");
    expect(in, "dims");
    Eigen::Index n = 0, p = 0, m = 0;
    if (!(in >> n >> p >> m) || n < 0 || p < 0 || m < 0) throw std::runtime_error("conic interchange: bad dims");
    ConicProblem pr;
    expect(in, "cones");
    std::size_t nsoc = 0;
    if (!(in >> pr.cones.orthant >> nsoc)) throw std::runtime_error("conic interchange: bad cones");
    pr.cones.soc.resize(nsoc);
    for (auto& q : pr.cones.soc) {
        if (!(in >> q)) throw std::runtime_error("conic interchange: bad cones");
    }
    pr.c = read_vector(in, "c", n);
    pr.b = read_vector(in, "b", p);
    pr.h = read_vector(in, "h", m);
    pr.A = read_triplets(in, "A", p, n);
    pr.G = read_triplets(in, "G", m, n);
    pr.check();
    return pr;
}

}  // namespace cranmc::conic
