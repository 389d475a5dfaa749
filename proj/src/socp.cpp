#include "qcs/socp.hpp"

#include "qcs/cone.hpp"
#include "qcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace qcs::socp {

std::string_view to_string(Status status)
{
    switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::IterLimit: return "IterLimit";
    case Status::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

void ConeProgram::validate() const
{
    std::size_t total = 0;
    for (std::size_t d : cone_dims) {
        if (d == 0) {
            throw Error(ErrorCode::DimMismatch, "cone block of dimension zero");
        }
        total += d;
    }
    if (total != num_vars() || static_cast<std::size_t>(A.cols()) != num_vars() ||
        static_cast<std::size_t>(A.rows()) != num_rows()) {
        throw Error(ErrorCode::DimMismatch,
                    "cone program dimensions disagree: N=" + std::to_string(num_vars()) +
                        " cones=" + std::to_string(total) + " A=" + std::to_string(A.rows()) +
                        "x" + std::to_string(A.cols()) + " M=" + std::to_string(num_rows()));
    }
}

namespace {

void require_rows(const RealMatrix& phi, const QVector& y)
{
    if (static_cast<std::size_t>(phi.rows()) != y.size()) {
        throw Error(ErrorCode::DimMismatch, "matrix has " + std::to_string(phi.rows()) +
                                                " rows, observation has " +
                                                std::to_string(y.size()) + " entries");
    }
}

} // namespace

ConeProgram build_noiseless(const RealMatrix& phi, const QVector& y)
{
    require_rows(phi, y);
    const Eigen::Index m = phi.rows();
    const Eigen::Index n = phi.cols();
    ConeProgram prog;
    prog.c = Eigen::VectorXd::Zero(5 * n);
    prog.A = Eigen::MatrixXd::Zero(4 * m, 5 * n);
    prog.b.resize(4 * m);
    prog.cone_dims.assign(static_cast<std::size_t>(n), 5);
    for (Eigen::Index k = 0; k < n; ++k) {
        prog.c(5 * k) = 1.0;
        for (Eigen::Index comp = 0; comp < 4; ++comp) {
            prog.A.block(comp * m, 5 * k + 1 + comp, m, 1) = phi.col(k);
        }
    }
    for (Eigen::Index comp = 0; comp < 4; ++comp) {
        const auto values = y.component(static_cast<int>(comp));
        for (Eigen::Index r = 0; r < m; ++r) {
            prog.b(comp * m + r) = values[static_cast<std::size_t>(r)];
        }
    }
    return prog;
}

ConeProgram build_noisy(const RealMatrix& phi, const QVector& y, double eta)
{
    if (!(eta >= 0.0)) {
        throw Error(ErrorCode::NegativeEta, "eta must be nonnegative");
    }
    ConeProgram base = build_noiseless(phi, y);
    const Eigen::Index rows = base.A.rows();
    const Eigen::Index cols = base.A.cols();
    ConeProgram prog;
    prog.c = Eigen::VectorXd::Zero(cols + rows + 1);
    prog.c.head(cols) = base.c;
    prog.A = Eigen::MatrixXd::Zero(rows + 1, cols + rows + 1);
    prog.A.topLeftCorner(rows, cols) = base.A;
    prog.A.block(0, cols + 1, rows, rows).setIdentity();
    prog.A(rows, cols) = 1.0;
    prog.b.resize(rows + 1);
    prog.b.head(rows) = base.b;
    prog.b(rows) = eta;
    prog.cone_dims = base.cone_dims;
    prog.cone_dims.push_back(static_cast<std::size_t>(rows + 1));
    return prog;
}

QVector extract_signal(const Solution& sol, std::size_t n)
{
    const auto total = static_cast<std::size_t>(sol.x.size());
    const bool noiseless = total == 5 * n;
    const bool noisy = total > 5 * n + 1 && (total - 5 * n - 1) % 4 == 0;
    if (n == 0 || !(noiseless || noisy)) {
        throw Error(ErrorCode::LayoutMismatch, "solution of length " + std::to_string(total) +
                                                   " does not hold " + std::to_string(n) +
                                                   " interleaved blocks");
    }
    QVector x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto o = static_cast<Eigen::Index>(5 * k);
        x[k] = {sol.x(o + 1), sol.x(o + 2), sol.x(o + 3), sol.x(o + 4)};
    }
    return x;
}

Eigen::VectorXd embed_signal(const QVector& x)
{
    Eigen::VectorXd out(5 * static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto o = static_cast<Eigen::Index>(5 * k);
        out(o) = x[k].norm();
        out(o + 1) = x[k].a;
        out(o + 2) = x[k].b;
        out(o + 3) = x[k].c;
        out(o + 4) = x[k].d;
    }
    return out;
}

Residuals kkt_report(const ConeProgram& prog, const Solution& sol)
{
    if (static_cast<std::size_t>(sol.x.size()) != prog.num_vars() ||
        static_cast<std::size_t>(sol.s.size()) != prog.num_vars() ||
        static_cast<std::size_t>(sol.y.size()) != prog.num_rows() ||
        static_cast<std::size_t>(prog.A.rows()) != prog.num_rows() ||
        static_cast<std::size_t>(prog.A.cols()) != prog.num_vars()) {
        throw Error(ErrorCode::DimMismatch, "solution vectors do not match the program");
    }
    const double pobj = prog.c.dot(sol.x);
    const double dobj = prog.b.dot(sol.y);
    Residuals r;
    r.primal = (prog.A * sol.x - prog.b).norm() / (1.0 + prog.b.norm());
    r.dual = (prog.A.transpose() * sol.y + sol.s - prog.c).norm() / (1.0 + prog.c.norm());
    r.gap = std::max(std::abs(pobj - dobj), std::abs(sol.x.dot(sol.s))) / (1.0 + std::abs(pobj));
    return r;
}

void write_program(std::ostream& os, const ConeProgram& prog)
{
    os << "QCSSOCP 1 " << prog.num_vars() << ' ' << prog.num_rows() << ' '
       << prog.cone_dims.size() << '\n';
    for (std::size_t i = 0; i < prog.cone_dims.size(); ++i) {
        os << (i ? " " : "") << prog.cone_dims[i];
    }
    os << '\n';
    auto write_row = [&os](const auto& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            os << (i ? " " : "") << format_real(v(i));
        }
        os << '\n';
    };
    write_row(prog.c);
    write_row(prog.b);
    for (Eigen::Index r = 0; r < prog.A.rows(); ++r) {
        write_row(prog.A.row(r));
    }
}

// ---------------------------------------------------------------------------
// Interior-point solver

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

std::span<double> block(Vec& v, std::size_t off, std::size_t d)
{
    return {v.data() + off, d};
}
std::span<const double> block(const Vec& v, std::size_t off, std::size_t d)
{
    return {v.data() + off, d};
}

struct Presolved {
    Mat A;
    Vec b;
    std::vector<Eigen::Index> kept;
    bool infeasible = false;
};

// Drops all-zero rows and exact duplicates of earlier rows.
Presolved presolve(const ConeProgram& prog)
{
    Presolved out;
    std::map<std::vector<double>, Eigen::Index> seen;
    const Eigen::Index cols = prog.A.cols();
    std::vector<double> key(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < prog.A.rows(); ++r) {
        bool zero = true;
        for (Eigen::Index c = 0; c < cols; ++c) {
            key[static_cast<std::size_t>(c)] = prog.A(r, c);
            zero = zero && prog.A(r, c) == 0.0;
        }
        if (zero) {
            out.infeasible = out.infeasible || prog.b(r) != 0.0;
            continue;
        }
        auto [it, inserted] = seen.emplace(key, r);
        if (!inserted) {
            out.infeasible = out.infeasible || prog.b(r) != prog.b(it->second);
            continue;
        }
        out.kept.push_back(r);
    }
    const auto m = static_cast<Eigen::Index>(out.kept.size());
    out.A.resize(m, cols);
    out.b.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.A.row(i) = prog.A.row(out.kept[static_cast<std::size_t>(i)]);
        out.b(i) = prog.b(out.kept[static_cast<std::size_t>(i)]);
    }
    return out;
}

// Factor of G = B B' + reg I with B = A W, taken from a Householder QR of
// [B'; sqrt(reg) I] so that G = R'R. G itself is never formed, which keeps
// the working condition number at cond(B) instead of cond(B)^2.
class NormalFactor {
public:
    bool compute(const Mat& scaled_a, double reg)
    {
        const Eigen::Index m = scaled_a.rows();
        const Eigen::Index n = scaled_a.cols();
        Mat stacked(n + m, m);
        stacked.topRows(n) = scaled_a.transpose();
        stacked.bottomRows(m) = std::sqrt(reg) * Mat::Identity(m, m);
        if (!stacked.allFinite()) {
            return false;
        }
        qr_.compute(stacked);
        r_ = qr_.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!(std::abs(r_(i, i)) > 0.0)) {
                return false;
            }
        }
        return true;
    }

    Vec solve(const Vec& rhs) const
    {
        Vec z = r_.transpose().triangularView<Eigen::Lower>().solve(rhs);
        r_.triangularView<Eigen::Upper>().solveInPlace(z);
        return z;
    }

private:
    Eigen::HouseholderQR<Mat> qr_;
    Mat r_;
};

struct Direction {
    Vec x, y, s;
    double tau = 0.0;
    double kappa = 0.0;
};

class InteriorPoint {
public:
    InteriorPoint(const ConeProgram& prog, const Presolved& pre, const SolverSettings& settings)
        : prog_(prog), A_(pre.A), b_(pre.b), c_(prog.c), kept_(pre.kept), settings_(settings)
    {
        std::size_t off = 0;
        for (std::size_t d : prog.cone_dims) {
            offsets_.push_back(off);
            off += d;
        }
        n_ = static_cast<Eigen::Index>(off);
        m_ = A_.rows();
        w_.resize(n_);
        beta_.resize(prog.cone_dims.size());
        lambda_.resize(n_);
        e_ = Vec::Zero(n_);
        for (std::size_t off0 : offsets_) {
            e_(static_cast<Eigen::Index>(off0)) = 1.0;
        }
    }

    Solution run();

private:
    std::size_t num_cones() const { return offsets_.size(); }
    std::size_t dim(std::size_t k) const { return prog_.cone_dims[k]; }

    void apply_w(const Vec& z, Vec& out) const
    {
        for (std::size_t k = 0; k < num_cones(); ++k) {
            cone::apply_w(beta_[k], block(w_, offsets_[k], dim(k)), block(z, offsets_[k], dim(k)),
                          block(out, offsets_[k], dim(k)));
        }
    }
    void apply_w_inv(const Vec& z, Vec& out) const
    {
        for (std::size_t k = 0; k < num_cones(); ++k) {
            cone::apply_w_inv(beta_[k], block(w_, offsets_[k], dim(k)),
                              block(z, offsets_[k], dim(k)), block(out, offsets_[k], dim(k)));
        }
    }
    Vec apply_h(const Vec& z) const
    {
        Vec tmp(n_), out(n_);
        apply_w(z, tmp);
        apply_w(tmp, out);
        return out;
    }
    void jordan(const Vec& u, const Vec& v, Vec& out) const
    {
        for (std::size_t k = 0; k < num_cones(); ++k) {
            cone::jordan_product(block(u, offsets_[k], dim(k)), block(v, offsets_[k], dim(k)),
                                 block(out, offsets_[k], dim(k)));
        }
    }
    double max_step(const Vec& z, const Vec& d) const
    {
        double alpha = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < num_cones(); ++k) {
            alpha = std::min(alpha, cone::max_step(block(z, offsets_[k], dim(k)),
                                                   block(d, offsets_[k], dim(k))));
        }
        return alpha;
    }

    void update_scaling();
    bool factor();
    Direction linear_solve(const Vec& r1, const Vec& r2, double r3, const Vec& xi, double r5) const;
    Direction refined_solve(const Vec& r1, const Vec& r2, double r3, const Vec& xi,
                            double r5) const;
    double step_to_boundary(const Direction& d) const;

    Vec expand_y(const Vec& y) const;
    Solution make_solution(Status status, double scale) const;

    const ConeProgram& prog_;
    const Mat& A_;
    const Vec& b_;
    const Vec& c_;
    const std::vector<Eigen::Index>& kept_;
    SolverSettings settings_;

    std::vector<std::size_t> offsets_;
    Eigen::Index n_ = 0;
    Eigen::Index m_ = 0;

    Vec x_, y_, s_;
    double tau_ = 1.0;
    double kappa_ = 1.0;
    int iters_ = 0;

    Vec w_;
    std::vector<double> beta_;
    Vec lambda_;
    Vec e_;
    NormalFactor normal_;
    Vec q_;
    Vec hq_minus_hc_;
};

void InteriorPoint::update_scaling()
{
    for (std::size_t k = 0; k < num_cones(); ++k) {
        beta_[k] = cone::nt_scaling(block(x_, offsets_[k], dim(k)), block(s_, offsets_[k], dim(k)),
                                    block(w_, offsets_[k], dim(k)));
    }
    apply_w(s_, lambda_);
}

// Factors G = A W^2 A' + reg I and precomputes the tau-column of the reduced system.
bool InteriorPoint::factor()
{
    Mat aw(m_, n_);
    Vec row(n_), scaled(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
        row = A_.row(r).transpose();
        apply_w(row, scaled);
        aw.row(r) = scaled.transpose();
    }
    if (!normal_.compute(aw, settings_.static_regularization)) {
        return false;
    }
    const Vec hc = apply_h(c_);
    q_ = normal_.solve(A_ * hc + b_);
    hq_minus_hc_ = apply_h(A_.transpose() * q_) - hc;
    return q_.allFinite() && hq_minus_hc_.allFinite();
}

// Solves the scaled Newton system
//   A dx - b dtau               = r1
//   A'dy + ds - c dtau          = r2
//   c'dx - b'dy + dkappa        = r3
//   W^{-1} dx + W ds            = xi
//   kappa dtau + tau dkappa     = r5
Direction InteriorPoint::linear_solve(const Vec& r1, const Vec& r2, double r3, const Vec& xi,
                                      double r5) const
{
    Vec wxi(n_);
    apply_w(xi, wxi);
    const Vec h = wxi - apply_h(r2);
    const Vec p = normal_.solve(r1 - A_ * h);
    const Vec dx1 = apply_h(A_.transpose() * p) + h;

    Direction d;
    const double num = r3 - c_.dot(dx1) + b_.dot(p) - r5 / tau_;
    const double den = c_.dot(hq_minus_hc_) - b_.dot(q_) - kappa_ / tau_;
    d.tau = num / den;
    d.x = dx1 + hq_minus_hc_ * d.tau;
    d.y = p + q_ * d.tau;
    d.kappa = (r5 - kappa_ * d.tau) / tau_;

    // ds from the dual equation keeps the dual residual linear along the step
    d.s = r2 - A_.transpose() * d.y + c_ * d.tau;
    return d;
}

Direction InteriorPoint::refined_solve(const Vec& r1, const Vec& r2, double r3, const Vec& xi,
                                       double r5) const
{
    Direction d = linear_solve(r1, r2, r3, xi, r5);
    Vec t1(n_), t2(n_);
    for (int round = 0; round < 2; ++round) {
        const Vec e1 = r1 - (A_ * d.x - b_ * d.tau);
        const Vec e2 = r2 - (A_.transpose() * d.y + d.s - c_ * d.tau);
        const double e3 = r3 - (c_.dot(d.x) - b_.dot(d.y) + d.kappa);
        apply_w_inv(d.x, t1);
        apply_w(d.s, t2);
        const Vec e4 = xi - (t1 + t2);
        const double e5 = r5 - (kappa_ * d.tau + tau_ * d.kappa);
        const Direction corr = linear_solve(e1, e2, e3, e4, e5);
        d.x += corr.x;
        d.y += corr.y;
        d.s += corr.s;
        d.tau += corr.tau;
        d.kappa += corr.kappa;
    }
    return d;
}

double InteriorPoint::step_to_boundary(const Direction& d) const
{
    // Measured in the scaled space: W^{-1} maps x to lambda and W maps s to lambda.
    Vec dx(n_), ds(n_);
    apply_w_inv(d.x, dx);
    apply_w(d.s, ds);
    double alpha = std::min(max_step(lambda_, dx), max_step(lambda_, ds));
    if (d.tau < 0.0) {
        alpha = std::min(alpha, -tau_ / d.tau);
    }
    if (d.kappa < 0.0) {
        alpha = std::min(alpha, -kappa_ / d.kappa);
    }
    return alpha;
}

Vec InteriorPoint::expand_y(const Vec& y) const
{
    Vec full = Vec::Zero(prog_.A.rows());
    for (std::size_t i = 0; i < kept_.size(); ++i) {
        full(kept_[i]) = y(static_cast<Eigen::Index>(i));
    }
    return full;
}

Solution InteriorPoint::make_solution(Status status, double scale) const
{
    Solution sol;
    sol.status = status;
    sol.x = x_ / scale;
    sol.y = expand_y(y_) / scale;
    sol.s = s_ / scale;
    sol.objective = prog_.c.dot(sol.x);
    sol.iters = iters_;
    const double dobj = prog_.b.dot(sol.y);
    sol.residuals.primal = (prog_.A * sol.x - prog_.b).norm() / (1.0 + prog_.b.norm());
    sol.residuals.dual =
        (prog_.A.transpose() * sol.y + sol.s - prog_.c).norm() / (1.0 + prog_.c.norm());
    sol.residuals.gap = std::max(std::abs(sol.objective - dobj), std::abs(sol.x.dot(sol.s))) /
                        (1.0 + std::abs(sol.objective));
    return sol;
}

Solution InteriorPoint::run()
{
    x_ = e_;
    s_ = e_;
    y_ = Vec::Zero(m_);
    tau_ = 1.0;
    kappa_ = 1.0;
    const double degree = static_cast<double>(num_cones()) + 1.0;

    for (iters_ = 0;; ++iters_) {
        const Solution current = make_solution(Status::Optimal, tau_);
        const Residuals& res = current.residuals;
        if (res.primal <= settings_.tol_primal && res.dual <= settings_.tol_dual &&
            res.gap <= settings_.tol_gap) {
            return current;
        }
        const double by = b_.dot(y_);
        if (by > 0.0 &&
            (A_.transpose() * y_ + s_).norm() <= settings_.tol_infeasible * by) {
            return make_solution(Status::PrimalInfeasible, by);
        }
        const double cx = c_.dot(x_);
        if (cx < 0.0 && (A_ * x_).norm() <= settings_.tol_infeasible * -cx) {
            return make_solution(Status::DualInfeasible, -cx);
        }
        if (iters_ >= settings_.max_iters) {
            return make_solution(Status::IterLimit, tau_);
        }

        update_scaling();
        if (!factor()) {
            return make_solution(Status::NumericalFailure, tau_);
        }

        const Vec rp = A_ * x_ - b_ * tau_;
        const Vec rd = A_.transpose() * y_ + s_ - c_ * tau_;
        const double rg = c_.dot(x_) - b_.dot(y_) + kappa_;
        const double mu = (x_.dot(s_) + tau_ * kappa_) / degree;

        Vec lam_sq(n_), xi(n_);
        jordan(lambda_, lambda_, lam_sq);

        // affine (predictor) direction
        Vec rc = -lam_sq;
        for (std::size_t k = 0; k < num_cones(); ++k) {
            cone::jordan_solve(block(lambda_, offsets_[k], dim(k)), block(rc, offsets_[k], dim(k)),
                               block(xi, offsets_[k], dim(k)));
        }
        const Direction aff = refined_solve(-rp, -rd, -rg, xi, -tau_ * kappa_);
        const double alpha_aff = std::min(1.0, step_to_boundary(aff));
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 1e-8, 1.0);

        // combined direction with second-order correction
        Vec dxa(n_), dsa(n_), cross(n_);
        apply_w_inv(aff.x, dxa);
        apply_w(aff.s, dsa);
        jordan(dxa, dsa, cross);
        rc = -lam_sq + sigma * mu * e_ - cross;
        for (std::size_t k = 0; k < num_cones(); ++k) {
            cone::jordan_solve(block(lambda_, offsets_[k], dim(k)), block(rc, offsets_[k], dim(k)),
                               block(xi, offsets_[k], dim(k)));
        }
        const double eta = 1.0 - sigma;
        const double r5 = -tau_ * kappa_ + sigma * mu - aff.tau * aff.kappa;
        const Direction dir = refined_solve(-eta * rp, -eta * rd, -eta * rg, xi, r5);
        if (!dir.x.allFinite() || !dir.s.allFinite() || !dir.y.allFinite() ||
            !std::isfinite(dir.tau) || !std::isfinite(dir.kappa)) {
            return make_solution(Status::NumericalFailure, tau_);
        }
        const double alpha = std::min(1.0, settings_.step_fraction * step_to_boundary(dir));
        if (!(alpha > 1e-14)) {
            return make_solution(Status::NumericalFailure, tau_);
        }
        x_ += alpha * dir.x;
        y_ += alpha * dir.y;
        s_ += alpha * dir.s;
        tau_ += alpha * dir.tau;
        kappa_ += alpha * dir.kappa;
    }
}

} // namespace

Solution solve(const ConeProgram& prog, const SolverSettings& settings)
{
    prog.validate();
    if (!(settings.tol_gap > 0.0 && settings.tol_primal > 0.0 && settings.tol_dual > 0.0 &&
          settings.max_iters >= 1 && settings.static_regularization >= 0.0 &&
          settings.tol_infeasible > 0.0 && settings.step_fraction > 0.0 &&
          settings.step_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid solver settings");
    }
    const Presolved pre = presolve(prog);
    if (pre.infeasible) {
        Solution sol;
        sol.status = Status::PrimalInfeasible;
        sol.x = Eigen::VectorXd::Zero(prog.c.size());
        sol.y = Eigen::VectorXd::Zero(prog.b.size());
        sol.s = Eigen::VectorXd::Zero(prog.c.size());
        return sol;
    }
    if (pre.A.rows() > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pre.A.transpose());
        if (qr.rank() < pre.A.rows()) {
            throw Error(ErrorCode::RankDeficient,
                        "equality rows have rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(pre.A.rows()) + " after presolve");
        }
    }
    InteriorPoint ipm(prog, pre, settings);
    return ipm.run();
}

} // namespace qcs::socp
