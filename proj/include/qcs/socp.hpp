#pragma once

#include "qcs/quat.hpp"
#include "qcs/sensing.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace qcs::socp {

/// Standard-form cone program
///
///     minimize c'x  subject to  A x = b,  x in K_1 x ... x K_p,
///
/// where each K_i = {(t, v) : t >= ‖v‖_2} is a second-order cone occupying a
/// contiguous block of `dims[i]` variables, blocks laid out in order.
struct ConeProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<std::size_t> cone_dims;

    std::size_t num_vars() const { return static_cast<std::size_t>(c.size()); }
    std::size_t num_rows() const { return static_cast<std::size_t>(b.size()); }

    /// Throws DimMismatch unless c, A, b and the cone blocks agree.
    void validate() const;
};

struct SolverSettings {
    double tol_gap = 1e-9;
    double tol_primal = 1e-9;
    double tol_dual = 1e-9;
    /// Threshold on the normalized infeasibility certificates.
    double tol_infeasible = 1e-8;
    int max_iters = 200;
    double static_regularization = 1e-10;
    /// Fraction of the distance to the cone boundary taken per step.
    double step_fraction = 0.99;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, IterLimit, NumericalFailure };

std::string_view to_string(Status status);

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
};

/// Solver output. For Optimal, (x, y, s) is the approximate primal-dual
/// solution; for the infeasible statuses it holds the certificate direction.
struct Solution {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd s;
    double objective = 0.0;
    int iters = 0;
    Residuals residuals;
};

/// Quaternion l1 minimization subject to Phi z = y as a cone program.
///
/// Variables are interleaved (t_1, x_r1, x_i1, x_j1, x_k1, ..., t_n, ...);
/// the 4m rows hold the r, i, j, k components of the measurements stacked
/// in that order.
ConeProgram build_noiseless(const RealMatrix& phi, const QVector& y);

/// Same objective with ‖Phi z - y‖_2 <= eta. Appends one cone block
/// (u, r_1..r_4m) with rows Phi~ x~ + r = y~ and a final row u = eta.
ConeProgram build_noisy(const RealMatrix& phi, const QVector& y, double eta);

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling
/// and a Mehrotra predictor-corrector. Throws RankDeficient when dependent
/// equality rows survive presolve.
Solution solve(const ConeProgram& prog, const SolverSettings& settings = {});

/// Quaternion signal from the interleaved 5-blocks of x. Throws LayoutMismatch.
QVector extract_signal(const Solution& sol, std::size_t n);

/// Feasible interleaved point for x with t_k = |x_k|.
Eigen::VectorXd embed_signal(const QVector& x);

/// Residuals recomputed from (prog, sol.x, sol.y, sol.s) alone:
///   primal = ‖Ax - b‖ / (1 + ‖b‖)
///   dual   = ‖A'y + s - c‖ / (1 + ‖c‖)
///   gap    = max(|c'x - b'y|, |x's|) / (1 + |c'x|)
Residuals kkt_report(const ConeProgram& prog, const Solution& sol);

/// Debug dump "QCSSOCP v1".
void write_program(std::ostream& os, const ConeProgram& prog);

} // namespace qcs::socp
