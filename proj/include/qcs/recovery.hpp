#pragma once

#include "qcs/quat.hpp"
#include "qcs/sensing.hpp"
#include "qcs/socp.hpp"

#include <optional>

namespace qcs {

/// Summary of the solver run behind a recovery.
struct SolverSummary {
    socp::Status status = socp::Status::NumericalFailure;
    int iters = 0;
    socp::Residuals residuals;
};

struct RecoveryResult {
    QVector x_hat;
    double l1_objective = 0.0;
    SolverSummary solver;
    /// Measurement misfit ‖Phi x_hat - y‖_2.
    double misfit = 0.0;
    std::optional<double> error_l1;
    std::optional<double> error_l2;
};

struct TheoreticalConstants {
    double c0 = 0.0;
    double c1 = 0.0;
};

/// C0 = 2(1 + d)/(1 - 3d), C1 = 4 sqrt(1 + d)/(1 - 3d) for d = delta_2s in [0, 1/3).
TheoreticalConstants theoretical_constants(double delta_2s);

/// argmin ‖z‖_1 subject to ‖Phi z - y‖_2 <= eta (equality-constrained when eta == 0).
///
/// Non-optimal solver outcomes are returned in `solver.status` with the last
/// iterate in x_hat. An Optimal solve whose signal misses ‖Phi x_hat - y‖ <=
/// eta + 1e-7 is downgraded to NumericalFailure. Throws InfeasibleProblem when the solver certifies
/// infeasibility, and NegativeEta / DimMismatch / RankDeficient on bad input.
RecoveryResult recover(const RealMatrix& phi, const QVector& y, double eta,
                       const socp::SolverSettings& settings = {});

/// Fills error_l1 / error_l2 against a known signal.
void attach_truth(RecoveryResult& result, const QVector& truth);

/// Absolute perfect-recovery threshold on ‖x_hat - x‖_2.
inline constexpr double perfect_recovery_threshold = 1e-7;

struct BoundReport {
    std::size_t s = 0;
    double delta_2s = 0.0;
    double eta = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    /// (C0/sqrt(s)) ‖x - x|s‖_1 + C1 eta versus ‖x_hat - x‖_2.
    double rhs_l2 = 0.0;
    double lhs_l2 = 0.0;
    /// C0 ‖x - x|s‖_1 versus ‖x_hat - x‖_1.
    double rhs_l1 = 0.0;
    double lhs_l1 = 0.0;
    bool satisfied_l2 = false;
    bool satisfied_l1 = false;

    friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

/// Evaluates the stable-recovery error bounds for a recovered signal.
BoundReport check_bounds(const QVector& x, const QVector& x_hat, std::size_t s, double delta_2s,
                         double eta);

struct C0Ratios {
    double ratio_l1 = 0.0;
    double ratio_l2 = 0.0;
};

inline constexpr double c0_denominator_cutoff = 1e-12;

/// ‖x_hat - x‖_1 / ‖x - x|s‖_1 and sqrt(s) ‖x_hat - x‖_2 / ‖x - x|s‖_1.
/// Throws DegenerateDenominator when ‖x - x|s‖_1 <= 1e-12.
C0Ratios c0_ratios(const QVector& x, const QVector& x_hat, std::size_t s);

} // namespace qcs
