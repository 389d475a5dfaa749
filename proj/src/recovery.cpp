#include "qcs/recovery.hpp"

#include "qcs/error.hpp"

#include <cmath>

namespace qcs {

namespace {

void check_delta(double delta)
{
    if (!(delta >= 0.0 && delta < 1.0 / 3.0)) {
        throw Error(ErrorCode::DeltaOutOfRange,
                    "delta_2s = " + format_real(delta) + " outside [0, 1/3)");
    }
}

} // namespace

TheoreticalConstants theoretical_constants(double delta_2s)
{
    check_delta(delta_2s);
    const double denom = 1.0 - 3.0 * delta_2s;
    return {2.0 * (1.0 + delta_2s) / denom, 4.0 * std::sqrt(1.0 + delta_2s) / denom};
}

RecoveryResult recover(const RealMatrix& phi, const QVector& y, double eta,
                       const socp::SolverSettings& settings)
{
    if (!(eta >= 0.0)) {
        throw Error(ErrorCode::NegativeEta, "eta must be nonnegative");
    }
    const auto n = static_cast<std::size_t>(phi.cols());
    const socp::ConeProgram prog =
        eta == 0.0 ? socp::build_noiseless(phi, y) : socp::build_noisy(phi, y, eta);
    const socp::Solution sol = socp::solve(prog, settings);
    if (sol.status == socp::Status::PrimalInfeasible) {
        throw Error(ErrorCode::InfeasibleProblem,
                    "no signal matches the observations within eta = " + format_real(eta));
    }
    RecoveryResult result;
    result.x_hat = socp::extract_signal(sol, n);
    result.l1_objective = sol.objective;
    result.solver = {sol.status, sol.iters, sol.residuals};
    result.misfit = lp_norm(apply(phi, result.x_hat) - y, Norm::L2);
    if (result.solver.status == socp::Status::Optimal && !(result.misfit <= eta + 1e-7)) {
        // solver converged on the scaled program but the signal misses the ball
        result.solver.status = socp::Status::NumericalFailure;
    }
    return result;
}

void attach_truth(RecoveryResult& result, const QVector& truth)
{
    const QVector h = result.x_hat - truth;
    result.error_l1 = lp_norm(h, Norm::L1);
    result.error_l2 = lp_norm(h, Norm::L2);
}

BoundReport check_bounds(const QVector& x, const QVector& x_hat, std::size_t s, double delta_2s,
                         double eta)
{
    if (x.size() != x_hat.size()) {
        throw Error(ErrorCode::LengthMismatch, "x and x_hat lengths differ");
    }
    if (s < 1 || s > x.size()) {
        throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside [1, n]");
    }
    if (!(eta >= 0.0)) {
        throw Error(ErrorCode::NegativeEta, "eta must be nonnegative");
    }
    const TheoreticalConstants k = theoretical_constants(delta_2s);
    const double tail = lp_norm(x - best_s_approx(x, s), Norm::L1);
    const QVector h = x_hat - x;

    BoundReport r;
    r.s = s;
    r.delta_2s = delta_2s;
    r.eta = eta;
    r.c0 = k.c0;
    r.c1 = k.c1;
    r.rhs_l2 = k.c0 / std::sqrt(static_cast<double>(s)) * tail + k.c1 * eta;
    r.lhs_l2 = lp_norm(h, Norm::L2);
    r.rhs_l1 = k.c0 * tail;
    r.lhs_l1 = lp_norm(h, Norm::L1);
    r.satisfied_l2 = r.lhs_l2 <= r.rhs_l2 + 1e-9 * (1.0 + r.rhs_l2);
    r.satisfied_l1 = r.lhs_l1 <= r.rhs_l1 + 1e-9 * (1.0 + r.rhs_l1);
    return r;
}

C0Ratios c0_ratios(const QVector& x, const QVector& x_hat, std::size_t s)
{
    if (x.size() != x_hat.size()) {
        throw Error(ErrorCode::LengthMismatch, "x and x_hat lengths differ");
    }
    if (s < 1 || s > x.size()) {
        throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside [1, n]");
    }
    // The tail is summed in index order over the entries outside the best
    // s-term support, so it is exactly non-increasing in s.
    const double tail = lp_norm(x - best_s_approx(x, s), Norm::L1);
    if (!(tail > c0_denominator_cutoff)) {
        throw Error(ErrorCode::DegenerateDenominator,
                    "‖x - x|s‖_1 = " + format_real(tail) + " at s = " + std::to_string(s));
    }
    const QVector h = x_hat - x;
    return {lp_norm(h, Norm::L1) / tail,
            std::sqrt(static_cast<double>(s)) * lp_norm(h, Norm::L2) / tail};
}

} // namespace qcs
