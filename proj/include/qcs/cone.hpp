#pragma once

// Second-order cone kernels on a single block z = (z0, z1) with
// K = {z : z0 >= ‖z1‖_2}. Vectors are spans over one contiguous block.

#include <cstddef>
#include <span>

namespace qcs::socp::cone {

/// z0^2 - ‖z1‖^2, factored as (z0 - ‖z1‖)(z0 + ‖z1‖).
double jnorm_squared(std::span<const double> z);

/// z0 - ‖z1‖; nonnegative exactly on K.
double boundary_margin(std::span<const double> z);

/// Jordan product u o v = (u'v, u0 v1 + v0 u1).
void jordan_product(std::span<const double> u, std::span<const double> v, std::span<double> out);

/// Solves lambda o z = r for z (lambda interior).
void jordan_solve(std::span<const double> lambda, std::span<const double> r, std::span<double> z);

/// Nesterov-Todd scaling W = beta * [[w0, w1'], [w1, I + w1 w1'/(1 + w0)]] of a
/// primal-dual pair (x, s) in int K, so that W s = W^{-1} x. Fills `w`
/// (J-norm one, block-sized) and returns beta.
double nt_scaling(std::span<const double> x, std::span<const double> s, std::span<double> w);

/// out = W z.
void apply_w(double beta, std::span<const double> w, std::span<const double> z, std::span<double> out);

/// out = W^{-1} z.
void apply_w_inv(double beta, std::span<const double> w, std::span<const double> z,
                 std::span<double> out);

/// Largest alpha with z + alpha d in K (z interior); +infinity when unbounded.
double max_step(std::span<const double> z, std::span<const double> d);

} // namespace qcs::socp::cone
