#pragma once

#include "qcs/quat.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qcs {

/// Dense real m x n measurement operator.
using RealMatrix = Eigen::MatrixXd;

enum class MatrixKind { Gaussian, PartialOrthogonal };

std::string_view to_string(MatrixKind kind);
MatrixKind parse_matrix_kind(std::string_view text);

/// Entries i.i.d. N(0, 1), drawn row-major from the stream for `seed`.
RealMatrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

/// sqrt(n/m) times m distinct rows of a random n x n orthogonal matrix.
/// The orthogonal factor comes from Householder QR of a Gaussian matrix
/// with the column signs fixed by diag(R) > 0. Rows are kept in ascending
/// index order.
RealMatrix partial_orthogonal_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

RealMatrix make_matrix(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed);

/// Phi x computed component-wise: Phi x_r + i Phi x_i + j Phi x_j + k Phi x_k.
QVector apply(const RealMatrix& phi, const QVector& x);

enum class RipMethod { ExactBruteForce, RandomizedLowerBound, CoherenceUpperBound };

std::string_view to_string(RipMethod method);

struct RipEstimate {
    std::size_t s = 0;
    double value = 0.0;
    RipMethod method = RipMethod::ExactBruteForce;
    std::size_t trials = 0;
};

inline constexpr std::uint64_t default_support_cap = 1'000'000;

/// Number of s-subsets of n items, saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t s);

/// Eigenvalues of a small symmetric matrix, ascending, by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& a);

/// delta_s from every s-column Gram submatrix: max(lambda_max - 1, 1 - lambda_min).
/// Throws SOutOfRange, or TooManySupports when C(n, s) exceeds `cap`.
RipEstimate rip_constant_exact(const RealMatrix& phi, std::size_t s,
                               std::uint64_t cap = default_support_cap);

/// Largest |‖Phi x‖^2 / ‖x‖^2 - 1| over `trials` random s-sparse unit vectors.
/// When C(n, s) <= trials, trial t uses the t-th support in lexicographic
/// order (cycling) so that every support is visited; otherwise supports are
/// uniform random. Never exceeds the exact constant.
RipEstimate rip_constant_lower_bound(const RealMatrix& phi, std::size_t s, std::size_t trials,
                                     std::uint64_t seed);

/// max_{i != j} |<phi_i, phi_j>| / (‖phi_i‖ ‖phi_j‖). Throws ZeroColumn.
double coherence(const RealMatrix& phi);

/// Matrix file "QCSMAT v1": header `QCSMAT 1 <m> <n>`, then m rows of n values.
void write_matrix(std::ostream& os, const RealMatrix& phi);
RealMatrix read_matrix(std::istream& is);
void write_matrix_file(const std::string& path, const RealMatrix& phi);
RealMatrix read_matrix_file(const std::string& path);

} // namespace qcs
