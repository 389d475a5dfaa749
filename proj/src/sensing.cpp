#include "qcs/sensing.hpp"

#include "qcs/error.hpp"
#include "qcs/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

namespace qcs {

std::string_view to_string(MatrixKind kind)
{
    return kind == MatrixKind::Gaussian ? "gaussian" : "partial-orthogonal";
}

MatrixKind parse_matrix_kind(std::string_view text)
{
    if (text == "gaussian") {
        return MatrixKind::Gaussian;
    }
    if (text == "partial-orthogonal") {
        return MatrixKind::PartialOrthogonal;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown matrix kind '" + std::string(text) + "'");
}

std::string_view to_string(RipMethod method)
{
    switch (method) {
    case RipMethod::ExactBruteForce: return "exact";
    case RipMethod::RandomizedLowerBound: return "lower-bound";
    case RipMethod::CoherenceUpperBound: return "coherence";
    }
    return "unknown";
}

RealMatrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m == 0 || n == 0) {
        throw Error(ErrorCode::InvalidDims, "matrix dimensions must be positive");
    }
    Rng rng(seed);
    RealMatrix phi(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            phi(r, c) = rng.normal();
        }
    }
    return phi;
}

RealMatrix partial_orthogonal_matrix(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m == 0 || m > n) {
        throw Error(ErrorCode::InvalidDims,
                    "partial orthogonal matrix needs 1 <= m <= n, got m=" + std::to_string(m) +
                        " n=" + std::to_string(n));
    }
    const RealMatrix g = gaussian_matrix(n, n, substream_seed(seed, 0));
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, n);
    const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t c = 0; c < n; ++c) {
        if (r(c, c) < 0.0) {
            q.col(c) = -q.col(c);
        }
    }

    Rng rng(substream_seed(seed, 1));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
        std::swap(rows[k], rows[k + rng.below(n - k)]);
    }
    rows.resize(m);
    std::sort(rows.begin(), rows.end());

    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
    RealMatrix phi(m, n);
    for (std::size_t k = 0; k < m; ++k) {
        phi.row(k) = scale * q.row(rows[k]);
    }
    return phi;
}

RealMatrix make_matrix(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed)
{
    return kind == MatrixKind::Gaussian ? gaussian_matrix(m, n, seed)
                                        : partial_orthogonal_matrix(m, n, seed);
}

QVector apply(const RealMatrix& phi, const QVector& x)
{
    if (static_cast<std::size_t>(phi.cols()) != x.size()) {
        throw Error(ErrorCode::DimMismatch, "matrix has " + std::to_string(phi.cols()) +
                                                " columns, vector has " +
                                                std::to_string(x.size()) + " entries");
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd comps(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Quaternion& q = x[static_cast<std::size_t>(i)];
        comps(i, 0) = q.a;
        comps(i, 1) = q.b;
        comps(i, 2) = q.c;
        comps(i, 3) = q.d;
    }
    const Eigen::MatrixXd out = phi * comps;
    QVector y(static_cast<std::size_t>(phi.rows()));
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
        y[static_cast<std::size_t>(r)] = {out(r, 0), out(r, 1), out(r, 2), out(r, 3)};
    }
    return y;
}

std::uint64_t binomial(std::size_t n, std::size_t s)
{
    if (s > n) {
        return 0;
    }
    s = std::min(s, n - s);
    constexpr auto saturated = std::numeric_limits<std::uint64_t>::max();
    unsigned __int128 acc = 1;
    for (std::size_t k = 1; k <= s; ++k) {
        // acc * (n - s + k) / k stays exact: acc is C(n - s + k - 1, k - 1)
        acc = acc * (n - s + k) / k;
        if (acc > saturated) {
            return saturated;
        }
    }
    return static_cast<std::uint64_t>(acc);
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& input)
{
    const Eigen::Index n = input.rows();
    Eigen::MatrixXd a = input;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off <= 1e-32 * std::max(1.0, a.squaredNorm())) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        ev[static_cast<std::size_t>(i)] = a(i, i);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

namespace {

void check_s(std::size_t s, std::size_t n)
{
    if (s < 1 || s > n) {
        throw Error(ErrorCode::SOutOfRange,
                    "s = " + std::to_string(s) + " outside [1, " + std::to_string(n) + "]");
    }
}

// Advances a lexicographic s-subset of {0..n-1}; returns false after the last one.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n)
{
    const std::size_t s = idx.size();
    std::size_t k = s;
    while (k > 0) {
        --k;
        if (idx[k] < n - s + k) {
            ++idx[k];
            for (std::size_t l = k + 1; l < s; ++l) {
                idx[l] = idx[l - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> first_combination(std::size_t s)
{
    std::vector<std::size_t> idx(s);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

} // namespace

RipEstimate rip_constant_exact(const RealMatrix& phi, std::size_t s, std::uint64_t cap)
{
    const auto n = static_cast<std::size_t>(phi.cols());
    check_s(s, n);
    const std::uint64_t count = binomial(n, s);
    if (count > cap) {
        throw Error(ErrorCode::TooManySupports, std::to_string(count) + " supports exceed cap " +
                                                    std::to_string(cap));
    }
    const Eigen::MatrixXd gram = phi.transpose() * phi;
    const auto ss = static_cast<Eigen::Index>(s);
    Eigen::MatrixXd sub(ss, ss);
    double delta = 0.0;
    auto idx = first_combination(s);
    do {
        for (Eigen::Index r = 0; r < ss; ++r) {
            for (Eigen::Index c = 0; c < ss; ++c) {
                sub(r, c) = gram(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]),
                                 static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
            }
        }
        const auto ev = symmetric_eigenvalues(sub);
        delta = std::max({delta, ev.back() - 1.0, 1.0 - ev.front()});
    } while (next_combination(idx, n));
    return {s, delta, RipMethod::ExactBruteForce, 0};
}

RipEstimate rip_constant_lower_bound(const RealMatrix& phi, std::size_t s, std::size_t trials,
                                     std::uint64_t seed)
{
    const auto n = static_cast<std::size_t>(phi.cols());
    check_s(s, n);
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "trials must be positive");
    }
    const bool enumerate = binomial(n, s) <= trials;
    Rng rng(seed);
    std::vector<std::size_t> pool(n);
    auto idx = first_combination(s);
    Eigen::VectorXd x(static_cast<Eigen::Index>(s));
    double best = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        if (enumerate) {
            if (t > 0 && !next_combination(idx, n)) {
                idx = first_combination(s);
            }
        } else {
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t k = 0; k < s; ++k) {
                std::swap(pool[k], pool[k + rng.below(n - k)]);
            }
            std::copy_n(pool.begin(), s, idx.begin());
        }
        for (auto& v : x) {
            v = rng.normal();
        }
        x /= x.norm();
        Eigen::VectorXd y = Eigen::VectorXd::Zero(phi.rows());
        for (std::size_t k = 0; k < s; ++k) {
            y += x(static_cast<Eigen::Index>(k)) * phi.col(static_cast<Eigen::Index>(idx[k]));
        }
        best = std::max(best, std::abs(y.squaredNorm() - 1.0));
    }
    return {s, best, RipMethod::RandomizedLowerBound, trials};
}

double coherence(const RealMatrix& phi)
{
    if (phi.cols() < 2) {
        throw Error(ErrorCode::InvalidDims, "coherence needs at least two columns");
    }
    const Eigen::VectorXd norms = phi.colwise().norm();
    for (Eigen::Index c = 0; c < phi.cols(); ++c) {
        if (norms(c) == 0.0) {
            throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(c) + " is zero");
        }
    }
    const Eigen::MatrixXd gram = phi.transpose() * phi;
    double best = 0.0;
    for (Eigen::Index i = 0; i < phi.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < phi.cols(); ++j) {
            best = std::max(best, std::abs(gram(i, j)) / (norms(i) * norms(j)));
        }
    }
    return best;
}

void write_matrix(std::ostream& os, const RealMatrix& phi)
{
    os << "QCSMAT 1 " << phi.rows() << ' ' << phi.cols() << '\n';
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
        for (Eigen::Index c = 0; c < phi.cols(); ++c) {
            if (c > 0) {
                os << ' ';
            }
            os << format_real(phi(r, c));
        }
        os << '\n';
    }
}

RealMatrix read_matrix(std::istream& is)
{
    std::string magic;
    int version = 0;
    long long m = 0;
    long long n = 0;
    if (!(is >> magic >> version >> m >> n) || magic != "QCSMAT" || version != 1 || m < 1 ||
        n < 1) {
        throw Error(ErrorCode::ParseError, "bad QCSMAT header");
    }
    RealMatrix phi(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (!(is >> phi(r, c)) || !std::isfinite(phi(r, c))) {
                throw Error(ErrorCode::ParseError, "truncated or non-finite QCSMAT entry");
            }
        }
    }
    std::string trailing;
    if (is >> trailing) {
        throw Error(ErrorCode::ParseError, "unexpected trailing data in QCSMAT file");
    }
    return phi;
}

void write_matrix_file(const std::string& path, const RealMatrix& phi)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    write_matrix(os, phi);
    if (!os) {
        throw Error(ErrorCode::IoError, "write failed: " + path);
    }
}

RealMatrix read_matrix_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    return read_matrix(is);
}

} // namespace qcs
