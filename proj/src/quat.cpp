#include "qcs/quat.hpp"

#include "qcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qcs {

double Quaternion::norm() const { return std::sqrt(norm_squared()); }

bool Quaternion::is_finite() const
{
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q)
{
    return os << '(' << q.a << ", " << q.b << ", " << q.c << ", " << q.d << ')';
}

ImaginaryUnitDecomposition imaginary_unit_decompose(const Quaternion& q)
{
    ImaginaryUnitDecomposition out;
    out.a = q.a;
    out.b = q.imag().norm();
    if (out.b > 0.0) {
        out.u = {0.0, q.b / out.b, q.c / out.b, q.d / out.b};
    }
    return out;
}

std::vector<double> QVector::component(int which) const
{
    std::vector<double> out(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Quaternion& q = entries_[i];
        out[i] = which == 0 ? q.a : which == 1 ? q.b : which == 2 ? q.c : q.d;
    }
    return out;
}

namespace {

void require_same_length(const QVector& x, const QVector& y)
{
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "vector lengths " + std::to_string(x.size()) + " and " +
                        std::to_string(y.size()));
    }
}

} // namespace

QVector operator+(const QVector& x, const QVector& y)
{
    require_same_length(x, y);
    QVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + y[i];
    }
    return out;
}

QVector operator-(const QVector& x, const QVector& y)
{
    require_same_length(x, y);
    QVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] - y[i];
    }
    return out;
}

QVector operator*(const Quaternion& lambda, const QVector& x)
{
    QVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = lambda * x[i];
    }
    return out;
}

QVector operator*(double alpha, const QVector& x)
{
    QVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = alpha * x[i];
    }
    return out;
}

Quaternion inner_product(const QVector& x, const QVector& y)
{
    require_same_length(x, y);
    Quaternion sum;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * qconj(y[i]);
    }
    return sum;
}

double lp_norm(const QVector& x, Norm p)
{
    switch (p) {
    case Norm::L0:
        return static_cast<double>(
            std::count_if(x.begin(), x.end(), [](const Quaternion& q) { return !q.is_zero(); }));
    case Norm::L1: {
        double sum = 0.0;
        for (const auto& q : x) {
            sum += q.norm();
        }
        return sum;
    }
    case Norm::L2: {
        double sum = 0.0;
        for (const auto& q : x) {
            sum += q.norm_squared();
        }
        return std::sqrt(sum);
    }
    case Norm::Linf: {
        double best = 0.0;
        for (const auto& q : x) {
            best = std::max(best, q.norm());
        }
        return best;
    }
    }
    return 0.0;
}

std::vector<std::size_t> support(const QVector& x)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].is_zero()) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

double norm2_squared(const QVector& x)
{
    const double n = lp_norm(x, Norm::L2);
    return n * n;
}

// (|x + u y|^2 - |x - u y|^2) / 4 with u multiplying y from the left.
double polarization_term(const QVector& x, const QVector& y, const Quaternion& u)
{
    const QVector uy = u * y;
    return 0.25 * (norm2_squared(x + uy) - norm2_squared(x - uy));
}

} // namespace

Quaternion polarization_i(const QVector& x, const QVector& y)
{
    require_same_length(x, y);
    const double re = polarization_term(x, y, Quaternion(1.0));
    Quaternion out(re);
    out += Quaternion::i() * polarization_term(x, y, Quaternion::i());
    out += Quaternion::j() * polarization_term(x, y, Quaternion::j());
    out += Quaternion::k() * polarization_term(x, y, Quaternion::k());
    return out;
}

Quaternion polarization_ii(const QVector& x, const QVector& y)
{
    require_same_length(x, y);
    const Quaternion u = imaginary_unit_decompose(inner_product(x, y)).u;
    return Quaternion(polarization_term(x, y, Quaternion(1.0))) + u * polarization_term(x, y, u);
}

QVector best_s_approx(const QVector& x, std::size_t s)
{
    if (s > x.size()) {
        throw Error(ErrorCode::SOutOfRange,
                    "s = " + std::to_string(s) + " exceeds length " + std::to_string(x.size()));
    }
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> mod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mod[i] = x[i].norm();
    }
    // stable: equal moduli keep index order, so the lowest index is kept
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return mod[l] > mod[r]; });
    QVector out(x.size());
    for (std::size_t k = 0; k < s; ++k) {
        out[order[k]] = x[order[k]];
    }
    return out;
}

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_signal(std::ostream& os, const QVector& x)
{
    os << "QCSSIG 1 " << x.size() << '\n';
    for (const auto& q : x) {
        os << format_real(q.a) << ' ' << format_real(q.b) << ' ' << format_real(q.c) << ' '
           << format_real(q.d) << '\n';
    }
}

QVector read_signal(std::istream& is)
{
    std::string magic;
    int version = 0;
    long long n = 0;
    if (!(is >> magic >> version >> n) || magic != "QCSSIG" || version != 1 || n < 1) {
        throw Error(ErrorCode::ParseError, "bad QCSSIG header");
    }
    QVector x(static_cast<std::size_t>(n));
    for (auto& q : x) {
        if (!(is >> q.a >> q.b >> q.c >> q.d) || !q.is_finite()) {
            throw Error(ErrorCode::ParseError, "truncated or non-finite QCSSIG entry");
        }
    }
    std::string trailing;
    if (is >> trailing) {
        throw Error(ErrorCode::ParseError, "unexpected trailing data in QCSSIG file");
    }
    return x;
}

void write_signal_file(const std::string& path, const QVector& x)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    write_signal(os, x);
    if (!os) {
        throw Error(ErrorCode::IoError, "write failed: " + path);
    }
}

QVector read_signal_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    return read_signal(is);
}

} // namespace qcs
