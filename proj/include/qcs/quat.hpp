#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qcs {

/// Real quaternion q = a + b i + c j + d k.
struct Quaternion {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double a_, double b_ = 0.0, double c_ = 0.0, double d_ = 0.0)
        : a(a_), b(b_), c(c_), d(d_)
    {
    }

    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr double real() const { return a; }
    constexpr Quaternion imag() const { return {0.0, b, c, d}; }

    /// |q|^2 = a^2 + b^2 + c^2 + d^2.
    constexpr double norm_squared() const { return a * a + b * b + c * c + d * d; }
    double norm() const;

    bool is_finite() const;
    constexpr bool is_zero() const { return a == 0.0 && b == 0.0 && c == 0.0 && d == 0.0; }

    constexpr Quaternion& operator+=(const Quaternion& o)
    {
        a += o.a; b += o.b; c += o.c; d += o.d;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o)
    {
        a -= o.a; b -= o.b; c -= o.c; d -= o.d;
        return *this;
    }
    constexpr Quaternion& operator*=(double s)
    {
        a *= s; b *= s; c *= s; d *= s;
        return *this;
    }

    friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Hamilton product: ij = k, jk = i, ki = j, i^2 = j^2 = k^2 = -1.
constexpr Quaternion qmul(const Quaternion& q, const Quaternion& w)
{
    return {q.a * w.a - q.b * w.b - q.c * w.c - q.d * w.d,
            q.a * w.b + q.b * w.a + q.c * w.d - q.d * w.c,
            q.a * w.c - q.b * w.d + q.c * w.a + q.d * w.b,
            q.a * w.d + q.b * w.c - q.c * w.b + q.d * w.a};
}

constexpr Quaternion qconj(const Quaternion& q) { return {q.a, -q.b, -q.c, -q.d}; }

constexpr Quaternion operator+(Quaternion q, const Quaternion& w) { return q += w; }
constexpr Quaternion operator-(Quaternion q, const Quaternion& w) { return q -= w; }
constexpr Quaternion operator-(const Quaternion& q) { return {-q.a, -q.b, -q.c, -q.d}; }
constexpr Quaternion operator*(const Quaternion& q, const Quaternion& w) { return qmul(q, w); }
constexpr Quaternion operator*(Quaternion q, double s) { return q *= s; }
constexpr Quaternion operator*(double s, Quaternion q) { return q *= s; }

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

/// q = a + u b with b >= 0, Re(u) = 0, |u| = 1.
struct ImaginaryUnitDecomposition {
    double a = 0.0;
    double b = 0.0;
    Quaternion u = Quaternion::i();
};

/// Splits q into its real part and a unit imaginary direction. A real q has
/// no imaginary direction; u = i is returned for it.
ImaginaryUnitDecomposition imaginary_unit_decompose(const Quaternion& q);

/// Dense vector over the quaternions.
class QVector {
public:
    QVector() = default;
    explicit QVector(std::size_t n) : entries_(n) {}
    explicit QVector(std::vector<Quaternion> entries) : entries_(std::move(entries)) {}
    QVector(std::initializer_list<Quaternion> entries) : entries_(entries) {}

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    Quaternion& operator[](std::size_t i) { return entries_[i]; }
    const Quaternion& operator[](std::size_t i) const { return entries_[i]; }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    std::span<const Quaternion> entries() const { return entries_; }

    /// Real vector of one component (0 = real, 1 = i, 2 = j, 3 = k).
    std::vector<double> component(int which) const;

    friend bool operator==(const QVector&, const QVector&) = default;

private:
    std::vector<Quaternion> entries_;
};

QVector operator+(const QVector& x, const QVector& y);
QVector operator-(const QVector& x, const QVector& y);
/// Left scalar multiplication (lambda x)_i = lambda * x_i.
QVector operator*(const Quaternion& lambda, const QVector& x);
QVector operator*(double alpha, const QVector& x);

/// <x, y> = sum_i x_i conj(y_i). Throws LengthMismatch.
Quaternion inner_product(const QVector& x, const QVector& y);

enum class Norm { L0, L1, L2, Linf };

/// l_p norm of a quaternion vector. L0 counts entries that are exactly nonzero.
double lp_norm(const QVector& x, Norm p);

/// Indices i with x_i != 0.
std::vector<std::size_t> support(const QVector& x);

/// Right-hand side of the four-unit polarization identity, built from eight
/// squared norms. Equals inner_product(x, y).
Quaternion polarization_i(const QVector& x, const QVector& y);

/// Two-term polarization identity: u is the imaginary unit of <x, y>.
Quaternion polarization_ii(const QVector& x, const QVector& y);

/// Keeps the s entries of largest modulus (lowest index wins ties), zeroes
/// the rest. Throws SOutOfRange unless 0 <= s <= n.
QVector best_s_approx(const QVector& x, std::size_t s);

/// Signal file "QCSSIG v1": header `QCSSIG 1 <n>`, then n lines `a b c d`.
void write_signal(std::ostream& os, const QVector& x);
QVector read_signal(std::istream& is);
void write_signal_file(const std::string& path, const QVector& x);
QVector read_signal_file(const std::string& path);

/// Shortest-round-trip decimal used by every text format (17 significant digits).
std::string format_real(double v);

} // namespace qcs
