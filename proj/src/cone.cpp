#include "qcs/cone.hpp"

#include <cmath>
#include <limits>

namespace qcs::socp::cone {

namespace {

double tail_dot(std::span<const double> u, std::span<const double> v)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) {
        sum += u[i] * v[i];
    }
    return sum;
}

double tail_norm(std::span<const double> z) { return std::sqrt(tail_dot(z, z)); }

} // namespace

double jnorm_squared(std::span<const double> z)
{
    const double t = tail_norm(z);
    return (z[0] - t) * (z[0] + t);
}

double boundary_margin(std::span<const double> z) { return z[0] - tail_norm(z); }

void jordan_product(std::span<const double> u, std::span<const double> v, std::span<double> out)
{
    const double head = u[0] * v[0] + tail_dot(u, v);
    for (std::size_t i = 1; i < u.size(); ++i) {
        out[i] = u[0] * v[i] + v[0] * u[i];
    }
    out[0] = head;
}

void jordan_solve(std::span<const double> lambda, std::span<const double> r, std::span<double> z)
{
    const double det = jnorm_squared(lambda);
    const double z0 = (lambda[0] * r[0] - tail_dot(lambda, r)) / det;
    for (std::size_t i = 1; i < lambda.size(); ++i) {
        z[i] = (r[i] - z0 * lambda[i]) / lambda[0];
    }
    z[0] = z0;
}

double nt_scaling(std::span<const double> x, std::span<const double> s, std::span<double> w)
{
    const double xn = std::sqrt(jnorm_squared(x));
    const double sn = std::sqrt(jnorm_squared(s));
    const std::size_t d = x.size();
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        dot += (x[i] / xn) * (s[i] / sn);
    }
    const double gamma = std::sqrt(0.5 * (1.0 + dot));
    w[0] = (x[0] / xn + s[0] / sn) / (2.0 * gamma);
    for (std::size_t i = 1; i < d; ++i) {
        w[i] = (x[i] / xn - s[i] / sn) / (2.0 * gamma);
    }
    // J-norm of w is one up to rounding; recompute w0 from the tail for accuracy
    w[0] = std::sqrt(1.0 + tail_dot(w, w));
    return std::sqrt(xn / sn);
}

void apply_w(double beta, std::span<const double> w, std::span<const double> z, std::span<double> out)
{
    const double wz = tail_dot(w, z);
    const double coef = z[0] + wz / (1.0 + w[0]);
    for (std::size_t i = 1; i < z.size(); ++i) {
        out[i] = beta * (z[i] + coef * w[i]);
    }
    out[0] = beta * (w[0] * z[0] + wz);
}

void apply_w_inv(double beta, std::span<const double> w, std::span<const double> z,
                 std::span<double> out)
{
    const double wz = tail_dot(w, z);
    const double coef = -z[0] + wz / (1.0 + w[0]);
    for (std::size_t i = 1; i < z.size(); ++i) {
        out[i] = (z[i] + coef * w[i]) / beta;
    }
    out[0] = (w[0] * z[0] - wz) / beta;
}

double max_step(std::span<const double> z, std::span<const double> d)
{
    constexpr double unbounded = std::numeric_limits<double>::infinity();
    const double zn = std::sqrt(jnorm_squared(z));
    if (z.size() == 1) {
        return d[0] < 0.0 ? -z[0] / d[0] : unbounded;
    }
    // Map z to the cone identity with the Lorentz boost determined by z/‖z‖_J
    // and measure how far the transformed direction can go.
    const double zbar0 = z[0] / zn;
    double zbar_jd = zbar0 * d[0];
    for (std::size_t i = 1; i < z.size(); ++i) {
        zbar_jd -= (z[i] / zn) * d[i];
    }
    const double rho0 = zbar_jd / zn;
    const double factor = (zbar_jd + d[0]) / (zbar0 + 1.0);
    double rho1 = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) {
        const double v = (d[i] - factor * (z[i] / zn)) / zn;
        rho1 += v * v;
    }
    const double step = std::sqrt(rho1) - rho0;
    return step > 0.0 ? 1.0 / step : unbounded;
}

} // namespace qcs::socp::cone
