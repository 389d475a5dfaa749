#include "qcs/selftest.hpp"

#include "qcs/error.hpp"
#include "qcs/random.hpp"
#include "qcs/sensing.hpp"
#include "qcs/socp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace qcs {

namespace {

Quaternion library_mul(const Quaternion& q, const Quaternion& w) { return qmul(q, w); }

Quaternion random_quaternion(Rng& rng)
{
    const double a = rng.normal();
    const double b = rng.normal();
    const double c = rng.normal();
    const double d = rng.normal();
    return {a, b, c, d};
}

QVector random_qvector(Rng& rng, std::size_t n)
{
    QVector x(n);
    for (auto& q : x) q = random_quaternion(rng);
    return x;
}

RealMatrix unit_columns(RealMatrix phi)
{
    for (Eigen::Index k = 0; k < phi.cols(); ++k) phi.col(k).normalize();
    return phi;
}

double qdist(const Quaternion& p, const Quaternion& q) { return (p - q).norm(); }

bool rel_close(const Quaternion& p, const Quaternion& q, double tol)
{
    return qdist(p, q) <= tol * std::max({1.0, p.norm(), q.norm()});
}

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& what)
{
    if (!ok) throw Failure{what};
}

std::string algebra(QuaternionMul mul, std::uint64_t seed)
{
    const Quaternion one{1, 0, 0, 0};
    const Quaternion i = Quaternion::i();
    const Quaternion j = Quaternion::j();
    const Quaternion k = Quaternion::k();
    require(mul(i, j) == k && mul(j, i) == -k, "ij = -ji = k");
    require(mul(j, k) == i && mul(k, j) == -i, "jk = -kj = i");
    require(mul(k, i) == j && mul(i, k) == -j, "ki = -ik = j");
    require(mul(i, i) == -one && mul(j, j) == -one && mul(k, k) == -one, "i^2 = j^2 = k^2 = -1");

    Rng rng(seed);
    const int count = 2000;
    for (int t = 0; t < count; ++t) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        const Quaternion r = random_quaternion(rng);
        require(rel_close(mul(mul(p, q), r), mul(p, mul(q, r)), 1e-12), "associativity");
        const double lhs = mul(p, q).norm();
        const double rhs = p.norm() * q.norm();
        require(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs), "norm multiplicativity");
        require(rel_close(qconj(mul(p, q)), mul(qconj(q), qconj(p)), 1e-12),
                "conjugation reverses products");
        const Quaternion formula =
            -0.5 * (p + mul(mul(i, p), i) + mul(mul(j, p), j) + mul(mul(k, p), k));
        require(rel_close(formula, qconj(p), 1e-12), "conjugate formula");
    }
    return std::to_string(count) + " random triples";
}

std::string polarization(std::uint64_t seed)
{
    Rng rng(seed);
    const int count = 200;
    for (int t = 0; t < count; ++t) {
        const QVector x = random_qvector(rng, 16);
        const QVector y = random_qvector(rng, 16);
        const Quaternion ip = inner_product(x, y);
        require(rel_close(polarization_i(x, y), ip, 1e-10), "identity I");
        require(rel_close(polarization_ii(x, y), ip, 1e-10), "identity II");
    }
    return std::to_string(count) + " pairs in H^16";
}

std::string inner_product_axioms(std::uint64_t seed)
{
    Rng rng(seed);
    const int count = 200;
    for (int t = 0; t < count; ++t) {
        const QVector x = random_qvector(rng, 8);
        const QVector y = random_qvector(rng, 8);
        const QVector z = random_qvector(rng, 8);
        const Quaternion lambda = random_quaternion(rng);
        require(rel_close(inner_product(x, y), qconj(inner_product(y, x)), 1e-12),
                "conjugate symmetry");
        require(rel_close(inner_product(lambda * x, y), lambda * inner_product(x, y), 1e-12),
                "left linearity");
        require(rel_close(inner_product(x + z, y), inner_product(x, y) + inner_product(z, y), 1e-12),
                "additivity");
        const Quaternion xx = inner_product(x, x);
        const double n2 = lp_norm(x, Norm::L2);
        require(xx.imag().norm() <= 1e-12 * xx.a && std::abs(xx.a - n2 * n2) <= 1e-12 * xx.a,
                "<x, x> = |x|^2");
    }
    return std::to_string(count) + " triples in H^8";
}

std::string cauchy_schwarz(std::uint64_t seed)
{
    Rng rng(seed);
    const int count = 500;
    for (int t = 0; t < count; ++t) {
        const QVector x = random_qvector(rng, 6);
        // half the pairs are nearly parallel, where the bound is tight
        QVector y = random_qvector(rng, 6);
        if (t % 2) y = random_quaternion(rng) * x + 1e-6 * y;
        const double lhs = inner_product(x, y).norm();
        const double rhs = lp_norm(x, Norm::L2) * lp_norm(y, Norm::L2);
        require(lhs <= rhs * (1.0 + 1e-12), "|<x, y>| <= |x| |y|");
    }
    return std::to_string(count) + " pairs";
}

std::string u_representation(std::uint64_t seed)
{
    Rng rng(seed);
    const int count = 1000;
    for (int t = 0; t < count; ++t) {
        Quaternion q = random_quaternion(rng);
        if (t == 0) q = {3, 0, 0, 0};
        const auto d = imaginary_unit_decompose(q);
        require(d.b >= 0.0, "b >= 0");
        require(d.u.a == 0.0 && std::abs(d.u.norm() - 1.0) <= 1e-12, "u is a unit imaginary");
        require(qdist(d.a + d.b * d.u, q) <= 1e-12 * std::max(1.0, q.norm()), "q = a + u b");
        require(rel_close(qmul(qmul(qconj(d.u), q), d.u), q, 1e-12), "conj(u) q u = q");
    }
    return std::to_string(count) + " quaternions";
}

std::string rip_extension(std::uint64_t seed)
{
    const RealMatrix phi = unit_columns(gaussian_matrix(8, 12, substream_seed(seed, 0)));
    const double delta = rip_constant_exact(phi, 2).value;
    Rng rng(substream_seed(seed, 1));
    const int count = 2000;
    for (int t = 0; t < count; ++t) {
        QVector x(12);
        const auto a = static_cast<std::size_t>(rng.below(12));
        auto b = static_cast<std::size_t>(rng.below(11));
        if (b >= a) ++b;
        x[a] = random_quaternion(rng);
        x[b] = random_quaternion(rng);
        const double nx = std::pow(lp_norm(x, Norm::L2), 2);
        const double ny = std::pow(lp_norm(apply(phi, x), Norm::L2), 2);
        require(ny <= (1.0 + delta) * nx + 1e-10, "upper RIP inequality");
        require(ny >= (1.0 - delta) * nx - 1e-10, "lower RIP inequality");
    }
    std::ostringstream os;
    os << "delta_2 = " << format_real(delta) << ", " << count << " 2-sparse vectors";
    return os.str();
}

std::string rip_disjoint(std::uint64_t seed)
{
    const RealMatrix phi = unit_columns(gaussian_matrix(8, 10, substream_seed(seed, 2)));
    const double delta = rip_constant_exact(phi, 2).value;
    Rng rng(substream_seed(seed, 3));
    const int count = 2000;
    for (int t = 0; t < count; ++t) {
        QVector x(10);
        QVector y(10);
        const auto a = static_cast<std::size_t>(rng.below(10));
        auto b = static_cast<std::size_t>(rng.below(9));
        if (b >= a) ++b;
        x[a] = random_quaternion(rng);
        y[b] = random_quaternion(rng);
        const double lhs = inner_product(apply(phi, x), apply(phi, y)).norm();
        const double rhs = std::sqrt(2.0) * delta * lp_norm(x, Norm::L2) * lp_norm(y, Norm::L2);
        require(lhs <= rhs + 1e-10, "|<Phi x, Phi y>| <= sqrt(2) delta |x| |y|");
    }
    std::ostringstream os;
    os << "delta_2 = " << format_real(delta) << ", " << count << " disjoint pairs";
    return os.str();
}

std::string solver_epigraph()
{
    socp::ConeProgram prog;
    prog.c = Eigen::Vector3d(1, 0, 0);
    prog.A = Eigen::MatrixXd::Zero(2, 3);
    prog.A(0, 1) = 1;
    prog.A(1, 2) = 1;
    prog.b = Eigen::Vector2d(3, 4);
    prog.cone_dims = {3};
    const socp::Solution sol = socp::solve(prog);
    require(sol.status == socp::Status::Optimal, "status " + std::string(socp::to_string(sol.status)));
    require(std::abs(sol.objective - 5.0) <= 1e-8, "objective " + format_real(sol.objective));
    const socp::Residuals r = socp::kkt_report(prog, sol);
    require(r.primal <= 1e-8 && r.dual <= 1e-8 && r.gap <= 1e-8, "KKT residuals");
    return "objective " + format_real(sol.objective) + " in " + std::to_string(sol.iters) +
           " iterations";
}

std::string solver_invertible()
{
    const RealMatrix phi = RealMatrix::Identity(3, 3);
    const QVector y{Quaternion{0, 2, 0, 0}, Quaternion{}, Quaternion{}};
    const socp::ConeProgram prog = socp::build_noiseless(phi, y);
    const socp::Solution sol = socp::solve(prog);
    require(sol.status == socp::Status::Optimal, "status " + std::string(socp::to_string(sol.status)));
    require(std::abs(sol.objective - 2.0) <= 1e-8, "objective " + format_real(sol.objective));
    const QVector x = socp::extract_signal(sol, 3);
    require(lp_norm(x - y, Norm::L2) <= 1e-8, "recovered signal");
    return "objective " + format_real(sol.objective);
}

struct Entry {
    const char* name;
    std::function<std::string(const SelftestOptions&)> run;
};

std::vector<Entry> registry()
{
    return {
        {"quat-algebra", [](const SelftestOptions& o) { return algebra(o.mul ? o.mul : library_mul, o.seed); }},
        {"inner-product-axioms", [](const SelftestOptions& o) { return inner_product_axioms(substream_seed(o.seed, 1)); }},
        {"polarization", [](const SelftestOptions& o) { return polarization(substream_seed(o.seed, 2)); }},
        {"cauchy-schwarz", [](const SelftestOptions& o) { return cauchy_schwarz(substream_seed(o.seed, 3)); }},
        {"u-representation", [](const SelftestOptions& o) { return u_representation(substream_seed(o.seed, 4)); }},
        {"rip-quaternion-extension", [](const SelftestOptions& o) { return rip_extension(substream_seed(o.seed, 5)); }},
        {"rip-disjoint-support", [](const SelftestOptions& o) { return rip_disjoint(substream_seed(o.seed, 6)); }},
        {"solver-epigraph-t5", [](const SelftestOptions&) { return solver_epigraph(); }},
        {"solver-invertible", [](const SelftestOptions&) { return solver_invertible(); }},
    };
}

} // namespace

std::vector<std::string> selftest_check_names()
{
    std::vector<std::string> names;
    for (const auto& e : registry()) names.emplace_back(e.name);
    return names;
}

std::vector<SelftestCheck> run_selftest_checks(const SelftestOptions& options)
{
    std::vector<SelftestCheck> out;
    for (const auto& e : registry()) {
        SelftestCheck check{e.name, false, {}};
        try {
            check.detail = e.run(options);
            check.passed = true;
        } catch (const Failure& f) {
            check.detail = f.what;
        } catch (const std::exception& ex) {
            check.detail = ex.what();
        }
        out.push_back(std::move(check));
    }
    return out;
}

int run_selftest(std::ostream& log, const SelftestOptions& options)
{
    const auto checks = run_selftest_checks(options);
    const SelftestCheck* first_failure = nullptr;
    for (const auto& c : checks) {
        log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        if (!c.passed && !first_failure) first_failure = &c;
    }
    if (first_failure) {
        log << "selftest failed: " << first_failure->name << '\n';
        return 2;
    }
    log << "selftest passed: " << checks.size() << " checks\n";
    return 0;
}

} // namespace qcs
