// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "qcs/cli.hpp"
#include "qcs/experiments.hpp"
#include "qcs/random.hpp"
#include "qcs/recovery.hpp"
#include "qcs/socp.hpp"

#include "oracles.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using qcs::Norm;
using qcs::Quaternion;
using qcs::QVector;
using qcs::RealMatrix;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

Quaternion random_q(qcs::Rng& rng)
{
    const double a = rng.normal();
    const double b = rng.normal();
    const double c = rng.normal();
    const double d = rng.normal();
    return {a, b, c, d};
}

QVector random_v(qcs::Rng& rng, std::size_t n)
{
    QVector x(n);
    for (auto& q : x) q = random_q(rng);
    return x;
}

double dist(const Quaternion& p, const Quaternion& q) { return (p - q).norm(); }

RealMatrix unit_columns(RealMatrix phi)
{
    for (Eigen::Index k = 0; k < phi.cols(); ++k) phi.col(k).normalize();
    return phi;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome algebra_suite()
{
    qcs::Rng rng(101);
    const Quaternion i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const Quaternion p = random_q(rng), q = random_q(rng), r = random_q(rng);
        auto rel = [](const Quaternion& a, const Quaternion& b) {
            return dist(a, b) / std::max({1.0, a.norm(), b.norm()});
        };
        worst = std::max(worst, rel((p * q) * r, p * (q * r)));
        worst = std::max(worst, std::abs((p * q).norm() - p.norm() * q.norm()) / std::max(1.0, p.norm() * q.norm()));
        worst = std::max(worst, rel(qcs::qconj(p * q), qcs::qconj(q) * qcs::qconj(p)));
        worst = std::max(worst, rel(-0.5 * (p + i * p * i + j * p * j + k * p * k), qcs::qconj(p)));
    }
    return {worst <= 1e-12, "10000 triples, worst relative deviation " + fmt("%.3g", worst) + " (limit 1e-12)"};
}

Outcome polarization()
{
    qcs::Rng rng(102);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const QVector x = random_v(rng, 16), y = random_v(rng, 16);
        const Quaternion ip = qcs::inner_product(x, y);
        const double scale = std::max(1.0, ip.norm());
        worst = std::max(worst, dist(qcs::polarization_i(x, y), ip) / scale);
        worst = std::max(worst, dist(qcs::polarization_ii(x, y), ip) / scale);
    }
    return {worst <= 1e-10, "1000 pairs in H^16, worst relative deviation " + fmt("%.3g", worst) + " (limit 1e-10)"};
}

Outcome rip_extension()
{
    const RealMatrix phi = unit_columns(qcs::gaussian_matrix(8, 12, 103));
    const double delta = qcs::rip_constant_exact(phi, 2).value;
    qcs::Rng rng(104);
    double worst = -1e300;
    for (int t = 0; t < 10000; ++t) {
        QVector x(12);
        const auto a = rng.below(12);
        auto b = rng.below(11);
        if (b >= a) ++b;
        x[a] = random_q(rng);
        x[b] = random_q(rng);
        const double nx = std::pow(qcs::lp_norm(x, Norm::L2), 2);
        const double ny = std::pow(qcs::lp_norm(qcs::apply(phi, x), Norm::L2), 2);
        worst = std::max({worst, ny - (1 + delta) * nx, (1 - delta) * nx - ny});
    }
    return {worst <= 1e-10, "delta_2 = " + fmt("%.6f", delta) + ", 10000 2-sparse vectors, largest violation " +
                                fmt("%.3g", worst) + " (limit 1e-10)"};
}

Outcome disjoint_support()
{
    const RealMatrix phi = unit_columns(qcs::gaussian_matrix(8, 12, 103));
    const double delta = qcs::rip_constant_exact(phi, 2).value;
    qcs::Rng rng(105);
    double worst = -1e300;
    for (int t = 0; t < 10000; ++t) {
        QVector x(12), y(12);
        const auto a = rng.below(12);
        auto b = rng.below(11);
        if (b >= a) ++b;
        x[a] = random_q(rng);
        y[b] = random_q(rng);
        const double lhs = qcs::inner_product(qcs::apply(phi, x), qcs::apply(phi, y)).norm();
        worst = std::max(worst, lhs - std::sqrt(2.0) * delta * qcs::lp_norm(x, Norm::L2) * qcs::lp_norm(y, Norm::L2));
    }
    return {worst <= 1e-10, "delta_2 = " + fmt("%.6f", delta) + ", 10000 disjoint pairs, largest violation " +
                                fmt("%.3g", worst) + " (limit 1e-10)"};
}

// Residuals from the raw vectors, without kkt_report.
double max_residual(const qcs::socp::ConeProgram& prog, const qcs::socp::Solution& sol)
{
    const double primal = (prog.A * sol.x - prog.b).norm() / (1 + prog.b.norm());
    const double dual = (prog.A.transpose() * sol.y + sol.s - prog.c).norm() / (1 + prog.c.norm());
    const double cx = prog.c.dot(sol.x);
    const double gap = std::max(std::abs(cx - prog.b.dot(sol.y)), std::abs(sol.x.dot(sol.s))) / (1 + std::abs(cx));
    return std::max({primal, dual, gap});
}

Outcome solver_correctness()
{
    bool ok = true;
    std::ostringstream detail;

    qcs::socp::ConeProgram epi;
    epi.c = Eigen::Vector3d(1, 0, 0);
    epi.A = Eigen::MatrixXd::Zero(2, 3);
    epi.A(0, 1) = 1;
    epi.A(1, 2) = 1;
    epi.b = Eigen::Vector2d(3, 4);
    epi.cone_dims = {3};
    auto sol = qcs::socp::solve(epi);
    double err = std::abs(sol.objective - 5.0);
    double res = max_residual(epi, sol);
    ok = ok && sol.status == qcs::socp::Status::Optimal && err <= 1e-8 && res <= 1e-8;
    detail << "t=5: " << qcs::socp::to_string(sol.status) << " err " << fmt("%.2g", err) << " kkt " << fmt("%.2g", res);

    const QVector y{Quaternion(0, 2), 0, 0};
    const auto inv = qcs::socp::build_noiseless(RealMatrix::Identity(3, 3), y);
    sol = qcs::socp::solve(inv);
    err = std::abs(sol.objective - 2.0);
    res = max_residual(inv, sol);
    ok = ok && sol.status == qcs::socp::Status::Optimal && err <= 1e-8 && res <= 1e-8;
    detail << "; invertible: " << qcs::socp::to_string(sol.status) << " err " << fmt("%.2g", err) << " kkt "
           << fmt("%.2g", res);

    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const RealMatrix phi = qcs::gaussian_matrix(4, 6, 200 + seed);
        qcs::Rng rng(300 + seed);
        QVector x(6);
        x[rng.below(6)] = random_q(rng);
        const QVector obs = qcs::apply(phi, x);
        const auto s = qcs::socp::solve(qcs::socp::build_noiseless(phi, obs));
        ok = ok && s.status == qcs::socp::Status::Optimal;
        worst = std::max(worst, std::abs(s.objective - oracle::admm_l1(phi, obs, 20000)));
    }
    ok = ok && worst <= 1e-3;
    detail << "; ADMM oracle worst gap " << fmt("%.2g", worst) << " (limit 1e-3)";
    return {ok, detail.str()};
}

struct PhaseRun {
    int code = -1;
    std::string phase;
    std::string rates;
};

// Criterion 6's command; run 2 adds --threads 4. Each run is executed once.
const PhaseRun& phase_run(int r)
{
    static PhaseRun runs[3];
    static bool done[3] = {false, false, false};
    if (done[r]) return runs[r];
    done[r] = true;
    const fs::path dir = fs::temp_directory_path() / ("qcs_acceptance_run" + std::to_string(r));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> args{"phase", "--n", "128", "--m", "32", "--s-min", "1", "--s-max", "8",
                                  "--trials", "100", "--seed", "1", "--out", (dir / "p.csv").string()};
    if (r == 2) args.insert(args.end(), {"--threads", "4"});
    std::ostringstream out, err;
    runs[r].code = qcs::run_cli(args, out, err);
    runs[r].phase = slurp(dir / "p.csv");
    runs[r].rates = slurp(dir / "p.csv.rates.csv");
    fs::remove_all(dir);
    return runs[r];
}

Outcome exact_recovery()
{
    const auto& run = phase_run(0);
    if (run.code != 0) return {false, "phase command exited " + std::to_string(run.code)};
    std::istringstream in(run.phase);
    const auto records = qcs::read_phase_records(in);
    const auto cells = qcs::aggregate_rates(records);
    bool ok = cells.size() == 8 && records.size() == 800;
    double worst = 1.0;
    std::ostringstream detail;
    detail << "rates";
    for (const auto& c : cells) {
        ok = ok && c.trials == 100;
        worst = std::min(worst, c.rate());
        detail << " s=" << c.s << ":" << fmt("%.2f", c.rate());
    }
    ok = ok && worst >= 0.90;
    detail << "; minimum " << fmt("%.2f", worst) << " (limit 0.90)";
    return {ok, detail.str()};
}

Outcome noisy_bound()
{
    const double eta = 0.01;
    const auto draws = qcs::certified_partial_orthogonal(60, 64, 20, 700, 200);
    const std::size_t total = draws.accepted.size() + draws.rejected;
    bool ok = draws.accepted.size() == 20 && draws.rejected * 2 <= total;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < draws.accepted.size(); ++t) {
        const auto& inst = draws.accepted[t];
        const QVector x = qcs::sparse_signal(64, 1, qcs::substream_seed(701, t));
        const QVector y = qcs::apply(inst.phi, x) + qcs::noise_vector(60, eta, qcs::substream_seed(702, t));
        auto res = qcs::recover(inst.phi, y, eta);
        qcs::attach_truth(res, x);
        const double bound = qcs::theoretical_constants(inst.delta_2).c1 * eta;
        ok = ok && res.solver.status == qcs::socp::Status::Optimal && *res.error_l2 <= bound;
        worst_ratio = std::max(worst_ratio, *res.error_l2 / bound);
    }
    return {ok, std::to_string(draws.accepted.size()) + " certified instances, " + std::to_string(draws.rejected) +
                    " of " + std::to_string(total) + " draws rejected; worst |x#-x|/(C1 eta) = " +
                    fmt("%.3g", worst_ratio) + " (limit 1)"};
}

Outcome c0_experiment()
{
    std::vector<std::size_t> s_values;
    for (std::size_t s = 1; s <= 128; ++s) s_values.push_back(s);
    bool finite = true, monotone = true, optimal = true;
    double worst = 0.0;
    std::ostringstream per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto table = qcs::run_c0_experiment(256, 32, seed, s_values);
        optimal = optimal && table.solver_status == "Optimal";
        double p1 = 0.0, p2 = 0.0, seed_max = 0.0;
        for (const auto& r : table.rows) {
            if (r.skipped || !std::isfinite(r.ratio_l1) || !std::isfinite(r.ratio_l2)) {
                finite = false;
                continue;
            }
            monotone = monotone && r.ratio_l1 >= p1 && r.ratio_l2 >= p2;
            p1 = r.ratio_l1;
            p2 = r.ratio_l2;
            seed_max = std::max({seed_max, r.ratio_l1, r.ratio_l2});
        }
        worst = std::max(worst, seed_max);
        per_seed << (seed > 1 ? " " : "") << fmt("%.3f", seed_max);
    }
    const bool ok = optimal && finite && monotone && worst <= 2.5;
    return {ok, std::string("finite=") + (finite ? "yes" : "no") + " monotone=" + (monotone ? "yes" : "no") +
                    " per-seed max [" + per_seed.str() + "], overall max " + fmt("%.4f", worst) + " (limit 2.5)"};
}

Outcome determinism()
{
    const auto& a = phase_run(0);
    const auto& b = phase_run(1);
    const auto& c = phase_run(2);
    const bool codes = a.code == 0 && b.code == 0 && c.code == 0;
    const bool repeat = a.phase == b.phase && a.rates == b.rates;
    const bool threads = a.phase == c.phase && a.rates == c.rates;
    const bool nonempty = a.phase.size() > 1000;
    return {codes && repeat && threads && nonempty,
            std::string("repeat ") + (repeat ? "identical" : "differs") + ", --threads 4 " +
                (threads ? "identical" : "differs") + " (" + std::to_string(a.phase.size()) + " bytes)"};
}

Outcome corollary_exactness()
{
    const auto draws = qcs::certified_partial_orthogonal(60, 64, 10, 900, 100);
    bool ok = draws.accepted.size() == 10;
    double worst = 0.0;
    for (std::size_t t = 0; t < draws.accepted.size(); ++t) {
        const auto& inst = draws.accepted[t];
        const QVector x = qcs::sparse_signal(64, 1, qcs::substream_seed(901, t));
        auto res = qcs::recover(inst.phi, qcs::apply(inst.phi, x), 0.0);
        qcs::attach_truth(res, x);
        ok = ok && res.solver.status == qcs::socp::Status::Optimal;
        worst = std::max(worst, *res.error_l2);
    }
    ok = ok && worst <= 1e-7;
    return {ok, std::to_string(draws.accepted.size()) + " certified instances (" + std::to_string(draws.rejected) +
                    " rejected), worst |x#-x|_2 = " + fmt("%.3g", worst) + " (limit 1e-7)"};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "algebra suite", 1.0, algebra_suite},
        {2, "polarization identities", 1.0, polarization},
        {3, "RIP extension to quaternion vectors", 10.0, rip_extension},
        {4, "disjoint-support inner-product bound", 10.0, disjoint_support},
        {5, "solver correctness", 30.0, solver_correctness},
        {6, "exact recovery at n=128, m=32", 1800.0, exact_recovery},
        {7, "noisy recovery bound", 600.0, noisy_bound},
        {8, "C0 lower-bound experiment", 1200.0, c0_experiment},
        {9, "determinism of the phase command", 3600.0, determinism},
        {10, "exact recovery under certified delta_2 < 1/3", 300.0, corollary_exactness},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool passed = o.passed && in_time;
        if (!passed) ++failures;
        std::cout << (passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << "; " << fmt("%.2f", secs) << " s (limit " << fmt("%.0f", c.time_limit_s) << " s)"
                  << (in_time ? "" : " TIME LIMIT EXCEEDED") << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
