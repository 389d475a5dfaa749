#include "qcs/error.hpp"
#include "qcs/experiments.hpp"
#include "qcs/random.hpp"
#include "qcs/recovery.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using qcs::Norm;
using qcs::Quaternion;
using qcs::QVector;
using qcs::RealMatrix;

namespace {

Quaternion random_q(qcs::Rng& rng)
{
    const double a = rng.normal();
    const double b = rng.normal();
    const double c = rng.normal();
    const double d = rng.normal();
    return {a, b, c, d};
}

qcs::ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const qcs::Error& e) {
        return e.code();
    }
    FAIL("expected qcs::Error");
    return qcs::ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("theoretical constants")
{
    auto k = qcs::theoretical_constants(0.0);
    CHECK(k.c0 == 2.0);
    CHECK(k.c1 == 4.0);
    k = qcs::theoretical_constants(0.25);
    CHECK(k.c0 == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(k.c1 == doctest::Approx(16.0 * std::sqrt(1.25)).epsilon(1e-15));
    CHECK(k.c1 == doctest::Approx(17.8885438).epsilon(1e-8));
    CHECK(code_of([] { (void)qcs::theoretical_constants(1.0 / 3.0); }) == qcs::ErrorCode::DeltaOutOfRange);
    CHECK(code_of([] { (void)qcs::theoretical_constants(-0.01); }) == qcs::ErrorCode::DeltaOutOfRange);
}

TEST_CASE("theoretical constants increase with delta")
{
    double prev0 = 0.0, prev1 = 0.0;
    for (int i = 0; i < 333; ++i) {
        const auto k = qcs::theoretical_constants(i / 1000.0);
        REQUIRE(k.c0 > prev0);
        REQUIRE(k.c1 > prev1);
        if (i > 0) {
            REQUIRE(k.c0 > 2.0);
            REQUIRE(k.c1 > 4.0);
        }
        prev0 = k.c0;
        prev1 = k.c1;
    }
}

TEST_CASE("recover: identity measurements")
{
    const QVector y{Quaternion(0, 2), 0, 0};
    const auto res = qcs::recover(RealMatrix::Identity(3, 3), y, 0.0);
    REQUIRE(res.solver.status == qcs::socp::Status::Optimal);
    CHECK(qcs::lp_norm(res.x_hat - y, Norm::L2) <= 1e-8);
    CHECK(!res.error_l2.has_value());
}

TEST_CASE("recover: radius covering y gives zero")
{
    const RealMatrix phi = qcs::gaussian_matrix(6, 16, 2);
    const QVector y = qcs::apply(phi, qcs::sparse_signal(16, 3, 2));
    const auto res = qcs::recover(phi, y, qcs::lp_norm(y, Norm::L2) * 1.001);
    REQUIRE(res.solver.status == qcs::socp::Status::Optimal);
    CHECK(qcs::lp_norm(res.x_hat, Norm::L2) <= 1e-7);
}

TEST_CASE("recover: 4-sparse signal from 32 x 128 measurements")
{
    const RealMatrix phi = qcs::gaussian_matrix(32, 128, 2024);
    const QVector x = qcs::sparse_signal(128, 4, 2025);
    const QVector y = qcs::apply(phi, x);
    auto res = qcs::recover(phi, y, 0.0);
    REQUIRE(res.solver.status == qcs::socp::Status::Optimal);
    qcs::attach_truth(res, x);
    CHECK(*res.error_l2 <= 1e-7);
    CHECK(*res.error_l1 >= *res.error_l2);
    CHECK(res.l1_objective == doctest::Approx(qcs::lp_norm(res.x_hat, Norm::L1)).epsilon(1e-9));
    CHECK(res.misfit <= 1e-7);

    // no kernel direction lowers the l1 norm of the minimizer
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(phi);
    const Eigen::MatrixXd kernel = lu.kernel();
    REQUIRE(kernel.cols() == 96);
    qcs::Rng rng(7);
    const double base = qcs::lp_norm(res.x_hat, Norm::L1);
    for (int t = 0; t < 100; ++t) {
        const double scale = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
        QVector v(128);
        for (int c = 0; c < 4; ++c) {
            Eigen::VectorXd coeff(kernel.cols());
            for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = rng.normal();
            const Eigen::VectorXd dir = kernel * coeff;
            for (std::size_t k = 0; k < 128; ++k) {
                const double val = scale * dir(static_cast<Eigen::Index>(k)) / dir.norm();
                if (c == 0) v[k].a = val;
                if (c == 1) v[k].b = val;
                if (c == 2) v[k].c = val;
                if (c == 3) v[k].d = val;
            }
        }
        REQUIRE(qcs::lp_norm(qcs::apply(phi, v), Norm::L2) <= 1e-10);
        REQUIRE(qcs::lp_norm(res.x_hat + v, Norm::L1) >= base - 1e-7);
    }
}

TEST_CASE("recover: noisy solution stays in the ball")
{
    const RealMatrix phi = qcs::gaussian_matrix(20, 50, 3);
    const QVector x = qcs::sparse_signal(50, 3, 3);
    const QVector y = qcs::apply(phi, x) + qcs::noise_vector(20, 0.05, 4);
    const auto res = qcs::recover(phi, y, 0.05);
    REQUIRE(res.solver.status == qcs::socp::Status::Optimal);
    CHECK(res.misfit <= 0.05 + 1e-7);
    CHECK(res.l1_objective == doctest::Approx(qcs::lp_norm(res.x_hat, Norm::L1)).epsilon(1e-9));
    CHECK(res.l1_objective <= qcs::lp_norm(x, Norm::L1) + 1e-7);
}

TEST_CASE("recover: errors")
{
    RealMatrix phi(2, 2);
    phi << 1, 0, 1, 0;
    CHECK(code_of([&] { (void)qcs::recover(phi, QVector{1, 2}, 0.0); }) == qcs::ErrorCode::InfeasibleProblem);
    CHECK(code_of([&] { (void)qcs::recover(phi, QVector{1, 1}, -1.0); }) == qcs::ErrorCode::NegativeEta);
    CHECK(code_of([&] { (void)qcs::recover(phi, QVector{1}, 0.0); }) == qcs::ErrorCode::DimMismatch);
    RealMatrix dep(3, 3);
    dep << 1, 0, 0, 0, 1, 0, 1, 1, 0;
    CHECK(code_of([&] { (void)qcs::recover(dep, QVector{1, 1, 2}, 0.0); }) == qcs::ErrorCode::RankDeficient);
}

TEST_CASE("check_bounds examples")
{
    const QVector x{Quaternion(1, 2), 0, Quaternion(0, 0, 3)};
    auto rep = qcs::check_bounds(x, x, 2, 0.1, 0.0);
    CHECK(rep.lhs_l2 == 0.0);
    CHECK(rep.rhs_l2 == 0.0);
    CHECK(rep.satisfied_l2);
    CHECK(rep.satisfied_l1);

    rep = qcs::check_bounds(x, x, 1, 0.1, 0.0);
    CHECK(rep.lhs_l2 == 0.0);
    CHECK(rep.rhs_l2 > 0.0);
    CHECK(rep.satisfied_l2);
    const auto k = qcs::theoretical_constants(0.1);
    CHECK(rep.rhs_l1 == doctest::Approx(k.c0 * std::sqrt(5.0)).epsilon(1e-15));
    CHECK(rep.c1 == k.c1);

    QVector far = x;
    far[1] = Quaternion(100);
    rep = qcs::check_bounds(x, far, 2, 0.1, 0.5);
    CHECK(rep.lhs_l2 == 100.0);
    CHECK(rep.rhs_l2 == doctest::Approx(k.c1 * 0.5).epsilon(1e-15));
    CHECK_FALSE(rep.satisfied_l2);
    CHECK_FALSE(rep.satisfied_l1);

    CHECK(code_of([&] { (void)qcs::check_bounds(x, x, 1, 0.4, 0.0); }) == qcs::ErrorCode::DeltaOutOfRange);
    CHECK(code_of([&] { (void)qcs::check_bounds(x, x, 0, 0.1, 0.0); }) == qcs::ErrorCode::SOutOfRange);
    CHECK(code_of([&] { (void)qcs::check_bounds(x, QVector(2), 1, 0.1, 0.0); }) == qcs::ErrorCode::LengthMismatch);
}

TEST_CASE("check_bounds satisfied flags follow the tolerance rule")
{
    qcs::Rng rng(12);
    for (int t = 0; t < 500; ++t) {
        QVector x(8), xh(8);
        for (std::size_t i = 0; i < 8; ++i) {
            x[i] = random_q(rng);
            xh[i] = x[i] + (0.3 * rng.uniform()) * random_q(rng);
        }
        const auto rep = qcs::check_bounds(x, xh, 1 + rng.below(4), 0.3 * rng.uniform(), 0.2 * rng.uniform());
        REQUIRE(rep.satisfied_l2 == (rep.lhs_l2 <= rep.rhs_l2 + 1e-9 * (1 + rep.rhs_l2)));
        REQUIRE(rep.satisfied_l1 == (rep.lhs_l1 <= rep.rhs_l1 + 1e-9 * (1 + rep.rhs_l1)));
    }
}

TEST_CASE("check_bounds reads only norms")
{
    qcs::Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        QVector x(6), xh(6);
        for (std::size_t i = 0; i < 6; ++i) {
            x[i] = random_q(rng);
            xh[i] = random_q(rng);
        }
        // unit quaternion with exactly representable components
        const Quaternion u{0.5, 0.5, 0.5, 0.5};
        const auto a = qcs::check_bounds(x, xh, 2, 0.2, 0.1);
        const auto b = qcs::check_bounds(u * x, u * xh, 2, 0.2, 0.1);
        REQUIRE(a.lhs_l2 == doctest::Approx(b.lhs_l2).epsilon(1e-14));
        REQUIRE(a.rhs_l2 == doctest::Approx(b.rhs_l2).epsilon(1e-14));
        REQUIRE(a.lhs_l1 == doctest::Approx(b.lhs_l1).epsilon(1e-14));
        REQUIRE(a.rhs_l1 == doctest::Approx(b.rhs_l1).epsilon(1e-14));
        REQUIRE(a.satisfied_l2 == b.satisfied_l2);
        REQUIRE(a.satisfied_l1 == b.satisfied_l1);
    }
}

TEST_CASE("bounds hold on a certified partial-orthogonal instance")
{
    const auto draws = qcs::certified_partial_orthogonal(60, 64, 1, 5, 20);
    REQUIRE(draws.accepted.size() == 1);
    const auto& inst = draws.accepted.front();
    const QVector x = qcs::sparse_signal(64, 1, 6);
    const double eta = 0.01;
    const QVector y = qcs::apply(inst.phi, x) + qcs::noise_vector(60, eta, 7);
    const auto res = qcs::recover(inst.phi, y, eta);
    REQUIRE(res.solver.status == qcs::socp::Status::Optimal);
    const auto rep = qcs::check_bounds(x, res.x_hat, 1, inst.delta_2, eta);
    CHECK(rep.satisfied_l2);
    CHECK(rep.lhs_l2 <= qcs::theoretical_constants(inst.delta_2).c1 * eta);

    const auto exact = qcs::recover(inst.phi, qcs::apply(inst.phi, x), 0.0);
    REQUIRE(exact.solver.status == qcs::socp::Status::Optimal);
    const auto rep0 = qcs::check_bounds(x, exact.x_hat, 1, inst.delta_2, 0.0);
    CHECK(rep0.satisfied_l1);
    CHECK(rep0.satisfied_l2);
    CHECK(rep0.lhs_l2 <= 1e-7);
}

TEST_CASE("c0 ratios")
{
    const QVector x{1, 2, Quaternion(0, 3)};
    auto r = qcs::c0_ratios(x, x, 1);
    CHECK(r.ratio_l1 == 0.0);
    CHECK(r.ratio_l2 == 0.0);
    r = qcs::c0_ratios(QVector{1, 1}, QVector{1, 0}, 1);
    CHECK(r.ratio_l1 == 1.0);
    CHECK(r.ratio_l2 == 1.0);
    CHECK(code_of([] { (void)qcs::c0_ratios(QVector{1, 0}, QVector{0, 0}, 1); }) == qcs::ErrorCode::DegenerateDenominator);
    CHECK(code_of([] { (void)qcs::c0_ratios(QVector{1, 1e-13}, QVector{0, 0}, 1); }) == qcs::ErrorCode::DegenerateDenominator);
}

TEST_CASE("c0 ratios are non-decreasing in s")
{
    qcs::Rng rng(14);
    for (int t = 0; t < 50; ++t) {
        QVector x(40), xh(40);
        for (std::size_t i = 0; i < 40; ++i) {
            x[i] = random_q(rng);
            xh[i] = x[i] + 0.1 * random_q(rng);
        }
        double p1 = 0, p2 = 0;
        for (std::size_t s = 1; s <= 20; ++s) {
            const auto r = qcs::c0_ratios(x, xh, s);
            REQUIRE(r.ratio_l1 >= p1);
            REQUIRE(r.ratio_l2 >= p2);
            p1 = r.ratio_l1;
            p2 = r.ratio_l2;
        }
    }
}
