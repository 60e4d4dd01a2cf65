#include "agarch/error.hpp"
#include "agarch/proposal.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace agarch;
using Catch::Approx;

namespace {

Eigen::MatrixXd example_sigma() {
    Eigen::MatrixXd s(3, 3);
    s << 2.0e-4, -1.5e-4, 3.0e-5,
        -1.5e-4, 4.0e-4, -2.0e-5,
         3.0e-5, -2.0e-5, 5.0e-5;
    return s;
}

double frobenius_rel(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("fit needs a non-degenerate sample") {
    SampleAccumulator acc(3);
    for (int i = 0; i < 50; ++i) acc.add(Eigen::Vector3d(0.1, 0.8, 0.01));
    CHECK_THROWS_AS(fit(acc), DegenerateSample);

    SampleAccumulator few(3);
    few.add(Eigen::Vector3d(0.1, 0.8, 0.01));
    few.add(Eigen::Vector3d(0.2, 0.7, 0.02));
    CHECK_THROWS_AS(fit(few), DegenerateSample);
}

TEST_CASE("fit rescales the empirical covariance by (nu - 2) / nu") {
    // Six points at +-sqrt(3) on the axes give V = I exactly.
    SampleAccumulator acc(3);
    const double r = std::sqrt(3.0);
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[j] = r;
        acc.add(e);
        acc.add(-e);
    }
    REQUIRE(acc.covariance().isApprox(Eigen::Matrix3d::Identity(), 1e-14));
    const auto prop = fit(acc, 10.0);
    CHECK(prop.sigma().isApprox(0.8 * Eigen::Matrix3d::Identity(), 1e-14));
    CHECK(prop.n_samples() == 6);
    CHECK(prop.mean().norm() < 1e-15);
    CHECK(prop.covariance().isApprox(Eigen::Matrix3d::Identity(), 1e-14));
}

TEST_CASE("accumulator uses the population normaliser") {
    const double a = 0.3, b = 0.6, c = 0.02, eps = 0.125;
    SampleAccumulator acc(3);
    acc.add(Eigen::Vector3d(a, b, c));
    acc.add(Eigen::Vector3d(a + 2 * eps, b, c));
    CHECK(acc.mean().isApprox(Eigen::Vector3d(a + eps, b, c), 1e-15));
    const auto v = acc.covariance();
    CHECK(v(0, 0) == Approx(eps * eps).epsilon(1e-14));
    CHECK(v(1, 1) == 0.0);
    CHECK(v(0, 1) == 0.0);
}

TEST_CASE("accumulator matches a two-pass computation and round-trips through JSON") {
    Rng rng(1, Stream::pilot);
    SampleAccumulator acc(3);
    Eigen::MatrixXd rows(500, 3);
    for (int i = 0; i < 500; ++i) {
        const Eigen::Vector3d x(rng.normal(), 0.5 * rng.normal() + 3.0, rng.uniform());
        rows.row(i) = x.transpose();
        acc.add(x);
    }
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    const Eigen::MatrixXd centred = rows.rowwise() - mean;
    const Eigen::MatrixXd v = centred.transpose() * centred / 500.0;
    CHECK(acc.mean().isApprox(mean.transpose(), 1e-12));
    CHECK(acc.covariance().isApprox(v, 1e-12));

    const auto back = SampleAccumulator::from_json(acc.to_json());
    CHECK(back.count() == acc.count());
    CHECK(back.mean() == acc.mean());
    CHECK(back.covariance() == acc.covariance());
}

TEST_CASE("draws reproduce the location and covariance") {
    const Eigen::Vector3d m(0.1, 0.2, 0.3);
    const Eigen::MatrixXd sigma = example_sigma() * 100.0;
    const StudentTProposal prop(m, sigma, 10.0);
    Rng rng(2024, Stream::sampling);
    SampleAccumulator acc(3);
    for (int i = 0; i < 1000000; ++i) acc.add(sample(prop, rng));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(acc.mean()[j] - m[j]) < 0.01);
    CHECK(frobenius_rel(acc.covariance(), 1.25 * sigma) < 0.02);

    // fit on its own draws recovers the proposal
    const auto refit = fit(acc, 10.0);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(refit.mean()[j] - m[j]) < 0.01);
    CHECK(frobenius_rel(refit.sigma(), sigma) < 0.03);
}

TEST_CASE("tiny scale concentrates the draws") {
    const Eigen::Vector3d m(0.05, 0.9, 0.02);
    const StudentTProposal prop(m, 1e-12 * Eigen::Matrix3d::Identity(), 10.0);
    CHECK(prop.jitter() == 0.0);
    Rng rng(5, Stream::sampling);
    for (int i = 0; i < 10000; ++i) REQUIRE((sample(prop, rng) - m).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("density at the mode") {
    const Eigen::Vector3d m(0.05, 0.9, 0.02);
    const Eigen::MatrixXd sigma = example_sigma();
    const double nu = 10.0;
    const StudentTProposal prop(m, sigma, nu);
    const double want = std::lgamma((nu + 3) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(sigma.determinant()) -
                        1.5 * std::log(nu * std::numbers::pi);
    CHECK(log_density(prop, m) == Approx(want).epsilon(1e-12));

    const StudentTProposal scalar(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 10.0);
    CHECK(log_density(scalar, Eigen::VectorXd::Zero(1)) == Approx(std::log(0.38910838396603105)).epsilon(1e-13));
}

TEST_CASE("one-dimensional density integrates to one") {
    const StudentTProposal prop(Eigen::VectorXd::Constant(1, 0.7), Eigen::MatrixXd::Constant(1, 1, 2.5), 10.0);
    // Simpson's rule on [-400, 400]; the tail mass beyond is below 1e-13.
    const int n = 400000;
    const double lo = -400.0, hi = 400.0, h = (hi - lo) / n;
    double sum = 0.0;
    Eigen::VectorXd x(1);
    for (int i = 0; i <= n; ++i) {
        x[0] = lo + h * i;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::exp(log_density(prop, x));
    }
    CHECK(std::abs(sum * h / 3.0 - 1.0) < 1e-4);
}

TEST_CASE("density is symmetric about the mode and depends only on theta - M") {
    const Eigen::Vector3d m(0.05, 0.9, 0.02);
    const StudentTProposal prop(m, example_sigma(), 10.0);
    Rng rng(9, Stream::tuning);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector3d d(0.02 * rng.normal(), 0.02 * rng.normal(), 0.01 * rng.normal());
        CHECK(log_density(prop, m + d) == Approx(log_density(prop, m - d)).epsilon(1e-12));
    }

    const Eigen::Vector3d shift(1.0, -2.0, 0.5);
    const StudentTProposal moved(m + shift, example_sigma(), 10.0);
    const Eigen::Vector3d t1(0.06, 0.88, 0.025), t2(0.03, 0.93, 0.01);
    const double ratio = log_density(prop, t1) - log_density(prop, t2);
    const double moved_ratio = log_density(moved, t1 + shift) - log_density(moved, t2 + shift);
    CHECK(moved_ratio == Approx(ratio).margin(1e-9));
}

TEST_CASE("large nu approaches the Gaussian") {
    const Eigen::Vector3d m(0.05, 0.9, 0.02);
    const Eigen::MatrixXd sigma = example_sigma();
    const StudentTProposal prop(m, sigma, 1e6);
    const Eigen::MatrixXd inv = sigma.inverse();
    const Eigen::Vector3d pts[] = {m, m + Eigen::Vector3d(0.01, -0.01, 0.003), m + Eigen::Vector3d(-0.02, 0.0, 0.01)};
    for (const auto& t : pts) {
        const Eigen::Vector3d d = t - m;
        const double normal = -0.5 * (3 * std::log(2 * std::numbers::pi) + std::log(sigma.determinant())) -
                              0.5 * d.dot(inv * d);
        CHECK(std::abs(log_density(prop, t) - normal) < 1e-3);
    }
}

TEST_CASE("near-singular scale gets jitter; singular scale is degenerate") {
    Eigen::Matrix3d nearly;
    nearly << 1.0, 1.0, 0.0,
              1.0, 1.0, 0.0,
              0.0, 0.0, 1.0;
    const StudentTProposal jittered(Eigen::Vector3d::Zero(), nearly, 10.0);
    CHECK(jittered.jitter() > 0.0);
    CHECK(jittered.sigma()(0, 0) > 1.0);

    CHECK_THROWS_AS(StudentTProposal(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero(), 10.0), DegenerateSample);
    CHECK_THROWS_AS(StudentTProposal(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity(), 2.0), InvalidInput);
    CHECK_THROWS_AS(StudentTProposal(Eigen::Vector3d::Zero(), Eigen::Matrix2d::Identity(), 10.0), InvalidInput);
}

TEST_CASE("proposal JSON uses the documented keys and round-trips") {
    const StudentTProposal prop(Eigen::Vector3d(0.05, 0.9, 0.02), example_sigma(), 10.0, 4000);
    const auto j = prop.to_json();
    for (const char* key : {"mean", "sigma", "nu", "n_samples"}) CHECK(j.contains(key));
    const auto back = StudentTProposal::from_json(j);
    CHECK(back.mean() == prop.mean());
    CHECK(back.sigma() == prop.sigma());
    CHECK(back.nu() == prop.nu());
    CHECK(back.n_samples() == 4000);
    CHECK(log_density(back, Eigen::Vector3d(0.04, 0.91, 0.021)) ==
          log_density(prop, Eigen::Vector3d(0.04, 0.91, 0.021)));
}

TEST_CASE("chi-square draws have the right moments for non-integer nu") {
    Rng rng(77, Stream::sampling);
    const double nu = 7.5;
    double s = 0.0, s2 = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const double w = rng.chi_squared(nu);
        s += w;
        s2 += w * w;
    }
    const double mean = s / n;
    CHECK(mean == Approx(nu).epsilon(0.01));
    CHECK(s2 / n - mean * mean == Approx(2 * nu).epsilon(0.03));
}

TEST_CASE("rng state token restores the stream exactly") {
    Rng a(123, Stream::sampling, 2);
    (void)a.normal();  // leaves a cached variate
    const auto token = a.state_token();
    Rng b(0, Stream::tuning);
    b.restore(token);
    CHECK(a == b);
    for (int i = 0; i < 10; ++i) {
        CHECK(a.normal() == b.normal());
        CHECK(a.uniform() == b.uniform());
    }
    CHECK_FALSE(Rng(1, Stream::tuning) == Rng(1, Stream::burn_in));
    CHECK_FALSE(Rng(1, Stream::tuning, 0) == Rng(1, Stream::tuning, 1));
}
