#include "agarch/adaptive.hpp"
#include "agarch/data.hpp"
#include "agarch/error.hpp"
#include "agarch/samplers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace agarch;
using Catch::Approx;

namespace {

LogTarget constant_target(double value) {
    return [value](const Eigen::VectorXd&) { return LogProb(value); };
}

LogTarget std_normal_1d() {
    return [](const Eigen::VectorXd& x) { return LogProb(-0.5 * x[0] * x[0]); };
}

ReturnSeries small_series() {
    const ParamVector truth{0.05, 0.90, 0.02};
    return generate_synthetic({truth, 800, 1, unconditional_variance(truth), 1000});
}

AdaptiveSchedule short_schedule() {
    AdaptiveSchedule s;
    s.burn_in = 1000;
    s.pilot = 500;
    s.refit_interval = 500;
    s.total = 4000;
    return s;
}

}  // namespace

TEST_CASE("metropolis accepts every uphill move") {
    Rng rng(1, Stream::sampling);
    const auto cfg = MetropolisConfig::uniform(3, 0.1);
    const ChainState low{Eigen::Vector3d(0.1, 0.8, 0.01), LogProb(-1e9)};
    for (int i = 0; i < 1000; ++i) REQUIRE(metropolis_step(low, cfg, constant_target(0.0), rng).accepted);
}

TEST_CASE("metropolis never leaves the support") {
    Rng rng(2, Stream::sampling);
    const auto cfg = MetropolisConfig::uniform(3, 0.1);
    const ChainState at{Eigen::Vector3d(0.1, 0.8, 0.01), LogProb(0.0)};
    const LogTarget nowhere = [](const Eigen::VectorXd&) { return LogProb::outside_support(); };
    for (int i = 0; i < 1000; ++i) {
        const auto step = metropolis_step(at, cfg, nowhere, rng);
        REQUIRE_FALSE(step.accepted);
        REQUIRE(step.next.theta == at.theta);
    }

    // on the GARCH posterior, a state hugging alpha + beta = 1 rejects every crossing candidate
    const auto target = make_garch_target(small_series(), 0.4);
    const ChainState edge = make_state(target, Eigen::Vector3d(0.1, 0.8999, 0.02));
    const auto wide = MetropolisConfig::uniform(3, 0.05);
    for (int i = 0; i < 2000; ++i) {
        const auto step = metropolis_step(edge, wide, target, rng);
        REQUIRE(check_constraints(ParamVector::from_vector(step.next.theta)));
    }
}

TEST_CASE("downhill move by ln 2 is accepted half the time") {
    Rng rng(3, Stream::sampling);
    const auto cfg = MetropolisConfig::uniform(1, 1.0);
    const ChainState at{Eigen::VectorXd::Zero(1), LogProb(0.0)};
    const auto target = constant_target(-std::numbers::ln2);
    int accepted = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) accepted += metropolis_step(at, cfg, target, rng).accepted ? 1 : 0;
    CHECK(std::abs(accepted / double(n) - 0.5) < 0.01);
}

TEST_CASE("acceptance arithmetic stays finite for large log differences") {
    Rng rng(4, Stream::sampling);
    const auto cfg = MetropolisConfig::uniform(1, 1.0);
    const ChainState at{Eigen::VectorXd::Zero(1), LogProb(0.0)};
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(metropolis_step(at, cfg, constant_target(700.0), rng).accepted);
        REQUIRE_FALSE(metropolis_step(at, cfg, constant_target(-700.0), rng).accepted);
    }
}

TEST_CASE("independence kernel with proposal equal to target accepts everything") {
    const StudentTProposal prop(Eigen::Vector3d(0.05, 0.9, 0.02), Eigen::Matrix3d::Identity() * 1e-3, 10.0);
    const LogTarget target = [&prop](const Eigen::VectorXd& x) { return LogProb(log_density(prop, x)); };
    Rng rng(5, Stream::sampling);
    ChainState state = make_state(target, prop.mean());
    std::size_t accepted = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        auto step = independence_mh_step(state, prop, target, rng);
        accepted += step.accepted ? 1 : 0;
        state = std::move(step.next);
    }
    CHECK(accepted == n);
}

TEST_CASE("independence kernel rejects candidates outside the support") {
    // proposal centred far outside the constraint region
    const StudentTProposal prop(Eigen::Vector3d(0.6, 0.6, 0.02), Eigen::Matrix3d::Identity() * 1e-6, 10.0);
    const auto target = make_garch_target(small_series(), 0.4);
    ChainState state = make_state(target, Eigen::Vector3d(0.05, 0.9, 0.02));
    Rng rng(6, Stream::sampling);
    for (int i = 0; i < 500; ++i) {
        const auto step = independence_mh_step(state, prop, target, rng);
        REQUIRE_FALSE(step.accepted);
    }
}

TEST_CASE("tuning returns at once when already in band") {
    Rng rng(7, Stream::tuning);
    const auto target = std_normal_1d();
    const auto r = tune_metropolis(MetropolisConfig::uniform(1, 2.0), target, make_state(target, Eigen::VectorXd::Zero(1)),
                                   rng);
    REQUIRE(r.block_acceptance.size() == 1);
    CHECK(r.block_acceptance[0] >= 0.5);
    CHECK(r.block_acceptance[0] <= 0.85);
    CHECK(r.cfg.d[0] == 2.0);
}

TEST_CASE("tuning halves an absurd window until it fits") {
    Rng rng(8, Stream::tuning);
    const auto target = std_normal_1d();
    const double d0 = 1e4;
    const auto r = tune_metropolis(MetropolisConfig::uniform(1, d0), target, make_state(target, Eigen::VectorXd::Zero(1)),
                                   rng);
    REQUIRE(r.block_acceptance.size() > 1);
    for (std::size_t b = 0; b + 1 < r.block_acceptance.size(); ++b) CHECK(r.block_acceptance[b] < 0.5);
    CHECK(r.cfg.d[0] == d0 / std::pow(2.0, static_cast<double>(r.block_acceptance.size() - 1)));
    CHECK(r.cfg.d[0] < d0);
}

TEST_CASE("tuning converges to comparable windows from different starts") {
    const auto target = std_normal_1d();
    Rng a(9, Stream::tuning), b(10, Stream::tuning);
    const auto from_small = tune_metropolis(MetropolisConfig::uniform(1, 1.0), target,
                                            make_state(target, Eigen::VectorXd::Zero(1)), a);
    const auto from_large = tune_metropolis(MetropolisConfig::uniform(1, 100.0), target,
                                            make_state(target, Eigen::VectorXd::Zero(1)), b);
    const double ratio = from_large.cfg.d[0] / from_small.cfg.d[0];
    CHECK(ratio <= 4.0);
    CHECK(ratio >= 0.25);
}

TEST_CASE("tuning gives up with the last acceptance") {
    Rng rng(11, Stream::tuning);
    const auto target = std_normal_1d();
    try {
        (void)tune_metropolis(MetropolisConfig::uniform(1, 1e12), target, make_state(target, Eigen::VectorXd::Zero(1)),
                              rng, {500, 3});
        FAIL("expected TuningFailure");
    } catch (const TuningFailure& e) {
        CHECK(e.last_acceptance() < 0.5);
    }
}

TEST_CASE("one-dimensional harness reproduces a standard normal") {
    const auto target = std_normal_1d();
    AdaptiveSchedule sched;
    sched.total = 1000000;

    SECTION("adaptive independence sampler") {
        const auto r = run_adaptive(target, Eigen::VectorXd::Constant(1, 0.3), sched, 10.0, {17, 0},
                                    MetropolisConfig::uniform(1, 0.5));
        const auto x = r.chain.column(0);
        double m = 0.0, s2 = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        for (double v : x) s2 += (v - m) * (v - m);
        s2 /= static_cast<double>(x.size());
        CHECK(std::abs(m) < 0.01);
        CHECK(std::abs(s2 - 1.0) < 0.02);
    }
    SECTION("random-walk Metropolis") {
        const auto r = run_metropolis(target, Eigen::VectorXd::Constant(1, 0.3), sched, MetropolisConfig::uniform(1, 0.5),
                                      {18, 0});
        const auto x = r.chain.column(0);
        double m = 0.0, s2 = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        for (double v : x) s2 += (v - m) * (v - m);
        s2 /= static_cast<double>(x.size());
        CHECK(std::abs(m) < 0.01);
        CHECK(std::abs(s2 - 1.0) < 0.02);
        CHECK(r.chain.acceptance_rate() >= 0.5);
        CHECK(r.chain.acceptance_rate() <= 0.85);
    }
}

TEST_CASE("a single batch means a single fit") {
    const auto y = small_series();
    auto sched = short_schedule();
    sched.total = sched.refit_interval;
    const auto r = run_adaptive(y, sched, 10.0, {3, 0}, y.sample_variance());
    CHECK(r.proposal_history.size() == 1);
    CHECK(r.proposal_history[0].n_samples() == sched.pilot);
    CHECK(r.acceptance_trace.size() == 1);
    CHECK(r.chain.size() == sched.total);
}

TEST_CASE("adaptive run bookkeeping") {
    const auto y = small_series();
    const auto sched = short_schedule();
    const auto r = run_adaptive(y, sched, 10.0, {4, 0}, y.sample_variance());
    REQUIRE(r.chain.size() == sched.total);
    CHECK(r.proposal_history.size() == sched.batch_count());
    CHECK(r.acceptance_trace.size() == sched.batch_count());
    CHECK(r.covariance_trace.size() == sched.batch_count());
    for (std::size_t b = 0; b < r.proposal_history.size(); ++b) {
        CHECK(r.proposal_history[b].n_samples() == sched.pilot + b * sched.refit_interval);
        CHECK(r.proposal_history[b].nu() == 10.0);
    }
    for (std::size_t i = 0; i < r.chain.size(); ++i) {
        REQUIRE(check_constraints(ParamVector::from_vector(r.chain.draw(i))));
    }
    for (double a : r.acceptance_trace) {
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("freezing stops the re-fits") {
    const auto y = small_series();
    auto sched = short_schedule();
    sched.freeze_after = 2;
    const auto r = run_adaptive(y, sched, 10.0, {4, 0}, y.sample_variance());
    CHECK(r.proposal_history.size() == 2);
    CHECK(r.acceptance_trace.size() == sched.batch_count());
    CHECK(r.chain.size() == sched.total);
}

TEST_CASE("identical seeds give identical chains") {
    const auto y = small_series();
    const auto sched = short_schedule();
    const auto cfg = MetropolisConfig::uniform(3, default_initial_window);
    CHECK(run_adaptive(y, sched, 10.0, {5, 0}, 0.4).chain == run_adaptive(y, sched, 10.0, {5, 0}, 0.4).chain);
    CHECK(run_metropolis(y, sched, cfg, {5, 0}, 0.4).chain == run_metropolis(y, sched, cfg, {5, 0}, 0.4).chain);
    CHECK_FALSE(run_metropolis(y, sched, cfg, {5, 0}, 0.4).chain == run_metropolis(y, sched, cfg, {5, 1}, 0.4).chain);
}

TEST_CASE("resuming from a checkpoint continues the same chain") {
    const auto y = small_series();
    const auto sched = short_schedule();
    const auto target = make_garch_target(y, y.sample_variance());
    const auto init = default_initial_point(y.sample_variance()).to_vector();
    const auto cfg = MetropolisConfig::uniform(3, default_initial_window);

    AdaptiveSampler straight(target, init, sched, 10.0, {6, 0}, cfg);
    straight.run_to_end();

    AdaptiveSampler first(target, init, sched, 10.0, {6, 0}, cfg);
    for (int b = 0; b < 3; ++b) (void)first.run_batch();
    const auto cp = nlohmann::json::parse(first.checkpoint().dump());
    Chain prior(3);
    for (std::size_t i = 0; i < first.result().chain.size(); ++i) {
        const auto th = first.result().chain.draw(i);
        prior.push(th, first.result().chain.accepted(i), target(th).value());
    }
    auto resumed = AdaptiveSampler::resume(target, cp, std::move(prior));
    resumed.run_to_end();

    CHECK(resumed.result().chain == straight.result().chain);
    CHECK(resumed.result().acceptance_trace == straight.result().acceptance_trace);
    CHECK(resumed.result().proposal_history.size() == straight.result().proposal_history.size());

    CHECK_THROWS_AS(AdaptiveSampler::resume(target, cp, Chain(3)), InvalidInput);
}

TEST_CASE("schedule and config validation") {
    AdaptiveSchedule s;
    s.refit_interval = 0;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    s = {};
    s.refit_interval = s.total + 1;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    CHECK(AdaptiveSchedule{}.batch_count() == 100);
    auto cfg = MetropolisConfig::uniform(3, -1.0);
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    const auto target = make_garch_target(small_series(), 0.4);
    CHECK_THROWS_AS(make_state(target, Eigen::Vector3d(0.5, 0.6, 0.1)), InvalidInput);
}
