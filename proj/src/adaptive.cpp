#include "agarch/adaptive.hpp"

#include "agarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agarch {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

json vec_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from(const json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    return m;
}

json schedule_json(const AdaptiveSchedule& s) {
    return {{"burn_in", s.burn_in},
            {"pilot", s.pilot},
            {"refit_interval", s.refit_interval},
            {"total", s.total},
            {"freeze_after", s.freeze_after}};
}

AdaptiveSchedule schedule_from(const json& j) {
    AdaptiveSchedule s;
    s.burn_in = j.at("burn_in").get<std::size_t>();
    s.pilot = j.at("pilot").get<std::size_t>();
    s.refit_interval = j.at("refit_interval").get<std::size_t>();
    s.total = j.at("total").get<std::size_t>();
    s.freeze_after = j.at("freeze_after").get<std::size_t>();
    return s;
}

}  // namespace

AdaptiveSampler::AdaptiveSampler(LogTarget target, const Eigen::VectorXd& init, const AdaptiveSchedule& sched,
                                 double nu, RunSeed seed, const MetropolisConfig& initial_cfg)
    : target_(std::move(target)),
      sched_(sched),
      nu_(nu),
      seed_(seed),
      state_{init, LogProb::outside_support()},
      acc_(static_cast<std::size_t>(init.size())),
      rng_(seed.seed, Stream::sampling, seed.chain),
      result_{Chain(static_cast<std::size_t>(init.size())), {}, {}, {}, {}, 0.0} {
    sched_.validate();
    if (!std::isfinite(nu_) || nu_ <= 2.0) throw InvalidInput("Student's t shape nu must exceed 2");

    result_.warmup = warm_up(target_, init, initial_cfg, sched_.burn_in, seed_);
    state_ = result_.warmup.state;

    Rng pilot_rng(seed_.seed, Stream::pilot, seed_.chain);
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < sched_.pilot; ++i) {
        auto step = metropolis_step(state_, result_.warmup.cfg, target_, pilot_rng);
        accepted += step.accepted ? 1 : 0;
        state_ = std::move(step.next);
        acc_.add(state_.theta);
    }
    result_.pilot_acceptance = static_cast<double>(accepted) / static_cast<double>(sched_.pilot);
    result_.chain.reserve(sched_.total);
}

AdaptiveSampler::AdaptiveSampler(LogTarget target, AdaptiveSchedule sched, double nu, RunSeed seed,
                                 ChainState state, SampleAccumulator acc)
    : target_(std::move(target)),
      sched_(sched),
      nu_(nu),
      seed_(seed),
      state_(std::move(state)),
      acc_(std::move(acc)),
      rng_(seed.seed, Stream::sampling, seed.chain),
      result_{Chain(acc_.dim()), {}, {}, {}, {}, 0.0} {}

Chain AdaptiveSampler::run_batch() {
    if (done()) throw Error("adaptive run already reached its target length");

    const std::size_t batch = batches_done();
    const bool refit = sched_.freeze_after == 0 || result_.proposal_history.size() < sched_.freeze_after;
    if (refit) {
        try {
            proposal_.emplace(fit(acc_, nu_));
        } catch (const DegenerateSample& e) {
            throw DegenerateSample("proposal fit before batch " + std::to_string(batch + 1) + ": " + e.what());
        }
        result_.proposal_history.push_back(*proposal_);
        result_.covariance_trace.push_back(acc_.covariance());
    }

    const std::size_t n = std::min(sched_.refit_interval, sched_.total - result_.chain.size());
    Chain segment(acc_.dim());
    segment.reserve(n);
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto step = independence_mh_step(state_, *proposal_, target_, rng_);
        accepted += step.accepted ? 1 : 0;
        segment.push(step);
        state_ = std::move(step.next);
        acc_.add(state_.theta);
    }
    result_.chain.append(segment);
    result_.acceptance_trace.push_back(static_cast<double>(accepted) / static_cast<double>(n));
    return segment;
}

void AdaptiveSampler::run_to_end() {
    while (!done()) run_batch();
}

json AdaptiveSampler::checkpoint() const {
    json history = json::array();
    for (const auto& p : result_.proposal_history) history.push_back(p.to_json());
    json cov = json::array();
    for (const auto& v : result_.covariance_trace) cov.push_back(mat_json(v));

    return {
        {"version", kCheckpointVersion},
        {"schedule", schedule_json(sched_)},
        {"nu", nu_},
        {"seed", seed_.seed},
        {"chain_index", seed_.chain},
        {"position", {{"draws", result_.chain.size()}, {"batches", batches_done()}}},
        {"theta", vec_json(state_.theta)},
        {"log_post", state_.log_post.value()},
        {"rng", {{"sampling", rng_.state_token()}}},
        {"proposal", proposal_ ? proposal_->to_json() : json(nullptr)},
        {"accumulator", acc_.to_json()},
        {"acceptance_trace", result_.acceptance_trace},
        {"proposal_history", history},
        {"covariance_trace", cov},
        {"metropolis",
         {{"d", vec_json(result_.warmup.cfg.d)},
          {"burn_in_acceptance", result_.warmup.burn_in_acceptance},
          {"tuning_acceptance", result_.warmup.tuning_acceptance},
          {"pilot_acceptance", result_.pilot_acceptance}}},
    };
}

AdaptiveSampler AdaptiveSampler::resume(LogTarget target, const json& cp, Chain prior_draws) {
    if (cp.at("version").get<int>() != kCheckpointVersion) throw InvalidInput("unsupported checkpoint version");

    const auto sched = schedule_from(cp.at("schedule"));
    sched.validate();
    const RunSeed seed{cp.at("seed").get<std::uint64_t>(), cp.at("chain_index").get<std::uint32_t>()};

    const double log_post = cp.at("log_post").get<double>();
    if (!std::isfinite(log_post)) throw InvalidInput("checkpoint chain state is outside the support");
    ChainState state{vec_from(cp.at("theta")), LogProb(log_post)};

    AdaptiveSampler s(std::move(target), sched, cp.at("nu").get<double>(), seed, std::move(state),
                      SampleAccumulator::from_json(cp.at("accumulator")));
    s.rng_.restore(cp.at("rng").at("sampling").get<std::string>());
    if (!cp.at("proposal").is_null()) s.proposal_.emplace(StudentTProposal::from_json(cp.at("proposal")));

    const auto expected = cp.at("position").at("draws").get<std::size_t>();
    if (prior_draws.size() != expected || prior_draws.dim() != s.acc_.dim()) {
        throw InvalidInput("checkpoint expects " + std::to_string(expected) + " prior draws, got " +
                           std::to_string(prior_draws.size()));
    }
    s.result_.chain = std::move(prior_draws);
    s.result_.chain.reserve(sched.total);
    s.result_.acceptance_trace = cp.at("acceptance_trace").get<std::vector<double>>();
    for (const auto& p : cp.at("proposal_history")) s.result_.proposal_history.push_back(StudentTProposal::from_json(p));
    for (const auto& v : cp.at("covariance_trace")) s.result_.covariance_trace.push_back(mat_from(v));

    const auto& m = cp.at("metropolis");
    s.result_.warmup.cfg.d = vec_from(m.at("d"));
    s.result_.warmup.state = s.state_;
    s.result_.warmup.burn_in_acceptance = m.at("burn_in_acceptance").get<double>();
    s.result_.warmup.tuning_acceptance = m.at("tuning_acceptance").get<std::vector<double>>();
    s.result_.pilot_acceptance = m.at("pilot_acceptance").get<double>();
    return s;
}

AdaptiveResult run_adaptive(const LogTarget& target, const Eigen::VectorXd& init, const AdaptiveSchedule& sched,
                            double nu, RunSeed seed, const MetropolisConfig& initial_cfg) {
    AdaptiveSampler sampler(target, init, sched, nu, seed, initial_cfg);
    sampler.run_to_end();
    return std::move(sampler).take_result();
}

AdaptiveResult run_adaptive(const ReturnSeries& y, const AdaptiveSchedule& sched, double nu, RunSeed seed,
                            double sigma1_sq) {
    const auto init = default_initial_point(y.sample_variance()).to_vector();
    return run_adaptive(make_garch_target(y, sigma1_sq), init, sched, nu, seed,
                        MetropolisConfig::uniform(ParamVector::size, default_initial_window));
}

}  // namespace agarch
