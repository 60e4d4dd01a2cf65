#pragma once

#include "agarch/proposal.hpp"
#include "agarch/samplers.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace agarch {

struct AdaptiveResult {
    Chain chain;                                    ///< independence-MH draws only, length sched.total
    std::vector<StudentTProposal> proposal_history; ///< one entry per fit
    std::vector<double> acceptance_trace;           ///< one entry per batch
    std::vector<Eigen::MatrixXd> covariance_trace;  ///< empirical V used by each fit
    WarmupResult warmup;
    double pilot_acceptance = 0.0;
};

/**
 * Adaptive construction driver.
 *
 * Construction performs the warm-up (tuning and discarded burn-in) and the
 * pilot Metropolis run whose draws seed the accumulator. Each batch then
 * re-fits the Student's t proposal from every retained draw so far (pilot
 * included) and runs refit_interval independence-MH steps with it.
 *
 * The sampler can be checkpointed between batches. The checkpoint holds the
 * schedule position, chain state, sampling-stream RNG state, accumulator and
 * proposal; the draws themselves are supplied again on resume.
 */
class AdaptiveSampler {
public:
    AdaptiveSampler(LogTarget target, const Eigen::VectorXd& init, const AdaptiveSchedule& sched, double nu,
                    RunSeed seed, const MetropolisConfig& initial_cfg);

    [[nodiscard]] bool done() const noexcept { return result_.chain.size() >= sched_.total; }
    [[nodiscard]] std::size_t batches_done() const noexcept { return result_.acceptance_trace.size(); }

    /// Runs one fit + batch. Returns the draws produced by this batch.
    Chain run_batch();
    void run_to_end();

    [[nodiscard]] const AdaptiveResult& result() const noexcept { return result_; }
    [[nodiscard]] AdaptiveResult take_result() && { return std::move(result_); }

    [[nodiscard]] nlohmann::json checkpoint() const;
    /// Restores a sampler from checkpoint(); prior_draws must be the chain produced up to that point.
    [[nodiscard]] static AdaptiveSampler resume(LogTarget target, const nlohmann::json& checkpoint,
                                                Chain prior_draws);

private:
    AdaptiveSampler(LogTarget target, AdaptiveSchedule sched, double nu, RunSeed seed, ChainState state,
                    SampleAccumulator acc);

    LogTarget target_;
    AdaptiveSchedule sched_;
    double nu_;
    RunSeed seed_;
    ChainState state_;
    SampleAccumulator acc_;
    Rng rng_;
    std::optional<StudentTProposal> proposal_;
    AdaptiveResult result_;
};

[[nodiscard]] AdaptiveResult run_adaptive(const LogTarget& target, const Eigen::VectorXd& init,
                                          const AdaptiveSchedule& sched, double nu, RunSeed seed,
                                          const MetropolisConfig& initial_cfg);

/// GARCH overload: starts from default_initial_point(sample variance) with the default window.
[[nodiscard]] AdaptiveResult run_adaptive(const ReturnSeries& y, const AdaptiveSchedule& sched, double nu,
                                          RunSeed seed, double sigma1_sq);

}  // namespace agarch
