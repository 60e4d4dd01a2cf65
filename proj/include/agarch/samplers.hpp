#pragma once

#include "agarch/model.hpp"
#include "agarch/proposal.hpp"
#include "agarch/rng.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace agarch {

/// Unnormalised log target density; points outside the support return LogProb::outside_support().
using LogTarget = std::function<LogProb(const Eigen::VectorXd&)>;

/// Log-posterior of GARCH(1,1) under the truncated flat prior, as a LogTarget over (alpha, beta, omega).
[[nodiscard]] LogTarget make_garch_target(ReturnSeries y, double sigma1_sq);

struct ChainState {
    Eigen::VectorXd theta;
    LogProb log_post = LogProb::outside_support();
};

/// Evaluates the target at theta; throws InvalidInput if theta lies outside the support.
[[nodiscard]] ChainState make_state(const LogTarget& target, Eigen::VectorXd theta);

struct StepResult {
    ChainState next;
    bool accepted = false;
};

/**
 * Ordered record of draws with per-draw acceptance flags and cached
 * log-posterior values. Draws are stored row-major in a flat buffer.
 */
class Chain {
public:
    explicit Chain(std::size_t dim = ParamVector::size) : dim_(dim) {}

    void push(const Eigen::Ref<const Eigen::VectorXd>& draw, bool accepted, double log_post);
    void push(const StepResult& step) { push(step.next.theta, step.accepted, step.next.log_post.value()); }
    void append(const Chain& other);
    void reserve(std::size_t n);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return accepted_.size(); }
    [[nodiscard]] bool empty() const noexcept { return accepted_.empty(); }

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }
    [[nodiscard]] Eigen::VectorXd draw(std::size_t i) const;
    [[nodiscard]] bool accepted(std::size_t i) const { return accepted_[i] != 0; }
    [[nodiscard]] double log_post(std::size_t i) const { return log_posts_[i]; }
    [[nodiscard]] std::vector<double> column(std::size_t j) const;

    /// Fraction of accepted moves over the whole chain.
    [[nodiscard]] double acceptance_rate() const;

    friend bool operator==(const Chain&, const Chain&) = default;

private:
    std::size_t dim_;
    std::vector<double> values_;
    std::vector<std::uint8_t> accepted_;
    std::vector<double> log_posts_;
};

struct AdaptiveSchedule {
    std::size_t burn_in = 3000;          ///< Metropolis draws discarded before anything is kept
    std::size_t pilot = 1000;            ///< Metropolis draws that seed the first fit
    std::size_t refit_interval = 1000;   ///< independence-MH draws between re-fits
    std::size_t total = 100000;          ///< retained draws
    std::size_t freeze_after = 0;        ///< stop re-fitting after this many fits; 0 = never

    /// Throws InvalidInput unless every count is positive and refit_interval <= total.
    void validate() const;
    /// Number of refit batches needed to reach total.
    [[nodiscard]] std::size_t batch_count() const noexcept {
        return (total + refit_interval - 1) / refit_interval;
    }
};

struct MetropolisConfig {
    /// Per-component window widths: theta'_j = theta_j + d_j (r_j - 0.5).
    Eigen::VectorXd d;
    double target_acceptance_floor = 0.5;
    double target_acceptance_ceiling = 0.85;

    void validate() const;
    [[nodiscard]] static MetropolisConfig uniform(std::size_t dim, double width);
};

/// Same initial window for all three GARCH parameters.
inline constexpr double default_initial_window = 0.01;

/// Seed plus chain index; together they select the per-chain substreams.
struct RunSeed {
    std::uint64_t seed = 0;
    std::uint32_t chain = 0;
};

/// One random-walk Metropolis update with uniform per-component windows.
[[nodiscard]] StepResult metropolis_step(const ChainState& current, const MetropolisConfig& cfg,
                                         const LogTarget& target, Rng& rng);

/// One independence Metropolis-Hastings update with candidate drawn from prop.
[[nodiscard]] StepResult independence_mh_step(const ChainState& current, const StudentTProposal& prop,
                                              const LogTarget& target, Rng& rng);

struct TuningOptions {
    std::size_t block_size = 500;
    std::size_t max_blocks = 20;
};

struct TuneResult {
    MetropolisConfig cfg;
    ChainState state;                      ///< chain position after the last pilot block
    std::vector<double> block_acceptance;  ///< one entry per pilot block
};

/**
 * Pilot-block tuning of the Metropolis windows.
 *
 * After each block: acceptance below the floor halves every d_j, above the
 * ceiling doubles every d_j. Returns as soon as a block lands inside the
 * band; throws TuningFailure after max_blocks.
 */
[[nodiscard]] TuneResult tune_metropolis(const MetropolisConfig& cfg, const LogTarget& target,
                                         const ChainState& start, Rng& rng, const TuningOptions& opts = {});

/// Outcome of tuning plus burn-in, shared by both samplers.
struct WarmupResult {
    MetropolisConfig cfg;  ///< per-parameter windows used after burn-in
    ChainState state;
    double burn_in_acceptance = 0.0;
    std::vector<double> tuning_acceptance;
};

/**
 * Scalar tuning, burn_in discarded Metropolis draws, then per-parameter
 * windows proportional to the burn-in posterior scales, re-tuned into the band.
 */
[[nodiscard]] WarmupResult warm_up(const LogTarget& target, const Eigen::VectorXd& init,
                                   const MetropolisConfig& initial, std::size_t burn_in, RunSeed seed,
                                   const TuningOptions& opts = {});

struct MetropolisResult {
    Chain chain;
    std::vector<double> acceptance_trace;  ///< per refit_interval block of retained draws
    WarmupResult warmup;
};

[[nodiscard]] MetropolisResult run_metropolis(const LogTarget& target, const Eigen::VectorXd& init,
                                              const AdaptiveSchedule& sched, const MetropolisConfig& cfg,
                                              RunSeed seed);

/// GARCH overload: starts from default_initial_point(sample variance).
[[nodiscard]] MetropolisResult run_metropolis(const ReturnSeries& y, const AdaptiveSchedule& sched,
                                              const MetropolisConfig& cfg, RunSeed seed, double sigma1_sq);

}  // namespace agarch
