#include "agarch/samplers.hpp"

#include "agarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agarch {

namespace {

// Window width per burn-in standard deviation when switching to per-parameter windows.
constexpr double kWindowPerStd = 2.0;
constexpr std::size_t kMinScaleDraws = 20;

bool accept_log_ratio(double log_ratio, Rng& rng) {
    if (log_ratio >= 0.0) return true;
    // exp of a non-positive argument cannot overflow; it underflows to 0 below ~-745.
    return rng.uniform() < std::exp(log_ratio);
}

}  // namespace

LogTarget make_garch_target(ReturnSeries y, double sigma1_sq) {
    if (!std::isfinite(sigma1_sq) || sigma1_sq <= 0.0) {
        throw InvalidInput("initial volatility sigma1^2 must be finite and positive");
    }
    return [y = std::move(y), sigma1_sq](const Eigen::VectorXd& theta) {
        const ParamVector p = ParamVector::from_vector(theta);
        if (!p.is_finite()) return LogProb::outside_support();
        return log_posterior(p, y, sigma1_sq);
    };
}

ChainState make_state(const LogTarget& target, Eigen::VectorXd theta) {
    const LogProb lp = target(theta);
    if (!lp.in_support()) throw InvalidInput("starting point lies outside the target's support");
    return {std::move(theta), lp};
}

// ---------------------------------------------------------------------------
// Chain
// ---------------------------------------------------------------------------

void Chain::push(const Eigen::Ref<const Eigen::VectorXd>& draw, bool accepted, double log_post) {
    if (static_cast<std::size_t>(draw.size()) != dim_) throw InvalidInput("draw dimension does not match chain");
    values_.insert(values_.end(), draw.data(), draw.data() + draw.size());
    accepted_.push_back(accepted ? 1 : 0);
    log_posts_.push_back(log_post);
}

void Chain::append(const Chain& other) {
    if (other.dim_ != dim_) throw InvalidInput("cannot append chains of different dimension");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    accepted_.insert(accepted_.end(), other.accepted_.begin(), other.accepted_.end());
    log_posts_.insert(log_posts_.end(), other.log_posts_.begin(), other.log_posts_.end());
}

void Chain::reserve(std::size_t n) {
    values_.reserve(n * dim_);
    accepted_.reserve(n);
    log_posts_.reserve(n);
}

Eigen::VectorXd Chain::draw(std::size_t i) const {
    return Eigen::Map<const Eigen::VectorXd>(values_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
}

std::vector<double> Chain::column(std::size_t j) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i * dim_ + j];
    return out;
}

double Chain::acceptance_rate() const {
    if (accepted_.empty()) return 0.0;
    std::size_t n = 0;
    for (auto a : accepted_) n += a;
    return static_cast<double>(n) / static_cast<double>(accepted_.size());
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void AdaptiveSchedule::validate() const {
    if (burn_in == 0 || pilot == 0 || refit_interval == 0 || total == 0) {
        throw InvalidInput("schedule counts (burn-in, pilot, refit interval, total) must be positive");
    }
    if (refit_interval > total) {
        throw InvalidInput("refit interval must not exceed the total number of draws");
    }
}

void MetropolisConfig::validate() const {
    if (d.size() == 0) throw InvalidInput("Metropolis window vector is empty");
    for (Eigen::Index j = 0; j < d.size(); ++j) {
        if (!std::isfinite(d[j]) || d[j] <= 0.0) throw InvalidInput("Metropolis windows must be positive");
    }
    if (!(target_acceptance_floor > 0.0 && target_acceptance_floor < target_acceptance_ceiling &&
          target_acceptance_ceiling < 1.0)) {
        throw InvalidInput("acceptance band must satisfy 0 < floor < ceiling < 1");
    }
}

MetropolisConfig MetropolisConfig::uniform(std::size_t dim, double width) {
    MetropolisConfig cfg;
    cfg.d = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), width);
    return cfg;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

StepResult metropolis_step(const ChainState& current, const MetropolisConfig& cfg, const LogTarget& target,
                           Rng& rng) {
    Eigen::VectorXd candidate = current.theta;
    for (Eigen::Index j = 0; j < candidate.size(); ++j) {
        candidate[j] += cfg.d[j] * (rng.uniform() - 0.5);
    }
    const LogProb lp = target(candidate);
    if (!lp.in_support() || !current.log_post.in_support()) {
        return {current, false};
    }
    if (accept_log_ratio(lp.value() - current.log_post.value(), rng)) {
        return {{std::move(candidate), lp}, true};
    }
    return {current, false};
}

StepResult independence_mh_step(const ChainState& current, const StudentTProposal& prop,
                                const LogTarget& target, Rng& rng) {
    Eigen::VectorXd candidate = sample(prop, rng);
    const LogProb lp = target(candidate);
    if (!lp.in_support() || !current.log_post.in_support()) {
        return {current, false};
    }
    const double log_ratio = (lp.value() - current.log_post.value()) +
                             (log_density(prop, current.theta) - log_density(prop, candidate));
    if (accept_log_ratio(log_ratio, rng)) {
        return {{std::move(candidate), lp}, true};
    }
    return {current, false};
}

// ---------------------------------------------------------------------------
// Tuning and warm-up
// ---------------------------------------------------------------------------

TuneResult tune_metropolis(const MetropolisConfig& cfg, const LogTarget& target, const ChainState& start,
                           Rng& rng, const TuningOptions& opts) {
    cfg.validate();
    if (static_cast<std::size_t>(cfg.d.size()) != static_cast<std::size_t>(start.theta.size())) {
        throw InvalidInput("window vector dimension does not match the chain state");
    }
    if (opts.block_size == 0 || opts.max_blocks == 0) throw InvalidInput("tuning blocks must be non-empty");

    TuneResult out{cfg, start, {}};
    double acceptance = 0.0;
    for (std::size_t block = 0; block < opts.max_blocks; ++block) {
        std::size_t accepted = 0;
        for (std::size_t i = 0; i < opts.block_size; ++i) {
            auto step = metropolis_step(out.state, out.cfg, target, rng);
            accepted += step.accepted ? 1 : 0;
            out.state = std::move(step.next);
        }
        acceptance = static_cast<double>(accepted) / static_cast<double>(opts.block_size);
        out.block_acceptance.push_back(acceptance);
        if (acceptance < cfg.target_acceptance_floor) {
            out.cfg.d *= 0.5;
        } else if (acceptance > cfg.target_acceptance_ceiling) {
            out.cfg.d *= 2.0;
        } else {
            return out;
        }
    }
    throw TuningFailure("Metropolis tuning did not reach the acceptance band in " +
                            std::to_string(opts.max_blocks) + " blocks (last acceptance " +
                            std::to_string(acceptance) + ")",
                        acceptance);
}

WarmupResult warm_up(const LogTarget& target, const Eigen::VectorXd& init, const MetropolisConfig& initial,
                     std::size_t burn_in, RunSeed seed, const TuningOptions& opts) {
    Rng tune_rng(seed.seed, Stream::tuning, seed.chain);
    Rng burn_rng(seed.seed, Stream::burn_in, seed.chain);

    WarmupResult out;
    auto tuned = tune_metropolis(initial, target, make_state(target, init), tune_rng, opts);
    out.tuning_acceptance = tuned.block_acceptance;

    Chain burn(static_cast<std::size_t>(init.size()));
    burn.reserve(burn_in);
    ChainState state = std::move(tuned.state);
    for (std::size_t i = 0; i < burn_in; ++i) {
        auto step = metropolis_step(state, tuned.cfg, target, burn_rng);
        burn.push(step);
        state = std::move(step.next);
    }
    out.burn_in_acceptance = burn.acceptance_rate();

    // Switch to per-parameter windows scaled by the spread of the second half of burn-in.
    MetropolisConfig scaled = tuned.cfg;
    const std::size_t from = burn.size() / 2;
    const std::size_t m = burn.size() - from;
    bool usable = m >= kMinScaleDraws;
    for (std::size_t j = 0; usable && j < burn.dim(); ++j) {
        double mean = 0.0;
        for (std::size_t i = from; i < burn.size(); ++i) mean += burn.at(i, j);
        mean /= static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t i = from; i < burn.size(); ++i) ss += (burn.at(i, j) - mean) * (burn.at(i, j) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(m));
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            usable = false;
        } else {
            scaled.d[static_cast<Eigen::Index>(j)] = kWindowPerStd * sd;
        }
    }
    if (!usable) scaled = tuned.cfg;

    auto retuned = tune_metropolis(scaled, target, state, tune_rng, opts);
    out.tuning_acceptance.insert(out.tuning_acceptance.end(), retuned.block_acceptance.begin(),
                                 retuned.block_acceptance.end());
    out.cfg = std::move(retuned.cfg);
    out.state = std::move(retuned.state);
    return out;
}

// ---------------------------------------------------------------------------
// Metropolis driver
// ---------------------------------------------------------------------------

MetropolisResult run_metropolis(const LogTarget& target, const Eigen::VectorXd& init,
                                const AdaptiveSchedule& sched, const MetropolisConfig& cfg, RunSeed seed) {
    sched.validate();
    MetropolisResult out{Chain(static_cast<std::size_t>(init.size())), {}, {}};
    out.warmup = warm_up(target, init, cfg, sched.burn_in, seed);

    Rng rng(seed.seed, Stream::sampling, seed.chain);
    ChainState state = out.warmup.state;
    out.chain.reserve(sched.total);
    std::size_t batch_accepted = 0;
    std::size_t batch_size = 0;
    for (std::size_t i = 0; i < sched.total; ++i) {
        auto step = metropolis_step(state, out.warmup.cfg, target, rng);
        out.chain.push(step);
        batch_accepted += step.accepted ? 1 : 0;
        ++batch_size;
        state = std::move(step.next);
        if (batch_size == sched.refit_interval || i + 1 == sched.total) {
            out.acceptance_trace.push_back(static_cast<double>(batch_accepted) / static_cast<double>(batch_size));
            batch_accepted = 0;
            batch_size = 0;
        }
    }
    return out;
}

MetropolisResult run_metropolis(const ReturnSeries& y, const AdaptiveSchedule& sched, const MetropolisConfig& cfg,
                                RunSeed seed, double sigma1_sq) {
    const auto init = default_initial_point(y.sample_variance()).to_vector();
    return run_metropolis(make_garch_target(y, sigma1_sq), init, sched, cfg, seed);
}

}  // namespace agarch
