#pragma once

#include "agarch/samplers.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agarch {

/// ACF(t) for t = 0..max_lag of a series of length n. ACF(0) is exactly 1.
struct AcfSeries {
    std::vector<double> values;
    std::size_t n = 0;

    [[nodiscard]] std::size_t max_lag() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/**
 * Lag-t autocovariance averaged over the N - t overlapping pairs, divided by
 * the full-series (1/N) variance. Requires N > max_lag >= 1; a constant
 * series raises DegenerateSeries.
 */
[[nodiscard]] AcfSeries acf(std::span<const double> x, std::size_t max_lag);

/// min(N/10, 10 * first lag with ACF < 0.01, 10^4), at least 1.
[[nodiscard]] std::size_t default_max_lag(std::span<const double> x);

/// acf() with default_max_lag(), computed incrementally in a single pass over the lags.
[[nodiscard]] AcfSeries acf_auto(std::span<const double> x);

inline constexpr double default_window_factor = 5.0;

struct TauEstimate {
    double tau = 0.5;
    std::size_t window = 0;       ///< T*: smallest T with T >= c tau_int(T)
    double uncertainty = 0.0;     ///< sqrt(2 (2 T* + 1) / N) tau
    std::vector<double> curve;    ///< tau_int(T) for T = 0..max_lag
};

/// tau_int(T) = 1/2 + sum_{i<=T} ACF(i) read at the self-consistent window. Throws NoPlateau.
[[nodiscard]] TauEstimate tau_int(const AcfSeries& acf, double window_factor = default_window_factor);

/// Blocked (leave-one-segment-out) jackknife standard error of tau_int at a fixed window.
[[nodiscard]] std::optional<double> jackknife_tau_error(std::span<const double> x, std::size_t window,
                                                        std::size_t blocks = 10);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double stddev = 0.0;
    double stat_error = 0.0;
    double two_tau_int = 1.0;
    double two_tau_int_err = 0.0;
    std::optional<double> two_tau_int_err_jackknife;
    std::size_t window = 0;
    bool plateau = true;  ///< false: two_tau_int is only the lower bound at the lag cap
    std::vector<double> tau_curve;
    std::vector<double> acf;
};

struct DiagnosticsReport {
    std::string label;
    std::vector<ParameterSummary> parameters;
    double acceptance = 0.0;
    std::size_t chain_length = 0;
    nlohmann::json metadata = nlohmann::json::object();

    [[nodiscard]] const ParameterSummary& parameter(const std::string& name) const;
    [[nodiscard]] bool all_plateaus() const noexcept;
};

struct SummaryOptions {
    std::string label = "Adaptive construction";
    std::vector<std::string> names = {"alpha", "beta", "omega"};
    double window_factor = default_window_factor;
};

/// Per-parameter mean, standard deviation, 2 tau_int and statistical error. Needs >= 1000 draws.
[[nodiscard]] DiagnosticsReport summarize(const Chain& chain, const SummaryOptions& opts = {});

/// Aligned plain-text table in the "standard deviation / statistical error / 2τ_int" layout.
[[nodiscard]] std::string format_report(const DiagnosticsReport& report);

[[nodiscard]] nlohmann::json report_to_json(const DiagnosticsReport& report);
[[nodiscard]] DiagnosticsReport report_from_json(const nlohmann::json& j);

}  // namespace agarch
