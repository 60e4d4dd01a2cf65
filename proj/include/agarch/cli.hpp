#pragma once

#include "agarch/diagnostics.hpp"
#include "agarch/model.hpp"
#include "agarch/samplers.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace agarch::cli {

enum class SamplerKind { adaptive, metropolis };

[[nodiscard]] std::string to_string(SamplerKind k);
[[nodiscard]] SamplerKind sampler_from_string(const std::string& s);

struct SyntheticInput {
    ParamVector theta{0.03, 0.94, 0.011};
    std::size_t n = 2000;
};

struct RunConfig {
    std::optional<std::filesystem::path> csv;
    std::optional<SyntheticInput> synthetic;
    SamplerKind sampler = SamplerKind::adaptive;
    AdaptiveSchedule schedule;
    double nu = default_nu;
    std::uint64_t seed = 0;
    std::optional<double> sigma1_sq;  ///< nullopt: sample variance of the returns
    std::filesystem::path out_dir = "agarch-out";
    double window_factor = default_window_factor;
    std::size_t chains = 1;
    bool resume = false;
    bool dump_returns = false;

    /// Throws InvalidInput on inconsistent settings.
    void validate() const;
    /// Resolved configuration as recorded in manifest.json.
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Writes the run artifacts under config.out_dir and returns the process exit status.
int run(const RunConfig& config, std::ostream& log);

struct Comparison {
    DiagnosticsReport a;
    DiagnosticsReport b;
    std::vector<double> two_tau_ratio;  ///< 2 tau_int(b) / 2 tau_int(a), per parameter
    std::vector<double> mean_z;         ///< |mean_a - mean_b| / sqrt(err_a^2 + err_b^2)
};

/// Compares two completed run directories; throws ComparisonRefused if their data fingerprints differ.
[[nodiscard]] Comparison compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b);
[[nodiscard]] std::string format_comparison(const Comparison& c);
[[nodiscard]] nlohmann::json comparison_to_json(const Comparison& c);

/// Process entry point shared by the executable and the tests.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace agarch::cli
