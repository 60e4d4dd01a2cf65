#pragma once

#include "agarch/adaptive.hpp"
#include "agarch/diagnostics.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace agarch::cli::io {

inline const std::vector<std::string> kParamNames = {"alpha", "beta", "omega"};

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_chain_header(std::ostream& out);
void write_chain_rows(std::ostream& out, const Chain& chain);
/// Reads chain.csv rows; the log-posterior column is not stored and is returned as 0.
Chain read_chain_csv(const std::filesystem::path& path, std::size_t max_rows);

void write_acceptance_trace(const std::filesystem::path& path, const std::vector<double>& trace,
                            std::size_t refit_interval, std::size_t total);
void write_covariance_trace(const std::filesystem::path& path, const AdaptiveResult& result);
void write_proposal_history(const std::filesystem::path& path, const AdaptiveResult& result);
void write_tau_curves(const std::filesystem::path& path, const DiagnosticsReport& report);
void write_acf(const std::filesystem::path& path, const DiagnosticsReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
/// Writes to a sibling temporary file and renames it into place.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace agarch::cli::io
