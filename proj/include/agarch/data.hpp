#pragma once

#include "agarch/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace agarch {

struct PriceObservation {
    std::string label;
    double price = 0.0;
};

/// Ordered (label, price) observations; at least two, all prices finite and > 0.
class PriceSeries {
public:
    explicit PriceSeries(std::vector<PriceObservation> observations);

    [[nodiscard]] const std::vector<PriceObservation>& observations() const noexcept { return obs_; }
    [[nodiscard]] std::size_t size() const noexcept { return obs_.size(); }

private:
    std::vector<PriceObservation> obs_;
};

/**
 * Parses `label,price` rows. A first row whose second field is not numeric is
 * treated as a header; any later malformed row is a DataValidation error
 * naming the line. Blank lines are only tolerated at the end of the input.
 */
[[nodiscard]] PriceSeries parse_price_csv(std::istream& in);
[[nodiscard]] PriceSeries read_price_csv(const std::filesystem::path& path);

/// r_i = 100 [ln(p_i / p_{i-1}) - mean log-return]; output has one fewer element than the input.
[[nodiscard]] ReturnSeries transform_returns(const PriceSeries& prices);

struct SyntheticSpec {
    ParamVector true_theta;
    std::size_t n = 2000;
    std::uint64_t seed = 0;
    double sigma1_sq = 1.0;
    /// Recursion steps simulated and discarded before recording.
    std::size_t presamples = 1000;
};

/// Simulates y_t = sigma_t eps_t with eps_t ~ N(0,1); deterministic in spec.seed.
[[nodiscard]] ReturnSeries generate_synthetic(const SyntheticSpec& spec);

/// Writes a single `return` column with round-trip precision.
void write_returns_csv(const ReturnSeries& y, std::ostream& out);

/// Hex SHA-256 of the return values' IEEE-754 bytes (little-endian order).
[[nodiscard]] std::string data_fingerprint(const ReturnSeries& y);

}  // namespace agarch
