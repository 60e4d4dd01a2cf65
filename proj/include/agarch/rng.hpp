#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace agarch {

/// Named substreams expanded from a single run seed.
enum class Stream : std::uint32_t {
    synthetic = 1,
    tuning = 2,
    burn_in = 3,
    pilot = 4,
    sampling = 5,
};

[[nodiscard]] std::string_view stream_name(Stream s) noexcept;

/**
 * Owned random stream: a 64-bit Mersenne Twister seeded from
 * (seed, stream, chain index) through std::seed_seq.
 *
 * The full generator state, including the cached second normal variate,
 * can be exported as a text token and restored bit-exactly.
 */
class Rng {
public:
    Rng(std::uint64_t seed, Stream stream, std::uint32_t chain = 0);

    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal.
    double normal();
    /// Chi-square with (possibly non-integer) nu degrees of freedom, via Gamma(nu/2, 2).
    double chi_squared(double nu);

    [[nodiscard]] std::string state_token() const;
    void restore(const std::string& token);

    friend bool operator==(const Rng& a, const Rng& b) {
        return a.engine_ == b.engine_ && a.normal_ == b.normal_;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace agarch
