#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace agarch {

/**
 * GARCH(1,1) parameter triple.
 *
 * Component order is fixed as (alpha, beta, omega) wherever the triple is
 * flattened into a vector: chains, proposal means, covariance matrices and
 * every output file use it.
 */
struct ParamVector {
    static constexpr std::size_t size = 3;

    double alpha = 0.0;  ///< coefficient on the lagged squared return
    double beta = 0.0;   ///< coefficient on the lagged volatility
    double omega = 0.0;  ///< constant term, squared-return units

    [[nodiscard]] Eigen::Vector3d to_vector() const { return {alpha, beta, omega}; }
    [[nodiscard]] static ParamVector from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

    [[nodiscard]] bool is_finite() const noexcept;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Zero-mean return series y_1..y_n, percent log-return units. Values are finite, n >= 1.
class ReturnSeries {
public:
    explicit ReturnSeries(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Population variance (1/n) of the raw values; needs n >= 2.
    [[nodiscard]] double sample_variance() const;

private:
    std::vector<double> values_;
};

/// Conditional variances sigma_1^2..sigma_n^2 produced by the GARCH recursion.
struct VolatilitySeries {
    std::vector<double> values;
};

/**
 * Log-density value that may lie outside the support.
 *
 * Points outside the constraint region carry a distinguished sentinel; callers
 * test in_support() instead of comparing against infinities, so no NaN can
 * leak into an acceptance ratio.
 */
class LogProb {
public:
    constexpr explicit LogProb(double value) noexcept : value_(value), in_support_(true) {}

    [[nodiscard]] static constexpr LogProb outside_support() noexcept { return LogProb(); }

    [[nodiscard]] constexpr bool in_support() const noexcept { return in_support_; }
    [[nodiscard]] constexpr bool is_rejected_region() const noexcept { return !in_support_; }

    /// Finite log value, or -infinity outside the support (for serialization only).
    [[nodiscard]] constexpr double value() const noexcept {
        return in_support_ ? value_ : -std::numeric_limits<double>::infinity();
    }

private:
    constexpr LogProb() noexcept : value_(0.0), in_support_(false) {}

    double value_;
    bool in_support_;
};

/// alpha > 0, beta > 0, omega > 0, alpha + beta < 1. Throws InvalidInput on non-finite components.
[[nodiscard]] bool check_constraints(const ParamVector& theta);

/// Runs sigma_t^2 = omega + alpha y_{t-1}^2 + beta sigma_{t-1}^2 from sigma1_sq.
[[nodiscard]] VolatilitySeries compute_volatility(const ParamVector& theta, const ReturnSeries& y,
                                                  double sigma1_sq);

/// Gaussian log-likelihood sum_t [-1/2 ln(2 pi sigma_t^2) - y_t^2 / (2 sigma_t^2)].
[[nodiscard]] double log_likelihood(const ParamVector& theta, const ReturnSeries& y, double sigma1_sq);

/// Flat prior truncated to the constraint region: log-likelihood inside, outside_support() elsewhere.
[[nodiscard]] LogProb log_posterior(const ParamVector& theta, const ReturnSeries& y, double sigma1_sq);

/// Unconditional variance omega / (1 - alpha - beta) of a stationary parameter set.
[[nodiscard]] double unconditional_variance(const ParamVector& theta);

/// Starting point for the samplers: (0.05, 0.90, 0.05 * variance).
[[nodiscard]] ParamVector default_initial_point(double sample_variance);

}  // namespace agarch
