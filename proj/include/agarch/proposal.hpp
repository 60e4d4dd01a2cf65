#pragma once

#include "agarch/rng.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstddef>

namespace agarch {

/**
 * Streaming mean and population covariance of p-dimensional draws
 * (Welford co-moment update). V = comoment / count.
 */
class SampleAccumulator {
public:
    explicit SampleAccumulator(std::size_t dim);

    void add(const Eigen::Ref<const Eigen::VectorXd>& x);

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
    /// Empirical covariance E[(x - M)(x - M)^t], population normalizer.
    [[nodiscard]] Eigen::MatrixXd covariance() const;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] static SampleAccumulator from_json(const nlohmann::json& j);

private:
    std::size_t count_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd comoment_;
};

/**
 * Multivariate Student's t density with location M, scale matrix Sigma and
 * shape nu > 2. Immutable once built; the Cholesky factor and the
 * log-normalizer are computed at construction.
 */
class StudentTProposal {
public:
    /// Factorises sigma with the jitter ladder; throws DegenerateSample if it stays rank-deficient.
    StudentTProposal(Eigen::VectorXd mean, const Eigen::MatrixXd& sigma, double nu,
                     std::size_t n_samples = 0);

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
    [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
    [[nodiscard]] const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
    [[nodiscard]] const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] std::size_t n_samples() const noexcept { return n_samples_; }
    /// Diagonal jitter that had to be added to Sigma before it factorised (0 if none).
    [[nodiscard]] double jitter() const noexcept { return jitter_; }

    /// Covariance of the distribution, nu Sigma / (nu - 2).
    [[nodiscard]] Eigen::MatrixXd covariance() const { return sigma_ * (nu_ / (nu_ - 2.0)); }

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] static StudentTProposal from_json(const nlohmann::json& j);

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd chol_;
    double nu_;
    std::size_t n_samples_;
    double jitter_ = 0.0;
    double log_norm_ = 0.0;

    friend double log_density(const StudentTProposal&, const Eigen::Ref<const Eigen::VectorXd>&);
};

inline constexpr double default_nu = 10.0;

/// M = empirical mean, Sigma = ((nu - 2) / nu) V.
[[nodiscard]] StudentTProposal fit(const SampleAccumulator& acc, double nu = default_nu);

/// theta = L Y sqrt(nu / w) + M with Y ~ N(0, I) and w ~ chi^2_nu.
[[nodiscard]] Eigen::VectorXd sample(const StudentTProposal& prop, Rng& rng);

/// ln g(theta); the quadratic form is evaluated with a triangular solve against L.
[[nodiscard]] double log_density(const StudentTProposal& prop, const Eigen::Ref<const Eigen::VectorXd>& theta);

}  // namespace agarch
