#include "agarch/proposal.hpp"

#include "agarch/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace agarch {

namespace {

using nlohmann::json;

// A pivot whose square falls below this fraction of the matching diagonal entry
// means the matrix is numerically rank-deficient.
constexpr double kPivotFloor = 1e-14;
constexpr int kJitterRetries = 3;
constexpr double kJitterBase = 1e-10;
constexpr double kJitterGrowth = 100.0;

std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::MatrixXd l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double pivot = l(i, i);
        if (!std::isfinite(pivot) || pivot * pivot <= kPivotFloor * sigma(i, i)) return std::nullopt;
    }
    return l;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidInput("matrix in JSON is not square");
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// SampleAccumulator
// ---------------------------------------------------------------------------

SampleAccumulator::SampleAccumulator(std::size_t dim)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      comoment_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {
    if (dim == 0) throw InvalidInput("accumulator dimension must be positive");
}

void SampleAccumulator::add(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != mean_.size()) throw InvalidInput("draw dimension does not match accumulator");
    ++count_;
    const Eigen::VectorXd delta_old = x - mean_;
    mean_ += delta_old / static_cast<double>(count_);
    const Eigen::VectorXd delta_new = x - mean_;
    comoment_.noalias() += delta_old * delta_new.transpose();
}

Eigen::MatrixXd SampleAccumulator::covariance() const {
    if (count_ == 0) throw InsufficientData("covariance of an empty accumulator");
    Eigen::MatrixXd v = comoment_ / static_cast<double>(count_);
    return 0.5 * (v + v.transpose());
}

json SampleAccumulator::to_json() const {
    return {{"count", count_}, {"mean", vector_to_json(mean_)}, {"comoment", matrix_to_json(comoment_)}};
}

SampleAccumulator SampleAccumulator::from_json(const json& j) {
    SampleAccumulator acc(j.at("mean").size());
    acc.count_ = j.at("count").get<std::size_t>();
    acc.mean_ = vector_from_json(j.at("mean"));
    acc.comoment_ = matrix_from_json(j.at("comoment"));
    if (acc.comoment_.rows() != acc.mean_.size()) throw InvalidInput("accumulator JSON has mismatched sizes");
    return acc;
}

// ---------------------------------------------------------------------------
// StudentTProposal
// ---------------------------------------------------------------------------

StudentTProposal::StudentTProposal(Eigen::VectorXd mean, const Eigen::MatrixXd& sigma, double nu,
                                   std::size_t n_samples)
    : mean_(std::move(mean)), nu_(nu), n_samples_(n_samples) {
    const auto p = mean_.size();
    if (p == 0) throw InvalidInput("proposal dimension must be positive");
    if (sigma.rows() != p || sigma.cols() != p) throw InvalidInput("scale matrix shape does not match mean");
    if (!std::isfinite(nu) || nu <= 2.0) throw InvalidInput("Student's t shape nu must exceed 2");
    if (!mean_.allFinite() || !sigma.allFinite()) throw InvalidInput("proposal mean/scale must be finite");

    sigma_ = 0.5 * (sigma + sigma.transpose());
    auto l = try_cholesky(sigma_);
    if (!l) {
        const double trace = sigma_.trace();
        double delta = kJitterBase * trace / static_cast<double>(p);
        if (std::isfinite(delta) && delta > 0.0) {
            for (int attempt = 0; attempt < kJitterRetries && !l; ++attempt, delta *= kJitterGrowth) {
                Eigen::MatrixXd jittered = sigma_;
                jittered.diagonal().array() += delta;
                l = try_cholesky(jittered);
                if (l) {
                    sigma_ = std::move(jittered);
                    jitter_ = delta;
                }
            }
        }
    }
    if (!l) {
        throw DegenerateSample("proposal scale matrix is rank-deficient after " +
                               std::to_string(kJitterRetries) + " jitter attempts");
    }
    chol_ = std::move(*l);

    const double dp = static_cast<double>(p);
    log_norm_ = std::lgamma(0.5 * (nu_ + dp)) - std::lgamma(0.5 * nu_) -
                chol_.diagonal().array().log().sum() - 0.5 * dp * std::log(nu_ * std::numbers::pi);
}

json StudentTProposal::to_json() const {
    return {{"mean", vector_to_json(mean_)},
            {"sigma", matrix_to_json(sigma_)},
            {"nu", nu_},
            {"n_samples", n_samples_}};
}

StudentTProposal StudentTProposal::from_json(const json& j) {
    return StudentTProposal(vector_from_json(j.at("mean")), matrix_from_json(j.at("sigma")),
                            j.at("nu").get<double>(), j.value("n_samples", std::size_t{0}));
}

StudentTProposal fit(const SampleAccumulator& acc, double nu) {
    const std::size_t p = acc.dim();
    if (acc.count() < p + 1) {
        throw DegenerateSample("fit needs at least " + std::to_string(p + 1) + " draws, have " +
                               std::to_string(acc.count()));
    }
    if (!std::isfinite(nu) || nu <= 2.0) throw InvalidInput("Student's t shape nu must exceed 2");
    const Eigen::MatrixXd sigma = acc.covariance() * ((nu - 2.0) / nu);
    return StudentTProposal(acc.mean(), sigma, nu, acc.count());
}

Eigen::VectorXd sample(const StudentTProposal& prop, Rng& rng) {
    const auto p = static_cast<Eigen::Index>(prop.dim());
    Eigen::VectorXd y(p);
    for (Eigen::Index i = 0; i < p; ++i) y[i] = rng.normal();
    const double w = rng.chi_squared(prop.nu());
    const Eigen::VectorXd x = y * std::sqrt(prop.nu() / w);
    return prop.cholesky().triangularView<Eigen::Lower>() * x + prop.mean();
}

double log_density(const StudentTProposal& prop, const Eigen::Ref<const Eigen::VectorXd>& theta) {
    if (theta.size() != prop.mean_.size()) throw InvalidInput("point dimension does not match proposal");
    const Eigen::VectorXd z = prop.chol_.triangularView<Eigen::Lower>().solve(theta - prop.mean_);
    const double q = z.squaredNorm();
    const double dp = static_cast<double>(prop.dim());
    return prop.log_norm_ - 0.5 * (prop.nu_ + dp) * std::log1p(q / prop.nu_);
}

}  // namespace agarch
