#include "agarch/model.hpp"

#include "agarch/error.hpp"

#include <cmath>
#include <string>

namespace agarch {

namespace {

void require_sigma1(double sigma1_sq) {
    if (!std::isfinite(sigma1_sq) || sigma1_sq <= 0.0) {
        throw InvalidInput("initial volatility sigma1^2 must be finite and positive, got " +
                           std::to_string(sigma1_sq));
    }
}

void require_valid(const ParamVector& theta) {
    if (!check_constraints(theta)) {
        throw InvalidParameter("GARCH parameters violate omega>0, alpha>0, beta>0, alpha+beta<1");
    }
}

}  // namespace

ParamVector ParamVector::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != static_cast<Eigen::Index>(size)) {
        throw InvalidInput("GARCH(1,1) parameter vector must have 3 components");
    }
    return {v[0], v[1], v[2]};
}

bool ParamVector::is_finite() const noexcept {
    return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(omega);
}

ReturnSeries::ReturnSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InsufficientData("return series must contain at least one observation");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataValidation("return series value at index " + std::to_string(i) +
                                 " is not finite");
        }
    }
}

double ReturnSeries::sample_variance() const {
    if (values_.size() < 2) {
        throw InsufficientData("sample variance needs at least two returns");
    }
    double mean = 0.0;
    for (double v : values_) mean += v;
    mean /= static_cast<double>(values_.size());
    double ss = 0.0;
    for (double v : values_) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values_.size());
}

bool check_constraints(const ParamVector& theta) {
    if (!theta.is_finite()) {
        throw InvalidInput("GARCH parameter component is not finite");
    }
    return theta.alpha > 0.0 && theta.beta > 0.0 && theta.omega > 0.0 &&
           theta.alpha + theta.beta < 1.0;
}

VolatilitySeries compute_volatility(const ParamVector& theta, const ReturnSeries& y,
                                    double sigma1_sq) {
    require_valid(theta);
    require_sigma1(sigma1_sq);

    VolatilitySeries out;
    out.values.resize(y.size());
    out.values[0] = sigma1_sq;
    for (std::size_t t = 1; t < y.size(); ++t) {
        out.values[t] = theta.omega + theta.alpha * y[t - 1] * y[t - 1] + theta.beta * out.values[t - 1];
    }
    return out;
}

double log_likelihood(const ParamVector& theta, const ReturnSeries& y, double sigma1_sq) {
    require_valid(theta);
    require_sigma1(sigma1_sq);

    constexpr double log_two_pi = 1.8378770664093454836;  // ln(2 pi)
    double sum = 0.0;
    double s2 = sigma1_sq;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t > 0) {
            s2 = theta.omega + theta.alpha * y[t - 1] * y[t - 1] + theta.beta * s2;
        }
        sum += -0.5 * (log_two_pi + std::log(s2)) - y[t] * y[t] / (2.0 * s2);
    }
    if (!std::isfinite(sum)) {
        throw NumericOverflow("log-likelihood evaluated to a non-finite value");
    }
    return sum;
}

LogProb log_posterior(const ParamVector& theta, const ReturnSeries& y, double sigma1_sq) {
    if (!check_constraints(theta)) {
        return LogProb::outside_support();
    }
    return LogProb(log_likelihood(theta, y, sigma1_sq));
}

double unconditional_variance(const ParamVector& theta) {
    require_valid(theta);
    return theta.omega / (1.0 - theta.alpha - theta.beta);
}

ParamVector default_initial_point(double sample_variance) {
    if (!std::isfinite(sample_variance) || sample_variance <= 0.0) {
        throw InvalidInput("sample variance must be finite and positive");
    }
    return {0.05, 0.90, sample_variance * (1.0 - 0.95)};
}

}  // namespace agarch
