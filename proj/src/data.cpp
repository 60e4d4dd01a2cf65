#include "agarch/data.hpp"

#include "agarch/error.hpp"
#include "agarch/rng.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace agarch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

PriceSeries::PriceSeries(std::vector<PriceObservation> observations) : obs_(std::move(observations)) {
    if (obs_.size() < 2) {
        throw InsufficientData("price series needs at least two observations, got " +
                               std::to_string(obs_.size()));
    }
    for (std::size_t i = 0; i < obs_.size(); ++i) {
        const double p = obs_[i].price;
        if (!std::isfinite(p) || p <= 0.0) {
            throw DataValidation("price at observation " + std::to_string(i) + " ('" + obs_[i].label +
                                 "') must be finite and positive");
        }
    }
}

PriceSeries parse_price_csv(std::istream& in) {
    std::vector<PriceObservation> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t pending_blank = 0;
    bool first_content_row = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (pending_blank == 0) pending_blank = line_no;
            continue;
        }
        if (pending_blank != 0) {
            throw DataValidation("blank line " + std::to_string(pending_blank) +
                                 " inside the price data");
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataValidation("line " + std::to_string(line_no) + ": expected `label,price`");
        }
        const std::string_view label = trim(std::string_view(line).substr(0, comma));
        const std::string_view rest = std::string_view(line).substr(comma + 1);
        if (rest.find(',') != std::string_view::npos) {
            throw DataValidation("line " + std::to_string(line_no) + ": expected exactly two columns");
        }
        double price = 0.0;
        if (!parse_double(rest, price)) {
            if (first_content_row) {
                first_content_row = false;
                continue;  // header
            }
            throw DataValidation("line " + std::to_string(line_no) + ": cannot parse price '" +
                                 std::string(trim(rest)) + "'");
        }
        first_content_row = false;
        if (!std::isfinite(price) || price <= 0.0) {
            throw DataValidation("line " + std::to_string(line_no) + ": price must be positive");
        }
        rows.push_back({std::string(label), price});
    }
    return PriceSeries(std::move(rows));
}

PriceSeries read_price_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataValidation("cannot open price file " + path.string());
    }
    return parse_price_csv(in);
}

ReturnSeries transform_returns(const PriceSeries& prices) {
    const auto& obs = prices.observations();
    std::vector<double> log_ret(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        log_ret[i - 1] = std::log(obs[i].price / obs[i - 1].price);
    }
    double mean = 0.0;
    for (double r : log_ret) mean += r;
    mean /= static_cast<double>(log_ret.size());
    for (double& r : log_ret) r = 100.0 * (r - mean);
    return ReturnSeries(std::move(log_ret));
}

ReturnSeries generate_synthetic(const SyntheticSpec& spec) {
    if (!check_constraints(spec.true_theta)) {
        throw InvalidParameter("synthetic generator needs stationary, positive GARCH parameters");
    }
    if (spec.n == 0) {
        throw InvalidInput("synthetic series length must be positive");
    }
    if (!std::isfinite(spec.sigma1_sq) || spec.sigma1_sq <= 0.0) {
        throw InvalidInput("synthetic sigma1^2 must be finite and positive");
    }

    const auto& th = spec.true_theta;
    Rng rng(spec.seed, Stream::synthetic);
    std::vector<double> y;
    y.reserve(spec.n);

    double s2 = spec.sigma1_sq;
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t t = 0; t < spec.presamples + spec.n; ++t) {
        if (have_prev) {
            s2 = th.omega + th.alpha * prev * prev + th.beta * s2;
        }
        prev = std::sqrt(s2) * rng.normal();
        have_prev = true;
        if (t >= spec.presamples) y.push_back(prev);
    }
    return ReturnSeries(std::move(y));
}

void write_returns_csv(const ReturnSeries& y, std::ostream& out) {
    out << "return\n";
    out << std::setprecision(17);
    for (double v : y.values()) out << v << '\n';
}

std::string data_fingerprint(const ReturnSeries& y) {
    std::vector<unsigned char> bytes;
    bytes.reserve(y.size() * sizeof(double));
    for (double v : y.values()) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            bytes.push_back(static_cast<unsigned char>(bits & 0xffU));
            bits >>= 8;
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
    return "sha256:" + os.str();
}

}  // namespace agarch
