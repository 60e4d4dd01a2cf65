#include "agarch/diagnostics.hpp"

#include "agarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace agarch {

namespace {

using nlohmann::json;

constexpr double kAcfCutoff = 0.01;
constexpr std::size_t kLagCap = 10000;
constexpr double kConstantTolerance = 1e-12;

/// Centered copy of a series plus its 1/N variance; evaluates single lags on demand.
class LagEngine {
public:
    explicit LagEngine(std::span<const double> x) : c_(x.begin(), x.end()) {
        if (c_.size() < 2) throw InvalidInput("autocorrelation needs at least two values");
        double mean = 0.0;
        double scale = 0.0;
        for (double v : c_) {
            mean += v;
            scale = std::max(scale, std::abs(v));
        }
        mean /= static_cast<double>(c_.size());
        for (double& v : c_) v -= mean;
        double ss = 0.0;
        for (double v : c_) ss += v * v;
        var_ = ss / static_cast<double>(c_.size());
        // Centering a constant series leaves rounding residue of order eps * |x|.
        const double floor = kConstantTolerance * scale;
        if (!std::isfinite(var_) || var_ <= floor * floor) throw DegenerateSeries("series has zero variance");
    }

    [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }

    /// Autocovariance sum over the N - t pairs (j, j + t).
    [[nodiscard]] double lag_sum(std::size_t t) const noexcept {
        const std::size_t m = c_.size() - t;
        const double* a = c_.data();
        const double* b = c_.data() + t;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            s0 += a[j] * b[j];
            s1 += a[j + 1] * b[j + 1];
            s2 += a[j + 2] * b[j + 2];
            s3 += a[j + 3] * b[j + 3];
        }
        for (; j < m; ++j) s0 += a[j] * b[j];
        return (s0 + s1) + (s2 + s3);
    }

    [[nodiscard]] double acf(std::size_t t) const noexcept {
        if (t == 0) return 1.0;
        return lag_sum(t) / static_cast<double>(c_.size() - t) / var_;
    }

    [[nodiscard]] const std::vector<double>& centered() const noexcept { return c_; }

private:
    std::vector<double> c_;
    double var_ = 0.0;
};

std::size_t lag_ceiling(std::size_t n) {
    return std::max<std::size_t>(1, std::min(n / 10, kLagCap));
}

}  // namespace

AcfSeries acf(std::span<const double> x, std::size_t max_lag) {
    if (max_lag < 1 || x.size() <= max_lag) {
        throw InvalidInput("acf needs series length N > max_lag >= 1");
    }
    const LagEngine engine(x);
    AcfSeries out{std::vector<double>(max_lag + 1), x.size()};
    for (std::size_t t = 0; t <= max_lag; ++t) out.values[t] = engine.acf(t);
    return out;
}

std::size_t default_max_lag(std::span<const double> x) {
    return acf_auto(x).max_lag();
}

AcfSeries acf_auto(std::span<const double> x) {
    const LagEngine engine(x);
    const std::size_t ceiling = lag_ceiling(x.size());
    AcfSeries out{{1.0}, x.size()};
    std::size_t max_lag = ceiling;
    bool found_cutoff = false;
    for (std::size_t t = 1; t <= max_lag; ++t) {
        const double r = engine.acf(t);
        out.values.push_back(r);
        if (!found_cutoff && r < kAcfCutoff) {
            found_cutoff = true;
            max_lag = std::min(ceiling, 10 * t);
        }
    }
    return out;
}

TauEstimate tau_int(const AcfSeries& acf, double window_factor) {
    if (acf.values.size() < 2 || acf.n <= acf.max_lag()) throw InvalidInput("tau_int needs an ACF with max_lag >= 1");
    if (!(window_factor > 0.0)) throw InvalidInput("window factor must be positive");

    TauEstimate out;
    out.curve.resize(acf.values.size());
    out.curve[0] = 0.5;
    for (std::size_t t = 1; t < acf.values.size(); ++t) out.curve[t] = out.curve[t - 1] + acf.values[t];

    for (std::size_t t = 1; t < out.curve.size(); ++t) {
        if (static_cast<double>(t) >= window_factor * out.curve[t]) {
            out.window = t;
            out.tau = out.curve[t];
            out.uncertainty =
                std::sqrt(2.0 * (2.0 * static_cast<double>(t) + 1.0) / static_cast<double>(acf.n)) * std::abs(out.tau);
            return out;
        }
    }
    const double bound = out.curve.back();
    throw NoPlateau("no summation window T <= " + std::to_string(acf.max_lag()) + " satisfies T >= " +
                        std::to_string(window_factor) + " tau_int(T); tau_int(T_max) = " + std::to_string(bound),
                    bound);
}

std::optional<double> jackknife_tau_error(std::span<const double> x, std::size_t window, std::size_t blocks) {
    if (blocks < 2 || x.size() < 2 * blocks || window < 1 || window >= x.size()) return std::nullopt;
    const LagEngine engine(x);
    const auto& c = engine.centered();
    const std::size_t n = c.size();
    const std::size_t block_len = n / blocks;
    // sums[b][t]: lag-t products whose first index falls in block b; counts likewise.
    std::vector<std::vector<double>> sums(blocks, std::vector<double>(window + 1, 0.0));
    std::vector<std::vector<double>> counts(blocks, std::vector<double>(window + 1, 0.0));
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t begin = b * block_len;
        const std::size_t end = b + 1 == blocks ? n : begin + block_len;
        for (std::size_t t = 0; t <= window; ++t) {
            const std::size_t stop = std::min(end, n - t);
            double s = 0.0;
            for (std::size_t j = begin; j < stop; ++j) s += c[j] * c[j + t];
            sums[b][t] = s;
            counts[b][t] = stop > begin ? static_cast<double>(stop - begin) : 0.0;
        }
    }
    std::vector<double> total_s(window + 1, 0.0), total_c(window + 1, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t t = 0; t <= window; ++t) {
            total_s[t] += sums[b][t];
            total_c[t] += counts[b][t];
        }
    }

    std::vector<double> taus(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double var = (total_s[0] - sums[b][0]) / (total_c[0] - counts[b][0]);
        double tau = 0.5;
        for (std::size_t t = 1; t <= window; ++t) {
            tau += (total_s[t] - sums[b][t]) / (total_c[t] - counts[b][t]) / var;
        }
        taus[b] = tau;
    }
    double mean = 0.0;
    for (double t : taus) mean += t;
    mean /= static_cast<double>(blocks);
    double ss = 0.0;
    for (double t : taus) ss += (t - mean) * (t - mean);
    return std::sqrt(static_cast<double>(blocks - 1) / static_cast<double>(blocks) * ss);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

const ParameterSummary& DiagnosticsReport::parameter(const std::string& name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw InvalidInput("report has no parameter named '" + name + "'");
}

bool DiagnosticsReport::all_plateaus() const noexcept {
    return std::all_of(parameters.begin(), parameters.end(), [](const auto& p) { return p.plateau; });
}

DiagnosticsReport summarize(const Chain& chain, const SummaryOptions& opts) {
    if (chain.size() < 1000) throw InsufficientData("summary needs a chain of at least 1000 draws");
    if (opts.names.size() != chain.dim()) throw InvalidInput("parameter names do not match chain dimension");

    DiagnosticsReport report;
    report.label = opts.label;
    report.chain_length = chain.size();
    report.acceptance = chain.acceptance_rate();
    const double k = static_cast<double>(chain.size());

    for (std::size_t j = 0; j < chain.dim(); ++j) {
        const auto x = chain.column(j);
        ParameterSummary p;
        p.name = opts.names[j];

        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= k;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        p.mean = mean;
        p.stddev = std::sqrt(ss / (k - 1.0));

        const AcfSeries r = acf_auto(x);
        p.acf = r.values;
        TauEstimate tau;
        try {
            tau = tau_int(r, opts.window_factor);
        } catch (const NoPlateau& e) {
            p.plateau = false;
            tau.tau = e.tau_lower_bound();
            tau.window = r.max_lag();
            tau.uncertainty = std::sqrt(2.0 * (2.0 * static_cast<double>(tau.window) + 1.0) / k) * tau.tau;
            tau.curve.assign(r.values.size(), 0.5);
            for (std::size_t t = 1; t < r.values.size(); ++t) tau.curve[t] = tau.curve[t - 1] + r.values[t];
        }
        p.tau_curve = tau.curve;
        p.window = tau.window;
        p.two_tau_int = 2.0 * tau.tau;
        p.two_tau_int_err = 2.0 * tau.uncertainty;
        if (auto jk = jackknife_tau_error(x, tau.window)) p.two_tau_int_err_jackknife = 2.0 * *jk;
        p.stat_error = p.stddev * std::sqrt(std::max(p.two_tau_int, 0.0) / k);
        report.parameters.push_back(std::move(p));
    }
    return report;
}

namespace {

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    // Column widths count code points so the UTF-8 tau/plus-minus glyphs align.
    std::size_t cps = 0;
    for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
    return cps >= width ? s + " " : s + std::string(width - cps, ' ');
}

}  // namespace

std::string format_report(const DiagnosticsReport& report) {
    constexpr std::size_t label_w = 24;
    constexpr std::size_t col_w = 22;
    std::ostringstream os;

    os << pad("", label_w);
    for (const auto& p : report.parameters) os << pad(p.name, col_w);
    os << '\n';

    os << pad(report.label, label_w);
    for (const auto& p : report.parameters) os << pad(fmt(p.mean), col_w);
    os << '\n';

    os << pad("standard deviation", label_w);
    for (const auto& p : report.parameters) os << pad(fmt(p.stddev, 3), col_w);
    os << '\n';

    os << pad("statistical error", label_w);
    for (const auto& p : report.parameters) os << pad(fmt(p.stat_error, 3), col_w);
    os << '\n';

    os << pad("2τ_int", label_w);
    for (const auto& p : report.parameters) {
        const std::string v = (p.plateau ? "" : ">= ") + fmt(p.two_tau_int, 4) + " ± " + fmt(p.two_tau_int_err, 2);
        os << pad(v, col_w);
    }
    os << '\n';

    os << pad("2τ_int jackknife err", label_w);
    for (const auto& p : report.parameters) {
        os << pad(p.two_tau_int_err_jackknife ? fmt(*p.two_tau_int_err_jackknife, 2) : "n/a", col_w);
    }
    os << '\n';

    os << pad("window T*", label_w);
    for (const auto& p : report.parameters) os << pad(std::to_string(p.window) + (p.plateau ? "" : " (no plateau)"), col_w);
    os << '\n';

    os << '\n' << "draws: " << report.chain_length << "    acceptance: " << fmt(report.acceptance, 4) << '\n';
    return os.str();
}

json report_to_json(const DiagnosticsReport& report) {
    json params = json::object();
    json order = json::array();
    for (const auto& p : report.parameters) {
        order.push_back(p.name);
        params[p.name] = {
            {"mean", p.mean},
            {"stddev", p.stddev},
            {"stat_error", p.stat_error},
            {"two_tau_int", p.two_tau_int},
            {"two_tau_int_err", p.two_tau_int_err},
            {"two_tau_int_err_jackknife",
             p.two_tau_int_err_jackknife ? json(*p.two_tau_int_err_jackknife) : json(nullptr)},
            {"window", p.window},
            {"plateau", p.plateau},
        };
    }
    return {{"label", report.label},
            {"chain_length", report.chain_length},
            {"acceptance", report.acceptance},
            {"order", order},
            {"parameters", params},
            {"metadata", report.metadata}};
}

DiagnosticsReport report_from_json(const json& j) {
    DiagnosticsReport r;
    r.label = j.at("label").get<std::string>();
    r.chain_length = j.at("chain_length").get<std::size_t>();
    r.acceptance = j.at("acceptance").get<double>();
    r.metadata = j.value("metadata", json::object());
    for (const auto& name : j.at("order")) {
        const auto& q = j.at("parameters").at(name.get<std::string>());
        ParameterSummary p;
        p.name = name.get<std::string>();
        p.mean = q.at("mean").get<double>();
        p.stddev = q.at("stddev").get<double>();
        p.stat_error = q.at("stat_error").get<double>();
        p.two_tau_int = q.at("two_tau_int").get<double>();
        p.two_tau_int_err = q.at("two_tau_int_err").get<double>();
        if (q.contains("two_tau_int_err_jackknife") && !q.at("two_tau_int_err_jackknife").is_null()) {
            p.two_tau_int_err_jackknife = q.at("two_tau_int_err_jackknife").get<double>();
        }
        p.window = q.at("window").get<std::size_t>();
        p.plateau = q.at("plateau").get<bool>();
        r.parameters.push_back(std::move(p));
    }
    return r;
}

}  // namespace agarch
