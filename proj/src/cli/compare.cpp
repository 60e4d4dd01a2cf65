#include "agarch/cli.hpp"
#include "agarch/error.hpp"

#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace agarch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

Comparison compare(const fs::path& run_a, const fs::path& run_b) {
    const json manifest_a = io::read_json(run_a / "manifest.json");
    const json manifest_b = io::read_json(run_b / "manifest.json");
    const auto fp_a = manifest_a.at("data").at("fingerprint").get<std::string>();
    const auto fp_b = manifest_b.at("data").at("fingerprint").get<std::string>();
    if (fp_a != fp_b) {
        throw ComparisonRefused("runs were made on different data (" + fp_a + " vs " + fp_b + ")");
    }

    Comparison c{report_from_json(io::read_json(run_a / "report.json")),
                 report_from_json(io::read_json(run_b / "report.json")),
                 {},
                 {}};
    if (c.a.parameters.size() != c.b.parameters.size()) throw ComparisonRefused("reports cover different parameters");
    for (std::size_t j = 0; j < c.a.parameters.size(); ++j) {
        const auto& pa = c.a.parameters[j];
        const auto& pb = c.b.parameters[j];
        if (pa.name != pb.name) throw ComparisonRefused("reports cover different parameters");
        c.two_tau_ratio.push_back(pb.two_tau_int / pa.two_tau_int);
        const double combined = std::hypot(pa.stat_error, pb.stat_error);
        c.mean_z.push_back(combined > 0.0 ? std::abs(pa.mean - pb.mean) / combined : 0.0);
    }
    return c;
}

std::string format_comparison(const Comparison& c) {
    std::ostringstream os;
    os << format_report(c.a) << '\n' << format_report(c.b) << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-24s", "2tau_int ratio (B / A)");
    os << buf;
    for (double r : c.two_tau_ratio) {
        std::snprintf(buf, sizeof buf, "%-22.4g", r);
        os << buf;
    }
    os << '\n';
    std::snprintf(buf, sizeof buf, "%-24s", "mean difference / err");
    os << buf;
    for (double z : c.mean_z) {
        std::snprintf(buf, sizeof buf, "%-22.3g", z);
        os << buf;
    }
    os << '\n';
    return os.str();
}

json comparison_to_json(const Comparison& c) {
    json ratios = json::object();
    json zs = json::object();
    for (std::size_t j = 0; j < c.a.parameters.size(); ++j) {
        ratios[c.a.parameters[j].name] = c.two_tau_ratio[j];
        zs[c.a.parameters[j].name] = c.mean_z[j];
    }
    return {{"a", report_to_json(c.a)}, {"b", report_to_json(c.b)}, {"two_tau_int_ratio", ratios}, {"mean_z", zs}};
}

}  // namespace agarch::cli
