#include "output.hpp"

#include "agarch/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace agarch::cli::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("cannot format floating-point value");
    return {buf, ptr};
}

void write_chain_header(std::ostream& out) {
    out << "alpha,beta,omega,accepted\n";
}

void write_chain_rows(std::ostream& out, const Chain& chain) {
    std::string line;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < chain.dim(); ++j) {
            line += format_double(chain.at(i, j));
            line += ',';
        }
        line += chain.accepted(i) ? '1' : '0';
        line += '\n';
        out << line;
    }
}

Chain read_chain_csv(const fs::path& path, std::size_t max_rows) {
    std::ifstream in(path);
    if (!in) throw DataValidation("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    Chain chain(kParamNames.size());
    Eigen::VectorXd row(static_cast<Eigen::Index>(kParamNames.size()));
    std::size_t line_no = 1;
    while (chain.size() < max_rows && std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string cell;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            if (!std::getline(fields, cell, ',')) throw DataValidation(path.string() + ": short row " + std::to_string(line_no));
            const auto* end = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(cell.data(), end, row[j]);
            if (ec != std::errc{} || ptr != end) {
                throw DataValidation(path.string() + ": bad value on row " + std::to_string(line_no));
            }
        }
        if (!std::getline(fields, cell) || (cell != "0" && cell != "1")) {
            throw DataValidation(path.string() + ": bad accepted flag on row " + std::to_string(line_no));
        }
        chain.push(row, cell == "1", 0.0);
    }
    if (chain.size() < max_rows) {
        throw DataValidation(path.string() + " has " + std::to_string(chain.size()) + " rows, checkpoint expects " +
                             std::to_string(max_rows));
    }
    return chain;
}

void write_acceptance_trace(const fs::path& path, const std::vector<double>& trace, std::size_t refit_interval,
                            std::size_t total) {
    std::ofstream out(path);
    out << "batch,draws,acceptance\n";
    std::size_t draws = 0;
    for (std::size_t b = 0; b < trace.size(); ++b) {
        draws = std::min(total, draws + refit_interval);
        out << b + 1 << ',' << draws << ',' << format_double(trace[b]) << '\n';
    }
}

void write_covariance_trace(const fs::path& path, const AdaptiveResult& result) {
    std::ofstream out(path);
    out << "refit,n_samples";
    for (std::size_t i = 0; i < kParamNames.size(); ++i)
        for (std::size_t k = i; k < kParamNames.size(); ++k) out << ",V_" << kParamNames[i] << '_' << kParamNames[k];
    out << '\n';
    for (std::size_t r = 0; r < result.covariance_trace.size(); ++r) {
        const auto& v = result.covariance_trace[r];
        out << r + 1 << ',' << result.proposal_history[r].n_samples();
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            for (Eigen::Index k = i; k < v.cols(); ++k) out << ',' << format_double(v(i, k));
        out << '\n';
    }
}

void write_proposal_history(const fs::path& path, const AdaptiveResult& result) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : result.proposal_history) arr.push_back(p.to_json());
    write_json(path, arr);
}

void write_tau_curves(const fs::path& path, const DiagnosticsReport& report) {
    std::ofstream out(path);
    out << "parameter,T,tau_int\n";
    for (const auto& p : report.parameters)
        for (std::size_t t = 0; t < p.tau_curve.size(); ++t)
            out << p.name << ',' << t << ',' << format_double(p.tau_curve[t]) << '\n';
}

void write_acf(const fs::path& path, const DiagnosticsReport& report) {
    std::ofstream out(path);
    out << "parameter,lag,acf\n";
    for (const auto& p : report.parameters)
        for (std::size_t t = 0; t < p.acf.size(); ++t) out << p.name << ',' << t << ',' << format_double(p.acf[t]) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_json_atomic(const fs::path& path, const nlohmann::json& j) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_json(tmp, j);
    fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataValidation("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataValidation(path.string() + ": " + e.what());
    }
}

}  // namespace agarch::cli::io
