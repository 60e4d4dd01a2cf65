#include "agarch/adaptive.hpp"
#include "agarch/cli.hpp"
#include "agarch/data.hpp"
#include "agarch/error.hpp"

#include "output.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace agarch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct LoadedData {
    ReturnSeries y;
    json info;
};

LoadedData load_data(const RunConfig& cfg) {
    if (cfg.csv) {
        auto y = transform_returns(read_price_csv(*cfg.csv));
        json info = {{"source", "csv"}, {"path", cfg.csv->string()}, {"n", y.size()}};
        return {std::move(y), std::move(info)};
    }
    SyntheticSpec spec;
    spec.true_theta = cfg.synthetic->theta;
    spec.n = cfg.synthetic->n;
    spec.seed = cfg.seed;
    spec.sigma1_sq = unconditional_variance(spec.true_theta);
    auto y = generate_synthetic(spec);
    json info = {{"source", "synthetic"}, {"n", y.size()}, {"generator_sigma1_sq", spec.sigma1_sq}};
    return {std::move(y), std::move(info)};
}

json warmup_metadata(const WarmupResult& w) {
    return {{"metropolis_window", std::vector<double>(w.cfg.d.data(), w.cfg.d.data() + w.cfg.d.size())},
            {"tuning_block_acceptance", w.tuning_acceptance},
            {"burn_in_acceptance", w.burn_in_acceptance}};
}

void write_report_files(const fs::path& dir, const DiagnosticsReport& report) {
    io::write_text(dir / "report.txt", format_report(report));
    io::write_json(dir / "report.json", report_to_json(report));
    io::write_tau_curves(dir / "tau_int_curve.csv", report);
    io::write_acf(dir / "acf.csv", report);
}

Chain restore_chain(const fs::path& path, std::size_t draws, const LogTarget& target) {
    const Chain stored = io::read_chain_csv(path, draws);
    Chain chain(stored.dim());
    chain.reserve(draws);
    for (std::size_t i = 0; i < stored.size(); ++i) {
        const auto theta = stored.draw(i);
        const LogProb lp = target(theta);
        if (!lp.in_support()) throw DataValidation(path.string() + ": stored draw outside the constraint region");
        chain.push(theta, stored.accepted(i), lp.value());
    }
    return chain;
}

DiagnosticsReport run_adaptive_chain(const RunConfig& cfg, const ReturnSeries& y, double sigma1, const fs::path& dir,
                                     std::uint32_t chain_index) {
    const LogTarget target = make_garch_target(y, sigma1);
    const fs::path chain_path = dir / "chain.csv";
    const fs::path checkpoint_path = dir / "checkpoint.json";

    std::optional<AdaptiveSampler> sampler;
    std::ofstream chain_out;
    if (cfg.resume) {
        const json cp = io::read_json(checkpoint_path);
        const auto draws = cp.at("position").at("draws").get<std::size_t>();
        sampler.emplace(AdaptiveSampler::resume(target, cp, restore_chain(chain_path, draws, target)));
        chain_out.open(chain_path, std::ios::trunc);
        io::write_chain_header(chain_out);
        io::write_chain_rows(chain_out, sampler->result().chain);
    } else {
        const auto init = default_initial_point(y.sample_variance()).to_vector();
        sampler.emplace(target, init, cfg.schedule, cfg.nu, RunSeed{cfg.seed, chain_index},
                        MetropolisConfig::uniform(ParamVector::size, default_initial_window));
        chain_out.open(chain_path, std::ios::trunc);
        io::write_chain_header(chain_out);
    }
    if (!chain_out) throw Error("cannot write " + chain_path.string());

    while (!sampler->done()) {
        const Chain segment = sampler->run_batch();
        io::write_chain_rows(chain_out, segment);
        chain_out.flush();
        io::write_json_atomic(checkpoint_path, sampler->checkpoint());
    }
    chain_out.close();

    const AdaptiveResult& r = sampler->result();
    io::write_acceptance_trace(dir / "acceptance_trace.csv", r.acceptance_trace, cfg.schedule.refit_interval,
                               cfg.schedule.total);
    io::write_covariance_trace(dir / "covariance_trace.csv", r);
    io::write_proposal_history(dir / "proposal_history.json", r);

    SummaryOptions opts;
    opts.label = "Adaptive construction";
    opts.names = io::kParamNames;
    opts.window_factor = cfg.window_factor;
    DiagnosticsReport report = summarize(r.chain, opts);
    report.metadata = warmup_metadata(r.warmup);
    report.metadata["sampler"] = "adaptive";
    report.metadata["seed"] = cfg.seed;
    report.metadata["chain_index"] = chain_index;
    report.metadata["pilot_acceptance"] = r.pilot_acceptance;
    report.metadata["refits"] = r.proposal_history.size();
    report.metadata["final_batch_acceptance"] = r.acceptance_trace.back();
    write_report_files(dir, report);
    return report;
}

DiagnosticsReport run_metropolis_chain(const RunConfig& cfg, const ReturnSeries& y, double sigma1, const fs::path& dir,
                                       std::uint32_t chain_index) {
    const auto init = default_initial_point(y.sample_variance()).to_vector();
    const auto r = run_metropolis(make_garch_target(y, sigma1), init, cfg.schedule,
                                  MetropolisConfig::uniform(ParamVector::size, default_initial_window),
                                  RunSeed{cfg.seed, chain_index});
    {
        std::ofstream out(dir / "chain.csv", std::ios::trunc);
        io::write_chain_header(out);
        io::write_chain_rows(out, r.chain);
    }
    io::write_acceptance_trace(dir / "acceptance_trace.csv", r.acceptance_trace, cfg.schedule.refit_interval,
                               cfg.schedule.total);

    SummaryOptions opts;
    opts.label = "Metropolis";
    opts.names = io::kParamNames;
    opts.window_factor = cfg.window_factor;
    DiagnosticsReport report = summarize(r.chain, opts);
    report.metadata = warmup_metadata(r.warmup);
    report.metadata["sampler"] = "metropolis";
    report.metadata["seed"] = cfg.seed;
    report.metadata["chain_index"] = chain_index;
    write_report_files(dir, report);
    return report;
}

DiagnosticsReport run_chain(const RunConfig& cfg, const ReturnSeries& y, double sigma1, const fs::path& dir,
                            std::uint32_t chain_index) {
    fs::create_directories(dir);
    return cfg.sampler == SamplerKind::adaptive ? run_adaptive_chain(cfg, y, sigma1, dir, chain_index)
                                                : run_metropolis_chain(cfg, y, sigma1, dir, chain_index);
}

json cross_chain_summary(const std::vector<DiagnosticsReport>& reports) {
    json params = json::object();
    for (std::size_t j = 0; j < io::kParamNames.size(); ++j) {
        std::vector<double> means;
        double err_sum = 0.0;
        for (const auto& r : reports) {
            means.push_back(r.parameters[j].mean);
            err_sum += r.parameters[j].stat_error;
        }
        double m = 0.0;
        for (double v : means) m += v;
        m /= static_cast<double>(means.size());
        double ss = 0.0;
        for (double v : means) ss += (v - m) * (v - m);
        const double spread = std::sqrt(ss / static_cast<double>(means.size() - 1));
        const double mean_err = err_sum / static_cast<double>(reports.size());
        params[io::kParamNames[j]] = {{"chain_means", means},
                                      {"mean_of_means", m},
                                      {"spread_of_means", spread},
                                      {"mean_stat_error", mean_err},
                                      {"spread_over_stat_error", spread / mean_err}};
    }
    return {{"chains", reports.size()}, {"parameters", params}};
}

void check_resume_manifest(const RunConfig& cfg, const json& manifest_now) {
    const fs::path path = cfg.out_dir / "manifest.json";
    const json previous = io::read_json(path);
    if (previous.at("config") != manifest_now.at("config") ||
        previous.at("data").at("fingerprint") != manifest_now.at("data").at("fingerprint")) {
        throw InvalidInput("--resume: configuration or data differ from the run recorded in " + path.string());
    }
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    try {
        config.validate();
        LoadedData data = load_data(config);
        const ReturnSeries& y = data.y;
        const double sigma1 = config.sigma1_sq ? *config.sigma1_sq : y.sample_variance();

        data.info["fingerprint"] = data_fingerprint(y);
        const json manifest = {{"tool", "agarch"},
                               {"version", kToolVersion},
                               {"config", config.to_json()},
                               {"data", data.info},
                               {"seed", config.seed},
                               {"sigma1_sq", sigma1}};

        fs::create_directories(config.out_dir);
        if (config.resume) check_resume_manifest(config, manifest);
        io::write_json(config.out_dir / "manifest.json", manifest);
        if (config.dump_returns) {
            std::ofstream out(config.out_dir / "returns.csv");
            write_returns_csv(y, out);
        }

        std::vector<DiagnosticsReport> reports;
        if (config.chains == 1) {
            reports.push_back(run_chain(config, y, sigma1, config.out_dir, 0));
        } else {
            std::vector<std::future<DiagnosticsReport>> jobs;
            for (std::size_t c = 0; c < config.chains; ++c) {
                const fs::path dir = config.out_dir / ("chain_" + std::to_string(c));
                jobs.push_back(std::async(std::launch::async, [&config, &y, sigma1, dir, c] {
                    return run_chain(config, y, sigma1, dir, static_cast<std::uint32_t>(c));
                }));
            }
            for (auto& job : jobs) reports.push_back(job.get());
            io::write_json(config.out_dir / "cross_chain.json", cross_chain_summary(reports));
        }

        for (std::size_t c = 0; c < reports.size(); ++c) {
            if (reports.size() > 1) log << "chain " << c << ":\n";
            log << format_report(reports[c]);
        }
        for (std::size_t c = 0; c < reports.size(); ++c) {
            for (const auto& p : reports[c].parameters) {
                if (!p.plateau) {
                    log << "error: no tau_int plateau for " << p.name << " (chain " << c
                        << "); 2tau_int >= " << p.two_tau_int << " is a lower bound\n";
                    return 1;
                }
            }
        }
        return 0;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace agarch::cli
