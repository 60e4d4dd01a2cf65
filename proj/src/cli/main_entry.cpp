#include "agarch/cli.hpp"
#include "agarch/error.hpp"

#include "output.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <ostream>

namespace agarch::cli {

namespace {

std::optional<double> parse_sigma1(const std::string& s) {
    if (s == "var") return std::nullopt;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw InvalidInput("--sigma1 must be 'var' or a positive number, got '" + s + "'");
    return v;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian GARCH(1,1) estimation with an adaptive Student's t independence sampler"};
    app.set_version_flag("--version", "agarch 1.0.0");

    RunConfig cfg;
    std::string csv_path;
    bool synthetic = false;
    SyntheticInput syn;
    std::string sampler = "adaptive";
    std::string sigma1 = "var";
    std::string out_dir = cfg.out_dir.string();

    auto* csv_opt = app.add_option("--csv", csv_path, "Price CSV with `label,price` rows");
    auto* syn_flag = app.add_flag("--synthetic", synthetic, "Simulate a GARCH(1,1) series instead of reading a CSV");
    csv_opt->excludes(syn_flag);
    app.add_option("--alpha", syn.theta.alpha, "Synthetic truth alpha")->capture_default_str();
    app.add_option("--beta", syn.theta.beta, "Synthetic truth beta")->capture_default_str();
    app.add_option("--omega", syn.theta.omega, "Synthetic truth omega")->capture_default_str();
    app.add_option("--n", syn.n, "Synthetic series length (returns)")->capture_default_str();
    app.add_option("--sampler", sampler, "adaptive | metropolis")
        ->check(CLI::IsMember({"adaptive", "metropolis"}))
        ->capture_default_str();
    app.add_option("--burn-in", cfg.schedule.burn_in, "Discarded Metropolis draws")->capture_default_str();
    app.add_option("--pilot", cfg.schedule.pilot, "Metropolis draws seeding the first proposal fit")->capture_default_str();
    app.add_option("--refit-interval", cfg.schedule.refit_interval, "Draws between proposal re-fits")
        ->capture_default_str();
    app.add_option("--total", cfg.schedule.total, "Retained draws")->capture_default_str();
    app.add_option("--freeze-after", cfg.schedule.freeze_after, "Stop re-fitting after N fits (0 = never)")
        ->capture_default_str();
    app.add_option("--nu", cfg.nu, "Student's t shape")->capture_default_str();
    app.add_option("--seed", cfg.seed, "64-bit run seed")->capture_default_str();
    app.add_option("--sigma1", sigma1, "Initial volatility: 'var' (sample variance) or a value")->capture_default_str();
    app.add_option("--window-factor", cfg.window_factor, "tau_int window factor c in T >= c tau_int(T)")
        ->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--chains", cfg.chains, "Independent chains run concurrently")->capture_default_str();
    app.add_flag("--resume", cfg.resume, "Continue an adaptive run from <out>/checkpoint.json");
    app.add_flag("--dump-returns", cfg.dump_returns, "Write the transformed returns to <out>/returns.csv");

    auto* cmp = app.add_subcommand("compare", "Compare two completed run directories");
    std::string dir_a, dir_b, cmp_out;
    cmp->add_option("run_a", dir_a, "First run directory")->required();
    cmp->add_option("run_b", dir_b, "Second run directory")->required();
    cmp->add_option("--out", cmp_out, "Directory for comparison.txt / comparison.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (cmp->parsed()) {
            const Comparison c = compare(dir_a, dir_b);
            const std::string text = format_comparison(c);
            out << text;
            if (!cmp_out.empty()) {
                std::filesystem::create_directories(cmp_out);
                io::write_text(std::filesystem::path(cmp_out) / "comparison.txt", text);
                io::write_json(std::filesystem::path(cmp_out) / "comparison.json", comparison_to_json(c));
            }
            return 0;
        }

        if (!csv_path.empty()) cfg.csv = csv_path;
        if (synthetic) cfg.synthetic = syn;
        cfg.sampler = sampler_from_string(sampler);
        cfg.sigma1_sq = parse_sigma1(sigma1);
        cfg.out_dir = out_dir;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return run(cfg, err);
}

}  // namespace agarch::cli
