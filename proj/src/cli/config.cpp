#include "agarch/cli.hpp"

#include "agarch/error.hpp"

#include <cmath>

namespace agarch::cli {

std::string to_string(SamplerKind k) {
    return k == SamplerKind::adaptive ? "adaptive" : "metropolis";
}

SamplerKind sampler_from_string(const std::string& s) {
    if (s == "adaptive") return SamplerKind::adaptive;
    if (s == "metropolis") return SamplerKind::metropolis;
    throw InvalidInput("unknown sampler '" + s + "' (expected adaptive or metropolis)");
}

void RunConfig::validate() const {
    if (csv.has_value() == synthetic.has_value()) {
        throw InvalidInput("exactly one input source is required: --csv PATH or --synthetic");
    }
    schedule.validate();
    if (!std::isfinite(nu) || nu <= 2.0) throw InvalidInput("--nu must exceed 2");
    if (sigma1_sq && (!std::isfinite(*sigma1_sq) || *sigma1_sq <= 0.0)) {
        throw InvalidInput("--sigma1 must be 'var' or a positive number");
    }
    if (!(window_factor > 0.0)) throw InvalidInput("--window-factor must be positive");
    if (chains == 0) throw InvalidInput("--chains must be at least 1");
    if (synthetic) {
        if (!check_constraints(synthetic->theta)) {
            throw InvalidParameter("synthetic truth must satisfy alpha, beta, omega > 0 and alpha + beta < 1");
        }
        if (synthetic->n < 2) throw InvalidInput("--n must be at least 2");
    }
    if (resume && sampler != SamplerKind::adaptive) throw InvalidInput("--resume applies to adaptive runs only");
    if (resume && chains != 1) throw InvalidInput("--resume supports a single chain");
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json input;
    if (csv) {
        input = {{"kind", "csv"}, {"path", csv->string()}};
    } else {
        input = {{"kind", "synthetic"},
                 {"alpha", synthetic->theta.alpha},
                 {"beta", synthetic->theta.beta},
                 {"omega", synthetic->theta.omega},
                 {"n", synthetic->n}};
    }
    return {{"input", input},
            {"sampler", to_string(sampler)},
            {"burn_in", schedule.burn_in},
            {"pilot", schedule.pilot},
            {"refit_interval", schedule.refit_interval},
            {"total", schedule.total},
            {"freeze_after", schedule.freeze_after},
            {"nu", nu},
            {"seed", seed},
            {"sigma1", sigma1_sq ? nlohmann::json(*sigma1_sq) : nlohmann::json("var")},
            {"window_factor", window_factor},
            {"chains", chains}};
}

}  // namespace agarch::cli
