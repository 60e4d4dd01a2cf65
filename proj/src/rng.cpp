#include "agarch/rng.hpp"

#include "agarch/error.hpp"

#include <sstream>

namespace agarch {

std::string_view stream_name(Stream s) noexcept {
    switch (s) {
        case Stream::synthetic: return "synthetic";
        case Stream::tuning: return "tuning";
        case Stream::burn_in: return "burn_in";
        case Stream::pilot: return "pilot";
        case Stream::sampling: return "sampling";
    }
    return "unknown";
}

Rng::Rng(std::uint64_t seed, Stream stream, std::uint32_t chain) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), chain};
    engine_.seed(seq);
}

double Rng::uniform() {
    return std::generate_canonical<double, 53>(engine_);
}

double Rng::normal() {
    return normal_(engine_);
}

double Rng::chi_squared(double nu) {
    // Fresh distribution per draw keeps the exported state limited to engine + normal cache.
    std::gamma_distribution<double> gamma(0.5 * nu, 2.0);
    return gamma(engine_);
}

std::string Rng::state_token() const {
    std::ostringstream os;
    os.precision(17);
    os << engine_ << ' ' << normal_;
    return os.str();
}

void Rng::restore(const std::string& token) {
    std::istringstream is(token);
    is >> engine_ >> normal_;
    if (!is) {
        throw InvalidInput("malformed RNG state token");
    }
}

}  // namespace agarch
