#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace bohm {

// Sampler parameters. dt and n_particles are subject to the working rules
// in validate_parameters; epsilon is the dimensionless speed scale.
struct SamplerConfig {
    std::uint64_t seed = 1;
    long n_particles = 10000;
    double dt = 0.1;
    double epsilon = 1e-3;

    void validate() const {
        if (n_particles < 2) throw validation_error("n_particles must be at least 2");
        if (!(dt > 0.0)) throw validation_error("dt must be positive");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw validation_error("epsilon must lie in (0,1)");
    }
};

struct SampleBatch {
    double t = 0.0;
    std::vector<double> values;
    double accepted_fraction = 1.0;
};

namespace detail {

inline constexpr std::uint64_t step_gamma = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t coord_gamma = 0xD1B54A32D192ED03ull;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-style stream derivation: the stream for (seed, step) does not
// depend on execution order, so distinct time steps can be sampled
// concurrently and still reproduce bit-identically.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t step) {
    return detail::splitmix64(master + (step + 1) * detail::step_gamma);
}

// Independent per-coordinate master seeds for separable multi-D runs.
inline std::uint64_t derive_coordinate_seed(std::uint64_t master, std::uint64_t coord) {
    return detail::splitmix64((master ^ 0x5851F42D4C957F2Dull) + (coord + 1) * detail::coord_gamma);
}

inline constexpr const char* prng_id = "mt19937_64(splitmix64(seed,step))";

// Seeded uniform double stream. Doubles are built from the high 53 engine
// bits directly, so the output is bit-identical across platforms (the
// standard library distributions make no such promise).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

inline RandomStream stream_for_step(std::uint64_t master, std::uint64_t step) {
    return RandomStream(derive_stream_seed(master, step));
}

// von Neumann acceptance-rejection with a uniform proposal over the domain:
// place random dots uniformly under the bounding box and keep the x of
// every dot that lands under the density curve.
inline SampleBatch rejection_sample(const std::function<double(double)>& density,
                                    Interval domain, double bound, long n,
                                    RandomStream& stream, double t = 0.0) {
    if (n < 1) throw validation_error("rejection_sample: n must be at least 1");
    if (!(bound > 0.0) || !std::isfinite(bound))
        throw validation_error("rejection_sample: bound must be positive and finite");

    SampleBatch batch;
    batch.t = t;
    batch.values.reserve(std::size_t(n));
    std::uint64_t proposed = 0;
    const std::uint64_t cap = 10'000'000ull + 10'000ull * std::uint64_t(n);
    while (long(batch.values.size()) < n) {
        const double x = stream.uniform(domain.lo, domain.hi);
        const double y = bound * stream.uniform();
        const double r = density(x);
        ++proposed;
        if (r > bound) throw bound_violation_error(x, r, bound);
        if (y < r) batch.values.push_back(x);
        if (proposed > cap)
            throw validation_error("rejection_sample: acceptance rate too low; check the density bound");
    }
    batch.accepted_fraction = double(n) / double(proposed);
    return batch;
}

struct ParameterChoice {
    long n_particles = 0;
    double dt = 0.0;
};

// Working rule for the two method parameters: N = ceil(2 L rho_max * 1e3)
// and dt solved from N dt = L / epsilon.
inline ParameterChoice choose_parameters(double domain_width, double rho_max, double epsilon) {
    if (!(domain_width > 0.0) || !(rho_max > 0.0) || !(epsilon > 0.0))
        throw validation_error("choose_parameters: all inputs must be positive");
    const double n_real = std::ceil(2.0 * domain_width * rho_max * 1e3);
    return {long(n_real), domain_width / (epsilon * n_real)};
}

// Sanity rules for caller-chosen parameters. N must dominate 2 L rho_max by
// a decade, and dt must not exceed the L/(eps N) ceiling. Violations are
// warnings, not failures, so configs can reproduce published runs exactly.
inline std::vector<std::string> validate_parameters(double domain_width, double rho_max,
                                                    const SamplerConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    const double crowding = 2.0 * domain_width * rho_max;
    if (double(cfg.n_particles) <= 10.0 * crowding)
        warnings.push_back("n_particles = " + std::to_string(cfg.n_particles) +
                           " does not dominate 2*L*rho_max = " + std::to_string(crowding));
    const double ceiling = domain_width / (cfg.epsilon * double(cfg.n_particles));
    if (cfg.dt > ceiling * (1.0 + 1e-9))
        warnings.push_back("dt = " + std::to_string(cfg.dt) + " exceeds the L/(epsilon*N) ceiling " +
                           std::to_string(ceiling));
    return warnings;
}

} // namespace bohm
