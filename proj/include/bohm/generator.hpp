#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "oracles.hpp"
#include "sampling.hpp"
#include "scenario.hpp"

namespace bohm {

struct EnsembleMeta {
    std::string scenario;
    std::uint64_t seed = 0;
    long n_particles = 0;
    double dt = 0.0;
    double epsilon = 0.0;
    double rho_bound = 0.0;
    std::vector<std::string> warnings;  // parameter-rule violations, if any
};

// N trajectories over a shared time grid. Every time slice is a sorted
// sample, so positions are nondecreasing in the trajectory index at each
// step: the trajectories cannot cross by construction.
class TrajectoryEnsemble {
public:
    TrajectoryEnsemble(TimeGrid grid, long n)
        : grid_(grid), n_(n), data_(std::size_t(n) * std::size_t(grid.size())) {}

    long n_trajectories() const { return n_; }
    const TimeGrid& grid() const { return grid_; }

    double at(long traj, long step) const {
        return data_[std::size_t(traj) * std::size_t(grid_.size()) + std::size_t(step)];
    }
    double& at(long traj, long step) {
        return data_[std::size_t(traj) * std::size_t(grid_.size()) + std::size_t(step)];
    }

    std::span<const double> trajectory(long i) const {
        return {data_.data() + std::size_t(i) * std::size_t(grid_.size()),
                std::size_t(grid_.size())};
    }

    std::vector<double> slice(long step) const {
        std::vector<double> out(std::size_t(n_));
        for (long i = 0; i < n_; ++i) out[std::size_t(i)] = at(i, step);
        return out;
    }

    EnsembleMeta meta;
    std::vector<double> accepted_fractions;  // one per time step

private:
    TimeGrid grid_;
    long n_;
    std::vector<double> data_;  // row-major [trajectory][step]
};

// Midpoint rank rule: trajectory i nominally tracks P_i = (i + 0.5)/N, so
// the rank for a requested quantile is the i whose P_i is closest, ties
// resolved downward.
inline long quantile_rank(double p, long n) {
    const long i = long(std::floor(p * double(n) - 1e-9));
    return std::clamp(i, 0L, n - 1);
}

inline double nominal_quantile(long rank, long n) {
    return (double(rank) + 0.5) / double(n);
}

inline std::vector<long> select_by_quantile(const TrajectoryEnsemble& ens,
                                            const std::vector<double>& quantiles) {
    if (ens.n_trajectories() < 1) throw validation_error("select_by_quantile: empty ensemble");
    std::vector<long> ranks;
    ranks.reserve(quantiles.size());
    for (double p : quantiles) {
        if (!(p > 0.0 && p < 1.0))
            throw validation_error("select_by_quantile: quantile " + std::to_string(p) +
                                   " outside (0,1)");
        ranks.push_back(quantile_rank(p, ens.n_trajectories()));
    }
    return ranks;
}

// The density sampling method. At each grid time (step 0 included) N points
// are drawn from rho(., t_n) by acceptance-rejection, sorted ascending, and
// the i-th sorted point is joined across steps into trajectory i. Nothing
// is differentiated or integrated. Steps use independent derived streams,
// so they may be sampled in any order (or concurrently).
inline TrajectoryEnsemble generate_ensemble(const Scenario& sc, const TimeGrid& grid,
                                            const SamplerConfig& cfg) {
    cfg.validate();
    const double bound = estimate_rho_max(sc);
    TrajectoryEnsemble ens(grid, cfg.n_particles);
    ens.meta.scenario = sc.name;
    ens.meta.seed = cfg.seed;
    ens.meta.n_particles = cfg.n_particles;
    ens.meta.dt = cfg.dt;
    ens.meta.epsilon = cfg.epsilon;
    ens.meta.rho_bound = bound;
    ens.meta.warnings = validate_parameters(sc.domain.width(), bound / 1.1, cfg);
    ens.accepted_fractions.reserve(std::size_t(grid.size()));

    for (long n = 0; n <= grid.steps; ++n) {
        const double t = grid.time(n);
        RandomStream stream = stream_for_step(cfg.seed, std::uint64_t(n));
        SampleBatch batch = rejection_sample(
            [&](double x) { return eval_rho(sc, x, t); }, sc.domain, bound,
            cfg.n_particles, stream, t);
        std::sort(batch.values.begin(), batch.values.end());
        for (long i = 0; i < cfg.n_particles; ++i) ens.at(i, n) = batch.values[std::size_t(i)];
        ens.accepted_fractions.push_back(batch.accepted_fraction);
    }
    return ens;
}

// Per-coordinate ensembles plus the rank bindings of the tracked particles.
// bindings[p][c] is particle p's trajectory index in coordinate c's
// ensemble; a particle's rank generally differs between coordinates.
struct MultiTrajectorySet {
    std::vector<TrajectoryEnsemble> coordinates;
    std::vector<std::vector<long>> bindings;
    std::vector<std::vector<double>> binding_quantiles;

    std::vector<double> particle_position(std::size_t particle, long step) const {
        std::vector<double> out;
        out.reserve(coordinates.size());
        for (std::size_t c = 0; c < coordinates.size(); ++c)
            out.push_back(coordinates[c].at(bindings[particle][c], step));
        return out;
    }
};

// Separable multi-dimensional driver: runs the 1D method independently per
// coordinate with derived seeds, then binds each initial point to
// per-coordinate quantile ranks through the initial marginal CPFs
// (P_c = CPF_c(x0_c, t0)). Valid because for a separable wavefunction each
// coordinate's velocity field is autonomous and conserves its own marginal
// left probability.
inline MultiTrajectorySet generate_separable(const std::vector<Scenario>& marginals,
                                             const TimeGrid& grid, const SamplerConfig& cfg,
                                             const std::vector<std::vector<double>>& initial_points) {
    if (marginals.empty())
        throw unsupported_error(
            "generate_separable needs one 1D marginal scenario per coordinate; a joint "
            "non-separable density has no natural ordering to sort");

    MultiTrajectorySet out;
    out.coordinates.reserve(marginals.size());
    for (std::size_t c = 0; c < marginals.size(); ++c) {
        SamplerConfig per = cfg;
        per.seed = derive_coordinate_seed(cfg.seed, std::uint64_t(c));
        out.coordinates.push_back(generate_ensemble(marginals[c], grid, per));
    }

    for (const auto& point : initial_points) {
        if (point.size() != marginals.size())
            throw validation_error("generate_separable: initial point dimension does not match "
                                   "the number of marginals");
        std::vector<long> ranks;
        std::vector<double> qs;
        for (std::size_t c = 0; c < marginals.size(); ++c) {
            if (!marginals[c].domain.contains(point[c]))
                throw validation_error("generate_separable: initial point outside the domain of "
                                       "coordinate " + std::to_string(c));
            const double p = cpf(marginals[c], point[c], grid.t0);
            qs.push_back(p);
            ranks.push_back(quantile_rank(p, cfg.n_particles));
        }
        out.bindings.push_back(std::move(ranks));
        out.binding_quantiles.push_back(std::move(qs));
    }
    return out;
}

} // namespace bohm
