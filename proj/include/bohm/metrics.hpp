#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "generator.hpp"
#include "grid.hpp"
#include "oracles.hpp"

namespace bohm {

// A single trajectory on a time grid, as pulled out of an ensemble.
struct Trajectory {
    TimeGrid grid;
    std::vector<double> positions;
};

inline Trajectory extract_trajectory(const TrajectoryEnsemble& ens, long rank) {
    if (rank < 0 || rank >= ens.n_trajectories())
        throw validation_error("extract_trajectory: rank out of range");
    auto row = ens.trajectory(rank);
    return {ens.grid(), std::vector<double>(row.begin(), row.end())};
}

// Per-step absolute differences with sup/rms aggregates. normalized_errors
// are error * rho(oracle position): the dimensionless product that must
// stay far below 1 for the sampled trajectory to track the reference.
struct ErrorReport {
    std::vector<double> per_step_errors;
    std::vector<double> normalized_errors;
    double sup_error = 0.0;
    double rms_error = 0.0;
};

inline ErrorReport compare_trajectories(const Trajectory& ds, const OracleTrajectory& oracle) {
    if (!same_grid(ds.grid, oracle.grid))
        throw validation_error("compare_trajectories: trajectories live on different time grids");
    if (ds.positions.size() != oracle.positions.size())
        throw validation_error("compare_trajectories: length mismatch");

    ErrorReport rep;
    const std::size_t n = ds.positions.size();
    rep.per_step_errors.reserve(n);
    rep.normalized_errors.reserve(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::abs(ds.positions[i] - oracle.positions[i]);
        rep.per_step_errors.push_back(e);
        const double rho = eval_rho(oracle.scenario, oracle.positions[i],
                                    oracle.grid.time(long(i)));
        rep.normalized_errors.push_back(e * rho);
        rep.sup_error = std::max(rep.sup_error, e);
        sq += e * e;
    }
    rep.rms_error = std::sqrt(sq / double(n));
    return rep;
}

// One-sample Kolmogorov-Smirnov statistic of a batch against a reference
// CPF at the batch's time: D = max over the sorted sample of
// max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|).
inline double ks_statistic(const SampleBatch& batch, const std::function<double(double)>& cdf) {
    if (batch.values.empty()) throw validation_error("ks_statistic: empty batch");
    std::vector<double> sorted = batch.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = double(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max(d, std::abs(double(i + 1) / n - f));
        d = std::max(d, std::abs(double(i) / n - f));
    }
    return d;
}

// Asymptotic one-sample critical value c(alpha)/sqrt(n) with
// c = sqrt(-ln(alpha/2)/2); c(0.01) = 1.628.
inline double ks_critical_value(long n, double alpha = 0.01) {
    if (n < 1 || !(alpha > 0.0 && alpha < 1.0))
        throw validation_error("ks_critical_value: need n >= 1 and alpha in (0,1)");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(double(n));
}

struct SweepRow {
    long n_particles = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string scenario;
    double quantile = 0.0;
    double sup_error = 0.0;
    double rms_error = 0.0;
    std::string status = "ok";  // or the error description for failed cells
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

// Cartesian product of (N, dt, seed), each cell compared against the
// quantile oracle at the tracked quantiles. Rows come out in deterministic
// loop order; per-cell failures are recorded and the sweep continues.
inline SweepReport convergence_sweep(const Scenario& sc, const std::vector<long>& n_list,
                                     const std::vector<double>& dt_list,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::vector<double>& quantiles,
                                     double epsilon = 1e-3) {
    if (n_list.empty() || dt_list.empty() || seeds.empty() || quantiles.empty())
        throw validation_error("convergence_sweep: all lists must be nonempty");

    SweepReport report;
    CpfCache cache(sc);
    for (long n : n_list) {
        for (double dt : dt_list) {
            for (std::uint64_t seed : seeds) {
                try {
                    const TimeGrid grid = make_time_grid(sc.t_range.lo, sc.t_range.hi, dt);
                    SamplerConfig cfg{seed, n, dt, epsilon};
                    const TrajectoryEnsemble ens = generate_ensemble(sc, grid, cfg);
                    for (double p : quantiles) {
                        const long rank = quantile_rank(p, n);
                        const OracleTrajectory oracle =
                            quantile_trajectory(cache, nominal_quantile(rank, n), grid);
                        const ErrorReport rep =
                            compare_trajectories(extract_trajectory(ens, rank), oracle);
                        report.rows.push_back(
                            {n, dt, seed, sc.name, p, rep.sup_error, rep.rms_error, "ok"});
                    }
                } catch (const std::exception& e) {
                    for (double p : quantiles)
                        report.rows.push_back({n, dt, seed, sc.name, p, 0.0, 0.0,
                                               std::string("failed: ") + e.what()});
                }
            }
        }
    }
    return report;
}

} // namespace bohm
