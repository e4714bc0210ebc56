#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "scenario.hpp"

namespace bohm {

inline constexpr long cpf_quadrature_points = 4096;
inline constexpr double cpf_bisection_rel_tol = 1e-10;  // of the domain width
inline constexpr int guidance_substeps = 10;

// Cumulative probability of one time slice: composite trapezoid over a
// uniform grid, renormalized over the declared domain so the CPF reaches
// exactly 1 at x_hi. Values between nodes are interpolated linearly, which
// keeps the table monotone by construction.
class CpfTable {
public:
    CpfTable(const Scenario& sc, double t)
        : lo_(sc.domain.lo), hi_(sc.domain.hi), t_(t) {
        const long n = cpf_quadrature_points;
        h_ = (hi_ - lo_) / double(n - 1);
        std::vector<double> rho(std::size_t(n));
        for (long i = 0; i < n; ++i) rho[std::size_t(i)] = eval_rho(sc, lo_ + double(i) * h_, t);
        cum_.resize(std::size_t(n));
        cum_[0] = 0.0;
        for (long i = 1; i < n; ++i)
            cum_[std::size_t(i)] = cum_[std::size_t(i - 1)] +
                                   0.5 * (rho[std::size_t(i - 1)] + rho[std::size_t(i)]) * h_;
        const double total = cum_.back();
        if (!(total > 0.0))
            throw validation_error("CPF table: density has zero mass over the domain at t = " +
                                   std::to_string(t));
        for (double& c : cum_) c /= total;
        cum_.back() = 1.0;
    }

    // Clamped outside the domain.
    double value(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        const double u = (x - lo_) / h_;
        long k = long(u);
        if (k > cpf_quadrature_points - 2) k = cpf_quadrature_points - 2;
        const double frac = u - double(k);
        return cum_[std::size_t(k)] + frac * (cum_[std::size_t(k + 1)] - cum_[std::size_t(k)]);
    }

    // Bisection to an absolute x tolerance of 1e-10 * L. On flat plateaus
    // (zero density) this converges to the leftmost x with cpf >= p.
    double invert(double p) const {
        double lo = lo_, hi = hi_;
        const double tol = (hi_ - lo_) * cpf_bisection_rel_tol;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (value(mid) >= p) hi = mid;
            else lo = mid;
        }
        return hi;
    }

    double t() const { return t_; }

private:
    double lo_, hi_, h_, t_;
    std::vector<double> cum_;
};

// Per-(scenario, t) table cache. Safe for concurrent reads with
// single-writer inserts; pre-warm by querying before going parallel if the
// workload is read-heavy.
class CpfCache {
public:
    explicit CpfCache(Scenario sc) : scenario_(std::move(sc)) {}

    const Scenario& scenario() const { return scenario_; }

    std::shared_ptr<const CpfTable> table(double t) const {
        {
            std::shared_lock lock(mutex_);
            auto it = tables_.find(t);
            if (it != tables_.end()) return it->second;
        }
        auto made = std::make_shared<const CpfTable>(scenario_, t);
        std::unique_lock lock(mutex_);
        return tables_.emplace(t, std::move(made)).first->second;
    }

private:
    Scenario scenario_;
    mutable std::shared_mutex mutex_;
    mutable std::map<double, std::shared_ptr<const CpfTable>> tables_;
};

// CPF(x, t) = P = integral of the renormalized rho(., t) from x_lo to x.
inline double cpf(const CpfCache& cache, double x, double t) {
    return cache.table(t)->value(x);
}

inline double cpf(const Scenario& sc, double x, double t) {
    return CpfTable(sc, t).value(x);
}

inline double invert_cpf(const CpfCache& cache, double p, double t) {
    if (!(p > 0.0 && p < 1.0))
        throw boundary_error("invert_cpf: P must lie strictly inside (0,1)");
    return cache.table(t)->invert(p);
}

inline double invert_cpf(const Scenario& sc, double p, double t) {
    if (!(p > 0.0 && p < 1.0))
        throw boundary_error("invert_cpf: P must lie strictly inside (0,1)");
    return CpfTable(sc, t).invert(p);
}

enum class OracleSolver { quantile, guidance };

inline const char* solver_name(OracleSolver s) {
    return s == OracleSolver::quantile ? "quantile" : "guidance";
}

struct OracleTolerances {
    long quadrature_points = cpf_quadrature_points;
    double bisection_tol = 0.0;  // absolute, scenario dependent
    int substeps = guidance_substeps;
};

// Reference trajectory from one of the two independent solvers. label is
// the quantile P for the quantile solver and the launch point x0 for the
// guidance solver.
struct OracleTrajectory {
    Scenario scenario;
    TimeGrid grid;
    std::vector<double> positions;
    OracleSolver solver = OracleSolver::quantile;
    double label = 0.0;
    OracleTolerances tolerances;
};

// Level set of the CPF: positions[n] = CPF^{-1}(P) at t_n. No equation of
// motion is solved; constant-P conservation is the trajectory definition.
inline OracleTrajectory quantile_trajectory(const CpfCache& cache, double p, const TimeGrid& grid) {
    if (!(p > 0.0 && p < 1.0))
        throw boundary_error("quantile_trajectory: P must lie strictly inside (0,1)");
    OracleTrajectory out;
    out.scenario = cache.scenario();
    out.grid = grid;
    out.solver = OracleSolver::quantile;
    out.label = p;
    out.tolerances.bisection_tol = cache.scenario().domain.width() * cpf_bisection_rel_tol;
    out.positions.reserve(std::size_t(grid.size()));
    for (long n = 0; n <= grid.steps; ++n)
        out.positions.push_back(cache.table(grid.time(n))->invert(p));
    return out;
}

inline OracleTrajectory quantile_trajectory(const Scenario& sc, double p, const TimeGrid& grid) {
    CpfCache cache(sc);
    return quantile_trajectory(cache, p, grid);
}

// Classical fixed-step RK4 on xdot = v(x, t), with guidance_substeps
// internal steps per output step. Aborts with node_error when the path
// runs into a node region; trajectories never cross nodes, so an abort
// means the discretization failed and should be surfaced, not smoothed.
inline OracleTrajectory guidance_trajectory(const Scenario& sc, double x0, const TimeGrid& grid) {
    if (sc.kind != ScenarioKind::wavefunction_backed)
        throw unsupported_error("guidance law needs a wavefunction-backed scenario");
    if (eval_rho(sc, x0, grid.t0) < velocity_floor)
        throw node_error("guidance launch point sits in a node region at x0 = " + std::to_string(x0),
                         x0, grid.t0, eval_rho(sc, x0, grid.t0));

    OracleTrajectory out;
    out.scenario = sc;
    out.grid = grid;
    out.solver = OracleSolver::guidance;
    out.label = x0;
    out.tolerances.bisection_tol = sc.domain.width() * cpf_bisection_rel_tol;
    out.positions.reserve(std::size_t(grid.size()));
    out.positions.push_back(x0);

    const double h = grid.dt / double(guidance_substeps);
    double x = x0;
    for (long n = 0; n < grid.steps; ++n) {
        try {
            for (int k = 0; k < guidance_substeps; ++k) {
                const double tk = grid.time(n) + double(k) * h;
                const double k1 = eval_velocity(sc, x, tk);
                const double k2 = eval_velocity(sc, x + 0.5 * h * k1, tk + 0.5 * h);
                const double k3 = eval_velocity(sc, x + 0.5 * h * k2, tk + 0.5 * h);
                const double k4 = eval_velocity(sc, x + h * k3, tk + h);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        } catch (const node_error& e) {
            throw node_error("guidance trajectory entered a node region (rho = " +
                                 std::to_string(e.rho) + " at x = " + std::to_string(e.x) +
                                 ", t = " + std::to_string(e.t) + "); last good step n = " +
                                 std::to_string(n) + " at t = " + std::to_string(grid.time(n)) +
                                 ", x = " + std::to_string(out.positions.back()),
                             e.x, e.t, e.rho);
        }
        out.positions.push_back(x);
    }
    return out;
}

} // namespace bohm
