#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace bohm {

using Complex = std::complex<double>;

enum class ScenarioKind { wavefunction_backed, density_only };

// rho below this value counts as a wavefunction node. The Bohm velocity is
// a 0/0 quotient at nodes, and trajectories never cross them, so evaluation
// there is refused rather than regularized.
inline constexpr double velocity_floor = 1e-12;

// A named time-dependent probability density over a finite domain,
// optionally backed by a closed-form wavefunction. Immutable after
// construction; all evaluation entry points are pure functions, safe for
// unrestricted concurrent use.
struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::wavefunction_backed;
    Interval domain;
    Interval t_range;
    double default_dt = 0.1;
    long default_n = 10000;
    double default_epsilon = 1e-3;
    // Applied on CSV emission only; internal computation stays in the
    // naturalized units the constants are given in.
    double length_scale = 1.0;
    double time_scale = 1.0;
    std::map<std::string, double> constants;

    std::function<Complex(double, double)> psi;      // null for density-only scenarios
    std::function<Complex(double, double)> dpsi_dx;  // analytic x-derivative, may be null
    std::function<double(double, double)> rho_fn;    // closed-form density (density-only)

    double constant(const std::string& key) const {
        auto it = constants.find(key);
        if (it == constants.end())
            throw validation_error("scenario '" + name + "' has no constant '" + key + "'");
        return it->second;
    }
};

namespace detail {

// H_n(xi) by the three-term recurrence H_{k+1} = 2 xi H_k - 2k H_{k-1}.
inline double hermite(int n, double xi) {
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 2.0 * xi;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * xi * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

} // namespace detail

inline Complex eval_psi(const Scenario& sc, double x, double t) {
    if (sc.kind != ScenarioKind::wavefunction_backed || !sc.psi)
        throw unsupported_error("scenario '" + sc.name + "' is density-only; psi is not defined");
    if (!std::isfinite(x) || !std::isfinite(t))
        throw validation_error("eval_psi: x and t must be finite");
    return sc.psi(x, t);
}

inline double eval_rho(const Scenario& sc, double x, double t) {
    if (!std::isfinite(x) || !std::isfinite(t))
        throw validation_error("eval_rho: x and t must be finite");
    if (sc.kind == ScenarioKind::density_only) return sc.rho_fn(x, t);
    return std::norm(sc.psi(x, t));
}

inline bool has_analytic_derivative(const Scenario& sc) {
    return static_cast<bool>(sc.dpsi_dx);
}

// Central finite difference with h = L * 1e-6, the fallback when no
// analytic derivative is in the catalog.
inline Complex eval_dpsi_dx_fd(const Scenario& sc, double x, double t) {
    const double h = sc.domain.width() * 1e-6;
    return (eval_psi(sc, x + h, t) - eval_psi(sc, x - h, t)) / (2.0 * h);
}

inline Complex eval_dpsi_dx(const Scenario& sc, double x, double t) {
    if (sc.dpsi_dx) return sc.dpsi_dx(x, t);
    return eval_dpsi_dx_fd(sc, x, t);
}

// Bohm velocity v = (hbar/m) Im(psi* dpsi/dx) / rho.
inline double eval_velocity(const Scenario& sc, double x, double t) {
    if (sc.kind != ScenarioKind::wavefunction_backed)
        throw unsupported_error("scenario '" + sc.name + "' is density-only; no velocity field");
    const Complex p = eval_psi(sc, x, t);
    const double rho = std::norm(p);
    if (rho < velocity_floor)
        throw node_error("velocity evaluated in a node region (rho = " + std::to_string(rho) +
                             " at x = " + std::to_string(x) + ", t = " + std::to_string(t) + ")",
                         x, t, rho);
    const Complex dp = eval_dpsi_dx(sc, x, t);
    return sc.constant("hbar") / sc.constant("mass") * std::imag(std::conj(p) * dp) / rho;
}

// Max density over a uniform (x, t) grid, times a 1.1 safety factor. Using
// shared-endpoint grid sizes (65, 129, 257, ...) makes successive
// resolutions nested, so the estimate is nondecreasing in resolution.
inline double estimate_rho_max(const Scenario& sc, long nx = 1025, long nt = 257) {
    if (nx < 64 || nt < 64)
        throw validation_error("estimate_rho_max: resolution must be at least 64 per axis");
    double best = 0.0;
    for (long j = 0; j < nt; ++j) {
        const double t = sc.t_range.lo + sc.t_range.width() * double(j) / double(nt - 1);
        for (long i = 0; i < nx; ++i) {
            const double x = sc.domain.lo + sc.domain.width() * double(i) / double(nx - 1);
            best = std::max(best, eval_rho(sc, x, t));
        }
    }
    return 1.1 * best;
}

namespace detail {

inline std::map<std::string, double> default_constants(const std::string& name) {
    const double pi = 3.14159265358979323846;
    if (name == "harmonic")
        return {{"hbar", 1}, {"mass", 1}, {"omega", 3},
                {"x_lo", -5}, {"x_hi", 5}, {"t0", 0}, {"t1", 3},
                {"dt", 0.1}, {"n", 10000}, {"epsilon", 1e-3},
                {"length_scale", 1}, {"time_scale", 1}};
    if (name == "free")
        return {{"hbar", 1}, {"mass", 1}, {"a", pi / 2},
                {"x_lo", -20}, {"x_hi", 20}, {"t0", 0}, {"t1", 3},
                {"dt", 0.15}, {"n", 100000}, {"epsilon", 1e-3},
                {"length_scale", 1}, {"time_scale", 1}};
    if (name == "two-slit")
        // Slit geometry is a free parameter; the defaults keep the full
        // interference pattern inside the domain until t1.
        return {{"hbar", 1}, {"mass", 1}, {"slit_offset", 12.0}, {"slit_sigma", 2.2},
                {"x_lo", -129.668}, {"x_hi", 129.668}, {"t0", 0}, {"t1", 100},
                {"dt", 100.0 / 30.0}, {"n", 100000}, {"epsilon", 7.78008e-4},
                {"length_scale", 1}, {"time_scale", 1}};
    if (name == "well")
        return {{"hbar", 1}, {"mass", 1}, {"well_width", 1},
                {"x_lo", 0}, {"x_hi", 1}, {"t0", 0}, {"t1", 1},
                {"dt", 0.05}, {"n", 10000}, {"epsilon", 1e-3},
                {"length_scale", 1}, {"time_scale", 1}};
    if (name == "eigenstate")
        return {{"hbar", 1}, {"mass", 1}, {"omega", 3}, {"level", 0},
                {"x_lo", -5}, {"x_hi", 5}, {"t0", 0}, {"t1", 3},
                {"dt", 0.1}, {"n", 10000}, {"epsilon", 1e-3},
                {"length_scale", 1}, {"time_scale", 1}};
    if (name == "uniform")
        return {{"x_lo", 0}, {"x_hi", 1}, {"t0", 0}, {"t1", 1},
                {"dt", 0.1}, {"n", 10000}, {"epsilon", 1e-3},
                {"length_scale", 1}, {"time_scale", 1}};
    throw unsupported_error("unknown scenario '" + name + "'");
}

inline void require_positive(const Scenario& sc, const std::string& key) {
    if (!(sc.constant(key) > 0.0))
        throw validation_error("scenario '" + sc.name + "': constant '" + key + "' must be positive");
}

} // namespace detail

inline std::vector<std::string> scenario_names() {
    return {"harmonic", "free", "two-slit", "well", "eigenstate", "uniform"};
}

// Builds a catalog scenario, applying config overrides on top of the
// defaults. Unknown override keys are rejected.
inline Scenario make_scenario(const std::string& name,
                              const std::map<std::string, double>& overrides = {}) {
    const double pi = 3.14159265358979323846;
    auto consts = detail::default_constants(name);
    for (const auto& [key, value] : overrides) {
        if (consts.find(key) == consts.end())
            throw validation_error("scenario '" + name + "' has no constant '" + key + "'");
        consts[key] = value;
    }

    Scenario sc;
    sc.name = name;
    sc.constants = consts;
    sc.domain = {consts.at("x_lo"), consts.at("x_hi")};
    sc.t_range = {consts.at("t0"), consts.at("t1")};
    sc.default_dt = consts.at("dt");
    sc.default_n = std::lround(consts.at("n"));
    sc.default_epsilon = consts.at("epsilon");
    sc.length_scale = consts.at("length_scale");
    sc.time_scale = consts.at("time_scale");

    if (!(sc.domain.lo < sc.domain.hi))
        throw validation_error("scenario '" + name + "': domain needs x_lo < x_hi");
    if (!(sc.t_range.lo < sc.t_range.hi))
        throw validation_error("scenario '" + name + "': time range needs t0 < t1");
    if (!(sc.default_dt > 0)) throw validation_error("scenario '" + name + "': dt must be positive");
    if (sc.default_n < 2) throw validation_error("scenario '" + name + "': n must be at least 2");
    if (!(sc.default_epsilon > 0 && sc.default_epsilon < 1))
        throw validation_error("scenario '" + name + "': epsilon must lie in (0,1)");
    detail::require_positive(sc, "length_scale");
    detail::require_positive(sc, "time_scale");

    if (name == "harmonic") {
        detail::require_positive(sc, "hbar");
        detail::require_positive(sc, "mass");
        detail::require_positive(sc, "omega");
        const double hbar = consts.at("hbar"), m = consts.at("mass"), omega = consts.at("omega");
        const double a = std::sqrt(hbar / (m * omega));
        const double norm = 1.0 / (2.0 * std::sqrt(a * std::sqrt(pi)));
        // superposition of the ground state and the first three odd excited
        // states, each with amplitude 1/2
        const int levels[4] = {0, 1, 3, 5};
        double coeff[4];
        for (int k = 0; k < 4; ++k)
            coeff[k] = 1.0 / std::sqrt(detail::factorial(levels[k]) * std::pow(2.0, levels[k]));
        sc.psi = [=](double x, double t) {
            const double xi = x / a;
            const Complex w = std::exp(Complex(0.0, -omega * t));  // phase step per level
            const Complex half = std::exp(Complex(0.0, -0.5 * omega * t));
            Complex sum = 0.0;
            Complex wn = 1.0;
            int level = 0;
            for (int k = 0; k < 4; ++k) {
                for (; level < levels[k]; ++level) wn *= w;
                sum += coeff[k] * detail::hermite(levels[k], xi) * wn;
            }
            return norm * std::exp(-0.5 * xi * xi) * half * sum;
        };
        sc.dpsi_dx = [=](double x, double t) {
            const double xi = x / a;
            const Complex w = std::exp(Complex(0.0, -omega * t));
            const Complex half = std::exp(Complex(0.0, -0.5 * omega * t));
            Complex sum = 0.0;
            Complex wn = 1.0;
            int level = 0;
            for (int k = 0; k < 4; ++k) {
                const int n = levels[k];
                for (; level < n; ++level) wn *= w;
                const double hp = (n > 0) ? 2.0 * n * detail::hermite(n - 1, xi) : 0.0;
                sum += coeff[k] * (hp - xi * detail::hermite(n, xi)) * wn;
            }
            return norm / a * std::exp(-0.5 * xi * xi) * half * sum;
        };
    } else if (name == "free") {
        detail::require_positive(sc, "hbar");
        detail::require_positive(sc, "mass");
        detail::require_positive(sc, "a");
        const double hbar = consts.at("hbar"), m = consts.at("mass"), a = consts.at("a");
        const double beta = 2.0 * hbar * a / m;
        const double amp = std::pow(2.0 * a / pi, 0.25);
        sc.psi = [=](double x, double t) {
            const Complex d(1.0, beta * t);
            return amp * std::exp(-a * x * x / d) / std::sqrt(d);
        };
        sc.dpsi_dx = [=](double x, double t) {
            const Complex d(1.0, beta * t);
            return -2.0 * a * x / d * amp * std::exp(-a * x * x / d) / std::sqrt(d);
        };
    } else if (name == "two-slit") {
        detail::require_positive(sc, "hbar");
        detail::require_positive(sc, "mass");
        detail::require_positive(sc, "slit_offset");
        detail::require_positive(sc, "slit_sigma");
        const double hbar = consts.at("hbar"), m = consts.at("mass");
        const double y0 = consts.at("slit_offset"), sigma0 = consts.at("slit_sigma");
        // two free Gaussian packets centered at +-y0 with zero transverse
        // momentum; the norm accounts for their (tiny) initial overlap
        const double alpha = 1.0 / (4.0 * sigma0 * sigma0);
        const double beta = 2.0 * hbar * alpha / m;
        const double amp = std::pow(2.0 * alpha / pi, 0.25);
        const double norm = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * alpha * y0 * y0)));
        sc.psi = [=](double y, double t) {
            const Complex d(1.0, beta * t);
            const Complex pre = amp / std::sqrt(d);
            const Complex gp = pre * std::exp(-alpha * (y - y0) * (y - y0) / d);
            const Complex gm = pre * std::exp(-alpha * (y + y0) * (y + y0) / d);
            return norm * (gp + gm);
        };
        sc.dpsi_dx = [=](double y, double t) {
            const Complex d(1.0, beta * t);
            const Complex pre = amp / std::sqrt(d);
            const Complex gp = pre * std::exp(-alpha * (y - y0) * (y - y0) / d);
            const Complex gm = pre * std::exp(-alpha * (y + y0) * (y + y0) / d);
            return norm * (-2.0 * alpha / d) * ((y - y0) * gp + (y + y0) * gm);
        };
    } else if (name == "well") {
        detail::require_positive(sc, "hbar");
        detail::require_positive(sc, "mass");
        detail::require_positive(sc, "well_width");
        const double hbar = consts.at("hbar"), m = consts.at("mass"), L = consts.at("well_width");
        const double e1 = pi * pi * hbar * hbar / (2.0 * m * L * L);
        const double amp = std::sqrt(1.0 / L);
        // equal superposition of the two lowest well states; E_2 = 4 E_1
        sc.psi = [=](double x, double t) {
            const Complex w1 = std::exp(Complex(0.0, -e1 * t / hbar));
            const Complex w4 = w1 * w1 * w1 * w1;
            return amp * (std::sin(pi * x / L) * w1 + std::sin(2.0 * pi * x / L) * w4);
        };
        sc.dpsi_dx = [=](double x, double t) {
            const Complex w1 = std::exp(Complex(0.0, -e1 * t / hbar));
            const Complex w4 = w1 * w1 * w1 * w1;
            return amp * pi / L * (std::cos(pi * x / L) * w1 + 2.0 * std::cos(2.0 * pi * x / L) * w4);
        };
    } else if (name == "eigenstate") {
        detail::require_positive(sc, "hbar");
        detail::require_positive(sc, "mass");
        detail::require_positive(sc, "omega");
        const int n = int(std::lround(consts.at("level")));
        if (n < 0 || n > 60)
            throw validation_error("scenario 'eigenstate': level must lie in [0, 60]");
        const double hbar = consts.at("hbar"), m = consts.at("mass"), omega = consts.at("omega");
        const double a = std::sqrt(hbar / (m * omega));
        const double norm = 1.0 / std::sqrt(a * std::sqrt(pi) * std::pow(2.0, n) * detail::factorial(n));
        const double energy = hbar * omega * (n + 0.5);
        sc.psi = [=](double x, double t) {
            const double xi = x / a;
            return norm * detail::hermite(n, xi) * std::exp(-0.5 * xi * xi) *
                   std::exp(Complex(0.0, -energy * t / hbar));
        };
        sc.dpsi_dx = [=](double x, double t) {
            const double xi = x / a;
            const double hp = (n > 0) ? 2.0 * n * detail::hermite(n - 1, xi) : 0.0;
            return norm / a * (hp - xi * detail::hermite(n, xi)) * std::exp(-0.5 * xi * xi) *
                   std::exp(Complex(0.0, -energy * t / hbar));
        };
    } else if (name == "uniform") {
        sc.kind = ScenarioKind::density_only;
        const Interval dom = sc.domain;
        const double value = 1.0 / dom.width();
        sc.rho_fn = [=](double x, double) { return dom.contains(x) ? value : 0.0; };
    }
    return sc;
}

inline TimeGrid default_grid(const Scenario& sc) {
    return make_time_grid(sc.t_range.lo, sc.t_range.hi, sc.default_dt);
}

} // namespace bohm
