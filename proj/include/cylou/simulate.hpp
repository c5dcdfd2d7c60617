#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "cylou/levy.hpp"
#include "cylou/rng.hpp"
#include "cylou/spectral.hpp"

namespace cylou {

struct Y0Zero {};
struct Y0Point {
    CoeffVector v;
};
using Y0Spec = std::variant<Y0Zero, Y0Point>;

struct SimConfig {
    std::size_t n_paths = 1;
    double t_final = 1.0;
    double dt = 0.01;                  // substep cap for the non-exact schemes
    std::vector<double> record_times;  // sorted, within [0, t_final]; empty -> {t_final}
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;          // base stream; path j draws from stream + j
    Y0Spec y0 = Y0Zero{};
    unsigned workers = 0;              // 0 = hardware concurrency
};

enum class SchemeTag { ExactStable, EulerCP, SubordinatedCanonical, ExactGaussian };

inline const char* to_string(SchemeTag s) {
    switch (s) {
        case SchemeTag::ExactStable: return "ExactStable";
        case SchemeTag::EulerCP: return "EulerCP";
        case SchemeTag::SubordinatedCanonical: return "SubordinatedCanonical";
        case SchemeTag::ExactGaussian: return "ExactGaussian";
    }
    return "?";
}

class sim_budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Monte-Carlo sample of the truncated mild solution at the record times.
// states is laid out [record_time][path][mode]; a fixed (seed, stream) pair
// reproduces it bit-exactly for any worker count.
struct Ensemble {
    std::vector<double> record_times;
    std::size_t n_paths = 0;
    std::size_t n_modes = 0;
    SchemeTag scheme = SchemeTag::ExactStable;
    SimConfig config;
    std::vector<double> states;

    std::span<const double> state(std::size_t time_idx, std::size_t path) const {
        return {states.data() + (time_idx * n_paths + path) * n_modes, n_modes};
    }
};

// One exact-in-law Ornstein-Uhlenbeck update of a stable coordinate:
// y' = e^{-lambda dt} y + S with S symmetric alpha-stable of scale
// sigma * ((1 - e^{-alpha lambda dt})/(alpha lambda))^{1/alpha}.
inline double exact_step_stable(double y, double lambda, double alpha, double sigma, double dt,
                                RngState& rng) {
    if (!(lambda > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("exact_step_stable: lambda and dt must be > 0");
    const double scale =
        sigma * std::pow(-std::expm1(-alpha * lambda * dt) / (alpha * lambda), 1.0 / alpha);
    return std::exp(-lambda * dt) * y + sample_stable(alpha, scale, rng);
}

inline double exact_step_gaussian(double y, double lambda, double q, double dt, RngState& rng) {
    if (!(lambda > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("exact_step_gaussian: lambda and dt must be > 0");
    const double sd = std::sqrt(q * -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda));
    return std::exp(-lambda * dt) * y + (sd > 0.0 ? sd * rng.normal() : 0.0);
}

namespace detail {

inline double cp_increment(const CompoundPoissonCoord& cp, double h, RngState& rng) {
    if (cp.rate == 0.0) return 0.0;
    const std::uint64_t n = rng.poisson(cp.rate * h);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        double acc = 0.0;
        double b = cp.jumps.back().magnitude;
        for (const auto& j : cp.jumps) {
            acc += j.prob;
            if (u <= acc) {
                b = j.magnitude;
                break;
            }
        }
        sum += rng.uniform01() < 0.5 ? -b : b;
    }
    return sum;
}

} // namespace detail

// Decay-then-increment splitting for compound Poisson coordinates (stable
// coordinates inside the same series are still stepped exactly). Weak error
// O(dt) from the drift/jump interaction.
inline CoeffVector euler_step_cp(const CoeffVector& y, const SpectralModel& model,
                                 const DiagonalSeries& noise, double dt, RngState& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("euler_step_cp: dt must be > 0");
    if (y.size() != model.n_modes() || noise.coords.size() != model.n_modes())
        throw std::invalid_argument("euler_step_cp: dimension mismatch");
    std::vector<double> out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (std::holds_alternative<StableCoord>(noise.coords[k])) {
            const auto& s = std::get<StableCoord>(noise.coords[k]);
            out[k] = exact_step_stable(y[k], model.lambda(k), s.alpha, s.sigma, dt, rng);
        } else {
            const auto& cp = std::get<CompoundPoissonCoord>(noise.coords[k]);
            out[k] = std::exp(-model.lambda(k) * dt) * y[k] + detail::cp_increment(cp, dt, rng);
        }
    }
    return CoeffVector(std::move(out));
}

// Splitting step for the canonical alpha-stable noise: decay, then add
// sqrt(2 S) G with one shared subordinator increment S across all modes. The
// shared S is what makes the coordinates dependent, matching the rotationally
// invariant increment law exp(-dt ||u||^alpha).
inline CoeffVector subordinated_step_canonical(const CoeffVector& y, const SpectralModel& model,
                                               double alpha, double dt, RngState& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("subordinated_step_canonical: dt must be > 0");
    if (y.size() != model.n_modes())
        throw std::invalid_argument("subordinated_step_canonical: dimension mismatch");
    const double s = sample_subordinator(0.5 * alpha, dt, rng);
    const double amp = std::sqrt(2.0 * s);
    std::vector<double> out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        out[k] = std::exp(-model.lambda(k) * dt) * y[k] + amp * rng.normal();
    return CoeffVector(std::move(out));
}

inline SchemeTag scheme_for(const NoiseSpec& noise) {
    if (std::holds_alternative<CanonicalStable>(noise)) return SchemeTag::SubordinatedCanonical;
    if (std::holds_alternative<DiagonalGaussian>(noise)) return SchemeTag::ExactGaussian;
    const auto& coords = std::get<DiagonalSeries>(noise).coords;
    for (const auto& c : coords)
        if (std::holds_alternative<CompoundPoissonCoord>(c)) return SchemeTag::EulerCP;
    return SchemeTag::ExactStable;
}

namespace detail {

// Everything one record interval needs, precomputed once and shared read-only
// across paths.
struct StepPlan {
    double h = 0.0;
    std::size_t n_sub = 0;  // 0 means nothing to do (zero-length interval)
    std::vector<double> decay;
    std::vector<double> stable_scale;  // per mode, stable coords only
    std::vector<double> gauss_sd;      // per mode, Gaussian scheme only
};

inline StepPlan make_plan(const SpectralModel& model, const NoiseSpec& noise, SchemeTag scheme,
                          double interval, double dt_cap) {
    StepPlan plan;
    if (interval <= 0.0) return plan;
    const bool exact = scheme == SchemeTag::ExactStable || scheme == SchemeTag::ExactGaussian;
    plan.n_sub = exact ? 1 : static_cast<std::size_t>(std::ceil(interval / dt_cap));
    plan.h = interval / static_cast<double>(plan.n_sub);
    const std::size_t n = model.n_modes();
    plan.decay.resize(n);
    for (std::size_t k = 0; k < n; ++k) plan.decay[k] = std::exp(-model.lambda(k) * plan.h);
    if (scheme == SchemeTag::ExactStable || scheme == SchemeTag::EulerCP) {
        const auto& coords = std::get<DiagonalSeries>(noise).coords;
        plan.stable_scale.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            if (std::holds_alternative<StableCoord>(coords[k])) {
                const auto& s = std::get<StableCoord>(coords[k]);
                plan.stable_scale[k] =
                    s.sigma * std::pow(-std::expm1(-s.alpha * model.lambda(k) * plan.h) /
                                           (s.alpha * model.lambda(k)),
                                       1.0 / s.alpha);
            }
    }
    if (scheme == SchemeTag::ExactGaussian) {
        const auto& q = std::get<DiagonalGaussian>(noise).q;
        plan.gauss_sd.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            plan.gauss_sd[k] =
                std::sqrt(q[k] * -std::expm1(-2.0 * model.lambda(k) * plan.h) /
                          (2.0 * model.lambda(k)));
    }
    return plan;
}

inline void advance_substep(std::vector<double>& y, const SpectralModel& model,
                            const NoiseSpec& noise, SchemeTag scheme, const StepPlan& plan,
                            RngState& rng) {
    const std::size_t n = y.size();
    switch (scheme) {
        case SchemeTag::ExactStable:
        case SchemeTag::EulerCP: {
            const auto& coords = std::get<DiagonalSeries>(noise).coords;
            for (std::size_t k = 0; k < n; ++k) {
                if (std::holds_alternative<StableCoord>(coords[k])) {
                    const double a = std::get<StableCoord>(coords[k]).alpha;
                    y[k] = plan.decay[k] * y[k] + sample_stable(a, plan.stable_scale[k], rng);
                } else {
                    const auto& cp = std::get<CompoundPoissonCoord>(coords[k]);
                    y[k] = plan.decay[k] * y[k] + cp_increment(cp, plan.h, rng);
                }
            }
            break;
        }
        case SchemeTag::ExactGaussian:
            for (std::size_t k = 0; k < n; ++k) {
                const double sd = plan.gauss_sd[k];
                y[k] = plan.decay[k] * y[k] + (sd > 0.0 ? sd * rng.normal() : 0.0);
            }
            break;
        case SchemeTag::SubordinatedCanonical: {
            const double alpha = std::get<CanonicalStable>(noise).alpha;
            const double s = sample_subordinator(0.5 * alpha, plan.h, rng);
            const double amp = std::sqrt(2.0 * s);
            for (std::size_t k = 0; k < n; ++k)
                y[k] = plan.decay[k] * y[k] + amp * rng.normal();
            break;
        }
    }
}

inline void validate_config(const SimConfig& cfg) {
    if (cfg.n_paths == 0) throw std::invalid_argument("sim: n_paths must be >= 1");
    if (!(cfg.t_final > 0.0)) throw std::invalid_argument("sim: t_final must be > 0");
    if (!(cfg.dt > 0.0) || cfg.dt > cfg.t_final)
        throw std::invalid_argument("sim: need 0 < dt <= t_final");
    double prev = 0.0;
    for (double t : cfg.record_times) {
        if (t < prev || t > cfg.t_final)
            throw std::invalid_argument("sim: record_times must be sorted within [0, t_final]");
        prev = t;
    }
}

} // namespace detail

inline Ensemble simulate_ensemble(const SpectralModel& model, const NoiseSpec& noise,
                                  const SimConfig& config,
                                  std::span<const double> y0_states = {}) {
    require_compatible(model, noise);
    detail::validate_config(config);

    Ensemble ens;
    ens.config = config;
    ens.record_times = config.record_times.empty() ? std::vector<double>{config.t_final}
                                                   : config.record_times;
    ens.n_paths = config.n_paths;
    ens.n_modes = model.n_modes();
    ens.scheme = scheme_for(noise);

    if (!y0_states.empty() && y0_states.size() % ens.n_modes != 0)
        throw std::invalid_argument("simulate_ensemble: resample state size mismatch");

    std::vector<detail::StepPlan> plans(ens.record_times.size());
    double t_prev = 0.0;
    std::size_t total_sub = 0;
    for (std::size_t i = 0; i < ens.record_times.size(); ++i) {
        plans[i] = detail::make_plan(model, noise, ens.scheme, ens.record_times[i] - t_prev,
                                     config.dt);
        total_sub += plans[i].n_sub;
        t_prev = ens.record_times[i];
    }

    constexpr std::size_t kWorkBudget = std::size_t{1} << 34;
    if (ens.n_paths * std::max<std::size_t>(total_sub, 1) * ens.n_modes > kWorkBudget)
        throw sim_budget_error("simulate_ensemble: paths * steps * modes exceeds the work budget");

    ens.states.assign(ens.record_times.size() * ens.n_paths * ens.n_modes, 0.0);

    std::vector<double> y0(ens.n_modes, 0.0);
    if (std::holds_alternative<Y0Point>(config.y0)) {
        const auto& v = std::get<Y0Point>(config.y0).v;
        if (v.size() > ens.n_modes)
            throw std::invalid_argument("simulate_ensemble: y0 longer than model truncation");
        std::copy(v.c.begin(), v.c.end(), y0.begin());
    }

    auto run_paths = [&](std::size_t p0, std::size_t p1) {
        std::vector<double> y(ens.n_modes);
        for (std::size_t p = p0; p < p1; ++p) {
            if (!y0_states.empty()) {
                const std::size_t src = (p * ens.n_modes) % y0_states.size();
                std::copy(y0_states.begin() + src, y0_states.begin() + src + ens.n_modes,
                          y.begin());
            } else {
                y = y0;
            }
            RngState rng(config.seed, config.stream + p);
            for (std::size_t i = 0; i < ens.record_times.size(); ++i) {
                for (std::size_t s = 0; s < plans[i].n_sub; ++s)
                    detail::advance_substep(y, model, noise, ens.scheme, plans[i], rng);
                std::copy(y.begin(), y.end(),
                          ens.states.begin() + (i * ens.n_paths + p) * ens.n_modes);
            }
        }
    };

    unsigned workers = config.workers != 0 ? config.workers
                                           : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, ens.n_paths));
    if (workers <= 1) {
        run_paths(0, ens.n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (ens.n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t p0 = std::min<std::size_t>(w * chunk, ens.n_paths);
            const std::size_t p1 = std::min<std::size_t>(p0 + chunk, ens.n_paths);
            if (p0 < p1) pool.emplace_back(run_paths, p0, p1);
        }
        for (auto& t : pool) t.join();
    }
    return ens;
}

struct MehlerEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo evaluation of the Mehler semigroup P_t f(v): average of
// f(T(t) v + H) over H ~ nu_t, sampled with y0 = 0. f must be bounded;
// std_error is reported as f_sup / sqrt(M).
inline MehlerEstimate mehler_apply(const SpectralModel& model, const NoiseSpec& noise,
                                   const std::function<double(const CoeffVector&)>& f,
                                   const CoeffVector& v, double t, std::size_t n_paths,
                                   std::uint64_t seed, std::uint64_t stream, double f_sup = 1.0,
                                   double dt = 0.01, unsigned workers = 0) {
    if (!(t >= 0.0)) throw std::invalid_argument("mehler_apply: t must be >= 0");
    if (n_paths == 0) throw std::invalid_argument("mehler_apply: n_paths must be >= 1");
    if (v.size() > model.n_modes())
        throw std::invalid_argument("mehler_apply: v longer than model truncation");
    if (t == 0.0) return {f(v), 0.0};  // nu_0 = delta_0

    SimConfig cfg;
    cfg.n_paths = n_paths;
    cfg.t_final = t;
    cfg.dt = std::min(dt, t);
    cfg.record_times = {t};
    cfg.seed = seed;
    cfg.stream = stream;
    cfg.workers = workers;
    const Ensemble ens = simulate_ensemble(model, noise, cfg);

    const CoeffVector tv = semigroup_apply(model, v, t);
    double acc = 0.0;
    CoeffVector arg;
    arg.c.resize(model.n_modes());
    for (std::size_t p = 0; p < n_paths; ++p) {
        const auto st = ens.state(0, p);
        for (std::size_t k = 0; k < model.n_modes(); ++k)
            arg.c[k] = (k < tv.size() ? tv[k] : 0.0) + st[k];
        acc += f(arg);
    }
    return {acc / static_cast<double>(n_paths),
            f_sup / std::sqrt(static_cast<double>(n_paths))};
}

} // namespace cylou
