#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cylou/criteria.hpp"
#include "cylou/levy.hpp"
#include "cylou/quadrature.hpp"
#include "cylou/rng.hpp"
#include "cylou/simulate.hpp"
#include "cylou/spectral.hpp"

namespace cylou {

// One characteristic-function evaluation phi_{nu_t}(v), either from the
// quadrature of the symbol along the semigroup orbit or from an ensemble.
struct CfProbe {
    CoeffVector v;
    double t = 0.0;
    bool is_limit = false;  // t = infinity
    std::complex<double> value;
    double err_bound = 0.0;
    std::string source;  // "quadrature" or "empirical(M)"
};

namespace detail {

struct DecayEnvelope {
    double rate = 1.0;
    double bound = 0.0;
};

// |Psi(T(s)v)| <= bound * e^{-rate s}: per-family envelope used to cut the
// time integral with a certified tail.
inline DecayEnvelope symbol_envelope(const SpectralModel& model, const NoiseSpec& noise,
                                     const CoeffVector& v) {
    DecayEnvelope env;
    env.rate = std::numeric_limits<double>::infinity();
    if (std::holds_alternative<CanonicalStable>(noise)) {
        const double a = std::get<CanonicalStable>(noise).alpha;
        const double n = v.norm2();
        if (n > 0.0) {
            env.bound = std::pow(n, a);
            env.rate = a * model.lambda_min();
        }
    } else if (std::holds_alternative<DiagonalSeries>(noise)) {
        const auto& coords = std::get<DiagonalSeries>(noise).coords;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] == 0.0) continue;
            if (std::holds_alternative<StableCoord>(coords[k])) {
                const auto& s = std::get<StableCoord>(coords[k]);
                env.bound += std::pow(s.sigma, s.alpha) * std::pow(std::abs(v[k]), s.alpha);
                env.rate = std::min(env.rate, s.alpha * model.lambda(k));
            } else {
                const auto& cp = std::get<CompoundPoissonCoord>(coords[k]);
                double m2 = 0.0;
                for (const auto& j : cp.jumps) m2 += j.prob * j.magnitude * j.magnitude;
                env.bound += 0.5 * cp.rate * m2 * v[k] * v[k];
                env.rate = std::min(env.rate, 2.0 * model.lambda(k));
            }
        }
    } else {
        const auto& q = std::get<DiagonalGaussian>(noise).q;
        double acc = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) acc += q[k] * v[k] * v[k];
        if (acc > 0.0) {
            env.bound = 0.5 * acc;
            env.rate = 2.0 * model.lambda_min();
        }
    }
    if (!std::isfinite(env.rate)) env.rate = model.lambda_min();
    return env;
}

// CF error from an exponent error: |e^{x+d} - e^x| <= e^x (e^{|d|} - 1).
inline double cf_err_through_exp(double exponent, double exponent_err) {
    return std::exp(exponent) * std::expm1(exponent_err);
}

} // namespace detail

// phi_{nu_t}(v) = exp(int_0^t Psi(T(s) v) ds); real and positive for the
// symmetric noise families admitted here.
inline CfProbe analytic_cf(const SpectralModel& model, const NoiseSpec& noise,
                           const CoeffVector& v, double t, double tol = 1e-6) {
    require_compatible(model, noise);
    if (!(t >= 0.0)) throw std::invalid_argument("analytic_cf: t must be >= 0");
    CfProbe probe;
    probe.v = v;
    probe.t = t;
    probe.source = "quadrature";
    if (t == 0.0 || v.size() == 0) {
        probe.value = 1.0;
        return probe;
    }
    const auto q = integrate_finite(
        [&](double s) { return symbol(noise, semigroup_apply(model, v, s)); }, 0.0, t, tol);
    probe.value = std::exp(q.value);
    probe.err_bound = detail::cf_err_through_exp(q.value, q.err_bound);
    return probe;
}

// phi_{nu_inf}(v): the t -> infinity limit, via the certified [0, inf)
// quadrature. For the truncated model this integral always converges; whether
// it represents the untruncated object is the criteria module's verdict, which
// callers are expected to have checked.
inline CfProbe analytic_cf_limit(const SpectralModel& model, const NoiseSpec& noise,
                                 const CoeffVector& v, double tol = 1e-6) {
    require_compatible(model, noise);
    CfProbe probe;
    probe.v = v;
    probe.t = std::numeric_limits<double>::infinity();
    probe.is_limit = true;
    probe.source = "quadrature";
    const auto env = detail::symbol_envelope(model, noise, v);
    if (env.bound == 0.0) {
        probe.value = 1.0;
        return probe;
    }
    const auto q = integrate_decaying(
        [&](double s) { return symbol(noise, semigroup_apply(model, v, s)); }, env.rate,
        env.bound, tol);
    probe.value = std::exp(q.value);
    probe.err_bound = detail::cf_err_through_exp(q.value, q.err_bound);
    return probe;
}

// (1/M) sum_j exp(i <Y_j, v>) over the ensemble at one record time. The error
// bar 4/sqrt(M) is a two-component sub-Gaussian concentration bound at about
// 1e-4 failure odds.
inline CfProbe empirical_cf(const Ensemble& ens, double record_time, const CoeffVector& v) {
    std::size_t ti = ens.record_times.size();
    for (std::size_t i = 0; i < ens.record_times.size(); ++i)
        if (std::abs(ens.record_times[i] - record_time) <= 1e-12) {
            ti = i;
            break;
        }
    if (ti == ens.record_times.size())
        throw std::invalid_argument("empirical_cf: record_time not in ensemble");
    if (v.size() > ens.n_modes)
        throw std::invalid_argument("empirical_cf: probe longer than ensemble modes");
    double re = 0.0, im = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        const auto st = ens.state(ti, p);
        double dot = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) dot += st[k] * v[k];
        re += std::cos(dot);
        im += std::sin(dot);
    }
    const double m = static_cast<double>(ens.n_paths);
    CfProbe probe;
    probe.v = v;
    probe.t = record_time;
    probe.value = {re / m, im / m};
    probe.err_bound = 4.0 / std::sqrt(m);
    probe.source = "empirical(" + std::to_string(ens.n_paths) + ")";
    return probe;
}

// |phi_{nu_{t+s}}(v) - phi_{nu_s}(T*(t) v) phi_{nu_t}(v)|; zero up to
// quadrature error by the skew-convolution identity.
inline double skew_convolution_residual(const SpectralModel& model, const NoiseSpec& noise,
                                        const CoeffVector& v, double s, double t,
                                        double tol = 1e-6) {
    if (!(s >= 0.0) || !(t >= 0.0))
        throw std::invalid_argument("skew_convolution_residual: s, t must be >= 0");
    const auto lhs = analytic_cf(model, noise, v, t + s, tol);
    const auto rhs_shift = analytic_cf(model, noise, semigroup_apply(model, v, t), s, tol);
    const auto rhs_base = analytic_cf(model, noise, v, t, tol);
    return std::abs(lhs.value - rhs_shift.value * rhs_base.value);
}

// |phi_{nu_inf}(v) - phi_{nu_inf}(T*(t) v) phi_{nu_t}(v)|; the fixed-point
// identity of the stationary measure. Only meaningful when the criteria
// certify existence, so a NoStationary verdict is rejected here.
inline double stationarity_residual(const SpectralModel& model, const NoiseSpec& noise,
                                    Overall overall, const CoeffVector& v, double t,
                                    double tol = 1e-6) {
    if (overall == Overall::NoStationary)
        throw std::logic_error("stationarity_residual: no stationary measure exists");
    if (!(t >= 0.0)) throw std::invalid_argument("stationarity_residual: t must be >= 0");
    const auto limit = analytic_cf_limit(model, noise, v, tol);
    if (t == 0.0) return 0.0;  // both sides are the same evaluation
    const auto shifted = analytic_cf_limit(model, noise, semigroup_apply(model, v, t), tol);
    const auto finite = analytic_cf(model, noise, v, t, tol);
    return std::abs(limit.value - shifted.value * finite.value);
}

// (t, |phi_{nu_t}(v) - phi_{nu_inf}(v)|) along a time grid.
inline std::vector<std::pair<double, double>> convergence_curve(
    const SpectralModel& model, const NoiseSpec& noise, Overall overall, const CoeffVector& v,
    std::span<const double> t_grid, double tol = 1e-6) {
    if (overall == Overall::NoStationary)
        throw std::logic_error("convergence_curve: no stationary measure exists");
    const auto limit = analytic_cf_limit(model, noise, v, tol);
    std::vector<std::pair<double, double>> curve;
    curve.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto p = analytic_cf(model, noise, v, t, tol);
        curve.emplace_back(t, std::abs(p.value - limit.value));
    }
    return curve;
}

// First five basis directions plus five seeded random unit vectors scaled to
// norms 1/2, 1 and 2: twenty probes for n_modes >= 5, deterministic across
// runs and configurations.
inline std::vector<CoeffVector> default_probes(std::size_t n_modes) {
    std::vector<CoeffVector> probes;
    const std::size_t nb = std::min<std::size_t>(5, n_modes);
    for (std::size_t k = 0; k < nb; ++k) {
        std::vector<double> e(k + 1, 0.0);
        e[k] = 1.0;
        probes.emplace_back(std::move(e));
    }
    RngState rng(0x0defa17u, 0);
    for (int i = 0; i < 5; ++i) {
        std::vector<double> g(n_modes);
        double n2 = 0.0;
        for (auto& x : g) {
            x = rng.normal();
            n2 += x * x;
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (double scale : {0.5, 1.0, 2.0}) {
            std::vector<double> u(n_modes);
            for (std::size_t k = 0; k < n_modes; ++k) u[k] = g[k] * inv * scale;
            probes.emplace_back(std::move(u));
        }
    }
    return probes;
}

} // namespace cylou
