#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cylou/rng.hpp"
#include "cylou/spectral.hpp"

namespace cylou {

// One symmetric real Levy coordinate. Normalisation convention, fixed across
// the whole library:
//   stable(alpha, sigma):  characteristic exponent  psi(th) = -sigma^alpha |th|^alpha,
//                          Levy measure  sigma^alpha * (1/2)|b|^{-1-alpha} db;
//   compound Poisson:      jumps of magnitude b_i taken as +-b_i with equal
//                          probability, psi(th) = rate * sum_i p_i (cos(th b_i) - 1).
struct StableCoord {
    double alpha;
    double sigma;
};

struct JumpAtom {
    double magnitude;
    double prob;
};

struct CompoundPoissonCoord {
    double rate;
    std::vector<JumpAtom> jumps;
};

using OneDimLevySpec = std::variant<StableCoord, CompoundPoissonCoord>;

inline OneDimLevySpec make_stable(double alpha, double sigma) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("make_stable: alpha must lie in (0,2)");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("make_stable: sigma must be > 0");
    return StableCoord{alpha, sigma};
}

// rate == 0 encodes an inactive coordinate (no jumps at all).
inline OneDimLevySpec make_compound_poisson(double rate, std::vector<JumpAtom> jumps) {
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("make_compound_poisson: rate must be >= 0");
    if (rate > 0.0) {
        if (jumps.empty())
            throw std::invalid_argument("make_compound_poisson: jump list is empty");
        double total = 0.0;
        for (const auto& j : jumps) {
            if (!(j.magnitude > 0.0) || !std::isfinite(j.magnitude))
                throw std::invalid_argument("make_compound_poisson: jump magnitudes must be > 0");
            if (j.prob < 0.0)
                throw std::invalid_argument("make_compound_poisson: jump probabilities must be >= 0");
            total += j.prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("make_compound_poisson: jump probabilities must sum to 1");
    }
    return CompoundPoissonCoord{rate, std::move(jumps)};
}

// psi(theta) for one coordinate; real and <= 0 by symmetry, psi(0) = 0.
inline double symbol_1d(const OneDimLevySpec& spec, double theta) {
    if (std::holds_alternative<StableCoord>(spec)) {
        const auto& s = std::get<StableCoord>(spec);
        return -std::pow(s.sigma, s.alpha) * std::pow(std::abs(theta), s.alpha);
    }
    const auto& cp = std::get<CompoundPoissonCoord>(spec);
    double acc = 0.0;
    for (const auto& j : cp.jumps) acc += j.prob * (std::cos(theta * j.magnitude) - 1.0);
    return cp.rate * acc;
}

// int (|b|^2 ^ 1) mu(db) over the coordinate's Levy measure, scale included.
inline double levy_integral_sq_trunc(const OneDimLevySpec& spec) {
    if (std::holds_alternative<StableCoord>(spec)) {
        const auto& s = std::get<StableCoord>(spec);
        return std::pow(s.sigma, s.alpha) * (1.0 / (2.0 - s.alpha) + 1.0 / s.alpha);
    }
    const auto& cp = std::get<CompoundPoissonCoord>(spec);
    double acc = 0.0;
    for (const auto& j : cp.jumps) acc += j.prob * std::min(j.magnitude * j.magnitude, 1.0);
    return cp.rate * acc;
}

// int log+ |b| mu(db); the logarithmic moment outside the unit ball.
inline double levy_integral_logplus(const OneDimLevySpec& spec) {
    if (std::holds_alternative<StableCoord>(spec)) {
        const auto& s = std::get<StableCoord>(spec);
        return std::pow(s.sigma, s.alpha) / (s.alpha * s.alpha);
    }
    const auto& cp = std::get<CompoundPoissonCoord>(spec);
    double acc = 0.0;
    for (const auto& j : cp.jumps)
        if (j.magnitude > 1.0) acc += j.prob * std::log(j.magnitude);
    return cp.rate * acc;
}

// Driving cylindrical Levy process.
//   CanonicalStable:  rotationally invariant, symbol -||u||^alpha.
//   DiagonalSeries:   independent symmetric coordinates along the eigenbasis.
//   DiagonalGaussian: cylindrical Brownian part with diagonal covariance q.
struct CanonicalStable {
    double alpha;
};
struct DiagonalSeries {
    std::vector<OneDimLevySpec> coords;
};
struct DiagonalGaussian {
    std::vector<double> q;
};
using NoiseSpec = std::variant<CanonicalStable, DiagonalSeries, DiagonalGaussian>;

inline NoiseSpec make_canonical_stable(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("make_canonical_stable: alpha must lie in (0,2)");
    return CanonicalStable{alpha};
}

inline NoiseSpec make_diagonal_gaussian(std::vector<double> q) {
    for (double x : q)
        if (x < 0.0 || !std::isfinite(x))
            throw std::invalid_argument("make_diagonal_gaussian: covariance entries must be >= 0");
    return DiagonalGaussian{std::move(q)};
}

// Cylindrical symbol Psi(u); real by symmetry of every admitted family.
inline double symbol(const NoiseSpec& noise, const CoeffVector& u) {
    if (std::holds_alternative<CanonicalStable>(noise)) {
        const double a = std::get<CanonicalStable>(noise).alpha;
        double n2 = 0.0;
        for (double x : u.c) n2 += x * x;
        return n2 == 0.0 ? 0.0 : -std::pow(n2, 0.5 * a);
    }
    if (std::holds_alternative<DiagonalSeries>(noise)) {
        const auto& coords = std::get<DiagonalSeries>(noise).coords;
        if (u.size() > coords.size())
            throw std::invalid_argument("symbol: vector has more coordinates than the noise");
        double acc = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) acc += symbol_1d(coords[k], u[k]);
        return acc;
    }
    const auto& q = std::get<DiagonalGaussian>(noise).q;
    if (u.size() > q.size())
        throw std::invalid_argument("symbol: vector has more coordinates than the noise");
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += q[k] * u[k] * u[k];
    return -0.5 * acc;
}

inline std::size_t noise_dim(const NoiseSpec& noise, std::size_t model_modes) {
    if (std::holds_alternative<DiagonalSeries>(noise))
        return std::get<DiagonalSeries>(noise).coords.size();
    if (std::holds_alternative<DiagonalGaussian>(noise))
        return std::get<DiagonalGaussian>(noise).q.size();
    return model_modes;  // canonical noise lives on every mode
}

inline void require_compatible(const SpectralModel& model, const NoiseSpec& noise) {
    const std::size_t nd = noise_dim(noise, model.n_modes());
    if (nd != model.n_modes())
        throw std::invalid_argument("noise dimension " + std::to_string(nd) +
                                    " != model truncation " + std::to_string(model.n_modes()));
}

// Symmetric alpha-stable variate with characteristic function
// exp(-scale^alpha |theta|^alpha), by the Chambers-Mallows-Stuck construction.
inline double sample_stable(double alpha, double scale, RngState& rng) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("sample_stable: alpha must lie in (0,2)");
    if (!(scale > 0.0))
        throw std::invalid_argument("sample_stable: scale must be > 0");
    const double v = 3.141592653589793238462643383279 * (rng.uniform01() - 0.5);
    const double w = rng.exponential();
    const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    return scale * x;
}

// Positive stable increment with Laplace transform exp(-dt * theta^alpha_half)
// (Kanter's representation). Drives the canonical stable scheme: a normal
// vector scaled by sqrt(2 S) has characteristic function exp(-dt ||u||^alpha)
// with alpha = 2 * alpha_half.
inline double sample_subordinator(double alpha_half, double dt, RngState& rng) {
    if (!(alpha_half > 0.0) || !(alpha_half < 1.0))
        throw std::invalid_argument("sample_subordinator: alpha_half must lie in (0,1)");
    if (!(dt > 0.0))
        throw std::invalid_argument("sample_subordinator: dt must be > 0");
    const double a = alpha_half;
    const double u = 3.141592653589793238462643383279 * rng.uniform01();
    const double w = rng.exponential();
    const double s = std::sin(a * u) * std::pow(std::sin((1.0 - a) * u), (1.0 - a) / a) /
                     std::pow(std::sin(u), 1.0 / a) * std::pow(w, -(1.0 - a) / a);
    return std::pow(dt, 1.0 / a) * s;
}

} // namespace cylou
