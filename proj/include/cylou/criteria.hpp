#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cylou/levy.hpp"
#include "cylou/quadrature.hpp"
#include "cylou/spectral.hpp"

namespace cylou {

enum class ConditionId {
    TraceB,         // int_0^inf tr[T(s) Q T*(s)] ds < inf
    JumpC,          // jump part of the characteristics stays tight (sup over modes)
    JumpD,          // certified tail of the jump series tends to 0
    LogI,           // sum_k (1/lambda_k) int log+ |b| mu_k(db) < inf
    LogII,          // tail of the log series tends to 0
    HSalpha,        // int_0^inf ||T(s)||_HS^alpha ds < inf (canonical stable)
    ReciprocalSum,  // sum_k 1/lambda_k < inf
    DriftIII,       // sum_k |a(e_k)|/lambda_k < inf
    GaussIV,        // sum_k <Q e_k, e_k>/lambda_k < inf
    JumpV,          // sum_k (1/lambda_k) int (b^2 ^ 1) mu_k(db) < inf
    HeatLaw,        // alpha * d < 4
};

inline const char* to_string(ConditionId id) {
    switch (id) {
        case ConditionId::TraceB: return "TraceB";
        case ConditionId::JumpC: return "JumpC";
        case ConditionId::JumpD: return "JumpD";
        case ConditionId::LogI: return "LogI";
        case ConditionId::LogII: return "LogII";
        case ConditionId::HSalpha: return "HSalpha";
        case ConditionId::ReciprocalSum: return "ReciprocalSum";
        case ConditionId::DriftIII: return "DriftIII";
        case ConditionId::GaussIV: return "GaussIV";
        case ConditionId::JumpV: return "JumpV";
        case ConditionId::HeatLaw: return "HeatLaw";
    }
    return "?";
}

struct CriterionResult {
    ConditionId condition_id;
    std::optional<double> value;
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;
};

enum class Overall { StationaryExists, NoStationary, Inconclusive };

inline const char* to_string(Overall o) {
    switch (o) {
        case Overall::StationaryExists: return "StationaryExists";
        case Overall::NoStationary: return "NoStationary";
        default: return "Inconclusive";
    }
}

struct CriteriaReport {
    std::vector<CriterionResult> results;
    Overall overall = Overall::Inconclusive;
    std::string notes;

    const CriterionResult* find(ConditionId id) const {
        for (const auto& r : results)
            if (r.condition_id == id) return &r;
        return nullptr;
    }
};

namespace detail {

// The stored coefficient lists are finite; infinite-sum claims are only made
// when the stored tail shows a pattern that the growth law can turn into a
// symbolic bound. Two patterns are recognised over the trailing third of the
// list: constant coefficients w_k == w*, and coefficients tracking the
// eigenvalues w_k == r * lambda_k (constant terms).
inline bool trailing_constant(std::span<const double> xs, double& out) {
    if (xs.empty()) return false;
    const std::size_t window = std::max<std::size_t>(2, xs.size() / 3);
    const std::size_t begin = xs.size() > window ? xs.size() - window : 0;
    const double ref = xs[begin];
    for (std::size_t i = begin; i < xs.size(); ++i) {
        const double scale = std::max({std::abs(ref), std::abs(xs[i]), 1e-300});
        if (std::abs(xs[i] - ref) > 1e-12 * scale) return false;
    }
    out = ref;
    return true;
}

// Symbolic tail for sum_k w_k * scale / lambda_k beyond the truncation.
inline std::optional<PowerLawTail> series_over_lambda_tail(const SpectralModel& m,
                                                           std::span<const double> weights,
                                                           double scale,
                                                           std::string* assumption = nullptr) {
    double w_const = 0.0;
    if (trailing_constant(weights, w_const)) {
        if (w_const == 0.0) {
            if (assumption) *assumption = "trailing coefficients vanish";
            return PowerLawTail{0.0, 0.0, 2.0, 0.0};
        }
        if (!m.growth_law()) return std::nullopt;
        if (assumption)
            *assumption = "trailing coefficients constant, eigenvalue growth law extends the tail";
        if (std::holds_alternative<Weyl>(*m.growth_law())) {
            const auto& w = std::get<Weyl>(*m.growth_law());
            return PowerLawTail::exact(w_const * scale / w.c, 2.0 / w.d);
        }
        const auto& g = std::get<PowerLog>(*m.growth_law());
        return PowerLawTail{w_const * scale / g.c_hi, w_const * scale / g.c_lo, g.p, g.q};
    }
    // terms w_k / lambda_k eventually constant > 0: a non-vanishing-term
    // divergence witness, provided eigenvalue growth is declared at all.
    std::vector<double> terms(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) terms[k] = weights[k] / m.lambda(k);
    double t_const = 0.0;
    if (m.growth_law() && trailing_constant(terms, t_const) && t_const > 0.0) {
        if (assumption) *assumption = "terms do not vanish along the stored tail";
        return PowerLawTail{t_const * scale, t_const * scale, 0.0, 0.0};
    }
    return std::nullopt;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

inline CriterionResult from_decision(ConditionId id, const SeriesDecision& d, std::string context) {
    CriterionResult r;
    r.condition_id = id;
    r.verdict = d.verdict;
    std::ostringstream os;
    os << context;
    switch (d.verdict) {
        case Verdict::Holds:
            r.value = d.value();
            os << "; sum = " << fmt(*r.value) << " +- " << fmt(d.value_err()) << " ("
               << d.terms_used << " terms)";
            break;
        case Verdict::Fails:
            os << "; diverges (partial sum " << fmt(d.partial_sum) << " over " << d.terms_used
               << " terms, divergent symbolic minorant)";
            break;
        case Verdict::Inconclusive:
            os << "; partial sum " << fmt(d.partial_sum) << " over " << d.terms_used
               << " terms, no certifiable tail";
            break;
    }
    r.detail = os.str();
    return r;
}

inline SeriesDecision decide_over_lambda(const SpectralModel& m, std::span<const double> weights,
                                         double scale, double tol) {
    const auto tail = series_over_lambda_tail(m, weights, scale);
    const auto n = static_cast<std::int64_t>(weights.size());
    return decide_series(
        [&](std::int64_t k) {
            return weights[static_cast<std::size_t>(k - 1)] * scale / m.lambda(static_cast<std::size_t>(k - 1));
        },
        n, tail, tol);
}

} // namespace detail

// Per-coordinate contribution to the jump conditions for axis-supported Levy
// measures: int_0^inf int (e^{-2 lambda s} b^2 ^ 1) mu(db) ds collapses to
// sq/(2 lambda) + logplus/lambda.
inline double priola_zabczyk_term(const OneDimLevySpec& coord, double lambda) {
    return levy_integral_sq_trunc(coord) / (2.0 * lambda) + levy_integral_logplus(coord) / lambda;
}

inline CriterionResult trace_condition(const SpectralModel& model, double tol = 1e-8) {
    if (!model.q_diag())
        return {ConditionId::TraceB, std::nullopt, Verdict::Inconclusive,
                "no Gaussian covariance supplied (q_diag absent)"};
    const auto& q = *model.q_diag();
    const auto dec = detail::decide_over_lambda(model, q, 0.5, tol);
    return detail::from_decision(ConditionId::TraceB, dec, "sum_k q_k/(2 lambda_k)");
}

inline std::pair<CriterionResult, CriterionResult>
jump_conditions_diagonal(const SpectralModel& model, const DiagonalSeries& noise, double tol = 1e-8) {
    if (noise.coords.size() != model.n_modes())
        throw std::invalid_argument("jump_conditions_diagonal: coordinate count != model truncation");
    std::vector<double> weights(model.n_modes());
    for (std::size_t k = 0; k < weights.size(); ++k)
        weights[k] = 0.5 * levy_integral_sq_trunc(noise.coords[k]) + levy_integral_logplus(noise.coords[k]);
    const auto dec = detail::decide_over_lambda(model, weights, 1.0, tol);
    CriterionResult c = detail::from_decision(
        ConditionId::JumpC, dec, "sum_k J_k, J_k = sq_k/(2 lambda_k) + logplus_k/lambda_k");
    CriterionResult d = c;
    d.condition_id = ConditionId::JumpD;
    d.detail += "; tail -> 0 decided by the same certified series";
    return {std::move(c), std::move(d)};
}

inline CriterionResult reciprocal_sum_condition(const SpectralModel& model, double tol = 1e-8) {
    std::vector<double> ones(model.n_modes(), 1.0);
    const auto dec = detail::decide_over_lambda(model, ones, 1.0, tol);
    return detail::from_decision(ConditionId::ReciprocalSum, dec, "sum_k 1/lambda_k");
}

inline std::pair<CriterionResult, CriterionResult>
log_conditions(const SpectralModel& model, const DiagonalSeries& noise, double tol = 1e-8) {
    if (noise.coords.size() != model.n_modes())
        throw std::invalid_argument("log_conditions: coordinate count != model truncation");
    std::vector<double> weights(model.n_modes());
    for (std::size_t k = 0; k < weights.size(); ++k)
        weights[k] = levy_integral_logplus(noise.coords[k]);
    const auto dec = detail::decide_over_lambda(model, weights, 1.0, tol);
    CriterionResult one = detail::from_decision(
        ConditionId::LogI, dec, "sum_k logplus_k/lambda_k");
    const auto recip = reciprocal_sum_condition(model, tol);
    if (recip.verdict != Verdict::Holds)
        one.detail += "; reciprocal eigenvalue sum not certified: sufficient only together with "
                      "the drift/covariance/jump mode sums";
    CriterionResult two = one;
    two.condition_id = ConditionId::LogII;
    two.detail += "; tail -> 0 decided by the same certified series";
    return {std::move(one), std::move(two)};
}

inline CriterionResult drift_condition(const SpectralModel& model, double tol = 1e-8) {
    if (!model.a_diag())
        return {ConditionId::DriftIII, 0.0, Verdict::Holds,
                "symmetric noise with no drift: c_t == 0"};
    std::vector<double> weights(model.n_modes());
    for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = std::abs((*model.a_diag())[k]);
    const auto dec = detail::decide_over_lambda(model, weights, 1.0, tol);
    return detail::from_decision(ConditionId::DriftIII, dec, "sum_k |a_k|/lambda_k");
}

inline CriterionResult gauss_mode_condition(const SpectralModel& model, double tol = 1e-8) {
    if (!model.q_diag())
        return {ConditionId::GaussIV, std::nullopt, Verdict::Inconclusive, "q_diag absent"};
    const auto dec = detail::decide_over_lambda(model, *model.q_diag(), 1.0, tol);
    return detail::from_decision(ConditionId::GaussIV, dec, "sum_k q_k/lambda_k");
}

inline CriterionResult jump_mode_condition(const SpectralModel& model, const DiagonalSeries& noise,
                                           double tol = 1e-8) {
    std::vector<double> weights(model.n_modes());
    for (std::size_t k = 0; k < weights.size(); ++k)
        weights[k] = levy_integral_sq_trunc(noise.coords[k]);
    const auto dec = detail::decide_over_lambda(model, weights, 1.0, tol);
    return detail::from_decision(ConditionId::JumpV, dec, "sum_k sq_k/lambda_k");
}

inline bool heat_verdict(double alpha, int d) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("heat_verdict: alpha must lie in (0,2)");
    if (d < 1) throw std::invalid_argument("heat_verdict: d must be >= 1");
    return alpha * static_cast<double>(d) < 4.0;
}

// int_0^inf ||T(s)||_HS^alpha ds for the canonical alpha-stable noise. The
// truncated integral from eps is always finite; the verdict about the
// untruncated operator comes from the Weyl exponent at s -> 0 (the integrand
// grows like s^{-alpha d / 4}) or, independently, from the Cauchy-Schwarz
// bound when the reciprocal eigenvalue sum is certified.
inline CriterionResult stable_hs_condition(const SpectralModel& model, double alpha,
                                           double tol = 1e-8) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("stable_hs_condition: alpha must lie in (0,2)");
    CriterionResult r;
    r.condition_id = ConditionId::HSalpha;

    const double eps = 1e-6;
    const double n = static_cast<double>(model.n_modes());
    const auto quad = integrate_decaying(
        [&](double s) { return std::pow(hs_norm_sq(model, s + eps), 0.5 * alpha); },
        alpha * model.lambda_min(), std::pow(n, 0.5 * alpha), tol);
    std::ostringstream os;
    os << "truncated int_eps^inf ||T(s)||_HS^alpha ds = " << detail::fmt(quad.value) << " +- "
       << detail::fmt(quad.err_bound) << " (eps = 1e-6, " << model.n_modes() << " modes)";

    const auto recip = reciprocal_sum_condition(model, tol);
    std::optional<bool> weyl_ok;
    if (model.growth_law() && std::holds_alternative<Weyl>(*model.growth_law())) {
        const int d = std::get<Weyl>(*model.growth_law()).d;
        weyl_ok = heat_verdict(alpha, d);
        os << "; near s=0 the untruncated integrand ~ s^{-alpha d/4}, alpha*d = "
           << detail::fmt(alpha * d);
    }
    if (recip.verdict == Verdict::Holds) {
        const double srec = *recip.value;
        const double bound = std::pow((2.0 - alpha) / (alpha * model.lambda_min()), 0.5 * (2.0 - alpha)) *
                             std::pow(srec, 0.5 * alpha);
        os << "; sufficient bound ((2-a)/(a l1))^((2-a)/2) (sum 1/l_k)^(a/2) = "
           << detail::fmt(bound);
    }

    if (weyl_ok.has_value()) {
        r.verdict = *weyl_ok ? Verdict::Holds : Verdict::Fails;
    } else if (recip.verdict == Verdict::Holds) {
        r.verdict = Verdict::Holds;
    } else {
        r.verdict = Verdict::Inconclusive;
        os << "; no Weyl growth law: behaviour at s -> 0 cannot be certified";
    }
    if (r.verdict == Verdict::Holds) r.value = quad.value;
    r.detail = os.str();
    return r;
}

inline CriterionResult heat_law_condition(double alpha, int d) {
    CriterionResult r;
    r.condition_id = ConditionId::HeatLaw;
    r.value = alpha * static_cast<double>(d);
    r.verdict = heat_verdict(alpha, d) ? Verdict::Holds : Verdict::Fails;
    r.detail = "alpha*d = " + detail::fmt(*r.value) + ", stationary solution iff alpha*d < 4";
    return r;
}

// Evaluates every condition applicable to the (model, noise) pair and
// aggregates. The diagonal semigroup is exponentially stable, so the
// convergence conditions are necessary as well as sufficient and the
// stationary measure, when it exists, is unique.
inline CriteriaReport full_report(const SpectralModel& model, const NoiseSpec& noise,
                                  double tol = 1e-8) {
    require_compatible(model, noise);
    CriteriaReport rep;
    std::vector<CriterionResult>& res = rep.results;

    // conditions that must hold (necessary + sufficient under exponential
    // stability) vs. conditions whose failure proves nothing
    std::vector<ConditionId> required;
    std::vector<ConditionId> necessary;

    // Gaussian covariance in play: the noise's own (DiagonalGaussian) plus any
    // covariance superposed on the model.
    std::optional<std::vector<double>> q_eff;
    if (std::holds_alternative<DiagonalGaussian>(noise))
        q_eff = std::get<DiagonalGaussian>(noise).q;
    if (model.q_diag()) {
        if (!q_eff) q_eff = *model.q_diag();
        else
            for (std::size_t k = 0; k < q_eff->size(); ++k) (*q_eff)[k] += (*model.q_diag())[k];
    }
    if (q_eff) {
        const auto model_q = model.with_q_diag(*q_eff);
        res.push_back(trace_condition(model_q, tol));
        res.push_back(gauss_mode_condition(model_q, tol));
    } else {
        res.push_back({ConditionId::TraceB, 0.0, Verdict::Holds, "no Gaussian component"});
    }
    required.push_back(ConditionId::TraceB);
    necessary.push_back(ConditionId::TraceB);

    res.push_back(drift_condition(model, tol));
    required.push_back(ConditionId::DriftIII);  // sufficient proxy for the drift limit

    res.push_back(reciprocal_sum_condition(model, tol));

    if (std::holds_alternative<CanonicalStable>(noise)) {
        const double alpha = std::get<CanonicalStable>(noise).alpha;
        res.push_back(stable_hs_condition(model, alpha, tol));
        required.push_back(ConditionId::HSalpha);
        necessary.push_back(ConditionId::HSalpha);
        if (model.growth_law() && std::holds_alternative<Weyl>(*model.growth_law())) {
            res.push_back(heat_law_condition(alpha, std::get<Weyl>(*model.growth_law()).d));
            necessary.push_back(ConditionId::HeatLaw);
            required.push_back(ConditionId::HeatLaw);
        }
    } else if (std::holds_alternative<DiagonalSeries>(noise)) {
        const auto& series = std::get<DiagonalSeries>(noise);
        auto [jc, jd] = jump_conditions_diagonal(model, series, tol);
        res.push_back(std::move(jc));
        res.push_back(std::move(jd));
        auto [l1, l2] = log_conditions(model, series, tol);
        res.push_back(std::move(l1));
        res.push_back(std::move(l2));
        res.push_back(jump_mode_condition(model, series, tol));
        required.insert(required.end(), {ConditionId::JumpC, ConditionId::JumpD});
        necessary.insert(necessary.end(), {ConditionId::JumpC, ConditionId::JumpD,
                                           ConditionId::LogI, ConditionId::LogII});
    } else {
        res.push_back({ConditionId::JumpC, 0.0, Verdict::Holds, "no jump component"});
        res.push_back({ConditionId::JumpD, 0.0, Verdict::Holds, "no jump component"});
    }

    std::sort(res.begin(), res.end(), [](const CriterionResult& a, const CriterionResult& b) {
        return static_cast<int>(a.condition_id) < static_cast<int>(b.condition_id);
    });

    bool any_necessary_fails = false;
    for (ConditionId id : necessary) {
        const auto* r = rep.find(id);
        if (r && r->verdict == Verdict::Fails) any_necessary_fails = true;
    }
    bool all_required_hold = true;
    for (ConditionId id : required) {
        const auto* r = rep.find(id);
        if (!r || r->verdict != Verdict::Holds) all_required_hold = false;
    }
    rep.overall = any_necessary_fails ? Overall::NoStationary
                  : all_required_hold ? Overall::StationaryExists
                                      : Overall::Inconclusive;

    std::ostringstream notes;
    notes << "semigroup is exponentially stable (||T(t)v|| <= e^{-" << detail::fmt(model.lambda_min())
          << " t} ||v||), so the convergence conditions are necessary and sufficient and the "
             "stationary measure, when it exists, is unique";
    if (rep.overall == Overall::NoStationary)
        notes << "; a necessary condition fails with a certified divergence witness";
    rep.notes = notes.str();
    return rep;
}

} // namespace cylou
