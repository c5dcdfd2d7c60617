#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

namespace cylou {

struct QuadResult {
    double value = 0.0;
    double err_bound = 0.0;
    std::size_t evaluations = 0;
};

// Thrown when the evaluation budget runs out before the tolerance is met.
// Carries the best result obtained so far.
class quad_budget_error : public std::runtime_error {
public:
    quad_budget_error(std::string what, QuadResult best)
        : std::runtime_error(std::move(what)), partial(best) {}
    QuadResult partial;
};

namespace detail {

struct SimpsonState {
    const std::function<double(double)>* f;
    std::size_t evals = 0;
    std::size_t max_evals = 0;
    double err = 0.0;

    double eval(double x) {
        ++evals;
        return (*f)(x);
    }
};

// Recursive adaptive Simpson with the |S2-S1|/15 error estimate. Leaves that
// cannot be refined further (depth or evaluation budget exhausted, or the
// interval no longer splits in floating point) are accepted with their
// estimated error folded into st.err, so err_bound stays honest either way;
// the caller decides whether the accumulated error meets the tolerance.
inline double simpson_adapt(SimpsonState& st, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.eval(lm);
    const double frm = st.eval(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const bool splittable = a < lm && lm < m && m < rm && rm < b;
    if (!splittable || depth <= 0 || std::abs(delta) <= 15.0 * tol ||
        st.evals >= st.max_evals) {
        st.err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                     double tol, std::size_t max_evals) {
    SimpsonState st;
    st.f = &f;
    st.max_evals = max_evals;
    const double fa = st.eval(a);
    const double fm = st.eval(0.5 * (a + b));
    const double fb = st.eval(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double value = simpson_adapt(st, a, b, fa, fm, fb, whole, tol, 52);
    return QuadResult{value, st.err, st.evals};
}

} // namespace detail

// Integral of f over [a, b] with err_bound <= tol (absolute).
inline QuadResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                                   double tol, std::size_t max_evals = 4'000'000) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_finite: tol must be > 0");
    if (!(b >= a)) throw std::invalid_argument("integrate_finite: need b >= a");
    if (a == b) return QuadResult{0.0, 0.0, 0};
    const QuadResult r = detail::integrate_interval(f, a, b, tol, max_evals);
    if (r.err_bound > tol)
        throw quad_budget_error("quadrature: tolerance not reached within the budget", r);
    return r;
}

// Integral of f over [0, inf) for integrands dominated by
// bound_const * e^{-decay_rate * s}. The domain is cut at
// S_max = ln(2 * bound_const / (tol * decay_rate)) / decay_rate so that the
// analytic tail is at most tol/2; the remaining tol/2 goes to the adaptive
// pass. The tail bound is folded into err_bound, never extrapolated.
inline QuadResult integrate_decaying(const std::function<double(double)>& f, double decay_rate,
                                     double bound_const, double tol,
                                     std::size_t max_evals = 4'000'000) {
    if (!(decay_rate > 0.0))
        throw std::invalid_argument("integrate_decaying: decay_rate must be > 0");
    if (!(bound_const >= 0.0))
        throw std::invalid_argument("integrate_decaying: bound_const must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_decaying: tol must be > 0");

    const double tail_tol = 0.5 * tol;
    double s_max = 1.0 / decay_rate;
    if (bound_const > 0.0)
        s_max = std::max(s_max, std::log(bound_const / (tail_tol * decay_rate)) / decay_rate);
    const double tail_bound =
        bound_const * std::exp(-decay_rate * s_max) / decay_rate;

    QuadResult r = detail::integrate_interval(f, 0.0, s_max, 0.5 * tol, max_evals);
    r.err_bound += tail_bound;
    if (r.err_bound > tol)
        throw quad_budget_error("quadrature: tolerance not reached within the budget", r);
    return r;
}

enum class Verdict { Holds, Fails, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "Holds";
        case Verdict::Fails: return "Fails";
        default: return "Inconclusive";
    }
}

struct SeriesDecision {
    Verdict verdict = Verdict::Inconclusive;
    double partial_sum = 0.0;       // sum of all explicitly evaluated terms
    std::optional<double> tail_bound;  // certified upper bound on the remaining tail
    double tail_lower = 0.0;           // certified lower bound on the remaining tail
    std::int64_t terms_used = 0;

    // Midpoint estimate of the full sum and its certified half-width.
    double value() const { return partial_sum + 0.5 * (tail_lower + tail_bound.value_or(0.0)); }
    double value_err() const { return 0.5 * (tail_bound.value_or(0.0) - tail_lower); }
};

// Symbolic description of the series tail beyond the explicitly known head:
//   rho_lo * k^-p * log(k)^-q  <=  term(k)  <=  rho_hi * k^-p * log(k)^-q.
// rho_lo == rho_hi means the continuation is exact and may be summed term by
// term. Summability is decided from (p, q) alone: p > 1, or p == 1 with q > 1,
// converges; otherwise the minorant (rho_lo > 0) witnesses divergence.
struct PowerLawTail {
    double rho_lo = 0.0;
    double rho_hi = 0.0;
    double p = 0.0;
    double q = 0.0;

    static PowerLawTail exact(double rho, double p, double q = 0.0) {
        return PowerLawTail{rho, rho, p, q};
    }
};

namespace detail {

inline double tail_term(const PowerLawTail& t, std::int64_t k) {
    double v = std::pow(static_cast<double>(k), -t.p);
    if (t.q != 0.0) v *= std::pow(std::log(static_cast<double>(k)), -t.q);
    return v;
}

// Integral-test bracket on sum_{k > K} k^-p log(k)^-q for a convergent
// (p, q): the sum lies in [int_{K+1}^inf, int_K^inf]. For p > 1 with q != 0
// the log factor is frozen at K on the upper side and dropped to 0 below.
inline double tail_upper(const PowerLawTail& t, std::int64_t K) {
    const double Kd = static_cast<double>(K);
    if (t.p > 1.0) {
        double v = std::pow(Kd, 1.0 - t.p) / (t.p - 1.0);
        if (t.q != 0.0) v *= std::pow(std::log(Kd), -t.q);
        return v;
    }
    // p == 1, q > 1
    return std::pow(std::log(Kd), 1.0 - t.q) / (t.q - 1.0);
}

inline double tail_lower(const PowerLawTail& t, std::int64_t K) {
    const double Kd = static_cast<double>(K + 1);
    if (t.p > 1.0) {
        if (t.q != 0.0) return 0.0;
        return std::pow(Kd, 1.0 - t.p) / (t.p - 1.0);
    }
    return std::pow(std::log(Kd), 1.0 - t.q) / (t.q - 1.0);
}

inline bool tail_convergent(const PowerLawTail& t) {
    return t.p > 1.0 || (t.p == 1.0 && t.q > 1.0);
}

} // namespace detail

// Decides sum_{k >= 1} term(k) with term >= 0. The head term(1..n_head) is
// known exactly; `tail` (if any) certifies everything beyond. Holds requires a
// summable majorant, Fails a divergent minorant; more budget can only sharpen
// an Inconclusive, never flip Holds <-> Fails.
inline SeriesDecision decide_series(const std::function<double(std::int64_t)>& term,
                                    std::int64_t n_head, std::optional<PowerLawTail> tail,
                                    double tol, std::int64_t budget = 8'000'000) {
    if (n_head < 0) throw std::invalid_argument("decide_series: n_head must be >= 0");
    SeriesDecision d;
    double sum = 0.0;
    for (std::int64_t k = 1; k <= n_head; ++k) {
        const double t = term(k);
        if (t < 0.0 || !std::isfinite(t))
            throw std::invalid_argument("decide_series: terms must be finite and >= 0");
        sum += t;
    }
    d.partial_sum = sum;
    d.terms_used = n_head;

    if (!tail) {
        d.verdict = Verdict::Inconclusive;
        return d;
    }
    if (tail->rho_hi == 0.0) {
        d.verdict = Verdict::Holds;
        d.tail_bound = 0.0;
        return d;
    }
    if (!detail::tail_convergent(*tail)) {
        if (tail->rho_lo > 0.0) {
            d.verdict = Verdict::Fails;  // divergent minorant certified
            return d;
        }
        d.verdict = Verdict::Inconclusive;  // majorant diverges, no minorant
        return d;
    }

    // Convergent tail. With an exact continuation keep summing terms until the
    // integral-test bracket on the residue is narrower than tol (or budget),
    // then report the bracket.
    std::int64_t K = std::max<std::int64_t>(n_head, 2);
    if (tail->rho_lo == tail->rho_hi) {
        const double rho = tail->rho_hi;
        std::int64_t target = K;
        if (tail->q == 0.0) {
            // bracket width ~ rho * K^-p, so solve for K directly
            const double want = std::pow(rho / (2.0 * tol), 1.0 / tail->p);
            if (want > static_cast<double>(budget)) target = budget;
            else target = std::max<std::int64_t>(K, static_cast<std::int64_t>(want) + 1);
        } else {
            auto half_width = [&](std::int64_t k) {
                return 0.5 * rho * (detail::tail_upper(*tail, k) - detail::tail_lower(*tail, k));
            };
            while (target < budget && half_width(target) > tol) ++target;
        }
        double comp = 0.0;  // Kahan, millions of near-equal terms
        for (std::int64_t k = K + 1; k <= target; ++k) {
            const double y = rho * detail::tail_term(*tail, k) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        K = target;
        d.terms_used = K;
    }
    d.partial_sum = sum;
    d.verdict = Verdict::Holds;
    d.tail_bound = tail->rho_hi * detail::tail_upper(*tail, K);
    d.tail_lower = tail->rho_lo * detail::tail_lower(*tail, K);
    return d;
}

} // namespace cylou
