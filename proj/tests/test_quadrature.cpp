#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cylou/quadrature.hpp"
#include "oracles.hpp"

using namespace cylou;
using Catch::Approx;

TEST_CASE("integrate_decaying on exponentials", "[quadrature]") {
    SECTION("exp(-s) integrates to 1") {
        const auto r = integrate_decaying([](double s) { return std::exp(-s); }, 1.0, 1.0, 1e-8);
        CHECK(r.err_bound <= 1e-8);
        CHECK(std::abs(r.value - 1.0) <= r.err_bound);
    }
    SECTION("zero integrand") {
        const auto r = integrate_decaying([](double) { return 0.0; }, 2.0, 0.0, 1e-8);
        CHECK(r.value == 0.0);
        CHECK(r.err_bound <= 1e-8);
    }
    SECTION("kinked integrand (e^{-2s} c^2 ^ 1), c = e: log c + 1/2") {
        // antiderivative: flat up to s = log c, exponential beyond
        const double c = std::exp(1.0);
        const auto r = integrate_decaying(
            [&](double s) { return std::min(std::exp(-2.0 * s) * c * c, 1.0); }, 2.0, c * c,
            1e-9);
        CHECK(std::abs(r.value - 1.5) <= r.err_bound + 1e-12);
        // twice the decay: log(c)/2 + 1/4
        const auto r2 = integrate_decaying(
            [&](double s) { return std::min(std::exp(-4.0 * s) * c * c, 1.0); }, 4.0, c * c,
            1e-9);
        CHECK(std::abs(r2.value - 0.75) <= r2.err_bound + 1e-12);
    }
    SECTION("argument errors") {
        auto f = [](double s) { return std::exp(-s); };
        CHECK_THROWS_AS(integrate_decaying(f, 0.0, 1.0, 1e-8), std::invalid_argument);
        CHECK_THROWS_AS(integrate_decaying(f, 1.0, -1.0, 1e-8), std::invalid_argument);
        CHECK_THROWS_AS(integrate_decaying(f, 1.0, 1.0, 0.0), std::invalid_argument);
    }
    SECTION("budget error carries the best result") {
        try {
            integrate_decaying([](double s) { return std::cos(40.0 * s) * std::exp(-s); }, 1.0,
                               1.0, 1e-13, 20);
            FAIL("expected quad_budget_error");
        } catch (const quad_budget_error& e) {
            CHECK(e.partial.evaluations <= 200);
            CHECK(e.partial.err_bound > 1e-13);
            CHECK(std::isfinite(e.partial.value));
        }
    }
}

TEST_CASE("integrate_finite", "[quadrature]") {
    const auto r = integrate_finite([](double x) { return std::sin(x); }, 0.0,
                                    3.14159265358979323846, 1e-10);
    CHECK(std::abs(r.value - 2.0) <= r.err_bound + 1e-12);
    CHECK(integrate_finite([](double) { return 1.0; }, 2.0, 2.0, 1e-8).value == 0.0);
}

TEST_CASE("linearity of the integral", "[quadrature]") {
    auto f = [](double s) { return std::exp(-s); };
    auto g = [](double s) { return std::exp(-2.0 * s) * std::cos(s); };
    const double a = 2.5, b = -1.25;
    const auto rf = integrate_decaying(f, 1.0, 1.0, 1e-9);
    const auto rg = integrate_decaying(g, 2.0, 1.0, 1e-9);
    const auto rc = integrate_decaying([&](double s) { return a * f(s) + b * g(s); }, 1.0,
                                       std::abs(a) + std::abs(b), 1e-9);
    CHECK(std::abs(rc.value - (a * rf.value + b * rg.value)) <=
          rc.err_bound + std::abs(a) * rf.err_bound + std::abs(b) * rg.err_bound + 1e-12);
}

TEST_CASE("tightening the tolerance tightens the certified error", "[quadrature]") {
    // The raw |value - reference| fluctuates below the bound as the adaptive
    // grid moves, so the guarantee is on the certified err_bound: it always
    // covers the distance to a 10x-finer reference and halving tol halves it.
    auto f = [](double s) { return std::min(std::exp(-2.0 * s) * 7.3, 1.0) * std::cos(s); };
    double prev_bound = std::numeric_limits<double>::infinity();
    for (double tol : {1e-4, 5e-5, 2.5e-5, 1.25e-5}) {
        const auto r = integrate_decaying(f, 2.0, 7.3, tol);
        const auto ref = integrate_decaying(f, 2.0, 7.3, 0.1 * tol);
        CHECK(std::abs(r.value - ref.value) <= r.err_bound + ref.err_bound);
        CHECK(r.err_bound <= tol);
        CHECK(r.err_bound <= prev_bound);
        prev_bound = r.err_bound;
    }
}

TEST_CASE("decide_series", "[quadrature]") {
    SECTION("1/k^2 with exact power-law continuation") {
        const auto d = decide_series([](std::int64_t k) { return 1.0 / double(k) / double(k); },
                                     50, PowerLawTail::exact(1.0, 2.0), 1e-9);
        CHECK(d.verdict == Verdict::Holds);
        // pi^2/6, cross-checked by the telescoping tail bracket
        CHECK(d.value() == Approx(1.6449340668482264).epsilon(1e-8));
        CHECK(d.value_err() <= 1e-8);
        // telescoping oracle: partial_50 + tail in [1/(K+1), 1/K]
        double partial50 = 0.0;
        for (int k = 1; k <= 50; ++k) partial50 += 1.0 / double(k) / double(k);
        CHECK(d.value() >= partial50 + 1.0 / (50.0 + 1.0) - 1e-9);
        CHECK(d.value() <= partial50 + 1.0 / 50.0 + 1e-9);
    }
    SECTION("harmonic series fails by integral-test minorant") {
        const auto d = decide_series([](std::int64_t k) { return 1.0 / double(k); }, 50,
                                     PowerLawTail::exact(1.0, 1.0), 1e-9);
        CHECK(d.verdict == Verdict::Fails);
        CHECK_FALSE(d.tail_bound.has_value());
    }
    SECTION("no tail information is Inconclusive") {
        const auto d = decide_series(
            [](std::int64_t k) {
                const double lk = std::log(double(k + 1));
                return 1.0 / (double(k) * lk * lk);
            },
            50, std::nullopt, 1e-9);
        CHECK(d.verdict == Verdict::Inconclusive);
        CHECK(d.terms_used == 50);
    }
    SECTION("p = 1 with q > 1 converges") {
        const auto d = decide_series(
            [](std::int64_t k) {
                const double lk = std::log(double(k + 1));
                return 1.0 / (double(k) * lk * lk);
            },
            50, PowerLawTail{1.0, 1.0, 1.0, 2.0}, 1e-4);
        CHECK(d.verdict == Verdict::Holds);
    }
    SECTION("zero tail certifies with no growth information") {
        const auto d = decide_series([](std::int64_t) { return 0.0; }, 10,
                                     PowerLawTail{0.0, 0.0, 0.0, 0.0}, 1e-9);
        CHECK(d.verdict == Verdict::Holds);
        CHECK(d.value() == 0.0);
    }
    SECTION("divergent majorant without minorant stays Inconclusive") {
        const auto d = decide_series([](std::int64_t k) { return 1.0 / double(k); }, 50,
                                     PowerLawTail{0.0, 1.0, 1.0, 0.0}, 1e-9);
        CHECK(d.verdict == Verdict::Inconclusive);
    }
    SECTION("budget changes precision, never the verdict") {
        auto term = [](std::int64_t k) { return std::pow(double(k), -1.5); };
        const auto tight = decide_series(term, 50, PowerLawTail::exact(1.0, 1.5), 1e-10, 4'000'000);
        const auto loose = decide_series(term, 50, PowerLawTail::exact(1.0, 1.5), 1e-10, 1'000);
        CHECK(tight.verdict == Verdict::Holds);
        CHECK(loose.verdict == Verdict::Holds);
        CHECK(tight.value_err() <= loose.value_err());
        CHECK(std::abs(tight.value() - loose.value()) <= loose.value_err() + tight.value_err());
    }
    SECTION("negative terms rejected") {
        CHECK_THROWS_AS(decide_series([](std::int64_t) { return -1.0; }, 3, std::nullopt, 1e-9),
                        std::invalid_argument);
    }
}

TEST_CASE("oracle self-check", "[quadrature]") {
    // the test-side Simpson must agree with the library on a smooth case
    const double lib = integrate_finite([](double x) { return std::exp(-x * x); }, 0.0, 3.0,
                                        1e-10).value;
    const double orc = oracle::simpson([](double x) { return std::exp(-x * x); }, 0.0, 3.0, 1e-10);
    CHECK(lib == Approx(orc).epsilon(1e-9));
}
