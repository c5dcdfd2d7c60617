#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cylou/criteria.hpp"
#include "cylou/quadrature.hpp"
#include "oracles.hpp"

using namespace cylou;
using Catch::Approx;

namespace {
constexpr double kPiSqOver6 = 1.6449340668482264;
constexpr double kPiSqOver12 = 0.8224670334241132;

DiagonalSeries constant_stable_series(std::size_t n, double alpha, double sigma) {
    return DiagonalSeries{std::vector<OneDimLevySpec>(n, make_stable(alpha, sigma))};
}
} // namespace

TEST_CASE("trace_condition", "[criteria]") {
    SECTION("zero covariance holds trivially") {
        const auto m = SpectralModel({1.0, 2.0}).with_q_diag({0.0, 0.0});
        const auto r = trace_condition(m);
        CHECK(r.verdict == Verdict::Holds);
        CHECK(*r.value == 0.0);
    }
    SECTION("lambda_k = k^2, q = 1: pi^2/12") {
        const auto m = weyl_eigenvalues(1, 1.0, 30).with_q_diag(std::vector<double>(30, 1.0));
        const auto r = trace_condition(m, 1e-8);
        REQUIRE(r.verdict == Verdict::Holds);
        CHECK(*r.value == Approx(kPiSqOver12).epsilon(1e-7));
    }
    SECTION("lambda_k = k, q = 1: harmonic divergence") {
        const auto m = weyl_eigenvalues(2, 1.0, 30).with_q_diag(std::vector<double>(30, 1.0));
        CHECK(trace_condition(m).verdict == Verdict::Fails);
    }
    SECTION("no q_diag is Inconclusive with a note") {
        const auto r = trace_condition(SpectralModel({1.0}));
        CHECK(r.verdict == Verdict::Inconclusive);
        CHECK(r.detail.find("q_diag") != std::string::npos);
    }
}

TEST_CASE("jump conditions, diagonal reduction", "[criteria]") {
    SECTION("single mode closed form J_1 = 2") {
        CHECK(priola_zabczyk_term(make_stable(1.0, 1.0), 1.0) == Approx(2.0).epsilon(1e-12));
    }
    SECTION("closed form agrees with 2-d brute-force quadrature, 3 modes") {
        const SpectralModel m({0.5, 1.0, 4.0});
        const DiagonalSeries s{{make_stable(0.5, 0.2), make_stable(1.0, 1.0),
                                make_stable(1.5, 5.0)}};
        double closed = 0.0, brute = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            closed += priola_zabczyk_term(s.coords[k], m.lambda(k));
            const auto& st = std::get<StableCoord>(s.coords[k]);
            brute += oracle::pz_double_integral(st.alpha, st.sigma, m.lambda(k));
        }
        CHECK(closed == Approx(brute).epsilon(1e-5));
    }
    SECTION("constant sigma, lambda_k = k^2: holds") {
        const auto m = weyl_eigenvalues(1, 1.0, 20);
        const auto [jc, jd] = jump_conditions_diagonal(m, constant_stable_series(20, 1.0, 1.0));
        CHECK(jc.verdict == Verdict::Holds);
        CHECK(jd.verdict == Verdict::Holds);
        // sum J_k = (2/2 + 1) sum 1/k^2 = 2 pi^2/6
        CHECK(*jc.value == Approx(2.0 * kPiSqOver6).epsilon(1e-7));
    }
    SECTION("constant sigma, lambda_k = k: fails") {
        const auto m = weyl_eigenvalues(2, 1.0, 20);
        const auto [jc, jd] = jump_conditions_diagonal(m, constant_stable_series(20, 1.0, 1.0));
        CHECK(jc.verdict == Verdict::Fails);
        CHECK(jd.verdict == Verdict::Fails);
    }
    SECTION("inactive compound Poisson coordinates hold with J = 0") {
        const auto m = weyl_eigenvalues(2, 1.0, 5);
        DiagonalSeries s{std::vector<OneDimLevySpec>(5, make_compound_poisson(0.0, {}))};
        const auto [jc, jd] = jump_conditions_diagonal(m, s);
        CHECK(jc.verdict == Verdict::Holds);
        CHECK(*jc.value == 0.0);
        CHECK(jd.verdict == Verdict::Holds);
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(
            jump_conditions_diagonal(SpectralModel({1.0, 2.0}), constant_stable_series(3, 1.0, 1.0)),
            std::invalid_argument);
    }
    SECTION("J_k is nondecreasing in sigma, term-wise") {
        for (double alpha : {0.5, 1.0, 1.5}) {
            double prev = 0.0;
            for (double sigma : {0.1, 0.5, 1.0, 2.0, 8.0}) {
                const double j = priola_zabczyk_term(make_stable(alpha, sigma), 2.0);
                CHECK(j >= prev);
                prev = j;
            }
        }
    }
}

TEST_CASE("Priola-Zabczyk split identity", "[criteria]") {
    // library route: integrate_decaying of the inner quadrature vs the closed
    // forms; subset of the acceptance grid
    for (auto [alpha, sigma, lambda] :
         {std::tuple{0.5, 0.2, 1.0}, {1.0, 1.0, 1.0}, {1.5, 5.0, 4.0}}) {
        const auto spec = make_stable(alpha, sigma);
        const double closed = levy_integral_sq_trunc(spec) / (2.0 * lambda) +
                              levy_integral_logplus(spec) / lambda;
        const double amp = std::pow(sigma, alpha) * (1.0 / (2.0 - alpha) + 1.0 / alpha);
        const auto quad = integrate_decaying(
            [&](double s) {
                return oracle::truncated_square_std(alpha, sigma * std::exp(-lambda * s), 1e-11);
            },
            alpha * lambda, amp, 1e-8);
        CHECK(closed == Approx(quad.value).epsilon(1e-6));
    }
}

TEST_CASE("log conditions", "[criteria]") {
    SECTION("stable sigma = 1, lambda_k = k^2: (1/alpha^2) pi^2/6") {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const auto m = weyl_eigenvalues(1, 1.0, 25);
            const auto [l1, l2] = log_conditions(m, constant_stable_series(25, alpha, 1.0));
            REQUIRE(l1.verdict == Verdict::Holds);
            CHECK(*l1.value == Approx(kPiSqOver6 / (alpha * alpha)).epsilon(1e-7));
            CHECK(l2.verdict == Verdict::Holds);
        }
    }
    SECTION("compound Poisson with jumps inside the unit ball: zero") {
        const auto m = weyl_eigenvalues(2, 1.0, 8);
        DiagonalSeries s{std::vector<OneDimLevySpec>(
            8, make_compound_poisson(3.0, {{0.9, 0.5}, {0.2, 0.5}}))};
        const auto [l1, l2] = log_conditions(m, s);
        CHECK(l1.verdict == Verdict::Holds);
        CHECK(*l1.value == 0.0);
        CHECK(l2.verdict == Verdict::Holds);
    }
    SECTION("identical stable coords, lambda_k = k: fails") {
        const auto m = weyl_eigenvalues(2, 1.0, 25);
        const auto [l1, l2] = log_conditions(m, constant_stable_series(25, 1.0, 1.0));
        CHECK(l1.verdict == Verdict::Fails);
        CHECK(l2.verdict == Verdict::Fails);
    }
    SECTION("no reciprocal sum: sufficiency caveat in the detail") {
        const auto m = weyl_eigenvalues(2, 1.0, 25);  // sum 1/k diverges
        const auto [l1, l2] = log_conditions(m, constant_stable_series(25, 1.0, 1.0));
        CHECK(l1.detail.find("sufficient only") != std::string::npos);
    }
}

TEST_CASE("drift condition", "[criteria]") {
    SECTION("absent drift: c_t == 0") {
        const auto r = drift_condition(SpectralModel({1.0, 2.0}));
        CHECK(r.verdict == Verdict::Holds);
        CHECK(*r.value == 0.0);
    }
    SECTION("a = 1, lambda_k = k^2: pi^2/6") {
        const auto m = weyl_eigenvalues(1, 1.0, 30).with_a_diag(std::vector<double>(30, 1.0));
        const auto r = drift_condition(m, 1e-8);
        REQUIRE(r.verdict == Verdict::Holds);
        CHECK(*r.value == Approx(kPiSqOver6).epsilon(1e-7));
    }
    SECTION("a_k = lambda_k: terms stay at 1, diverges") {
        auto m = weyl_eigenvalues(1, 1.0, 30);
        m = m.with_a_diag(m.lambdas());
        CHECK(drift_condition(m).verdict == Verdict::Fails);
    }
}

TEST_CASE("reciprocal sum", "[criteria]") {
    CHECK(reciprocal_sum_condition(weyl_eigenvalues(1, 1.0, 20)).verdict == Verdict::Holds);
    CHECK(*reciprocal_sum_condition(weyl_eigenvalues(1, 1.0, 20)).value ==
          Approx(kPiSqOver6).epsilon(1e-7));
    CHECK(reciprocal_sum_condition(weyl_eigenvalues(2, 1.0, 20)).verdict == Verdict::Fails);
    CHECK(reciprocal_sum_condition(weyl_eigenvalues(3, 1.0, 20)).verdict == Verdict::Fails);
    // explicit eigenvalues without a growth law cannot certify the tail
    CHECK(reciprocal_sum_condition(SpectralModel({1.0, 4.0, 9.0})).verdict ==
          Verdict::Inconclusive);
}

TEST_CASE("stable HS condition", "[criteria]") {
    SECTION("Weyl ruling") {
        CHECK(stable_hs_condition(weyl_eigenvalues(1, 1.0, 16), 1.5).verdict == Verdict::Holds);
        CHECK(stable_hs_condition(weyl_eigenvalues(3, 1.0, 16), 1.5).verdict == Verdict::Fails);
        CHECK(stable_hs_condition(weyl_eigenvalues(2, 1.0, 16), 1.9).verdict == Verdict::Holds);
    }
    SECTION("no growth law: Inconclusive") {
        CHECK(stable_hs_condition(SpectralModel({1.0, 4.0, 9.0}), 1.0).verdict ==
              Verdict::Inconclusive);
    }
    SECTION("sufficient bound route via a PowerLog growth law") {
        std::vector<double> lambdas(12);
        for (std::size_t k = 0; k < 12; ++k)
            lambdas[k] = 2.0 * std::pow(double(k + 1), 2.0);
        const SpectralModel m(lambdas, GrowthLaw(PowerLog{2.0, 0.0, 2.0, 2.0}));
        const auto r = stable_hs_condition(m, 0.3);
        CHECK(r.verdict == Verdict::Holds);
        CHECK(r.detail.find("sufficient bound") != std::string::npos);
    }
    SECTION("domain") {
        CHECK_THROWS_AS(stable_hs_condition(weyl_eigenvalues(1, 1.0, 4), 2.0),
                        std::invalid_argument);
    }
}

TEST_CASE("heat verdict", "[criteria]") {
    CHECK(heat_verdict(1.0, 1));
    CHECK_FALSE(heat_verdict(1.5, 3));
    CHECK(heat_verdict(1.9, 2));  // 3.8 < 4, strict reading
    CHECK_FALSE(heat_verdict(1.0, 4));
    CHECK_THROWS_AS(heat_verdict(2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(heat_verdict(1.0, 0), std::invalid_argument);
}

TEST_CASE("full_report aggregation", "[criteria]") {
    SECTION("canonical stable on the d = 1 heat model") {
        const auto rep = full_report(weyl_eigenvalues(1, 1.0, 16), make_canonical_stable(1.0));
        CHECK(rep.overall == Overall::StationaryExists);
        REQUIRE(rep.find(ConditionId::HSalpha) != nullptr);
        CHECK(rep.find(ConditionId::HSalpha)->verdict == Verdict::Holds);
        CHECK(rep.find(ConditionId::HeatLaw)->verdict == Verdict::Holds);
        CHECK(rep.notes.find("exponentially stable") != std::string::npos);
    }
    SECTION("diagonal stable series, lambda_k = k: no stationary measure") {
        const auto rep = full_report(weyl_eigenvalues(2, 1.0, 16),
                                     NoiseSpec(constant_stable_series(16, 1.0, 1.0)));
        CHECK(rep.overall == Overall::NoStationary);
        CHECK(rep.find(ConditionId::JumpC)->verdict == Verdict::Fails);
    }
    SECTION("diagonal Gaussian, lambda_k = k^2: stationary, trace pi^2/12") {
        const auto rep = full_report(weyl_eigenvalues(1, 1.0, 16),
                                     make_diagonal_gaussian(std::vector<double>(16, 1.0)));
        CHECK(rep.overall == Overall::StationaryExists);
        REQUIRE(rep.find(ConditionId::TraceB) != nullptr);
        CHECK(*rep.find(ConditionId::TraceB)->value == Approx(kPiSqOver12).epsilon(1e-6));
        CHECK(rep.find(ConditionId::JumpC)->verdict == Verdict::Holds);
    }
    SECTION("no growth law: Inconclusive, not a guess") {
        const auto rep = full_report(SpectralModel({1.0, 4.0, 9.0}),
                                     NoiseSpec(constant_stable_series(3, 1.0, 1.0)));
        CHECK(rep.overall == Overall::Inconclusive);
    }
    SECTION("divergent drift blocks existence but cannot prove absence") {
        auto m = weyl_eigenvalues(1, 1.0, 16);
        m = m.with_a_diag(m.lambdas());
        const auto rep = full_report(m, make_canonical_stable(1.0));
        CHECK(rep.find(ConditionId::DriftIII)->verdict == Verdict::Fails);
        CHECK(rep.overall == Overall::Inconclusive);
    }
    SECTION("results come sorted by condition id") {
        const auto rep = full_report(weyl_eigenvalues(1, 1.0, 8),
                                     NoiseSpec(constant_stable_series(8, 1.5, 1.0)));
        for (std::size_t i = 1; i < rep.results.size(); ++i)
            CHECK(static_cast<int>(rep.results[i].condition_id) >
                  static_cast<int>(rep.results[i - 1].condition_id));
    }
}

TEST_CASE("series criterion equivalence on its common domain", "[criteria]") {
    // with the reciprocal sum certified, the overall verdict must match the
    // summability of sum sigma^alpha / lambda_k
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (double sigma : {0.5, 1.0, 3.0}) {
            const auto m = weyl_eigenvalues(1, 1.0, 16);
            REQUIRE(reciprocal_sum_condition(m).verdict == Verdict::Holds);
            const auto rep = full_report(m, NoiseSpec(constant_stable_series(16, alpha, sigma)));
            // sigma constant and sum 1/k^2 finite: the reduced criterion holds
            CHECK(rep.overall == Overall::StationaryExists);
        }
    }
    // the reduced criterion diverging (harmonic) must match NoStationary
    for (double alpha : {0.5, 1.5}) {
        const auto m = weyl_eigenvalues(2, 1.0, 16);
        const auto rep = full_report(m, NoiseSpec(constant_stable_series(16, alpha, 1.0)));
        CHECK(rep.overall == Overall::NoStationary);
    }
}

TEST_CASE("full_report respects superposed Gaussian covariance", "[criteria]") {
    // series noise plus a divergent Gaussian part on the model: trace fails
    auto m = weyl_eigenvalues(2, 1.0, 16).with_q_diag(std::vector<double>(16, 1.0));
    const auto rep = full_report(m, NoiseSpec(constant_stable_series(16, 0.5, 0.0 + 1.0)));
    CHECK(rep.find(ConditionId::TraceB)->verdict == Verdict::Fails);
    CHECK(rep.overall == Overall::NoStationary);
}
