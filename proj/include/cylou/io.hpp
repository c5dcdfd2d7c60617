#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylou/config.hpp"
#include "cylou/criteria.hpp"
#include "cylou/diagnostics.hpp"
#include "cylou/simulate.hpp"

namespace cylou {

namespace io_detail {

// Round-trip decimal formatting; keeps every emitted file reproducible.
inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double quantile_sorted(const std::vector<double>& xs, double p) {
    if (xs.empty()) return 0.0;
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - w) + xs[hi] * w;
}

} // namespace io_detail

inline nlohmann::json report_to_json(const CriteriaReport& rep, const std::string& config_hash,
                                     std::uint64_t seed) {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["overall"] = to_string(rep.overall);
    j["notes"] = rep.notes;
    j["conditions"] = nlohmann::json::array();
    for (const auto& r : rep.results) {
        nlohmann::json c;
        c["id"] = to_string(r.condition_id);
        c["verdict"] = to_string(r.verdict);
        if (r.value) c["value"] = *r.value;
        c["detail"] = r.detail;
        j["conditions"].push_back(std::move(c));
    }
    return j;
}

inline CriteriaReport report_from_json(const nlohmann::json& j) {
    CriteriaReport rep;
    const std::string overall = j.at("overall").get<std::string>();
    rep.overall = overall == "StationaryExists" ? Overall::StationaryExists
                  : overall == "NoStationary"   ? Overall::NoStationary
                                                : Overall::Inconclusive;
    rep.notes = j.at("notes").get<std::string>();
    for (const auto& c : j.at("conditions")) {
        CriterionResult r;
        const std::string id = c.at("id").get<std::string>();
        for (int i = 0; i <= static_cast<int>(ConditionId::HeatLaw); ++i)
            if (id == to_string(static_cast<ConditionId>(i)))
                r.condition_id = static_cast<ConditionId>(i);
        const std::string verdict = c.at("verdict").get<std::string>();
        r.verdict = verdict == "Holds"   ? Verdict::Holds
                    : verdict == "Fails" ? Verdict::Fails
                                         : Verdict::Inconclusive;
        if (c.contains("value")) r.value = c.at("value").get<double>();
        r.detail = c.at("detail").get<std::string>();
        rep.results.push_back(std::move(r));
    }
    return rep;
}

// Ensemble statistics plus a CF check per probe and record time. One wide CSV
// with a `kind` column: `stat` rows carry per-mode moments and quantiles,
// `cf` rows carry the empirical/analytic characteristic-function comparison.
// Contains nothing scheduling-dependent, so identical (config, seed) runs
// produce identical bytes for any worker count.
inline void write_stats_csv(std::ostream& os, const Ensemble& ens, const SpectralModel& model,
                            const NoiseSpec& noise, const std::vector<CoeffVector>& probes,
                            const Tolerances& tol, const std::string& config_hash,
                            std::uint64_t seed) {
    using io_detail::num;
    os << "# cylou simulate\n";
    os << "# config_hash: " << config_hash << "\n";
    os << "# seed: " << seed << "\n";
    os << "# scheme: " << to_string(ens.scheme) << "\n";
    os << "# paths: " << ens.n_paths << "\n";
    os << "kind,time,index,mean,variance,q05,q25,q50,q75,q95,"
          "cf_emp_re,cf_emp_im,cf_ana_re,cf_ana_im,cf_abs_err,cf_tol,cf_pass\n";

    std::vector<double> column(ens.n_paths);
    for (std::size_t ti = 0; ti < ens.record_times.size(); ++ti) {
        const double t = ens.record_times[ti];
        for (std::size_t k = 0; k < ens.n_modes; ++k) {
            double mean = 0.0;
            for (std::size_t p = 0; p < ens.n_paths; ++p) {
                column[p] = ens.state(ti, p)[k];
                mean += column[p];
            }
            mean /= static_cast<double>(ens.n_paths);
            double var = 0.0;
            for (double x : column) var += (x - mean) * (x - mean);
            var = ens.n_paths > 1 ? var / static_cast<double>(ens.n_paths - 1) : 0.0;
            std::sort(column.begin(), column.end());
            os << "stat," << num(t) << "," << k << "," << num(mean) << "," << num(var);
            for (double p : {0.05, 0.25, 0.5, 0.75, 0.95})
                os << "," << num(io_detail::quantile_sorted(column, p));
            os << ",,,,,,,\n";
        }
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const auto& v = probes[pi];
            const auto emp = empirical_cf(ens, t, v);
            auto ana = analytic_cf(model, noise, v, t, tol.cf_quad_tol);
            std::complex<double> ana_value = ana.value;
            if (std::holds_alternative<Y0Point>(ens.config.y0)) {
                const auto& y0 = std::get<Y0Point>(ens.config.y0).v;
                const auto ty0 = semigroup_apply(model, y0, t);
                double phase = 0.0;
                for (std::size_t k = 0; k < std::min(ty0.size(), v.size()); ++k)
                    phase += ty0[k] * v[k];
                ana_value *= std::complex<double>(std::cos(phase), std::sin(phase));
            }
            const double abs_err = std::abs(emp.value - ana_value);
            os << "cf," << num(t) << "," << pi << ",,,,,,,," << num(emp.value.real()) << ","
               << num(emp.value.imag()) << "," << num(ana_value.real()) << ","
               << num(ana_value.imag()) << "," << num(abs_err) << "," << num(tol.cf_check_tol)
               << "," << (abs_err <= tol.cf_check_tol ? 1 : 0) << "\n";
        }
    }
}

// Raw final-time sample dump: one row per path.
inline void write_final_states_csv(std::ostream& os, const Ensemble& ens,
                                   const std::string& config_hash, std::uint64_t seed) {
    using io_detail::num;
    os << "# cylou simulate raw states\n";
    os << "# config_hash: " << config_hash << "\n";
    os << "# seed: " << seed << "\n";
    os << "# time: " << num(ens.record_times.back()) << "\n";
    os << "path";
    for (std::size_t k = 0; k < ens.n_modes; ++k) os << ",mode" << k;
    os << "\n";
    const std::size_t ti = ens.record_times.size() - 1;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        os << p;
        for (double x : ens.state(ti, p)) os << "," << num(x);
        os << "\n";
    }
}

struct CompareOutcome {
    double worst_conv = 0.0;       // informational only
    double worst_skew = 0.0;
    double worst_stationarity = 0.0;
};

// Convergence curve plus identity residuals per probe and grid time.
inline CompareOutcome write_curves_csv(std::ostream& os, const SpectralModel& model,
                                       const NoiseSpec& noise, Overall overall,
                                       const std::vector<CoeffVector>& probes,
                                       std::span<const double> t_grid, const Tolerances& tol,
                                       const std::string& config_hash, std::uint64_t seed) {
    using io_detail::num;
    os << "# cylou compare\n";
    os << "# config_hash: " << config_hash << "\n";
    os << "# seed: " << seed << "\n";
    os << "t,probe,conv_abs,skew_residual,stationarity_residual\n";
    CompareOutcome out;
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const auto& v = probes[pi];
        const auto curve = convergence_curve(model, noise, overall, v, t_grid, tol.cf_quad_tol);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double t = curve[i].first;
            const double skew =
                skew_convolution_residual(model, noise, v, 0.5 * t, 0.5 * t, tol.cf_quad_tol);
            const double stat =
                stationarity_residual(model, noise, overall, v, t, tol.cf_quad_tol);
            out.worst_conv = std::max(out.worst_conv, curve[i].second);
            out.worst_skew = std::max(out.worst_skew, skew);
            out.worst_stationarity = std::max(out.worst_stationarity, stat);
            os << num(t) << "," << pi << "," << num(curve[i].second) << "," << num(skew) << ","
               << num(stat) << "\n";
        }
    }
    return out;
}

} // namespace cylou
