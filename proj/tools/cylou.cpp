// cylou: decides whether the Ornstein-Uhlenbeck mild solution driven by
// cylindrical Levy noise has a stationary measure, simulates it, and checks
// the analytic characteristic-function identities against the simulation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cylou/config.hpp"
#include "cylou/criteria.hpp"
#include "cylou/diagnostics.hpp"
#include "cylou/io.hpp"
#include "cylou/simulate.hpp"

namespace {

// 0 success/StationaryExists; 1 usage or config error; 2 runtime failure;
// 3 NoStationary; 4 Inconclusive; 5 diagnostic residual out of tolerance.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kRuntimeError = 2,
    kNoStationary = 3,
    kInconclusive = 4,
    kDiagnosticFailure = 5,
};

int overall_exit(cylou::Overall o) {
    switch (o) {
        case cylou::Overall::StationaryExists: return kOk;
        case cylou::Overall::NoStationary: return kNoStationary;
        default: return kInconclusive;
    }
}

std::optional<unsigned> workers_from_env(std::string& err) {
    const char* env = std::getenv("SIM_WORKERS");
    if (!env) return std::nullopt;
    try {
        const long v = std::stol(env);
        if (v < 1) throw std::invalid_argument("");
        return static_cast<unsigned>(v);
    } catch (...) {
        err = "SIM_WORKERS must be a positive integer, got '" + std::string(env) + "'";
        return std::nullopt;
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
    return os;
}

int run_check(const std::string& config_path, const std::string& out_path) {
    const auto cfg = cylou::load_config(config_path);
    const auto report = cylou::full_report(cfg.model, cfg.noise, cfg.tol.criteria_tol);
    auto os = open_out(out_path);
    os << cylou::report_to_json(report, cfg.config_hash, cfg.seed).dump(2) << "\n";
    std::cout << "overall: " << cylou::to_string(report.overall) << " (report: " << out_path
              << ")\n";
    return overall_exit(report.overall);
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& raw_path, std::optional<unsigned> workers) {
    auto cfg = cylou::load_config(config_path);
    if (workers) cfg.sim.workers = *workers;
    const auto ens = cylou::simulate_ensemble(cfg.model, cfg.noise, cfg.sim);
    {
        auto os = open_out(out_path);
        cylou::write_stats_csv(os, ens, cfg.model, cfg.noise, cfg.probes, cfg.tol,
                               cfg.config_hash, cfg.seed);
    }
    if (!raw_path.empty()) {
        auto os = open_out(raw_path);
        cylou::write_final_states_csv(os, ens, cfg.config_hash, cfg.seed);
    }
    std::cout << "scheme: " << cylou::to_string(ens.scheme) << ", paths: " << ens.n_paths
              << ", records: " << ens.record_times.size() << " (stats: " << out_path << ")\n";
    return kOk;
}

int run_compare(const std::string& config_path, const std::string& out_path) {
    const auto cfg = cylou::load_config(config_path);
    const auto report = cylou::full_report(cfg.model, cfg.noise, cfg.tol.criteria_tol);
    if (report.overall == cylou::Overall::NoStationary) {
        std::cerr << "compare: criteria verdict is NoStationary; the limit characteristic "
                     "function does not exist\n";
        return kNoStationary;
    }
    if (report.overall == cylou::Overall::Inconclusive)
        std::cerr << "compare: criteria inconclusive; limit probes refer to the truncated model\n";
    auto os = open_out(out_path);
    const auto outcome =
        cylou::write_curves_csv(os, cfg.model, cfg.noise, report.overall, cfg.probes,
                                cfg.compare_grid, cfg.tol, cfg.config_hash, cfg.seed);
    std::cout << "worst residuals: skew " << outcome.worst_skew << ", stationarity "
              << outcome.worst_stationarity << " (tolerance " << cfg.tol.residual_tol
              << "; curves: " << out_path << ")\n";
    const bool ok = outcome.worst_skew <= cfg.tol.residual_tol &&
                    outcome.worst_stationarity <= cfg.tol.residual_tol;
    return ok ? kOk : kDiagnosticFailure;
}

int run_demo_heat(double alpha, int dim, std::size_t modes, const std::string& out_path) {
    const auto model = cylou::weyl_eigenvalues(dim, 1.0, modes);
    const auto noise = cylou::make_canonical_stable(alpha);
    const auto report = cylou::full_report(model, noise);
    std::cout << "heat equation demo: canonical " << alpha << "-stable noise on a " << dim
              << "-dimensional domain, " << modes << " modes\n";
    for (const auto& r : report.results)
        std::cout << "  " << cylou::to_string(r.condition_id) << ": "
                  << cylou::to_string(r.verdict) << "\n";
    std::cout << "overall: " << cylou::to_string(report.overall) << " (alpha*d = " << alpha * dim
              << ", threshold 4)\n";
    if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << cylou::report_to_json(report, "demo-heat", 0).dump(2) << "\n";
    }
    return overall_exit(report.overall);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationarity certification and Monte-Carlo verification for "
                 "Hilbert-space Ornstein-Uhlenbeck processes driven by cylindrical Levy noise"};
    app.require_subcommand(1);

    std::string config_path, out_path, raw_path;

    auto* check = app.add_subcommand("check", "evaluate the stationarity criteria");
    check->add_option("config", config_path, "JSON config file")->required();
    check->add_option("-o,--out", out_path, "report file")->default_val("report.json");

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation of the mild solution");
    simulate->add_option("config", config_path, "JSON config file")->required();
    simulate->add_option("-o,--out", out_path, "statistics file")->default_val("stats.csv");
    simulate->add_option("--raw-dump", raw_path, "optional raw final-time sample dump");

    auto* compare = app.add_subcommand("compare", "characteristic-function identity residuals");
    compare->add_option("config", config_path, "JSON config file")->required();
    compare->add_option("-o,--out", out_path, "curves file")->default_val("curves.csv");

    auto* demo = app.add_subcommand("demo", "built-in demonstrations");
    double alpha = 1.0;
    int dim = 1;
    std::size_t modes = 32;
    std::string demo_out;
    auto* heat = demo->add_subcommand("heat", "heat equation with canonical stable noise");
    heat->add_option("--alpha", alpha, "stability index in (0,2)")->required();
    heat->add_option("--dim", dim, "spatial dimension d >= 1")->required();
    heat->add_option("--modes", modes, "truncation size")->default_val(32);
    heat->add_option("-o,--out", demo_out, "optional report file");
    demo->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    std::string env_err;
    const auto workers = workers_from_env(env_err);
    if (!env_err.empty()) {
        std::cerr << "error: " << env_err << "\n";
        return kConfigError;
    }

    try {
        if (check->parsed()) return run_check(config_path, out_path);
        if (simulate->parsed()) return run_simulate(config_path, out_path, raw_path, workers);
        if (compare->parsed()) return run_compare(config_path, out_path);
        if (heat->parsed()) return run_demo_heat(alpha, dim, modes, demo_out);
    } catch (const cylou::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kConfigError;
}
