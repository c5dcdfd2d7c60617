#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cylou/diagnostics.hpp"
#include "cylou/levy.hpp"
#include "cylou/simulate.hpp"
#include "cylou/spectral.hpp"

namespace cylou {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double criteria_tol = 1e-8;   // series and criterion quadrature
    double cf_quad_tol = 1e-6;    // characteristic-function probes
    double residual_tol = 3e-6;   // skew/stationarity residual gate (3x cf tol)
    double cf_check_tol = 0.02;   // empirical-vs-analytic CF gate
};

struct RunConfig {
    SpectralModel model;
    NoiseSpec noise;
    SimConfig sim;
    std::vector<CoeffVector> probes;
    Tolerances tol;
    std::vector<double> compare_grid;
    std::uint64_t seed = 0;
    std::string config_hash;  // FNV-1a of the canonical serialized config
};

namespace cfg_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw config_error("config field '" + path + "': " + what);
}

inline const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    return j.at(key);
}

inline double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline double num(const json& j, const std::string& path, const char* key) {
    return num(need(j, path, key), path + "." + key);
}

inline double num_or(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return num(j.at(key), path + "." + key);
}

inline std::vector<double> num_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(num(j.at(i), path + "[" + std::to_string(i) + "]"));
    return out;
}

inline OneDimLevySpec parse_coord(const json& j, const std::string& path) {
    const auto family = need(j, path, "family").get<std::string>();
    try {
        if (family == "stable")
            return make_stable(num(j, path, "alpha"), num(j, path, "sigma"));
        if (family == "compound_poisson") {
            std::vector<JumpAtom> jumps;
            const auto& ja = need(j, path, "jumps");
            if (!ja.is_array()) fail(path + ".jumps", "expected an array");
            for (std::size_t i = 0; i < ja.size(); ++i) {
                const std::string jp = path + ".jumps[" + std::to_string(i) + "]";
                jumps.push_back({num(ja.at(i), jp, "b"), num(ja.at(i), jp, "p")});
            }
            return make_compound_poisson(num(j, path, "rate"), std::move(jumps));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".family", "unknown family '" + family + "'");
}

inline SpectralModel parse_model(const json& j, const std::string& path) {
    std::optional<SpectralModel> model;
    try {
        if (j.contains("weyl")) {
            const auto& w = j.at("weyl");
            const int d = static_cast<int>(num(w, path + ".weyl", "d"));
            const double c = num(w, path + ".weyl", "c");
            const auto n = static_cast<std::size_t>(num(w, path + ".weyl", "n_modes"));
            model = weyl_eigenvalues(d, c, n);
        } else if (j.contains("eigenvalues")) {
            model = SpectralModel(num_list(j.at("eigenvalues"), path + ".eigenvalues"));
        } else {
            fail(path, "need either 'weyl' or 'eigenvalues'");
        }
        if (j.contains("q_diag"))
            model = model->with_q_diag(num_list(j.at("q_diag"), path + ".q_diag"));
        if (j.contains("a_diag"))
            model = model->with_a_diag(num_list(j.at("a_diag"), path + ".a_diag"));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return *model;
}

inline NoiseSpec parse_noise(const json& j, const std::string& path, std::size_t n_modes) {
    const auto variant = need(j, path, "variant").get<std::string>();
    try {
        if (variant == "canonical_stable")
            return make_canonical_stable(num(j, path, "alpha"));
        if (variant == "diagonal_gaussian") {
            if (j.contains("q_all"))
                return make_diagonal_gaussian(
                    std::vector<double>(n_modes, num(j.at("q_all"), path + ".q_all")));
            return make_diagonal_gaussian(num_list(need(j, path, "q"), path + ".q"));
        }
        if (variant == "diagonal_series") {
            DiagonalSeries s;
            if (j.contains("coord")) {
                s.coords.assign(n_modes, parse_coord(j.at("coord"), path + ".coord"));
            } else {
                const auto& ja = need(j, path, "coords");
                if (!ja.is_array()) fail(path + ".coords", "expected an array");
                for (std::size_t i = 0; i < ja.size(); ++i)
                    s.coords.push_back(
                        parse_coord(ja.at(i), path + ".coords[" + std::to_string(i) + "]"));
            }
            return s;
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".variant", "unknown variant '" + variant + "'");
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex << x;
    return os.str();
}

} // namespace cfg_detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using namespace cfg_detail;
    if (!j.is_object()) throw config_error("config root must be a JSON object");

    SpectralModel model = parse_model(need(j, "", "model"), "model");
    NoiseSpec noise = parse_noise(need(j, "", "noise"), "noise", model.n_modes());
    try {
        require_compatible(model, noise);
    } catch (const std::invalid_argument& e) {
        fail("noise", e.what());
    }

    const std::uint64_t seed =
        j.contains("seed") ? static_cast<std::uint64_t>(num(j.at("seed"), "seed")) : 0;

    SimConfig sim;
    sim.seed = seed;
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        sim.n_paths = static_cast<std::size_t>(num_or(s, "sim", "n_paths", 10000));
        sim.t_final = num_or(s, "sim", "t_final", 10.0);
        sim.dt = num_or(s, "sim", "dt", 0.01);
        sim.stream = static_cast<std::uint64_t>(num_or(s, "sim", "stream", 0));
        if (s.contains("record_times"))
            sim.record_times = num_list(s.at("record_times"), "sim.record_times");
        if (s.contains("y0")) {
            const auto& y = s.at("y0");
            if (y.is_string() && y.get<std::string>() == "zero") {
                sim.y0 = Y0Zero{};
            } else if (y.is_object() && y.contains("point")) {
                try {
                    sim.y0 = Y0Point{CoeffVector(num_list(y.at("point"), "sim.y0.point"))};
                } catch (const std::invalid_argument& e) {
                    fail("sim.y0.point", e.what());
                }
            } else {
                fail("sim.y0", "expected \"zero\" or {\"point\": [...]}");
            }
        }
        try {
            detail::validate_config(sim);
        } catch (const std::invalid_argument& e) {
            fail("sim", e.what());
        }
    }

    Tolerances tol;
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        tol.criteria_tol = num_or(t, "tolerances", "criteria_tol", tol.criteria_tol);
        tol.cf_quad_tol = num_or(t, "tolerances", "cf_quad_tol", tol.cf_quad_tol);
        tol.residual_tol = num_or(t, "tolerances", "residual_tol", tol.residual_tol);
        tol.cf_check_tol = num_or(t, "tolerances", "cf_check_tol", tol.cf_check_tol);
    }

    std::vector<CoeffVector> probes;
    if (!j.contains("probes") ||
        (j.at("probes").is_string() && j.at("probes").get<std::string>() == "default")) {
        probes = default_probes(model.n_modes());
    } else {
        const auto& pa = j.at("probes");
        if (!pa.is_array()) throw config_error("config field 'probes': expected \"default\" or an array");
        for (std::size_t i = 0; i < pa.size(); ++i) {
            auto v = num_list(pa.at(i), "probes[" + std::to_string(i) + "]");
            if (v.size() > model.n_modes())
                fail("probes[" + std::to_string(i) + "]", "longer than the model truncation");
            probes.emplace_back(std::move(v));
        }
    }

    std::vector<double> grid;
    if (j.contains("compare") && j.at("compare").contains("t_grid")) {
        grid = num_list(j.at("compare").at("t_grid"), "compare.t_grid");
    } else {
        grid = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
    }

    const std::string canonical = j.dump();
    return RunConfig{std::move(model), std::move(noise),   std::move(sim), std::move(probes),
                     tol,              std::move(grid),    seed,           hex64(fnv1a64(canonical))};
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("JSON parse error in '") + path + "': " + e.what());
    }
    return parse_config(j);
}

} // namespace cylou
