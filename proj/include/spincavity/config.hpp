// config.hpp — experiment description files: schema-validated JSON with one
// block per pipeline stage.  Unknown keys are rejected so that typos fail loudly.

#pragma once

#include "spincavity/coupling.hpp"
#include "spincavity/effective.hpp"
#include "spincavity/errors.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spincavity {

struct ToleranceConfig {
    double resonance_tol = 1e-9;     // GHz
    double coupling_floor = 1e-9;    // GHz
    double denominator_guard = 1e-9; // GHz
    std::optional<int> fock_cutoff;  // overrides cavity.fock_cutoff when present
};

struct DynamicsConfig {
    std::vector<int> initial;  // 0-based dressed level per molecule (1-based in the file)
    std::vector<int> final;
    double t_max = 0.0;        // seconds
    int n_points = 2000;
    bool exact_effective = false;
    bool exact_full = false;
};

struct SweepConfig {
    int axis = 2;       // 0:x 1:y 2:z
    double start = 0.0; // Tesla
    double stop = 0.0;
    int steps = 1;
    int molecule = -1;  // -1: sweep all molecules together; otherwise 0-based index
};

struct ExperimentConfig {
    std::vector<Molecule> molecules;
    CavitySpec cavity;
    PhotonState photon;
    ToleranceConfig tolerances;
    std::optional<DynamicsConfig> dynamics;
    std::optional<SweepConfig> sweep;

    int fock_cutoff() const {
        return tolerances.fock_cutoff.value_or(cavity.fock_cutoff);
    }
};

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* name : allowed)
            if (key == name)
                ok = true;
        if (!ok)
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

inline double get_number(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key))
        throw ConfigError(std::string(where) + ": missing required key '" + key + "'");
    if (!obj[key].is_number())
        throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::array<double, 3> get_vec3(const json& obj, const char* where, const char* key,
                                      std::array<double, 3> fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& arr = obj[key];
    if (!arr.is_array() || arr.size() != 3)
        throw ConfigError(std::string(where) + ": '" + key + "' must be a 3-vector");
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k) {
        if (!arr[k].is_number())
            throw ConfigError(std::string(where) + ": '" + key + "' entries must be numbers");
        out[k] = arr[k].get<double>();
    }
    return out;
}

inline Molecule parse_molecule(const json& obj, int index) {
    const std::string where = "molecules[" + std::to_string(index) + "]";
    require_keys(obj, where.c_str(),
                 {"two_s", "stevens", "g", "zeeman_sign", "b_field", "lambda"});
    Molecule m;
    if (!obj.contains("two_s") || !obj["two_s"].is_number_integer())
        throw ConfigError(where + ": 'two_s' (integer 2S) is required");
    m.spec.spin = {obj["two_s"].get<int>()};
    if (obj.contains("stevens")) {
        if (!obj["stevens"].is_array())
            throw ConfigError(where + ": 'stevens' must be an array");
        for (const json& term : obj["stevens"]) {
            require_keys(term, (where + ".stevens").c_str(), {"k", "q", "b"});
            StevensTerm st;
            st.k = static_cast<int>(get_number(term, where.c_str(), "k"));
            st.q = static_cast<int>(get_number(term, where.c_str(), "q"));
            st.coefficient = get_number(term, where.c_str(), "b");
            m.spec.stevens.push_back(st);
        }
    }
    m.spec.g_tensor = get_vec3(obj, where.c_str(), "g", {2.0, 2.0, 2.0});
    if (obj.contains("zeeman_sign"))
        m.spec.zeeman_sign = get_number(obj, where.c_str(), "zeeman_sign");
    m.spec.b_field = get_vec3(obj, where.c_str(), "b_field", {0.0, 0.0, 0.0});
    m.coupling.lambda = get_vec3(obj, where.c_str(), "lambda", {0.0, 0.0, 0.0});
    try {
        m.spec.validate();
        m.coupling.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(where + ": " + err.what());
    }
    return m;
}

inline std::vector<int> parse_labels(const json& arr, const char* where, std::size_t count) {
    if (!arr.is_array() || arr.size() != count)
        throw ConfigError(std::string(where) + ": needs one 1-based level per molecule");
    std::vector<int> out;
    for (const json& v : arr) {
        if (!v.is_number_integer() || v.get<int>() < 1)
            throw ConfigError(std::string(where) + ": levels are 1-based integers");
        out.push_back(v.get<int>() - 1);
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    detail::require_keys(root, "config",
                         {"molecules", "cavity", "photon_state", "tolerances", "dynamics",
                          "sweep"});

    ExperimentConfig cfg;
    if (!root.contains("molecules") || !root["molecules"].is_array() ||
        root["molecules"].empty())
        throw ConfigError("config: 'molecules' must be a non-empty array");
    int index = 0;
    for (const json& m : root["molecules"])
        cfg.molecules.push_back(detail::parse_molecule(m, index++));

    if (!root.contains("cavity"))
        throw ConfigError("config: 'cavity' block is required");
    const json& cav = root["cavity"];
    detail::require_keys(cav, "cavity", {"omega", "fock_cutoff"});
    cfg.cavity.omega = detail::get_number(cav, "cavity", "omega");
    if (cav.contains("fock_cutoff"))
        cfg.cavity.fock_cutoff = static_cast<int>(detail::get_number(cav, "cavity", "fock_cutoff"));
    try {
        cfg.cavity.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("cavity: ") + err.what());
    }

    if (root.contains("photon_state")) {
        const json& ph = root["photon_state"];
        detail::require_keys(ph, "photon_state", {"p0", "p1"});
        cfg.photon.p0 = detail::get_number(ph, "photon_state", "p0");
        cfg.photon.p1 = detail::get_number(ph, "photon_state", "p1");
        try {
            cfg.photon.validate();
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("photon_state: ") + err.what());
        }
    }

    if (root.contains("tolerances")) {
        const json& tol = root["tolerances"];
        detail::require_keys(tol, "tolerances",
                             {"resonance_tol", "coupling_floor", "denominator_guard",
                              "fock_cutoff"});
        if (tol.contains("resonance_tol"))
            cfg.tolerances.resonance_tol = detail::get_number(tol, "tolerances", "resonance_tol");
        if (tol.contains("coupling_floor"))
            cfg.tolerances.coupling_floor = detail::get_number(tol, "tolerances", "coupling_floor");
        if (tol.contains("denominator_guard"))
            cfg.tolerances.denominator_guard =
                detail::get_number(tol, "tolerances", "denominator_guard");
        if (tol.contains("fock_cutoff"))
            cfg.tolerances.fock_cutoff =
                static_cast<int>(detail::get_number(tol, "tolerances", "fock_cutoff"));
        if (cfg.tolerances.resonance_tol <= 0.0)
            throw ConfigError("tolerances: resonance_tol must be positive");
    }

    if (root.contains("dynamics")) {
        const json& dyn = root["dynamics"];
        detail::require_keys(dyn, "dynamics",
                             {"initial", "final", "t_max", "n_points", "exact_effective",
                              "exact_full"});
        DynamicsConfig d;
        if (!dyn.contains("initial") || !dyn.contains("final"))
            throw ConfigError("dynamics: 'initial' and 'final' state labels are required");
        d.initial = detail::parse_labels(dyn["initial"], "dynamics.initial",
                                         cfg.molecules.size());
        d.final = detail::parse_labels(dyn["final"], "dynamics.final", cfg.molecules.size());
        if (dyn.contains("t_max")) {
            d.t_max = detail::get_number(dyn, "dynamics", "t_max");
            if (d.t_max < 0.0)
                throw ConfigError("dynamics: t_max must be non-negative");
        }
        if (dyn.contains("n_points")) {
            d.n_points = static_cast<int>(detail::get_number(dyn, "dynamics", "n_points"));
            if (d.n_points < 1)
                throw ConfigError("dynamics: n_points must be >= 1");
        }
        if (dyn.contains("exact_effective"))
            d.exact_effective = dyn["exact_effective"].get<bool>();
        if (dyn.contains("exact_full"))
            d.exact_full = dyn["exact_full"].get<bool>();
        for (std::size_t k = 0; k < cfg.molecules.size(); ++k) {
            const int dim = cfg.molecules[k].spec.spin.dimension();
            if (d.initial[k] >= dim || d.final[k] >= dim)
                throw ConfigError("dynamics: state label exceeds the molecule dimension");
        }
        cfg.dynamics = d;
    }

    if (root.contains("sweep")) {
        const json& sw = root["sweep"];
        detail::require_keys(sw, "sweep", {"axis", "start", "stop", "steps", "molecule"});
        SweepConfig s;
        if (sw.contains("axis")) {
            const std::string axis = sw["axis"].get<std::string>();
            if (axis == "x")
                s.axis = 0;
            else if (axis == "y")
                s.axis = 1;
            else if (axis == "z")
                s.axis = 2;
            else
                throw ConfigError("sweep: axis must be one of x, y, z");
        }
        s.start = detail::get_number(sw, "sweep", "start");
        s.stop = detail::get_number(sw, "sweep", "stop");
        s.steps = static_cast<int>(detail::get_number(sw, "sweep", "steps"));
        if (s.steps < 1)
            throw ConfigError("sweep: steps must be >= 1");
        if (s.steps > 1 && !(s.stop > s.start))
            throw ConfigError("sweep: need stop > start for a monotone field grid");
        if (sw.contains("molecule")) {
            if (sw["molecule"].is_string()) {
                if (sw["molecule"].get<std::string>() != "all")
                    throw ConfigError("sweep: molecule must be an index or \"all\"");
                s.molecule = -1;
            } else {
                s.molecule = static_cast<int>(detail::get_number(sw, "sweep", "molecule")) - 1;
                if (s.molecule < 0 ||
                    s.molecule >= static_cast<int>(cfg.molecules.size()))
                    throw ConfigError("sweep: molecule index out of range");
            }
        }
        cfg.sweep = s;
    }
    return cfg;
}

}  // namespace spincavity
