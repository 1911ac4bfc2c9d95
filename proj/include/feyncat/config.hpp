#ifndef FEYNCAT_CONFIG_HPP
#define FEYNCAT_CONFIG_HPP

// Run configuration shared by the command-line tools: theory preset, lattice
// shape, truncation, and the knobs of the individual commands.  Configs load
// from JSON files; every command-line flag overrides its config value.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "feyncat/amplitude.hpp"

namespace feyncat {

// Which field content the S-matrix expansion may use.  Only the scalar
// Yukawa preset has the trivalent psi^dag psi phi vertex wired in; the pure
// scalar presets support free-field checks and order-0 terms only.
struct TheoryParams {
    std::string preset = "scalar-yukawa";

    bool has_vertex() const { return preset == "scalar-yukawa"; }
};

inline const std::set<std::string>& known_presets() {
    static const std::set<std::string> presets{"real-scalar", "complex-scalar", "scalar-yukawa"};
    return presets;
}

struct RunConfig {
    TheoryParams theory;
    LatticeParams lattice{3, 5, 1};
    Rat meson_mass{1};
    Rat nucleon_mass{1};
    int tau = 2;
    int nmax = 2;
    int order = 2;
    std::string channel;  // "N+ N+ -> N+ N+"; empty means unfiltered
    std::string method = "rules";
    std::string weighting = "multinomial";
    std::string format = "text";
    long long loop_cutoff = 7;  // loop momenta run numerators -cutoff..cutoff
    double epsilon = 1e-6;

    void validate() const {
        lattice.validate();
        if (!known_presets().count(theory.preset))
            throw std::invalid_argument("unknown theory preset '" + theory.preset +
                                        "' (known: real-scalar, complex-scalar, scalar-yukawa)");
        if (order < 0) throw std::invalid_argument("order must be >= 0");
        if (tau < 0) throw std::invalid_argument("tau must be >= 0");
        if (nmax < 0) throw std::invalid_argument("nmax must be >= 0");
        if (method != "rules" && method != "categorical" && method != "both")
            throw std::invalid_argument("method must be rules, categorical or both");
        if (weighting != "literal" && weighting != "multinomial")
            throw std::invalid_argument("weighting must be literal or multinomial");
        if (format != "text" && format != "canonical" && format != "dot" && format != "json")
            throw std::invalid_argument("format must be text, canonical, dot or json");
        if (loop_cutoff < 0) throw std::invalid_argument("loop-cutoff must be >= 0");
        if (epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
        if (meson_mass <= Rat(0) || nucleon_mass <= Rat(0))
            throw std::invalid_argument("masses must be positive");
    }

    FockEngine engine() const { return {lattice, meson_mass, nucleon_mass}; }
    Weighting weighting_enum() const {
        return weighting == "literal" ? Weighting::literal : Weighting::multinomial;
    }
};

namespace detail {

inline Rat rat_from_json(const nlohmann::json& v, const std::string& key) {
    if (v.is_number_integer()) return Rat(v.get<long long>());
    if (v.is_string()) return parse_rat(v.get<std::string>());
    throw std::invalid_argument("'" + key + "' must be an integer or a rational string");
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "theory")
            c.theory.preset = v.get<std::string>();
        else if (key == "omega_uv")
            c.lattice.omega_uv = v.get<long long>();
        else if (key == "omega_ir")
            c.lattice.omega_ir = v.get<long long>();
        else if (key == "n_space")
            c.lattice.n_space = v.get<int>();
        else if (key == "meson_mass")
            c.meson_mass = detail::rat_from_json(v, key);
        else if (key == "nucleon_mass")
            c.nucleon_mass = detail::rat_from_json(v, key);
        else if (key == "tau")
            c.tau = v.get<int>();
        else if (key == "nmax")
            c.nmax = v.get<int>();
        else if (key == "order")
            c.order = v.get<int>();
        else if (key == "channel")
            c.channel = v.get<std::string>();
        else if (key == "method")
            c.method = v.get<std::string>();
        else if (key == "weighting")
            c.weighting = v.get<std::string>();
        else if (key == "format")
            c.format = v.get<std::string>();
        else if (key == "loop_cutoff")
            c.loop_cutoff = v.get<long long>();
        else if (key == "epsilon")
            c.epsilon = v.get<double>();
        else
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& ex) {
        throw std::runtime_error("config " + path + ": " + ex.what());
    }
    try {
        return config_from_json(j);
    } catch (const std::exception& ex) {
        throw std::runtime_error("config " + path + ": " + ex.what());
    }
}

// "<in> -> <out>" with particles N+, N-, M on each side.
inline std::pair<std::vector<int>, std::vector<int>> parse_channel(const std::string& text) {
    auto arrow = text.find("->");
    if (arrow == std::string::npos)
        throw std::invalid_argument("channel: expected '<in> -> <out>', e.g. \"N+ N+ -> N+ N+\"");
    auto side = [](const std::string& s) {
        std::vector<int> r;
        std::istringstream is(s);
        std::string tok;
        while (is >> tok) {
            if (tok == "N+")
                r.push_back(kNucleon);
            else if (tok == "N-")
                r.push_back(kAntinucleon);
            else if (tok == "M")
                r.push_back(kMeson);
            else
                throw std::invalid_argument("channel: unknown particle '" + tok +
                                            "' (use N+, N-, M)");
        }
        return r;
    };
    return {side(text.substr(0, arrow)), side(text.substr(arrow + 2))};
}

// Momentum labels for the external lines of a channel: p1, p2, ... incoming
// and p1', p2', ... outgoing.
inline std::vector<ExtLeg> channel_legs(const std::vector<int>& species, bool outgoing) {
    std::vector<ExtLeg> legs;
    for (size_t i = 0; i < species.size(); ++i)
        legs.push_back({species[i], "p" + std::to_string(i + 1) + (outgoing ? "'" : "")});
    return legs;
}

}  // namespace feyncat

#endif  // FEYNCAT_CONFIG_HPP
