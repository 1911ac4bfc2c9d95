#ifndef FEYNCAT_CLI_HPP
#define FEYNCAT_CLI_HPP

// Command-line front end: wick / translate / amplitude / compose / verify.
// All output is written to a captured stream so runs are reproducible and
// testable; given the same inputs the output is byte-identical.

#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "feyncat/verify.hpp"

namespace feyncat {

struct CmdResult {
    int code = 0;
    std::string out;
};

// --- JSON views of the symbolic types -------------------------------------

inline const char* name_of(Wrapper w) {
    switch (w) {
        case Wrapper::time_ordered: return "time-ordered";
        case Wrapper::normal: return "normal";
        case Wrapper::none:
        default: return "none";
    }
}
inline const char* name_of(Part p) {
    switch (p) {
        case Part::plus: return "plus";
        case Part::minus: return "minus";
        case Part::full:
        default: return "full";
    }
}
inline const char* name_of(PropKind k) { return k == PropKind::feynman ? "feynman" : "ordered"; }
inline const char* name_of(PropMass m) { return m == PropMass::meson ? "meson" : "nucleon"; }
inline const char* name_of(Weighting w) {
    return w == Weighting::literal ? "literal" : "multinomial";
}
inline const char* name_of(LegDir d) {
    switch (d) {
        case LegDir::in: return "in";
        case LegDir::out: return "out";
        case LegDir::thru:
        default: return "thru";
    }
}

inline nlohmann::json json_of(const Prefactor& p) {
    return {{"coeff", rat_to_string(p.coeff)}, {"gpow", p.gpow}, {"uvpow", p.uvpow}};
}

inline nlohmann::json json_of(const FieldSymbol& f) {
    return {{"field", field_glyph(f.species)},
            {"part", name_of(f.part)},
            {"pos", f.pos},
            {"text", symbol_text(f)}};
}

inline nlohmann::json json_of(const PropFactor& p) {
    return {{"kind", name_of(p.kind)},
            {"mass", name_of(p.mass)},
            {"a", p.a},
            {"b", p.b},
            {"text", prop_text(p)}};
}

inline nlohmann::json json_of(const OperatorString& s) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : s.factors) factors.push_back(json_of(f));
    nlohmann::json props = nlohmann::json::array();
    for (const auto& p : s.props) props.push_back(json_of(p));
    return {{"prefactor", json_of(s.pre)}, {"wrap", name_of(s.wrap)},
            {"bound", s.bound},           {"factors", factors},
            {"props", props},             {"text", canonical_text(s)}};
}

inline nlohmann::json json_of(const CoherentBox& b) {
    return {{"particle", particle_glyph(b.particle, false)},
            {"dagger", b.dagger},
            {"vertex", b.vertex},
            {"mom", b.mom}};
}

inline nlohmann::json json_of(const GraphLeg& l) {
    return {{"vertex", l.vertex},
            {"particle", particle_glyph(l.particle, false)},
            {"dir", name_of(l.dir)},
            {"mom", l.mom}};
}

inline nlohmann::json json_of(const CatDiagram& d) {
    nlohmann::json ann = nlohmann::json::array(), cre = nlohmann::json::array();
    for (const auto& b : d.ann_boxes) ann.push_back(json_of(b));
    for (const auto& b : d.cre_boxes) cre.push_back(json_of(b));
    nlohmann::json props = nlohmann::json::array(), legs = nlohmann::json::array();
    for (const auto& p : d.props) props.push_back(json_of(p));
    for (const auto& l : d.legs) legs.push_back(json_of(l));
    return {{"prefactor", json_of(d.pre)},
            {"weighting", name_of(d.weighting)},
            {"vertices", d.vertices},
            {"n_wires", d.n_wires},
            {"ann_boxes", ann},
            {"cre_boxes", cre},
            {"props", props},
            {"legs", legs},
            {"text", canonical_text(linearize(d))}};
}

inline nlohmann::json json_of(const LinComb& q) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [label, c] : q.terms) j[label] = rat_to_string(c);
    return j;
}

inline nlohmann::json json_of(const AmpTerm& t) {
    nlohmann::json props = nlohmann::json::array(), deltas = nlohmann::json::array();
    for (const auto& p : t.props)
        props.push_back({{"mass", name_of(p.mass)}, {"q", json_of(p.q)},
                         {"text", amp_prop_text(p)}});
    for (const auto& d : t.deltas) deltas.push_back(json_of(d));
    return {{"coeff", rat_to_string(t.coeff)}, {"gpow", t.gpow}, {"loops", t.loops},
            {"props", props},                  {"deltas", deltas}, {"text", amp_term_text(t)}};
}

inline nlohmann::json json_of(const AmplitudeExpr& e) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms) terms.push_back(json_of(t));
    return {{"terms", terms}, {"text", amp_text(e)}};
}

// --- commands ---------------------------------------------------------------

namespace detail {

inline void require_vertex(const RunConfig& cfg) {
    if (!cfg.theory.has_vertex())
        throw std::invalid_argument("theory preset '" + cfg.theory.preset +
                                    "' has no interaction vertex; only order 0 is available");
}

}  // namespace detail

inline int cmd_wick(const RunConfig& cfg, std::ostream& out) {
    if (cfg.order > 0) detail::require_vertex(cfg);
    std::vector<OperatorString> wick = wick_expand(smatrix_term(cfg.order));
    bool channel = !cfg.channel.empty();
    std::vector<OperatorString> terms;
    if (channel) {
        auto [ins, outs] = parse_channel(cfg.channel);
        terms = select_channel(wick, ins, outs);
    } else {
        terms = wick;
    }

    if (cfg.format == "dot") {
        if (!channel)
            throw std::invalid_argument(
                "dot output needs --channel: unresolved fields have no 2-D form");
        std::vector<CatDiagram> ds;
        for (const auto& t : terms) ds.push_back(two_dimensionalize(t, cfg.weighting_enum()));
        out << render_dot(ds);
        return 0;
    }
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : terms) arr.push_back(json_of(t));
        out << arr.dump(2) << "\n";
        return 0;
    }
    out << "# order " << cfg.order;
    if (channel) out << ", channel " << cfg.channel;
    out << ": " << terms.size() << (terms.size() == 1 ? " term" : " terms") << "\n";
    for (const auto& t : terms)
        out << canonical_text(cfg.format == "canonical" ? canonicalize_string(t) : t) << "\n";
    return 0;
}

inline int cmd_translate(const RunConfig& cfg, const std::string& path, std::ostream& out) {
    FeynmanGraph g = load_feynman_graph(path);
    CatDiagram d = translate(g, cfg.weighting_enum());
    if (cfg.format == "dot")
        out << render_dot(d);
    else if (cfg.format == "json")
        out << json_of(d).dump(2) << "\n";
    else
        out << canonical_text(linearize(d)) << "\n";
    return 0;
}

inline int cmd_amplitude(const RunConfig& cfg, const std::string& graph_path,
                         const std::string& momenta_path, std::ostream& out) {
    Weighting w = cfg.weighting_enum();
    AmplitudeExpr rules_amp, cat_amp;
    bool have_rules = false, have_cat = false;
    std::vector<CatDiagram> diagrams;

    if (!graph_path.empty()) {
        FeynmanGraph g = load_feynman_graph(graph_path);
        diagrams = {translate(g, w)};
        if (cfg.method == "rules" || cfg.method == "both") {
            rules_amp = feynman_rules(g);
            have_rules = true;
        }
        if (cfg.method == "categorical" || cfg.method == "both") {
            cat_amp = amplitude_from_categorical(diagrams[0], ins_of(g), outs_of(g));
            have_cat = true;
        }
    } else if (!cfg.channel.empty()) {
        // a channel is computed through the categorical pipeline: selected
        // resolutions, two-dimensionalized, with labelled external legs
        auto [ins, outs] = parse_channel(cfg.channel);
        if (cfg.order == 0) {
            diagrams = {two_dimensionalize(wick_expand(smatrix_term(0))[0], w)};
        } else {
            detail::require_vertex(cfg);
            auto picked = select_channel(wick_expand(smatrix_term(cfg.order)), ins, outs);
            if (picked.empty())
                throw std::invalid_argument("no contribution to channel '" + cfg.channel +
                                            "' at order " + std::to_string(cfg.order));
            for (const auto& s : picked) diagrams.push_back(two_dimensionalize(s, w));
        }
        cat_amp = amplitude_channel(diagrams, channel_legs(ins, false),
                                    channel_legs(outs, true));
        have_cat = true;
    } else {
        throw std::invalid_argument("amplitude needs a graph file or --channel");
    }

    if (cfg.format == "dot") {
        out << render_dot(diagrams);
        return 0;
    }

    const AmplitudeExpr& shown = have_rules ? rules_amp : cat_amp;
    if (cfg.format == "json") {
        out << json_of(canonical_amp(shown)).dump(2) << "\n";
        return 0;
    }

    int code = 0;
    if (have_rules && have_cat) {
        out << "rules:       " << amp_text(canonical_amp(rules_amp)) << "\n";
        out << "categorical: " << amp_text(canonical_amp(cat_amp)) << "\n";
        bool match = amp_equal(rules_amp, cat_amp);
        out << (match ? "MATCH" : "MISMATCH") << "\n";
        if (!match) code = 1;
    }
    if (cfg.format != "canonical") {
        try {
            auto [ia, delta] = extract_conservation(shown);
            out << "iA = " << amp_text(ia) << "\n";
            out << "conservation = " << amp_text(delta) << "\n";
        } catch (const std::invalid_argument&) {
            out << "amplitude = " << amp_text(canonical_amp(shown)) << "\n";
        }
    } else {
        out << amp_text(canonical_amp(shown)) << "\n";
    }

    if (!momenta_path.empty()) {
        MomentumAssignment ma;
        ma.p = load_momenta(momenta_path);
        ma.loop_omega = cfg.loop_cutoff;
        ma.loop_denom = cfg.lattice.omega_ir;
        ma.dim4 = cfg.lattice.n_space + 1;
        EvalOptions opt;
        opt.epsilon = cfg.epsilon;
        opt.meson_mass = cfg.meson_mass;
        opt.nucleon_mass = cfg.nucleon_mass;
        Complex v = eval_amplitude(canonical_amp(shown), ma, opt);
        out << std::setprecision(12) << "value = (" << v.real() << ", " << v.imag() << ")\n";
    }
    return code;
}

inline int cmd_compose(const RunConfig& cfg, const std::string& first,
                       const std::string& second, bool check, std::ostream& out) {
    Weighting w = cfg.weighting_enum();
    CatDiagram d1 = translate(load_feynman_graph(first), w);
    CatDiagram d2 = translate(load_feynman_graph(second), w);
    std::vector<CatDiagram> terms = compose_sequential(d1, d2);

    if (cfg.format == "dot") {
        out << render_dot(terms);
    } else if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : terms) arr.push_back(json_of(t));
        out << arr.dump(2) << "\n";
    } else {
        out << "# " << terms.size() << (terms.size() == 1 ? " term" : " terms") << "\n";
        for (const auto& t : terms) out << canonical_text(linearize(t)) << "\n";
    }

    if (check) {
        std::set<int> species;
        for (const CatDiagram* d : {&d1, &d2}) {
            for (const auto& b : d->ann_boxes) species.insert(b.particle);
            for (const auto& b : d->cre_boxes) species.insert(b.particle);
        }
        FockEngine eng = cfg.engine();
        FockBasis basis(eng, std::vector<int>(species.begin(), species.end()), cfg.tau,
                        cfg.nmax);
        NumericEvaluator ev(eng, basis);
        double resid =
            (ev.via_boxes_sum(terms) - ev.via_boxes(d2) * ev.via_boxes(d1)).cwiseAbs().maxCoeff();
        bool ok = resid <= 1e-8;
        out << std::scientific << std::setprecision(3) << "check: " << (ok ? "PASS" : "FAIL")
            << " (residual " << resid << ", basis dim " << basis.size() << ")\n";
        if (!ok) return 1;
    }
    return 0;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    std::vector<PropertyResult> results = run_verification(cfg);
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results)
            arr.push_back({{"name", r.name},
                           {"status", r.waived ? "waived" : (r.pass ? "pass" : "fail")},
                           {"residual", r.residual},
                           {"tolerance", r.tolerance},
                           {"note", r.note}});
        out << arr.dump(2) << "\n";
    } else {
        out << verify_report(results);
    }
    return verify_ok(results) ? 0 : 1;
}

// --- argument parsing ---------------------------------------------------------

inline CmdResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;

    // the config file provides the defaults that flags then override, so it
    // must be located before CLI parsing; an explicit flag beats the
    // environment
    std::string config_path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty())
        if (const char* env = std::getenv("FEYNCAT_CONFIG")) config_path = env;

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
    } catch (const std::exception& ex) {
        return {1, std::string("error: ") + ex.what() + "\n"};
    }

    CLI::App app{"feyncat: S-matrix expansion, diagram translation and amplitudes"};
    app.fallthrough();
    std::string config_opt;
    app.add_option("--config", config_opt, "JSON config file (or FEYNCAT_CONFIG)");
    app.add_option("--theory", cfg.theory.preset,
                   "theory preset: real-scalar, complex-scalar, scalar-yukawa");
    app.add_option("--order", cfg.order, "perturbative order of the S-matrix term");
    app.add_option("--channel", cfg.channel, "scattering channel, e.g. \"N+ N+ -> N+ N+\"");
    app.add_option("--method", cfg.method, "amplitude route: rules, categorical or both");
    app.add_option("--weighting", cfg.weighting, "splitter weighting: literal or multinomial");
    app.add_option("--format", cfg.format, "output format: text, canonical, dot or json");
    app.add_option("--loop-cutoff", cfg.loop_cutoff, "loop numerators run -cutoff..cutoff");
    app.add_option("--epsilon", cfg.epsilon, "propagator pole displacement");

    CLI::App* wick = app.add_subcommand("wick", "Wick-expand an S-matrix term");
    CLI::App* trans = app.add_subcommand("translate", "translate a graph file to a diagram");
    std::string trans_graph;
    trans->add_option("graph", trans_graph, "Feynman graph file")->required();
    CLI::App* amp = app.add_subcommand("amplitude", "amplitude of a graph or channel");
    std::string amp_graph, momenta;
    amp->add_option("graph", amp_graph, "Feynman graph file");
    amp->add_option("--momenta", momenta, "external momentum assignment file");
    CLI::App* comp = app.add_subcommand("compose", "sequential composition of two diagrams");
    std::string comp_first, comp_second;
    bool comp_check = false;
    comp->add_option("first", comp_first, "graph applied first")->required();
    comp->add_option("second", comp_second, "graph applied second")->required();
    comp->add_flag("--check", comp_check, "verify the sum against the matrix product");
    CLI::App* verify = app.add_subcommand("verify", "run the built-in property checks");
    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("feyncat");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream err;
        int code = app.exit(e, out, err);
        return {code, out.str() + err.str()};
    }

    try {
        cfg.validate();
        int code = 0;
        if (*wick)
            code = cmd_wick(cfg, out);
        else if (*trans)
            code = cmd_translate(cfg, trans_graph, out);
        else if (*amp)
            code = cmd_amplitude(cfg, amp_graph, momenta, out);
        else if (*comp)
            code = cmd_compose(cfg, comp_first, comp_second, comp_check, out);
        else if (*verify)
            code = cmd_verify(cfg, out);
        return {code, out.str()};
    } catch (const std::exception& ex) {
        out << "error: " << ex.what() << "\n";
        return {1, out.str()};
    }
}

}  // namespace feyncat

#endif  // FEYNCAT_CLI_HPP
