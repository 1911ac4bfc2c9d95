#ifndef FEYNCAT_DIAGRAM_HPP
#define FEYNCAT_DIAGRAM_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "feyncat/opalg.hpp"
#include "feyncat/splitmerge.hpp"

namespace feyncat {

// --- Feynman-graph surface syntax ---------------------------------------------------

enum class LegDir { in, out, thru };

struct GraphLeg {
    std::string vertex;  // "-" for through-legs
    int particle;        // kNucleon / kAntinucleon / kMeson
    LegDir dir;
    std::string mom;  // external momentum label, e.g. "p1" / "p1'"
};

// Internal edge. A psi edge u -> v follows nucleon-number flow: it pairs the
// creation slot psid(u) with the annihilation slot psi(v). phi edges are
// undirected meson lines.
struct GraphEdge {
    std::string u, v;
    Species species;  // Species::psi (directed) or Species::phi
};

struct FeynmanGraph {
    std::vector<std::string> vertices;
    std::vector<GraphEdge> edges;
    std::vector<GraphLeg> legs;
};

struct GraphParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
struct Token {
    std::string text;
    int line, col;
};

inline std::vector<Token> tokenize_line(const std::string& raw, int lineno) {
    std::vector<Token> out;
    std::string line = raw.substr(0, raw.find('#'));
    size_t i = 0;
    while (i < line.size()) {
        if (isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < line.size() && !isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({line.substr(i, j - i), lineno, static_cast<int>(i + 1)});
        i = j;
    }
    return out;
}

[[noreturn]] inline void parse_fail(const Token& t, const std::string& msg) {
    std::ostringstream os;
    os << "line " << t.line << ", col " << t.col << ": " << msg;
    throw GraphParseError(os.str());
}

inline int parse_particle(const Token& t) {
    if (t.text == "N+") return kNucleon;
    if (t.text == "N-") return kAntinucleon;
    if (t.text == "M") return kMeson;
    parse_fail(t, "unknown particle '" + t.text + "' (expected N+, N- or M)");
}

inline LegDir parse_dir(const Token& t) {
    if (t.text == "in") return LegDir::in;
    if (t.text == "out") return LegDir::out;
    if (t.text == "thru") return LegDir::thru;
    parse_fail(t, "unknown leg direction '" + t.text + "' (expected in, out or thru)");
}
}  // namespace detail

// Validates the trivalent scalar-Yukawa vertex pattern: each vertex must use
// exactly one psid slot, one psi slot and one phi slot, across edges and legs.
inline void validate_graph(const FeynmanGraph& g) {
    std::map<std::string, std::array<int, 3>> slots;  // [psid, psi, phi] per vertex
    for (const auto& v : g.vertices) {
        if (slots.count(v)) throw GraphParseError("duplicate vertex '" + v + "'");
        slots[v] = {0, 0, 0};
    }
    auto touch = [&](const std::string& v, int slot, const std::string& what) {
        auto it = slots.find(v);
        if (it == slots.end())
            throw GraphParseError("dangling " + what + ": unknown vertex '" + v + "'");
        ++it->second[slot];
    };
    for (const auto& e : g.edges) {
        if (e.u == e.v) throw GraphParseError("self-edge at vertex '" + e.u + "'");
        if (e.species == Species::psi) {
            touch(e.u, 0, "edge");
            touch(e.v, 1, "edge");
        } else {
            touch(e.u, 2, "edge");
            touch(e.v, 2, "edge");
        }
    }
    for (const auto& l : g.legs) {
        if (l.dir == LegDir::thru) {
            if (l.vertex != "-")
                throw GraphParseError("through-leg must not attach to a vertex");
            continue;
        }
        bool in = l.dir == LegDir::in;
        // incoming N+ is annihilated by psi, outgoing N+ created by psid;
        // N- couples through the opposite slots; mesons always use phi.
        int slot = l.particle == kMeson ? 2
                   : l.particle == kNucleon ? (in ? 1 : 0)
                                            : (in ? 0 : 1);
        touch(l.vertex, slot, "leg");
    }
    for (const auto& [v, s] : slots)
        if (s != std::array<int, 3>{1, 1, 1}) {
            std::ostringstream os;
            os << "non-trivalent vertex '" << v << "': psid/psi/phi slot counts " << s[0] << "/"
               << s[1] << "/" << s[2] << " (need 1/1/1)";
            throw GraphParseError(os.str());
        }
}

inline FeynmanGraph parse_feynman_graph(const std::string& text) {
    FeynmanGraph g;
    enum { none, vertices, edges, legs } section = none;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        auto toks = detail::tokenize_line(raw, lineno);
        if (toks.empty()) continue;
        size_t start = 0;
        if (toks[0].text == "vertices:") {
            section = vertices;
            start = 1;
        } else if (toks[0].text == "edges:") {
            section = edges;
            start = 1;
        } else if (toks[0].text == "legs:") {
            section = legs;
            start = 1;
        }
        if (start == 1 && toks.size() == 1) continue;
        std::vector<detail::Token> rest(toks.begin() + start, toks.end());
        switch (section) {
            case none:
                detail::parse_fail(toks[0], "content before any section header");
            case vertices:
                for (const auto& t : rest) g.vertices.push_back(t.text);
                break;
            case edges: {
                if (rest.size() != 3)
                    detail::parse_fail(rest[0], "edge needs 'u v species'");
                Species sp;
                if (rest[2].text == "phi")
                    sp = Species::phi;
                else if (rest[2].text == "psi")
                    sp = Species::psi;
                else
                    detail::parse_fail(rest[2], "unknown edge species '" + rest[2].text +
                                                    "' (expected phi or psi)");
                g.edges.push_back({rest[0].text, rest[1].text, sp});
                break;
            }
            case legs: {
                if (rest.size() != 4)
                    detail::parse_fail(rest[0], "leg needs 'vertex particle in|out|thru label'");
                GraphLeg l;
                l.vertex = rest[0].text;
                l.particle = detail::parse_particle(rest[1]);
                l.dir = detail::parse_dir(rest[2]);
                l.mom = rest[3].text;
                g.legs.push_back(l);
                break;
            }
        }
    }
    if (g.vertices.empty() && g.legs.empty())
        throw GraphParseError("empty graph description");
    validate_graph(g);
    return g;
}

inline FeynmanGraph load_feynman_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw GraphParseError("cannot open graph file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return parse_feynman_graph(os.str());
}

// --- Categorical diagrams -----------------------------------------------------------

// A coherently controlled ladder box on one field wire, its control port wired
// to the position spider of `vertex`. External boxes carry a momentum label.
struct CoherentBox {
    int particle;
    bool dagger;
    std::string vertex;
    std::string mom;
};

// Field symbol corresponding to a box: the box is exactly one frequency part
// of the field whose ladder content it carries.
inline FieldSymbol box_symbol(const CoherentBox& b) {
    for (Species sp : {Species::psi, Species::psid, Species::phi})
        for (Part part : {Part::plus, Part::minus}) {
            LadderAction act = field_part_action(sp, part == Part::minus);
            if (act.particle == b.particle && act.create == b.dagger)
                return {sp, part, b.vertex};
        }
    throw std::logic_error("box_symbol: unreachable");
}

inline CoherentBox symbol_box(const FieldSymbol& f) {
    if (f.part == Part::full)
        throw std::invalid_argument("symbol_box: full field has no single box");
    LadderAction act = field_part_action(f.species, f.part == Part::minus);
    return {act.particle, act.create, f.pos, ""};
}

// 2-D intermediate representation. Parallel field wires enter on the left;
// annihilation boxes sit on the left half, creation boxes on the right, and
// each interaction vertex is a position spider (normalized sum over the
// spacetime lattice) controlling its boxes and propagator boxes. All spider
// weights are accounted in `pre` (one w_uv^-4 per vertex).
struct CatDiagram {
    Prefactor pre;
    Weighting weighting = Weighting::multinomial;
    std::vector<std::string> vertices;  // spider labels; bound position labels
    int n_wires = 0;
    std::vector<CoherentBox> ann_boxes;  // string order (leftmost first)
    std::vector<CoherentBox> cre_boxes;
    std::vector<PropFactor> props;
    std::vector<GraphLeg> legs;  // external boundary as declared, if known
};

inline std::vector<int> in_species(const CatDiagram& d) {
    std::vector<int> r;
    for (const auto& b : d.ann_boxes) r.push_back(b.particle);
    for (const auto& l : d.legs)
        if (l.dir == LegDir::thru) r.push_back(l.particle);
    return r;
}

inline std::vector<int> out_species(const CatDiagram& d) {
    std::vector<int> r;
    for (const auto& b : d.cre_boxes) r.push_back(b.particle);
    for (const auto& l : d.legs)
        if (l.dir == LegDir::thru) r.push_back(l.particle);
    return r;
}

// --- translation (Feynman graph -> categorical diagram) ------------------------------

inline CatDiagram translate(const FeynmanGraph& g, Weighting w = Weighting::multinomial) {
    validate_graph(g);
    CatDiagram d;
    d.weighting = w;
    d.vertices = g.vertices;
    int n = static_cast<int>(g.vertices.size());
    d.pre = {Rat(1, factorial(n)), n, -4 * n};
    d.legs = g.legs;

    int n_in = 0, n_out = 0, n_thru = 0;
    for (const auto& l : g.legs) {
        switch (l.dir) {
            case LegDir::in:
                d.ann_boxes.push_back({l.particle, false, l.vertex, l.mom});
                ++n_in;
                break;
            case LegDir::out:
                d.cre_boxes.push_back({l.particle, true, l.vertex, l.mom});
                ++n_out;
                break;
            case LegDir::thru:
                ++n_thru;
                break;
        }
    }
    d.n_wires = std::max(n_in, n_out) + n_thru;

    for (const auto& e : g.edges) {
        // a psi edge u->v is the contraction of psid(u) with psi(v); a phi
        // edge the contraction of the two meson fields. Either way the
        // Feynman propagator is symmetric, so arguments are sorted.
        PropMass mass = e.species == Species::phi ? PropMass::meson : PropMass::nucleon;
        std::string a = e.u, b = e.v;
        if (label_less(b, a)) std::swap(a, b);
        d.props.push_back({mass, PropKind::feynman, a, b});
    }
    return d;
}

// --- linearization (categorical diagram -> operator string) --------------------------

// The meaning of a diagram is its 1-D reading: creation boxes (right half)
// become the left factors of a normal-ordered string, annihilation boxes the
// right factors, spiders become bound position sums carrying one w_uv^-4
// each (already in the prefactor), and propagator boxes scalar factors.
inline OperatorString linearize(const CatDiagram& d) {
    OperatorString s;
    s.pre = d.pre;
    s.bound = d.vertices;
    s.props = d.props;
    for (const auto& b : d.cre_boxes) s.factors.push_back(box_symbol(b));
    for (const auto& b : d.ann_boxes) s.factors.push_back(box_symbol(b));
    return s;
}

// --- 1-D -> 2-D conversion ------------------------------------------------------------

// Builds the 2-D presentation of a normal-ordered resolved operator string:
// one external particle per wire, annihilators sliding to the left half,
// creators to the right, spiders recovering the bound position sums.
inline CatDiagram two_dimensionalize(const OperatorString& s,
                                     Weighting w = Weighting::multinomial) {
    if (!is_resolved(s))
        throw std::invalid_argument("two_dimensionalize: string has unresolved full fields");
    if (!is_normal_ordered(s))
        throw std::invalid_argument("two_dimensionalize: string is not normal-ordered");
    CatDiagram d;
    d.pre = s.pre;
    d.weighting = w;
    d.vertices = s.bound;
    d.props = s.props;
    for (const auto& f : s.factors) {
        CoherentBox b = symbol_box(f);
        (b.dagger ? d.cre_boxes : d.ann_boxes).push_back(b);
    }
    d.n_wires = static_cast<int>(std::max(d.cre_boxes.size(), d.ann_boxes.size()));
    return d;
}

// --- sequential composition ------------------------------------------------------------

// d2 after d1. Linearizes both (with d2's bound labels and vertices renamed
// fresh), then normal-orders the concatenated string by commuting d2's
// annihilation boxes past d1's creation boxes: every same-particle pair may
// contract, spawning an ordered pair-function box D(ann vertex - cre vertex).
// One output term per partial matching; prefactors multiply verbatim.
inline std::vector<CatDiagram> compose_sequential(const CatDiagram& d1, const CatDiagram& d2) {
    std::vector<int> mid_out = out_species(d1), mid_in = in_species(d2);
    std::sort(mid_out.begin(), mid_out.end());
    std::sort(mid_in.begin(), mid_in.end());
    if (mid_out != mid_in)
        throw std::invalid_argument("compose_sequential: boundary mismatch");

    // rename d2's bound labels so they are disjoint from d1's
    CatDiagram b = d2;
    std::map<std::string, std::string> ren;
    int next = static_cast<int>(d1.vertices.size()) + 1;
    for (auto& v : b.vertices) {
        std::string nv = "x" + std::to_string(next++);
        ren[v] = nv;
        v = nv;
    }
    auto sub = [&](std::string& lbl) {
        auto it = ren.find(lbl);
        if (it != ren.end()) lbl = it->second;
    };
    for (auto& box : b.ann_boxes) sub(box.vertex);
    for (auto& box : b.cre_boxes) sub(box.vertex);
    for (auto& p : b.props) {
        sub(p.a);
        sub(p.b);
        if (p.kind == PropKind::feynman && label_less(p.b, p.a)) std::swap(p.a, p.b);
    }

    const std::vector<CoherentBox>& movers = b.ann_boxes;   // d2's annihilators
    const std::vector<CoherentBox>& blockers = d1.cre_boxes;  // d1's creators

    std::vector<CatDiagram> out;
    std::vector<int> match(movers.size(), -1);
    std::vector<char> used(blockers.size(), 0);

    auto emit = [&]() {
        CatDiagram t;
        t.pre = d1.pre.times(b.pre);
        t.weighting = d1.weighting;
        t.vertices = d1.vertices;
        t.vertices.insert(t.vertices.end(), b.vertices.begin(), b.vertices.end());
        t.props = d1.props;
        t.props.insert(t.props.end(), b.props.begin(), b.props.end());
        t.cre_boxes = b.cre_boxes;
        for (size_t j = 0; j < blockers.size(); ++j)
            if (!used[j]) t.cre_boxes.push_back(blockers[j]);
        for (size_t i = 0; i < movers.size(); ++i) {
            if (match[i] >= 0) {
                PropMass mass =
                    movers[i].particle == kMeson ? PropMass::meson : PropMass::nucleon;
                t.props.push_back({mass, PropKind::ordered, movers[i].vertex,
                                   blockers[match[i]].vertex});
            } else {
                t.ann_boxes.push_back(movers[i]);
            }
        }
        t.ann_boxes.insert(t.ann_boxes.end(), d1.ann_boxes.begin(), d1.ann_boxes.end());
        t.n_wires = static_cast<int>(std::max(t.cre_boxes.size(), t.ann_boxes.size()));
        out.push_back(std::move(t));
    };

    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == movers.size()) {
            emit();
            return;
        }
        self(self, i + 1);  // leave annihilator i uncontracted
        for (size_t j = 0; j < blockers.size(); ++j) {
            if (used[j] || blockers[j].particle != movers[i].particle) continue;
            used[j] = 1;
            match[i] = static_cast<int>(j);
            self(self, i + 1);
            used[j] = 0;
            match[i] = -1;
        }
    };
    rec(rec, 0);
    return out;
}

// --- DOT rendering -----------------------------------------------------------------------

namespace detail {
inline void render_dot_body(const CatDiagram& d, const std::string& idp, std::ostream& os) {
    bool empty = d.ann_boxes.empty() && d.cre_boxes.empty() && d.vertices.empty() &&
                 d.props.empty() && d.legs.empty();
    if (empty) return;
    os << "  " << idp << "in [shape=point];\n";
    os << "  " << idp << "out [shape=point];\n";
    auto box_id = [&](bool cre, size_t i) {
        return idp + (cre ? "c" : "a") + std::to_string(i);
    };
    for (size_t i = 0; i < d.ann_boxes.size(); ++i) {
        const auto& b = d.ann_boxes[i];
        os << "  " << box_id(false, i) << " [shape=box,label=\""
           << particle_glyph(b.particle, b.dagger) << (b.mom.empty() ? "" : " " + b.mom)
           << "\"];\n";
    }
    for (size_t i = 0; i < d.cre_boxes.size(); ++i) {
        const auto& b = d.cre_boxes[i];
        os << "  " << box_id(true, i) << " [shape=box,label=\""
           << particle_glyph(b.particle, b.dagger) << (b.mom.empty() ? "" : " " + b.mom)
           << "\"];\n";
    }
    std::map<std::string, std::string> spider_id;
    for (size_t i = 0; i < d.vertices.size(); ++i) {
        spider_id[d.vertices[i]] = idp + "s" + std::to_string(i);
        os << "  " << spider_id[d.vertices[i]] << " [shape=circle,label=\"" << d.vertices[i]
           << "\"];\n";
    }
    for (size_t i = 0; i < d.props.size(); ++i)
        os << "  " << idp << "p" << i << " [shape=diamond,label=\"" << prop_text(d.props[i])
           << "\"];\n";

    // field wires: pair the i-th annihilation box with the i-th creation box
    size_t na = d.ann_boxes.size(), nc = d.cre_boxes.size();
    for (size_t i = 0; i < std::max(na, nc); ++i) {
        std::string left = i < na ? box_id(false, i) : idp + "in";
        std::string right = i < nc ? box_id(true, i) : idp + "out";
        if (i < na) os << "  " << idp << "in -> " << box_id(false, i) << ";\n";
        os << "  " << left << " -> " << right << ";\n";
        if (i < nc) os << "  " << box_id(true, i) << " -> " << idp << "out;\n";
    }
    for (const auto& l : d.legs)
        if (l.dir == LegDir::thru)
            os << "  " << idp << "in -> " << idp << "out [label=\""
               << particle_glyph(l.particle, false) << " " << l.mom << "\"];\n";

    // control wires
    for (size_t i = 0; i < d.ann_boxes.size(); ++i)
        if (spider_id.count(d.ann_boxes[i].vertex))
            os << "  " << box_id(false, i) << " -> " << spider_id[d.ann_boxes[i].vertex]
               << " [style=dashed];\n";
    for (size_t i = 0; i < d.cre_boxes.size(); ++i)
        if (spider_id.count(d.cre_boxes[i].vertex))
            os << "  " << box_id(true, i) << " -> " << spider_id[d.cre_boxes[i].vertex]
               << " [style=dashed];\n";
    for (size_t i = 0; i < d.props.size(); ++i) {
        os << "  " << spider_id[d.props[i].a] << " -> " << idp << "p" << i
           << " [style=dashed];\n";
        os << "  " << idp << "p" << i << " -> " << spider_id[d.props[i].b]
           << " [style=dashed];\n";
    }
}
}  // namespace detail

inline std::string render_dot(const CatDiagram& d) {
    std::ostringstream os;
    os << "digraph feyncat {\n  rankdir=LR;\n";
    detail::render_dot_body(d, "", os);
    os << "}\n";
    return os.str();
}

inline std::string render_dot(const std::vector<CatDiagram>& sum) {
    std::ostringstream os;
    os << "digraph feyncat {\n  rankdir=LR;\n";
    for (size_t t = 0; t < sum.size(); ++t) {
        os << "  subgraph cluster_" << t << " {\n    label=\"term " << t << ": "
           << prefactor_text(sum[t].pre) << "\";\n";
        std::ostringstream body;
        detail::render_dot_body(sum[t], "t" + std::to_string(t) + "_", body);
        os << body.str() << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace feyncat

#endif  // FEYNCAT_DIAGRAM_HPP
