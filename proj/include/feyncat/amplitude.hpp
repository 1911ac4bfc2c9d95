#ifndef FEYNCAT_AMPLITUDE_HPP
#define FEYNCAT_AMPLITUDE_HPP

// Momentum-space amplitudes. Feynman graphs (or their categorical diagrams)
// are turned into symbolic expressions built from propagator factors
// i/((q)^2 - mu^2 + i*eps), loop sums over the momentum lattice, and overall
// conservation deltas; the expressions can be rendered canonically, compared,
// and evaluated numerically with either the textbook pole propagator or a
// lattice propagator table.

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "feyncat/diagram.hpp"
#include "feyncat/evaluate.hpp"

namespace feyncat {

// --- Momentum labels ----------------------------------------------------------

// External labels sort by (alphabetic stem, numeric index, suffix) so that
// k1 < p1 < p1' < p2 < p2' regardless of the prime character's byte value.
inline std::tuple<std::string, long long, std::string> mom_label_key(const std::string& s) {
    size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    long long n = (i == j) ? -1 : std::stoll(s.substr(i, j - i));
    return {s.substr(0, i), n, s.substr(j)};
}

inline bool mom_label_less(const std::string& a, const std::string& b) {
    return mom_label_key(a) < mom_label_key(b);
}

struct MomLabelLess {
    bool operator()(const std::string& a, const std::string& b) const {
        return mom_label_less(a, b);
    }
};

// --- Linear combinations of momentum labels -----------------------------------

struct LinComb {
    std::map<std::string, Rat, MomLabelLess> terms;

    void add(const std::string& label, const Rat& c) {
        Rat& slot = terms[label];
        slot += c;
        if (slot == Rat(0)) terms.erase(label);
    }
    bool zero() const { return terms.empty(); }
};

inline bool operator==(const LinComb& a, const LinComb& b) { return a.terms == b.terms; }
inline bool operator<(const LinComb& a, const LinComb& b) { return a.terms < b.terms; }

inline void lincomb_add(LinComb& a, const LinComb& b, const Rat& f = Rat(1)) {
    for (const auto& [l, c] : b.terms) a.add(l, c * f);
}

inline LinComb lincomb_scaled(const LinComb& a, const Rat& f) {
    LinComb r;
    if (f != Rat(0))
        for (const auto& [l, c] : a.terms) r.terms.emplace(l, c * f);
    return r;
}

// Positive terms first, then negative ones, each group in label order:
// "p1'+p2'-p1-p2".  Unit coefficients are implicit, others print as "3*p1"
// or "1/2*k1".  The empty combination prints as "0".
inline std::string lincomb_text(const LinComb& q) {
    if (q.terms.empty()) return "0";
    std::string s;
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& [l, c] : q.terms) {
            bool neg = c < Rat(0);
            if ((pass == 0) == neg) continue;
            if (!s.empty())
                s += neg ? "-" : "+";
            else if (neg)
                s += "-";
            Rat a = neg ? -c : c;
            if (a != Rat(1)) s += rat_to_string(a) + "*";
            s += l;
        }
    return s;
}

// Flip the overall sign, if needed, so the coefficient of the first label is
// positive.  Propagator arguments enter only through (q)^2, so q and -q are
// the same factor; this picks one representative.
inline LinComb sign_normalized(const LinComb& q) {
    if (!q.terms.empty() && q.terms.begin()->second < Rat(0)) return lincomb_scaled(q, Rat(-1));
    return q;
}

inline LinComb lincomb_substituted(const LinComb& q, const std::string& label, const LinComb& value) {
    auto it = q.terms.find(label);
    if (it == q.terms.end()) return q;
    LinComb r = q;
    Rat f = it->second;
    r.terms.erase(label);
    lincomb_add(r, value, f);
    return r;
}

// --- Amplitude expressions ----------------------------------------------------

struct AmpProp {
    LinComb q;
    PropMass mass;

    bool operator==(const AmpProp&) const = default;
};

struct AmpTerm {
    Rat coeff{1};
    int gpow = 0;
    std::vector<std::string> loops;  // summed internal momentum labels
    std::vector<AmpProp> props;
    std::vector<LinComb> deltas;  // overall conservation factors delta4(...)
};

struct AmplitudeExpr {
    std::vector<AmpTerm> terms;
};

inline std::string amp_prop_text(const AmpProp& p) {
    return "i/((" + lincomb_text(p.q) + ")^2-" + (p.mass == PropMass::meson ? "m" : "M") +
           "^2+i*eps)";
}

inline std::string amp_term_text(const AmpTerm& t) {
    std::vector<std::string> segs;
    std::string pre = prefactor_text({t.coeff, t.gpow, 0});
    if (pre != "1") segs.push_back(pre);
    if (!t.loops.empty()) {
        std::string s = "sum[";
        for (size_t i = 0; i < t.loops.size(); ++i) {
            if (i) s += ",";
            s += t.loops[i];
        }
        s += "] w_ir^" + std::to_string(-4 * static_cast<int>(t.loops.size()));
        segs.push_back(s);
    }
    for (const auto& p : t.props) segs.push_back(amp_prop_text(p));
    for (const auto& d : t.deltas) segs.push_back("delta4(" + lincomb_text(d) + ")");
    if (segs.empty()) return "1";
    std::string out;
    for (size_t i = 0; i < segs.size(); ++i) {
        if (i) out += " * ";
        out += segs[i];
    }
    return out;
}

inline std::string amp_text(const AmplitudeExpr& e) {
    if (e.terms.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < e.terms.size(); ++i) {
        if (i) out += " + ";
        out += amp_term_text(e.terms[i]);
    }
    return out;
}

// --- Canonical form -----------------------------------------------------------

namespace detail {

inline std::vector<std::string> prop_texts(const std::vector<AmpProp>& props) {
    std::vector<std::string> v;
    v.reserve(props.size());
    for (const auto& p : props) v.push_back(amp_prop_text(p));
    std::sort(v.begin(), v.end());
    return v;
}

inline std::vector<AmpProp> props_substituted(const std::vector<AmpProp>& props,
                                              const std::string& label, const LinComb& value) {
    std::vector<AmpProp> r = props;
    for (auto& p : r) p.q = sign_normalized(lincomb_substituted(p.q, label, value));
    return r;
}

}  // namespace detail

// Bring a term to canonical form: drop vanished deltas, fix propagator signs,
// shift and reflect each loop momentum to the lexicographically least
// equivalent form, sort the factors, and rename loops k1, k2, ... in order of
// first appearance.  Loop shifts k -> sigma*k + c are generated from the
// propagator arguments themselves (each one can be moved to pure "k"), which
// brings every translate of the same loop integrand to one representative.
inline AmpTerm canonical_term(AmpTerm t) {
    t.deltas.erase(std::remove_if(t.deltas.begin(), t.deltas.end(),
                                  [](const LinComb& d) { return d.zero(); }),
                   t.deltas.end());
    std::sort(t.deltas.begin(), t.deltas.end());
    // Propagator arguments are only defined modulo each conservation delta:
    // eliminate the delta's greatest label, so momenta equal on the
    // conservation shell get one common representative.
    for (const LinComb& d : t.deltas) {
        auto last = std::prev(d.terms.end());
        LinComb value = d;
        value.terms.erase(last->first);
        value = lincomb_scaled(value, Rat(-1) / last->second);
        for (auto& p : t.props) p.q = lincomb_substituted(p.q, last->first, value);
    }
    for (auto& p : t.props) p.q = sign_normalized(p.q);

    for (const std::string& k : t.loops) {
        std::vector<AmpProp> best = t.props;
        std::vector<std::string> best_key = detail::prop_texts(best);
        for (const auto& p : t.props) {
            auto it = p.q.terms.find(k);
            if (it == p.q.terms.end()) continue;
            Rat s = it->second;
            if (s != Rat(1) && s != Rat(-1)) continue;
            LinComb rest = p.q;
            rest.terms.erase(k);
            for (int sigma : {1, -1}) {
                // Substituting k -> sigma*k - rest/s turns this factor into
                // i/((sigma*s*k)^2 - mu^2), i.e. pure k after sign fixing.
                LinComb value = lincomb_scaled(rest, Rat(-1) / s);
                value.add(k, Rat(sigma));
                std::vector<AmpProp> cand = detail::props_substituted(t.props, k, value);
                std::vector<std::string> key = detail::prop_texts(cand);
                if (key < best_key) {
                    best = std::move(cand);
                    best_key = std::move(key);
                }
            }
        }
        t.props = std::move(best);
    }

    std::sort(t.props.begin(), t.props.end(), [](const AmpProp& a, const AmpProp& b) {
        return amp_prop_text(a) < amp_prop_text(b);
    });

    std::set<std::string> loop_set(t.loops.begin(), t.loops.end());
    std::set<std::string> taken;
    for (const auto& p : t.props)
        for (const auto& [l, c] : p.q.terms)
            if (!loop_set.count(l)) taken.insert(l);
    for (const auto& d : t.deltas)
        for (const auto& [l, c] : d.terms) taken.insert(l);
    size_t next_loop = 0;
    auto fresh_loop = [&] {
        std::string label;
        do label = "k" + std::to_string(++next_loop);
        while (taken.count(label));
        return label;
    };
    std::map<std::string, std::string> rename;
    std::vector<std::string> new_loops;
    for (const auto& p : t.props)
        for (const auto& [l, c] : p.q.terms)
            if (loop_set.count(l) && !rename.count(l)) {
                rename[l] = new_loops.emplace_back(fresh_loop());
            }
    for (const auto& l : t.loops)  // loops absent from every factor keep order
        if (!rename.count(l)) rename[l] = new_loops.emplace_back(fresh_loop());
    if (!rename.empty()) {
        for (auto& p : t.props) {
            LinComb q;
            for (const auto& [l, c] : p.q.terms) {
                auto it = rename.find(l);
                q.terms.emplace(it == rename.end() ? l : it->second, c);
            }
            p.q = sign_normalized(q);
        }
        t.loops = std::move(new_loops);
        std::sort(t.props.begin(), t.props.end(), [](const AmpProp& a, const AmpProp& b) {
            return amp_prop_text(a) < amp_prop_text(b);
        });
    }
    return t;
}

// Canonicalize every term, merge equal ones (summing coefficients), drop
// zeros, and sort.  Two expressions are equal iff their canonical texts are.
inline AmplitudeExpr canonical_amp(const AmplitudeExpr& e) {
    std::map<std::string, AmpTerm> merged;
    for (const AmpTerm& raw : e.terms) {
        AmpTerm t = canonical_term(raw);
        AmpTerm probe = t;
        probe.coeff = Rat(1);
        std::string key = amp_term_text(probe);
        auto [it, fresh] = merged.emplace(key, t);
        if (!fresh) it->second.coeff += t.coeff;
    }
    AmplitudeExpr out;
    for (auto& [key, t] : merged)
        if (t.coeff != Rat(0)) out.terms.push_back(std::move(t));
    return out;
}

inline bool amp_equal(const AmplitudeExpr& a, const AmplitudeExpr& b) {
    return amp_text(canonical_amp(a)) == amp_text(canonical_amp(b));
}

inline AmplitudeExpr amp_plus(const AmplitudeExpr& a, const AmplitudeExpr& b) {
    AmplitudeExpr s = a;
    s.terms.insert(s.terms.end(), b.terms.begin(), b.terms.end());
    return canonical_amp(s);
}

inline AmplitudeExpr substitute_label(const AmplitudeExpr& e, const std::string& label,
                                      const LinComb& value) {
    AmplitudeExpr r = e;
    for (auto& t : r.terms) {
        for (auto& p : t.props) p.q = lincomb_substituted(p.q, label, value);
        for (auto& d : t.deltas) d = lincomb_substituted(d, label, value);
    }
    return canonical_amp(r);
}

// --- Momentum conservation ----------------------------------------------------

namespace detail {

struct Conservation {
    std::vector<LinComb> prop_q;      // momentum flowing a -> b through each line
    std::vector<std::string> loops;   // labels of the unconstrained momenta
    std::vector<LinComb> deltas;      // one conservation delta per component
};

// Solve the per-vertex conservation equations.  Each internal line i carries
// an unknown kappa_i oriented from ends[i].first to ends[i].second; vertex v
// demands (outgoing kappas) - (incoming kappas) = ext[v], where ext[v] is the
// net external momentum injected at v (outgoing legs positive).  Unknowns
// left free by Gaussian elimination become loop momenta k1, k2, ...; each
// connected component contributes one overall delta for the net external
// momentum it absorbs.
inline Conservation solve_conservation(const std::vector<std::string>& vertices,
                                       const std::vector<std::pair<std::string, std::string>>& ends,
                                       const std::map<std::string, LinComb>& ext) {
    std::map<std::string, size_t> vidx;
    for (size_t i = 0; i < vertices.size(); ++i) vidx.emplace(vertices[i], i);
    size_t nv = vertices.size(), ne = ends.size();

    std::vector<std::map<size_t, Rat>> rows(nv);
    std::vector<LinComb> rhs(nv);
    std::vector<size_t> parent(nv);
    for (size_t i = 0; i < nv; ++i) parent[i] = i;
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](size_t a, size_t b) { parent[find(a)] = find(b); };

    auto add_entry = [&](size_t r, size_t c, const Rat& v) {
        Rat& slot = rows[r][c];
        slot += v;
        if (slot == Rat(0)) rows[r].erase(c);
    };
    for (size_t i = 0; i < ne; ++i) {
        size_t a = vidx.at(ends[i].first), b = vidx.at(ends[i].second);
        add_entry(a, i, Rat(1));
        add_entry(b, i, Rat(-1));
        unite(a, b);
    }
    for (const auto& [v, q] : ext) rhs[vidx.at(v)] = q;

    std::vector<char> used_row(nv, 0);
    std::vector<std::pair<size_t, size_t>> pivots;  // (column, row)
    for (size_t col = 0; col < ne; ++col) {
        size_t r = nv;
        for (size_t i = 0; i < nv; ++i)
            if (!used_row[i] && rows[i].count(col)) {
                r = i;
                break;
            }
        if (r == nv) continue;  // free column: a loop momentum
        used_row[r] = 1;
        pivots.emplace_back(col, r);
        Rat pc = rows[r].at(col);
        for (auto& [c, v] : rows[r]) v /= pc;
        rhs[r] = lincomb_scaled(rhs[r], Rat(1) / pc);
        for (size_t i = 0; i < nv; ++i) {
            if (i == r) continue;
            auto it = rows[i].find(col);
            if (it == rows[i].end()) continue;
            Rat f = it->second;
            for (const auto& [c, v] : rows[r]) add_entry(i, c, -f * v);
            lincomb_add(rhs[i], rhs[r], -f);
        }
    }

    std::set<std::string> taken;
    for (const auto& [v, q] : ext)
        for (const auto& [l, c] : q.terms) taken.insert(l);
    size_t next_loop = 0;
    auto fresh_loop = [&] {
        std::string label;
        do label = "k" + std::to_string(++next_loop);
        while (taken.count(label));
        return label;
    };

    Conservation sol;
    sol.prop_q.resize(ne);
    std::vector<char> pivot_col(ne, 0);
    for (auto [col, r] : pivots) pivot_col[col] = 1;
    for (size_t col = 0; col < ne; ++col)
        if (!pivot_col[col]) {
            std::string label = fresh_loop();
            sol.loops.push_back(label);
            sol.prop_q[col].add(label, Rat(1));
        }
    for (auto [col, r] : pivots) {
        // After full elimination, row r reads: kappa_col + sum_c a_c kappa_c
        // = rhs[r] with every remaining c a free column.
        LinComb q = rhs[r];
        for (const auto& [c, v] : rows[r])
            if (c != col) lincomb_add(q, sol.prop_q[c], -v);
        sol.prop_q[col] = q;
    }

    std::vector<size_t> comp_order;
    std::map<size_t, LinComb> comp_sum;
    for (size_t i = 0; i < nv; ++i) {
        size_t root = find(i);
        if (comp_sum.emplace(root, LinComb{}).second) comp_order.push_back(root);
    }
    for (const auto& [v, q] : ext) lincomb_add(comp_sum[find(vidx.at(v))], q);
    for (size_t root : comp_order) {
        const LinComb& q = comp_sum[root];
        if (!q.zero()) sol.deltas.push_back(q);
    }
    return sol;
}

}  // namespace detail

// --- Symmetry factors ---------------------------------------------------------

namespace detail {

inline bool next_permutation_index(std::vector<size_t>& p) {
    return std::next_permutation(p.begin(), p.end());
}

}  // namespace detail

// Order of the automorphism group of a Feynman graph: vertex permutations
// preserving the directed nucleon lines, the undirected meson lines, and
// every external leg (including its momentum label).
inline long long graph_automorphisms(const FeynmanGraph& g) {
    size_t n = g.vertices.size();
    if (n == 0) return 1;
    std::map<std::string, size_t> vidx;
    for (size_t i = 0; i < n; ++i) vidx.emplace(g.vertices[i], i);

    auto edge_key = [&](const GraphEdge& e, const std::vector<size_t>& p) {
        size_t u = p[vidx.at(e.u)], v = p[vidx.at(e.v)];
        if (e.species == Species::phi && v < u) std::swap(u, v);
        return std::tuple<int, size_t, size_t>(static_cast<int>(e.species), u, v);
    };
    auto leg_key = [&](const GraphLeg& l, const std::vector<size_t>& p) {
        size_t v = l.vertex == "-" ? n : p[vidx.at(l.vertex)];
        return std::tuple<size_t, int, int, std::string>(v, l.particle, static_cast<int>(l.dir),
                                                         l.mom);
    };
    auto signature = [&](const std::vector<size_t>& p) {
        std::vector<std::tuple<int, size_t, size_t>> es;
        for (const auto& e : g.edges) es.push_back(edge_key(e, p));
        std::sort(es.begin(), es.end());
        std::vector<std::tuple<size_t, int, int, std::string>> ls;
        for (const auto& l : g.legs) ls.push_back(leg_key(l, p));
        std::sort(ls.begin(), ls.end());
        return std::make_pair(es, ls);
    };

    std::vector<size_t> identity(n);
    for (size_t i = 0; i < n; ++i) identity[i] = i;
    auto target = signature(identity);

    std::vector<size_t> perm = identity;
    long long count = 0;
    do {
        if (signature(perm) == target) ++count;
    } while (detail::next_permutation_index(perm));
    return count;
}

// Order of the automorphism group of a categorical diagram: vertex
// permutations preserving the coherent boxes (particle, dagger, attached
// vertex, momentum label) and the propagator wires.
inline long long diagram_automorphisms(const CatDiagram& d) {
    size_t n = d.vertices.size();
    if (n == 0) return 1;
    std::map<std::string, size_t> vidx;
    for (size_t i = 0; i < n; ++i) vidx.emplace(d.vertices[i], i);

    auto box_key = [&](const CoherentBox& b, const std::vector<size_t>& p) {
        return std::tuple<int, bool, size_t, std::string>(b.particle, b.dagger,
                                                          p[vidx.at(b.vertex)], b.mom);
    };
    auto prop_key = [&](const PropFactor& f, const std::vector<size_t>& p) {
        size_t a = p[vidx.at(f.a)], b = p[vidx.at(f.b)];
        if (f.kind == PropKind::feynman && b < a) std::swap(a, b);
        return std::tuple<int, int, size_t, size_t>(static_cast<int>(f.mass),
                                                    static_cast<int>(f.kind), a, b);
    };
    auto signature = [&](const std::vector<size_t>& p) {
        std::vector<std::tuple<int, bool, size_t, std::string>> ann, cre;
        for (const auto& b : d.ann_boxes) ann.push_back(box_key(b, p));
        for (const auto& b : d.cre_boxes) cre.push_back(box_key(b, p));
        std::sort(ann.begin(), ann.end());
        std::sort(cre.begin(), cre.end());
        std::vector<std::tuple<int, int, size_t, size_t>> ps;
        for (const auto& f : d.props) ps.push_back(prop_key(f, p));
        std::sort(ps.begin(), ps.end());
        return std::make_tuple(ann, cre, ps);
    };

    std::vector<size_t> identity(n);
    for (size_t i = 0; i < n; ++i) identity[i] = i;
    auto target = signature(identity);

    std::vector<size_t> perm = identity;
    long long count = 0;
    do {
        if (signature(perm) == target) ++count;
    } while (detail::next_permutation_index(perm));
    return count;
}

// --- Feynman rules pipeline ---------------------------------------------------

// One external line of a process: which particle enters or leaves, and the
// momentum label attached to it.
struct ExtLeg {
    int particle;
    std::string label;
};

inline std::vector<ExtLeg> ins_of(const FeynmanGraph& g) {
    std::vector<ExtLeg> v;
    for (const auto& l : g.legs)
        if (l.dir == LegDir::in || l.dir == LegDir::thru) v.push_back({l.particle, l.mom});
    return v;
}

inline std::vector<ExtLeg> outs_of(const FeynmanGraph& g) {
    std::vector<ExtLeg> v;
    for (const auto& l : g.legs)
        if (l.dir == LegDir::out || l.dir == LegDir::thru) v.push_back({l.particle, l.mom});
    return v;
}

// Read the amplitude straight off the graph: a coupling (-i*g) per vertex, a
// symmetry factor 1/|Aut|, a propagator per internal line with its momentum
// fixed by per-vertex conservation, a lattice loop sum per unconstrained
// momentum, and one delta4 per connected component.
inline AmplitudeExpr feynman_rules(const FeynmanGraph& g) {
    validate_graph(g);

    std::map<std::string, LinComb> ext;
    for (const auto& l : g.legs) {
        if (l.vertex == "-") continue;  // a through-line never reaches a vertex
        ext[l.vertex].add(l.mom, l.dir == LegDir::out ? Rat(1) : Rat(-1));
    }
    std::vector<std::pair<std::string, std::string>> ends;
    std::vector<PropMass> masses;
    for (const auto& e : g.edges) {
        std::string a = e.u, b = e.v;
        if (label_less(b, a)) std::swap(a, b);
        ends.emplace_back(a, b);
        masses.push_back(e.species == Species::phi ? PropMass::meson : PropMass::nucleon);
    }
    auto sol = detail::solve_conservation(g.vertices, ends, ext);

    AmpTerm t;
    t.coeff = Rat(1, graph_automorphisms(g));
    t.gpow = static_cast<int>(g.vertices.size());
    t.loops = sol.loops;
    for (size_t i = 0; i < ends.size(); ++i) t.props.push_back({sol.prop_q[i], masses[i]});
    t.deltas = sol.deltas;
    return canonical_amp({{t}});
}

// --- Categorical pipeline -----------------------------------------------------

namespace detail {

inline std::multiset<int> species_multiset(const std::vector<CoherentBox>& boxes) {
    std::multiset<int> s;
    for (const auto& b : boxes) s.insert(b.particle);
    return s;
}

inline std::multiset<int> species_multiset(const std::vector<ExtLeg>& legs) {
    std::multiset<int> s;
    for (const auto& l : legs) s.insert(l.particle);
    return s;
}

// Enumerate assignments of external legs to coherent boxes: particles must
// match, and a box already carrying a momentum label accepts only the leg
// with that label.
inline void for_each_assignment(const std::vector<CoherentBox>& boxes,
                                const std::vector<ExtLeg>& legs, std::vector<size_t>& pick,
                                std::vector<char>& used,
                                const std::function<void(const std::vector<size_t>&)>& fn) {
    size_t i = pick.size();
    if (i == boxes.size()) {
        fn(pick);
        return;
    }
    for (size_t j = 0; j < legs.size(); ++j) {
        if (used[j]) continue;
        if (legs[j].particle != boxes[i].particle) continue;
        if (!boxes[i].mom.empty() && boxes[i].mom != legs[j].label) continue;
        used[j] = 1;
        pick.push_back(j);
        for_each_assignment(boxes, legs, pick, used, fn);
        pick.pop_back();
        used[j] = 0;
    }
}

// Append one momentum-space term per compatible (ins, outs) assignment of the
// diagram's boxes, each scaled by `extra`.  A diagram with no boxes (the
// identity wire, an order-0 term, or a vacuum bubble) instead pairs each
// incoming line with an outgoing one of the same species and emits a
// delta4(out - in) per pair.
inline void amp_accumulate(std::vector<AmpTerm>& out, const CatDiagram& d,
                           const std::vector<ExtLeg>& ins, const std::vector<ExtLeg>& outs,
                           const Rat& extra) {
    for (const auto& p : d.props)
        if (p.kind != PropKind::feynman)
            throw std::invalid_argument(
                "amplitude: only fully time-ordered diagrams carry momentum rules; ordered pair "
                "functions have no pole propagator");

    std::vector<std::pair<std::string, std::string>> ends;
    std::vector<PropMass> masses;
    for (const auto& p : d.props) {
        ends.emplace_back(p.a, p.b);
        masses.push_back(p.mass);
    }

    auto emit = [&](const std::map<std::string, LinComb>& ext,
                    const std::vector<LinComb>& extra_deltas) {
        auto sol = detail::solve_conservation(d.vertices, ends, ext);
        AmpTerm t;
        t.coeff = d.pre.coeff * extra;
        t.gpow = d.pre.gpow;
        t.loops = sol.loops;
        for (size_t i = 0; i < ends.size(); ++i) t.props.push_back({sol.prop_q[i], masses[i]});
        t.deltas = sol.deltas;
        for (const auto& dl : extra_deltas)
            if (!dl.zero()) t.deltas.push_back(dl);
        out.push_back(std::move(t));
    };

    if (d.ann_boxes.empty() && d.cre_boxes.empty()) {
        if (species_multiset(ins) != species_multiset(outs))
            throw std::invalid_argument("amplitude: diagram boundary does not match the channel");
        std::vector<size_t> pick;
        std::vector<char> used(outs.size(), 0);
        std::function<void()> pair_up = [&] {
            size_t i = pick.size();
            if (i == ins.size()) {
                std::vector<LinComb> deltas;
                for (size_t j = 0; j < ins.size(); ++j) {
                    LinComb dl;
                    dl.add(outs[pick[j]].label, Rat(1));
                    dl.add(ins[j].label, Rat(-1));
                    deltas.push_back(dl);
                }
                emit({}, deltas);
                return;
            }
            for (size_t j = 0; j < outs.size(); ++j) {
                if (used[j] || outs[j].particle != ins[i].particle) continue;
                used[j] = 1;
                pick.push_back(j);
                pair_up();
                pick.pop_back();
                used[j] = 0;
            }
        };
        pair_up();
        return;
    }

    if (species_multiset(d.ann_boxes) != species_multiset(ins) ||
        species_multiset(d.cre_boxes) != species_multiset(outs))
        throw std::invalid_argument("amplitude: diagram boundary does not match the channel");

    size_t found = 0;
    std::vector<size_t> pick_in, pick_out;
    std::vector<char> used_in(ins.size(), 0), used_out(outs.size(), 0);
    for_each_assignment(d.ann_boxes, ins, pick_in, used_in, [&](const std::vector<size_t>& ai) {
        for_each_assignment(
            d.cre_boxes, outs, pick_out, used_out, [&](const std::vector<size_t>& ao) {
                ++found;
                std::map<std::string, LinComb> ext;
                for (size_t b = 0; b < d.ann_boxes.size(); ++b)
                    ext[d.ann_boxes[b].vertex].add(ins[ai[b]].label, Rat(-1));
                for (size_t b = 0; b < d.cre_boxes.size(); ++b)
                    ext[d.cre_boxes[b].vertex].add(outs[ao[b]].label, Rat(1));
                emit(ext, {});
            });
    });
    if (found == 0)
        throw std::invalid_argument("amplitude: no external assignment matches the box labels");
}

}  // namespace detail

// Amplitude of a single categorical diagram whose boxes carry external
// labels (e.g. the translation of a labelled Feynman graph).  Summing the
// diagram's orbit under vertex relabelling multiplies it by n!/|Aut|, which
// exactly cancels the 1/n! of the source term, so this agrees with
// feynman_rules on the corresponding graph.
inline AmplitudeExpr amplitude_from_categorical(const CatDiagram& d,
                                                const std::vector<ExtLeg>& ins,
                                                const std::vector<ExtLeg>& outs) {
    Rat orbit(factorial(static_cast<int>(d.vertices.size())), diagram_automorphisms(d));
    std::vector<AmpTerm> ts;
    detail::amp_accumulate(ts, d, ins, outs, orbit);
    return canonical_amp({ts});
}

// Amplitude of a full scattering channel: the diagrams are the channel's
// normal-ordered resolutions (which already carry each vertex labelling once),
// so the terms are summed with no extra orbit factor.
inline AmplitudeExpr amplitude_channel(const std::vector<CatDiagram>& ds,
                                       const std::vector<ExtLeg>& ins,
                                       const std::vector<ExtLeg>& outs) {
    std::vector<AmpTerm> ts;
    for (const auto& d : ds) detail::amp_accumulate(ts, d, ins, outs, Rat(1));
    return canonical_amp({ts});
}

// Split "i M * delta4(...)" into the invariant amplitude and the overall
// conservation factor.  Every term must carry the same single delta (or none
// at all, for pure numbers).
inline std::pair<AmplitudeExpr, AmplitudeExpr> extract_conservation(const AmplitudeExpr& e0) {
    AmplitudeExpr e = canonical_amp(e0);
    AmplitudeExpr one{{AmpTerm{}}};
    if (e.terms.empty()) return {e, one};
    bool any = false;
    LinComb common;
    for (const auto& t : e.terms) {
        if (t.deltas.size() > 1)
            throw std::invalid_argument(
                "extract_conservation: several independent conservation factors (disconnected "
                "process)");
        if (t.deltas.size() == 1) {
            if (any && !(t.deltas[0] == common))
                throw std::invalid_argument(
                    "extract_conservation: terms carry different conservation factors");
            common = t.deltas[0];
            any = true;
        }
    }
    if (!any) return {e, one};
    for (const auto& t : e.terms)
        if (t.deltas.empty())
            throw std::invalid_argument(
                "extract_conservation: terms carry different conservation factors");
    AmplitudeExpr stripped = e;
    for (auto& t : stripped.terms) t.deltas.clear();
    AmpTerm dt;
    dt.deltas.push_back(common);
    return {canonical_amp(stripped), AmplitudeExpr{{dt}}};
}

// --- External momentum assignments --------------------------------------------

using FourMom = std::vector<Rat>;

inline Rat parse_rat(const std::string& tok) {
    auto parse_ll = [&](const std::string& s) {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    };
    try {
        auto slash = tok.find('/');
        if (slash == std::string::npos) return Rat(parse_ll(tok));
        long long num = parse_ll(tok.substr(0, slash));
        long long den = parse_ll(tok.substr(slash + 1));
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational '" + tok + "'");
    }
}

// One momentum per line: "label r0 r1 ... rn" with rational components
// (energy first).  '#' starts a comment; blank lines are skipped.
inline std::map<std::string, FourMom> parse_momenta(const std::string& text) {
    std::map<std::string, FourMom> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        std::istringstream ls(line);
        std::string label;
        if (!(ls >> label)) continue;
        FourMom p;
        std::string tok;
        while (ls >> tok) {
            try {
                p.push_back(parse_rat(tok));
            } catch (const std::exception& ex) {
                throw std::invalid_argument("momenta line " + std::to_string(lineno) + ": " +
                                            ex.what());
            }
        }
        if (p.size() < 2)
            throw std::invalid_argument("momenta line " + std::to_string(lineno) +
                                        ": expected a label and at least two components");
        if (!out.emplace(label, std::move(p)).second)
            throw std::invalid_argument("momenta line " + std::to_string(lineno) +
                                        ": duplicate label '" + label + "'");
    }
    return out;
}

inline std::map<std::string, FourMom> load_momenta(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open momenta file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_momenta(ss.str());
}

// --- Numeric evaluation -------------------------------------------------------

using PropagatorModel = std::function<Complex(const FourMom& q, PropMass mass)>;

// Values for the labels appearing in an expression.  Loop momenta run over a
// grid: each component takes numerators -loop_omega..loop_omega over
// loop_denom, and every loop carries the measure loop_denom^-dim4.
struct MomentumAssignment {
    std::map<std::string, FourMom> p;
    long long loop_omega = 7;
    long long loop_denom = 5;
    int dim4 = 2;
};

struct EvalOptions {
    double epsilon = 1e-6;
    Rat meson_mass{1};
    Rat nucleon_mass{1};
    PropagatorModel model;  // empty: pole propagator i/(q^2 - mu^2 + i*eps)
};

inline Rat minkowski_square(const FourMom& q) {
    if (q.empty()) throw std::invalid_argument("eval: empty momentum");
    Rat s = q[0] * q[0];
    for (size_t i = 1; i < q.size(); ++i) s -= q[i] * q[i];
    return s;
}

inline Complex eval_amplitude(const AmplitudeExpr& e, const MomentumAssignment& a,
                              const EvalOptions& opt = {}) {
    PropagatorModel model = opt.model;
    if (!model)
        model = [&opt](const FourMom& q, PropMass mass) {
            const Rat& mu = mass == PropMass::meson ? opt.meson_mass : opt.nucleon_mass;
            Rat den_rat = minkowski_square(q) - mu * mu;
            Complex den(to_double(den_rat), opt.epsilon);
            if (std::abs(den) < 1e-12)
                throw std::domain_error("eval: propagator evaluated at its pole (q^2 = mass^2)");
            return Complex(0.0, 1.0) / den;
        };

    Complex total(0.0, 0.0);
    for (const AmpTerm& t : e.terms) {
        std::map<std::string, FourMom> loop_val;
        auto lookup = [&](const std::string& l) -> const FourMom& {
            auto it = loop_val.find(l);
            if (it != loop_val.end()) return it->second;
            auto ip = a.p.find(l);
            if (ip == a.p.end())
                throw std::invalid_argument("eval: no momentum assigned to label '" + l + "'");
            return ip->second;
        };
        auto eval_comb = [&](const LinComb& q) {
            FourMom r(static_cast<size_t>(a.dim4), Rat(0));
            for (const auto& [l, c] : q.terms) {
                const FourMom& p = lookup(l);
                if (p.size() != r.size())
                    throw std::invalid_argument("eval: momentum '" + l + "' has " +
                                                std::to_string(p.size()) + " components, expected " +
                                                std::to_string(r.size()));
                for (size_t i = 0; i < r.size(); ++i) r[i] += c * p[i];
            }
            return r;
        };
        auto point_value = [&]() {
            for (const auto& d : t.deltas) {
                FourMom q = eval_comb(d);
                for (const Rat& c : q)
                    if (c != Rat(0)) return Complex(0.0, 0.0);
            }
            Complex v(1.0, 0.0);
            for (const auto& p : t.props) v *= model(eval_comb(p.q), p.mass);
            return v;
        };

        double measure = 1.0;
        for (size_t i = 0; i < t.loops.size(); ++i)
            for (int c = 0; c < a.dim4; ++c) measure /= static_cast<double>(a.loop_denom);

        Complex sum(0.0, 0.0);
        std::function<void(size_t)> iterate = [&](size_t li) {
            if (li == t.loops.size()) {
                sum += point_value();
                return;
            }
            FourMom& slot = loop_val[t.loops[li]];
            slot.assign(static_cast<size_t>(a.dim4), Rat(0));
            std::vector<long long> nums(static_cast<size_t>(a.dim4), -a.loop_omega);
            for (;;) {
                for (int c = 0; c < a.dim4; ++c) slot[c] = Rat(nums[c], a.loop_denom);
                iterate(li + 1);
                int c = 0;
                while (c < a.dim4 && ++nums[c] > a.loop_omega) nums[c++] = -a.loop_omega;
                if (c == a.dim4) break;
            }
            loop_val.erase(t.loops[li]);
        };
        iterate(0);
        total += prefactor_value({t.coeff, t.gpow, 0}) * measure * sum;
    }
    return total;
}

// Propagator model backed by lattice tables: momenta must lie on the 1/w_ir
// lattice, and the value is the momentum-space time-ordered pair function.
inline PropagatorModel make_lattice_model(const FockEngine& eng) {
    auto meson = std::make_shared<PropagatorTable>(eng, eng.meson_mass);
    auto nucleon = std::make_shared<PropagatorTable>(eng, eng.nucleon_mass);
    long long den = eng.lp.omega_ir;
    return [meson, nucleon, den](const FourMom& q, PropMass mass) {
        Coords nums(q.size());
        for (size_t i = 0; i < q.size(); ++i) {
            Rat n = q[i] * Rat(den);
            if (n.denominator() != 1)
                throw std::invalid_argument("lattice propagator: momentum off the 1/w_ir lattice");
            nums[i] = n.numerator();
        }
        return (mass == PropMass::meson ? *meson : *nucleon).feynman_momentum(nums);
    };
}

}  // namespace feyncat

#endif  // FEYNCAT_AMPLITUDE_HPP
