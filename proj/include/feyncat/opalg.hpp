#ifndef FEYNCAT_OPALG_HPP
#define FEYNCAT_OPALG_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "feyncat/fock.hpp"
#include "feyncat/rational.hpp"

namespace feyncat {

// The symbolic layer reuses the numeric layer's field species (psi annihilates
// N+ / creates N-, psid the mirror image, phi the real meson field).
using Species = FieldKind;

enum class Part { full, plus, minus };

struct FieldSymbol {
    Species species;
    Part part = Part::full;
    std::string pos;  // symbolic position label, e.g. "x1"

    bool operator==(const FieldSymbol&) const = default;
};

// Exact scalar prefactor: coeff * (-i*g)^gpow * w_uv^uvpow.
struct Prefactor {
    Rat coeff{1};
    int gpow = 0;
    int uvpow = 0;

    Prefactor times(const Prefactor& o) const {
        return {coeff * o.coeff, gpow + o.gpow, uvpow + o.uvpow};
    }
    bool operator==(const Prefactor&) const = default;
};

enum class PropMass { meson, nucleon };   // printed as masses m / M
enum class PropKind { feynman, ordered };  // DF(x-y) is symmetric, D(x-y) is not

struct PropFactor {
    PropMass mass;
    PropKind kind;
    std::string a, b;  // printed as (a-b)

    bool operator==(const PropFactor&) const = default;
};

enum class Wrapper { none, time_ordered, normal };

struct OperatorString {
    Prefactor pre;
    Wrapper wrap = Wrapper::none;
    std::vector<FieldSymbol> factors;
    std::vector<std::string> bound;  // bound position labels (lattice-summed)
    std::vector<PropFactor> props;
};

// --- label utilities -------------------------------------------------------------

// Natural comparison: alphabetic prefix first, then numeric suffix, so that
// x2 < x10 and p1 < p1' (primes sort after their base).
inline std::pair<std::string, long long> label_split(const std::string& s) {
    size_t i = 0;
    while (i < s.size() && !isdigit(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
    long long num = i == j ? -1 : std::stoll(s.substr(i, j - i));
    return {s.substr(0, i) + s.substr(j), num};
}

inline bool label_less(const std::string& a, const std::string& b) {
    auto [pa, na] = label_split(a);
    auto [pb, nb] = label_split(b);
    if (pa != pb) return pa < pb;
    return na < nb;
}

// --- glyphs ------------------------------------------------------------------------

inline std::string particle_glyph(int particle, bool dagger) {
    std::string base = particle == kNucleon ? "N+" : particle == kAntinucleon ? "N-" : "M";
    return dagger ? base + "d" : base;
}

inline std::string field_glyph(Species s) {
    switch (s) {
        case Species::psi: return "psi";
        case Species::psid: return "psid";
        case Species::phi:
        default: return "phi";
    }
}

inline std::string symbol_text(const FieldSymbol& f) {
    if (f.part == Part::full) return field_glyph(f.species) + "(" + f.pos + ")";
    LadderAction act = field_part_action(f.species, f.part == Part::minus);
    return particle_glyph(act.particle, act.create) + "(" + f.pos + ")";
}

inline std::string prop_text(const PropFactor& p) {
    std::string head = p.kind == PropKind::feynman ? "DF" : "D";
    head += p.mass == PropMass::meson ? "[m]" : "[M]";
    return head + "(" + p.a + "-" + p.b + ")";
}

inline std::string prefactor_text(const Prefactor& p) {
    if (p.gpow == 0 && p.uvpow == 0) return rat_to_string(p.coeff);
    std::string s;
    long long num = p.coeff.numerator(), den = p.coeff.denominator();
    if (p.gpow > 0) {
        if (num != 1) s += std::to_string(num) + "*";
        s += "(-i*g)";
        if (p.gpow > 1) s += "^" + std::to_string(p.gpow);
        if (den != 1) s += "/" + std::to_string(den);
    } else {
        s += rat_to_string(p.coeff);
    }
    return s;
}

inline std::string canonical_text(const OperatorString& s) {
    std::vector<std::string> segments;
    std::string pre = prefactor_text(s.pre);
    if (pre != "1") segments.push_back(pre);

    if (!s.bound.empty()) {
        std::string b = "sum[";
        for (size_t i = 0; i < s.bound.size(); ++i) {
            if (i) b += ",";
            b += s.bound[i];
        }
        b += "]";
        if (s.pre.uvpow != 0) b += " w_uv^" + std::to_string(s.pre.uvpow);
        segments.push_back(b);
    }

    if (!s.factors.empty()) {
        std::string f;
        for (size_t i = 0; i < s.factors.size(); ++i) {
            if (i) f += " ";
            f += symbol_text(s.factors[i]);
        }
        if (s.wrap == Wrapper::time_ordered) f = "T{ " + f + " }";
        if (s.wrap == Wrapper::normal) f = "N{ " + f + " }";
        segments.push_back(f);
    }

    for (const auto& p : s.props) segments.push_back(prop_text(p));

    if (segments.empty()) return "1";
    std::string out;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i) out += " * ";
        out += segments[i];
    }
    return out;
}

// --- S-matrix terms -----------------------------------------------------------------

// Order-n term of the Dyson series for the scalar-Yukawa interaction
// H_int = g sum_x w_uv^-3 psid psi phi, promoted to 4-position sums:
// (-i*g)^n/n! sum_{x1..xn} w_uv^-4n T{ prod_i psid(xi) psi(xi) phi(xi) }.
inline OperatorString smatrix_term(int order) {
    if (order < 0) throw std::invalid_argument("smatrix_term: order must be >= 0");
    OperatorString s;
    s.pre = {Rat(1, factorial(order)), order, -4 * order};
    if (order == 0) return s;
    s.wrap = Wrapper::time_ordered;
    for (int v = 1; v <= order; ++v) {
        std::string x = "x" + std::to_string(v);
        s.bound.push_back(x);
        s.factors.push_back({Species::psid, Part::full, x});
        s.factors.push_back({Species::psi, Part::full, x});
        s.factors.push_back({Species::phi, Part::full, x});
    }
    return s;
}

// --- Wick expansion -----------------------------------------------------------------

// Species-legal contractions: phi-phi gives a meson propagator, psi-psid in
// either order a nucleon one; psi-psi, psid-psid and cross-species vanish.
inline std::optional<PropFactor> contract_pair(const FieldSymbol& f1, const FieldSymbol& f2) {
    PropMass mass;
    if (f1.species == Species::phi && f2.species == Species::phi)
        mass = PropMass::meson;
    else if ((f1.species == Species::psi && f2.species == Species::psid) ||
             (f1.species == Species::psid && f2.species == Species::psi))
        mass = PropMass::nucleon;
    else
        return std::nullopt;
    std::string a = f1.pos, b = f2.pos;
    if (label_less(b, a)) std::swap(a, b);  // DF is symmetric; fix argument order
    return PropFactor{mass, PropKind::feynman, a, b};
}

// All partial contraction patterns of a time-ordered product. Pairs at one and
// the same vertex position are excluded: the interaction is normal-ordered per
// vertex, so self-contractions never arise. Remainders keep the surviving
// factors in their original order under an N{...} wrapper.
inline std::vector<OperatorString> wick_expand(const OperatorString& s) {
    const size_t n = s.factors.size();
    std::vector<OperatorString> out;
    std::vector<int> partner(n, -1);

    auto emit = [&]() {
        OperatorString t;
        t.pre = s.pre;
        t.bound = s.bound;
        t.props = s.props;
        for (size_t i = 0; i < n; ++i) {
            if (partner[i] == -2 || partner[i] >= 0) continue;
            t.factors.push_back(s.factors[i]);
        }
        for (size_t i = 0; i < n; ++i)
            if (partner[i] > static_cast<int>(i))
                t.props.push_back(*contract_pair(s.factors[i], s.factors[partner[i]]));
        t.wrap = t.factors.empty() ? Wrapper::none : Wrapper::normal;
        out.push_back(std::move(t));
    };

    auto rec = [&](auto&& self, size_t i) -> void {
        while (i < n && partner[i] != -1) ++i;
        if (i == n) {
            emit();
            return;
        }
        self(self, i + 1);  // leave factor i uncontracted
        for (size_t j = i + 1; j < n; ++j) {
            if (partner[j] != -1) continue;
            if (s.factors[i].pos == s.factors[j].pos) continue;
            if (!contract_pair(s.factors[i], s.factors[j])) continue;
            partner[i] = static_cast<int>(j);
            partner[j] = static_cast<int>(i);
            self(self, i + 1);
            partner[i] = partner[j] = -1;
        }
    };
    rec(rec, 0);
    return out;
}

// --- normal ordering and part resolution ------------------------------------------

inline bool is_resolved(const OperatorString& s) {
    return std::all_of(s.factors.begin(), s.factors.end(),
                       [](const FieldSymbol& f) { return f.part != Part::full; });
}

inline bool is_creator(const FieldSymbol& f) {
    return field_part_action(f.species, f.part == Part::minus).create;
}

inline int particle_of(const FieldSymbol& f) {
    return field_part_action(f.species, f.part == Part::minus).particle;
}

inline bool is_normal_ordered(const OperatorString& s) {
    bool seen_annihilator = false;
    for (const auto& f : s.factors) {
        if (f.part == Part::full) return false;
        if (!is_creator(f))
            seen_annihilator = true;
        else if (seen_annihilator)
            return false;
    }
    return true;
}

// Rearranges a fully part-resolved string with creators first; inside each
// block the order is by particle (N+, N-, M) and then position label. No
// commutator terms are generated.
inline OperatorString normal_order(const OperatorString& s) {
    if (!is_resolved(s))
        throw std::invalid_argument("normal_order: string contains unresolved full fields");
    OperatorString t = s;
    std::stable_sort(t.factors.begin(), t.factors.end(),
                     [](const FieldSymbol& a, const FieldSymbol& b) {
                         bool ca = is_creator(a), cb = is_creator(b);
                         if (ca != cb) return ca;
                         if (particle_of(a) != particle_of(b))
                             return particle_of(a) < particle_of(b);
                         if (a.pos != b.pos) return label_less(a.pos, b.pos);
                         return false;
                     });
    t.wrap = Wrapper::none;
    return t;
}

// Expands every full field into its +/- parts: 2^k resolved strings.
inline std::vector<OperatorString> part_expand(const OperatorString& s) {
    std::vector<OperatorString> out(1, s);
    out[0].factors.clear();
    for (const auto& f : s.factors) {
        if (f.part != Part::full) {
            for (auto& t : out) t.factors.push_back(f);
            continue;
        }
        std::vector<OperatorString> next;
        next.reserve(out.size() * 2);
        for (const auto& t : out)
            for (Part p : {Part::plus, Part::minus}) {
                OperatorString u = t;
                u.factors.push_back({f.species, p, f.pos});
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

// --- canonical form -----------------------------------------------------------------

namespace detail {
inline OperatorString rename_bound(const OperatorString& s,
                                   const std::map<std::string, std::string>& ren) {
    OperatorString t = s;
    auto sub = [&](std::string& lbl) {
        auto it = ren.find(lbl);
        if (it != ren.end()) lbl = it->second;
    };
    for (auto& f : t.factors) sub(f.pos);
    for (auto& p : t.props) {
        sub(p.a);
        sub(p.b);
        if (p.kind == PropKind::feynman && label_less(p.b, p.a)) std::swap(p.a, p.b);
    }
    for (auto& b : t.bound) sub(b);
    std::sort(t.bound.begin(), t.bound.end(), label_less);
    return t;
}

inline void sort_props(OperatorString& t) {
    std::stable_sort(t.props.begin(), t.props.end(),
                     [](const PropFactor& x, const PropFactor& y) {
                         return prop_text(x) < prop_text(y);
                     });
}
}  // namespace detail

// Canonical representative: minimum rendering over all permutations of the
// bound position labels, with resolved strings normal-ordered and symmetric
// propagator arguments sorted. Bound-label sets at this scale are tiny, so
// trying every permutation is exact and cheap.
inline OperatorString canonicalize_string(const OperatorString& s) {
    std::vector<std::string> names = s.bound;
    std::sort(names.begin(), names.end(), label_less);

    OperatorString best;
    std::string best_text;
    std::vector<std::string> perm = names;
    std::sort(perm.begin(), perm.end());
    do {
        std::map<std::string, std::string> ren;
        for (size_t i = 0; i < names.size(); ++i) ren[perm[i]] = names[i];
        OperatorString t = detail::rename_bound(s, ren);
        if (is_resolved(t) && !t.factors.empty()) t = normal_order(t);
        detail::sort_props(t);
        std::string text = canonical_text(t);
        if (best_text.empty() || text < best_text) {
            best_text = text;
            best = t;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Adds up coefficients of terms that agree apart from their rational
// coefficient; drops exact zeros. Terms must already be canonical.
inline std::vector<OperatorString> merge_terms(const std::vector<OperatorString>& terms) {
    std::vector<OperatorString> out;
    std::map<std::string, size_t> slot;
    for (const auto& t : terms) {
        OperatorString probe = t;
        probe.pre.coeff = Rat(1);
        std::string key = canonical_text(probe);
        auto it = slot.find(key);
        if (it == slot.end()) {
            slot[key] = out.size();
            out.push_back(t);
        } else {
            out[it->second].pre.coeff += t.pre.coeff;
        }
    }
    std::erase_if(out, [](const OperatorString& t) { return t.pre.coeff == Rat(0); });
    return out;
}

// --- channel selection ----------------------------------------------------------------

// Keeps the part-resolutions of each Wick term whose annihilation content
// matches `in` and creation content matches `out` (as particle multisets),
// normal-orders them and merges canonically equal results.
inline std::vector<OperatorString> select_channel(const std::vector<OperatorString>& wick_terms,
                                                  std::vector<int> in, std::vector<int> out) {
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    std::vector<OperatorString> kept;
    for (const auto& term : wick_terms) {
        for (const auto& res : part_expand(term)) {
            std::vector<int> ann, cre;
            for (const auto& f : res.factors)
                (is_creator(f) ? cre : ann).push_back(particle_of(f));
            std::sort(ann.begin(), ann.end());
            std::sort(cre.begin(), cre.end());
            if (ann != in || cre != out) continue;
            kept.push_back(canonicalize_string(normal_order(res)));
        }
    }
    return merge_terms(kept);
}

}  // namespace feyncat

#endif  // FEYNCAT_OPALG_HPP
