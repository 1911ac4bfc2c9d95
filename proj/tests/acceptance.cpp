// Acceptance sweep: one line per criterion, exit code = number of failures.
//
// Everything runs at the default configuration: one space dimension,
// omega_uv = 3, omega_ir = 5, unit masses, Fock truncation tau = 2, nmax = 2.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "feyncat/verify.hpp"

using namespace feyncat;
using namespace feyncat::detail;

namespace {

int failures = 0;

void report(int idx, const std::string& label, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << idx << ": " << label;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++failures;
}

std::string sci(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << x;
    return os.str();
}

std::string residuals(std::initializer_list<PropertyResult> rs) {
    std::string s;
    for (const auto& r : rs) {
        if (!s.empty()) s += ", ";
        s += r.name + " " + sci(r.residual) + " <= " + sci(r.tolerance);
    }
    return s;
}

bool all_pass(std::initializer_list<PropertyResult> rs) {
    for (const auto& r : rs)
        if (!r.pass) return false;
    return true;
}

FeynmanGraph graph(const std::string& name) {
    return parse_feynman_graph(builtin_graph(name));
}

AmplitudeExpr cat_amp(const FeynmanGraph& g) {
    return amplitude_from_categorical(translate(g), ins_of(g), outs_of(g));
}

LinComb lc(std::initializer_list<std::pair<const char*, int>> items) {
    LinComb q;
    for (const auto& [label, c] : items) q.add(label, Rat(c));
    return q;
}

AmpProp prop(const LinComb& q, PropMass mass) { return {q, mass}; }

// A time-ordered product of n real fields at distinct positions.
OperatorString phi_string(int n) {
    OperatorString s;
    s.wrap = Wrapper::time_ordered;
    for (int i = 1; i <= n; ++i) {
        std::string x = "x" + std::to_string(i);
        s.factors.push_back({Species::phi, Part::full, x});
        s.bound.push_back(x);
    }
    return s;
}

std::uint64_t double_factorial(int n) {  // n odd: n!! = n(n-2)...1
    std::uint64_t r = 1;
    for (int k = n; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
    return r;
}

void criterion_1() {
    const std::string pinned =
        "(-i*g)^2 * i/((p1'-p2)^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)"
        " + "
        "(-i*g)^2 * i/((p1-p1')^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)";

    AmplitudeExpr rules = amp_plus(feynman_rules(graph("nn")), feynman_rules(graph("nn_u")));

    std::vector<int> nn_pair = {kNucleon, kNucleon};
    std::vector<CatDiagram> ds;
    for (const auto& t : select_channel(wick_expand(smatrix_term(2)), nn_pair, nn_pair))
        ds.push_back(two_dimensionalize(t, Weighting::multinomial));
    AmplitudeExpr cat =
        amplitude_channel(ds, channel_legs(nn_pair, false), channel_legs(nn_pair, true));

    bool ok = amp_text(rules) == pinned && amp_text(cat) == pinned;
    report(1, "elastic NN amplitude: Feynman rules and the categorical channel give the pinned two-term display",
           ok, ok ? "exact string equality" : "rules: " + amp_text(rules) + " | categorical: " + amp_text(cat));
}

void criterion_2() {
    bool ok = true;
    std::string why;

    const std::string pinned_s =
        "(-i*g)^2 * i/((p1+p2)^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)";
    FeynmanGraph gs = graph("nnbar_s");
    if (amp_text(feynman_rules(gs)) != pinned_s || amp_text(cat_amp(gs)) != pinned_s) {
        ok = false;
        why += "s-channel mismatch; ";
    }

    // Nucleon-loop correction to NN scattering, in its textbook routing.
    FeynmanGraph gl = graph("nn_loop");
    AmplitudeExpr nn_loop = feynman_rules(gl);
    AmpTerm b;
    b.gpow = 4;
    b.loops = {"k"};
    b.props = {prop(lc({{"p1", 1}, {"p1'", -1}}), PropMass::meson),
               prop(lc({{"k", 1}}), PropMass::nucleon),
               prop(lc({{"k", 1}, {"p1", 1}, {"p1'", -1}}), PropMass::nucleon),
               prop(lc({{"p2'", 1}, {"p2", -1}}), PropMass::meson)};
    b.deltas = {lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})};
    if (!amp_equal(nn_loop, AmplitudeExpr{{b}}) || !amp_equal(nn_loop, cat_amp(gl))) {
        ok = false;
        why += "NN loop mismatch; ";
    }

    // Meson-meson scattering through a square nucleon loop.
    FeynmanGraph gm = graph("mm_loop");
    AmplitudeExpr mm_loop = feynman_rules(gm);
    AmpTerm s;
    s.gpow = 4;
    s.loops = {"k"};
    s.props = {prop(lc({{"k", 1}}), PropMass::nucleon),
               prop(lc({{"k", 1}, {"p1'", 1}}), PropMass::nucleon),
               prop(lc({{"k", 1}, {"p1'", 1}, {"p1", -1}}), PropMass::nucleon),
               prop(lc({{"k", 1}, {"p2'", -1}}), PropMass::nucleon)};
    s.deltas = {lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})};
    if (!amp_equal(mm_loop, AmplitudeExpr{{s}}) || !amp_equal(mm_loop, cat_amp(gm))) {
        ok = false;
        why += "meson-meson loop mismatch; ";
    }

    report(2, "annihilation and fourth-order loop amplitudes match their displays up to loop relabeling",
           ok, ok ? "s-channel exact; loops via canonical relabeling" : why);
}

void criterion_3() {
    bool ok = wick_expand(phi_string(4)).size() == 10;
    std::string detail = "4 fields -> " + std::to_string(wick_expand(phi_string(4)).size()) + " terms";
    for (int k = 1; k <= 5; ++k) {
        std::uint64_t full = 0;
        for (const auto& t : wick_expand(phi_string(2 * k)))
            if (t.factors.empty()) ++full;
        std::uint64_t want = double_factorial(2 * k - 1);
        if (full != want) ok = false;
        detail += ", k=" + std::to_string(k) + ": " + std::to_string(full) + "/" +
                  std::to_string(want);
    }
    report(3, "Wick expansion counts: 10 terms for four real fields, (2k-1)!! full contractions for k <= 5",
           ok, detail);
}

int main_checks(const RunConfig& cfg) {
    {
        PropertyResult a = check_ladder_commutator(cfg);
        PropertyResult b = check_wave_inners(cfg);
        PropertyResult c = check_rel_normalization(cfg);
        report(4, "ladder commutator, wave inner products and relativistic normalization on the truncated Fock space",
               all_pass({a, b, c}), residuals({a, b, c}));
    }
    {
        PropertyResult a = check_feynman_even(cfg);
        PropertyResult b = check_field_commutator(cfg);
        report(5, "the Feynman propagator is even and the field commutator reproduces the pair function",
               all_pass({a, b}), residuals({a, b}));
    }
    {
        PropertyResult a = check_split_adjoint(cfg);
        PropertyResult b = check_multinomial_sliding(cfg);
        PropertyResult lit = check_literal_isometry(cfg);
        report(6, "split/merge adjointness and the multinomial sliding identity; literal factors reported, not asserted",
               all_pass({a, b}), residuals({a, b}) + "; " + lit.note);
    }
    {
        PropertyResult a = check_round_trip(cfg);
        PropertyResult b = check_evaluation_agreement(cfg);
        report(7, "operator-string round trip through diagrams and agreement of both numeric evaluation routes",
               all_pass({a, b}), residuals({a, b}));
    }
    {
        PropertyResult a = check_composition(cfg);
        report(8, "sequential composition of NN scattering with itself: seven terms and the matrix-product identity",
               a.pass, a.name + " " + sci(a.residual) + " <= " + sci(a.tolerance) + "; " + a.note);
    }
    {
        PropertyResult a = check_translations(cfg);
        report(9, "graph-to-diagram translations match the pinned canonical strings",
               a.pass, a.note);
    }
    return 0;
}

}  // namespace

int main() {
    RunConfig cfg;
    criterion_1();
    criterion_2();
    criterion_3();
    main_checks(cfg);
    std::cout << (failures == 0 ? "all criteria hold\n"
                                : std::to_string(failures) + " criterion(s) failed\n");
    return failures;
}
