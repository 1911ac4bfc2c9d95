#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <feyncat/amplitude.hpp>
#include <feyncat/evaluate.hpp>

using namespace feyncat;
using Catch::Matchers::ContainsSubstring;

namespace {

LinComb lc(std::initializer_list<std::pair<const char*, int>> items) {
    LinComb q;
    for (const auto& [l, c] : items) q.add(l, Rat(c));
    return q;
}

AmpProp prop(std::initializer_list<std::pair<const char*, int>> items, PropMass m) {
    return {lc(items), m};
}

FeynmanGraph graph_file(const std::string& name) {
    return load_feynman_graph("graphs/" + name + ".fg");
}

AmplitudeExpr cat_amp(const FeynmanGraph& g) {
    return amplitude_from_categorical(translate(g), ins_of(g), outs_of(g));
}

std::vector<CatDiagram> channel_diagrams(int order, const std::vector<int>& in,
                                         const std::vector<int>& out) {
    std::vector<CatDiagram> ds;
    for (const auto& s : select_channel(wick_expand(smatrix_term(order)), in, out))
        ds.push_back(two_dimensionalize(s));
    return ds;
}

// Wave-function normalization of one external line, (omega_ir^nu 2 E_p)^-1/2.
double ext_norm(const FockEngine& eng, int particle, long long space_num) {
    long long psite = site_index(Coords{space_num}, eng.lp.group_size());
    return 1.0 / std::sqrt(eng.omega_ir_nu() * 2.0 * to_double(eng.energy(particle, psite)));
}

FourMom onshell_ext(const FockEngine& eng, int particle, long long space_num) {
    long long psite = site_index(Coords{space_num}, eng.lp.group_size());
    Coords k = eng.onshell_mom(particle, psite);
    FourMom p;
    for (long long n : k) p.push_back(Rat(n, eng.lp.omega_ir));
    return p;
}

}  // namespace

TEST_CASE("momentum labels order naturally and linear combinations print canonically") {
    CHECK(mom_label_less("k1", "p1"));
    CHECK(mom_label_less("p1", "p1'"));
    CHECK(mom_label_less("p1'", "p2"));
    CHECK(mom_label_less("p2", "p2'"));
    CHECK(mom_label_less("p2", "p10"));  // numeric, not lexicographic
    CHECK_FALSE(mom_label_less("p1", "k2"));

    CHECK(lincomb_text(lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})) == "p1'+p2'-p1-p2");
    CHECK(lincomb_text(lc({{"p1", 2}, {"k1", 1}})) == "k1+2*p1");
    LinComb half = lc({{"p2", -1}});
    half.add("k1", Rat(1, 2));
    CHECK(lincomb_text(half) == "1/2*k1-p2");
    CHECK(lincomb_text(LinComb{}) == "0");

    CHECK(lincomb_text(sign_normalized(lc({{"p1", -1}, {"p2'", 1}}))) == "p1-p2'");
    CHECK(lincomb_text(sign_normalized(lc({{"p1", 1}, {"p2'", -1}}))) == "p1-p2'");

    LinComb q = lc({{"p1", 1}, {"p2'", -1}});
    q = lincomb_substituted(q, "p2'", lc({{"p1", 1}, {"p2", 1}, {"p1'", -1}}));
    CHECK(lincomb_text(q) == "p1'-p2");
}

TEST_CASE("Feynman rules read the tree amplitudes off the graphs") {
    CHECK(amp_text(feynman_rules(graph_file("nn"))) ==
          "(-i*g)^2 * i/((p1-p1')^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)");
    // On the conservation shell p1-p2' = p1'-p2; the canonical form rewrites
    // the crossed transfer through the smaller labels.
    CHECK(amp_text(feynman_rules(graph_file("nn_u"))) ==
          "(-i*g)^2 * i/((p1'-p2)^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)");
    CHECK(amp_text(feynman_rules(graph_file("nnbar_s"))) ==
          "(-i*g)^2 * i/((p1+p2)^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)");
    CHECK(amp_text(feynman_rules(graph_file("meson_decay"))) ==
          "(-i*g) * delta4(p1'+p2'-p1)");
    CHECK(amp_text(feynman_rules(graph_file("wire"))) == "1");

    // The elastic channel is the sum of the two exchange graphs.
    AmplitudeExpr both = amp_plus(feynman_rules(graph_file("nn")),
                                  feynman_rules(graph_file("nn_u")));
    CHECK(amp_text(both) ==
          "(-i*g)^2 * i/((p1'-p2)^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)"
          " + "
          "(-i*g)^2 * i/((p1-p1')^2-m^2+i*eps) * delta4(p1'+p2'-p1-p2)");

    // The same expressions built by hand compare equal canonically.
    AmpTerm t;
    t.gpow = 2;
    t.props = {prop({{"p1", 1}, {"p1'", -1}}, PropMass::meson)};
    t.deltas = {lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})};
    AmpTerm u = t;
    u.props = {prop({{"p2'", 1}, {"p1", -1}}, PropMass::meson)};
    CHECK(amp_equal(both, AmplitudeExpr{{t, u}}));
    CHECK_FALSE(amp_equal(both, AmplitudeExpr{{t}}));
}

TEST_CASE("Feynman rules on the loop graphs match the textbook forms up to relabelling") {
    AmplitudeExpr nn_loop = feynman_rules(graph_file("nn_loop"));
    REQUIRE(nn_loop.terms.size() == 1);
    CHECK(nn_loop.terms[0].coeff == Rat(1));
    CHECK(nn_loop.terms[0].gpow == 4);
    CHECK(nn_loop.terms[0].loops.size() == 1);
    // Modulo conservation the two meson transfers coincide, so the canonical
    // form shows the same factor squared.
    CHECK(amp_text(nn_loop) ==
          "(-i*g)^4 * sum[k1] w_ir^-4"
          " * i/((k1)^2-M^2+i*eps)"
          " * i/((k1+p1'-p1)^2-M^2+i*eps)"
          " * i/((p1-p1')^2-m^2+i*eps)"
          " * i/((p1-p1')^2-m^2+i*eps)"
          " * delta4(p1'+p2'-p1-p2)");

    // Hand-built with the loop momentum routed the textbook way: a meson
    // propagator on each side, the bubble momenta k and k+p1-p1'.
    AmpTerm b;
    b.gpow = 4;
    b.loops = {"k"};
    b.props = {prop({{"p1", 1}, {"p1'", -1}}, PropMass::meson),
               prop({{"k", 1}}, PropMass::nucleon),
               prop({{"k", 1}, {"p1", 1}, {"p1'", -1}}, PropMass::nucleon),
               prop({{"p2'", 1}, {"p2", -1}}, PropMass::meson)};
    b.deltas = {lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})};
    CHECK(amp_equal(nn_loop, AmplitudeExpr{{b}}));

    // Shifting or reflecting the loop momentum does not change the canonical
    // form.
    AmpTerm shifted = b;
    for (auto& p : shifted.props)
        p.q = lincomb_substituted(p.q, "k", lc({{"k", 1}, {"p2'", 1}}));
    CHECK(amp_equal(nn_loop, AmplitudeExpr{{shifted}}));
    AmpTerm reflected = b;
    for (auto& p : reflected.props) p.q = lincomb_substituted(p.q, "k", lc({{"k", -1}}));
    CHECK(amp_equal(nn_loop, AmplitudeExpr{{reflected}}));

    AmplitudeExpr mm_loop = feynman_rules(graph_file("meson_meson_loop"));
    REQUIRE(mm_loop.terms.size() == 1);
    CHECK(mm_loop.terms[0].coeff == Rat(1));
    CHECK(mm_loop.terms[0].gpow == 4);
    CHECK(mm_loop.terms[0].loops.size() == 1);

    AmpTerm s;
    s.gpow = 4;
    s.loops = {"k"};
    s.props = {prop({{"k", 1}}, PropMass::nucleon),
               prop({{"k", 1}, {"p1'", 1}}, PropMass::nucleon),
               prop({{"k", 1}, {"p1'", 1}, {"p1", -1}}, PropMass::nucleon),
               prop({{"k", 1}, {"p2'", -1}}, PropMass::nucleon)};
    s.deltas = {lc({{"p1'", 1}, {"p2'", 1}, {"p1", -1}, {"p2", -1}})};
    CHECK(amp_equal(mm_loop, AmplitudeExpr{{s}}));

    // Canonicalization is idempotent.
    CHECK(amp_text(canonical_amp(nn_loop)) == amp_text(nn_loop));
    CHECK(amp_text(canonical_amp(mm_loop)) == amp_text(mm_loop));
}

TEST_CASE("the categorical pipeline agrees with the Feynman rules on every graph") {
    for (const std::string name :
         {"meson_decay", "nn", "nn_u", "nnbar_s", "nn_loop", "meson_meson_loop", "wire"}) {
        FeynmanGraph g = graph_file(name);
        INFO("graph " << name);
        CHECK(amp_text(cat_amp(g)) == amp_text(feynman_rules(g)));
    }
}

TEST_CASE("vacuum bubble: symmetry factor 1/2 and two loop sums") {
    FeynmanGraph theta;
    theta.vertices = {"a", "b"};
    theta.edges = {{"a", "b", Species::psi}, {"b", "a", Species::psi}, {"a", "b", Species::phi}};
    CHECK(graph_automorphisms(theta) == 2);
    CHECK(diagram_automorphisms(translate(theta)) == 2);

    AmplitudeExpr rules = feynman_rules(theta);
    CHECK(amp_text(rules) ==
          "(-i*g)^2/2 * sum[k1,k2] w_ir^-8"
          " * i/((k1)^2-M^2+i*eps)"
          " * i/((k1+k2)^2-M^2+i*eps)"
          " * i/((k2)^2-m^2+i*eps)");
    CHECK(amp_text(amplitude_from_categorical(translate(theta), {}, {})) == amp_text(rules));
}

TEST_CASE("channel amplitudes from the Wick expansion match the graph sums") {
    std::vector<ExtLeg> ins{{kNucleon, "p1"}, {kNucleon, "p2"}};
    std::vector<ExtLeg> outs{{kNucleon, "p1'"}, {kNucleon, "p2'"}};
    auto ds = channel_diagrams(2, {kNucleon, kNucleon}, {kNucleon, kNucleon});
    REQUIRE(ds.size() == 1);  // one symmetric resolution carries the whole channel
    AmplitudeExpr channel = amplitude_channel(ds, ins, outs);
    AmplitudeExpr graphs = amp_plus(feynman_rules(graph_file("nn")),
                                    feynman_rules(graph_file("nn_u")));
    CHECK(amp_text(channel) == amp_text(graphs));

    // Nucleon-antinucleon scattering: s-channel plus t-channel exchange.
    std::vector<ExtLeg> bins{{kNucleon, "p1"}, {kAntinucleon, "p2"}};
    std::vector<ExtLeg> bouts{{kNucleon, "p1'"}, {kAntinucleon, "p2'"}};
    auto bds = channel_diagrams(2, {kNucleon, kAntinucleon}, {kNucleon, kAntinucleon});
    REQUIRE(bds.size() == 2);
    AmplitudeExpr bchannel = amplitude_channel(bds, bins, bouts);

    FeynmanGraph nnbar_t;
    nnbar_t.vertices = {"x1", "x2"};
    nnbar_t.edges = {{"x1", "x2", Species::phi}};
    nnbar_t.legs = {{"x1", kNucleon, LegDir::in, "p1"},
                    {"x1", kNucleon, LegDir::out, "p1'"},
                    {"x2", kAntinucleon, LegDir::in, "p2"},
                    {"x2", kAntinucleon, LegDir::out, "p2'"}};
    AmplitudeExpr bgraphs = amp_plus(feynman_rules(graph_file("nnbar_s")),
                                     feynman_rules(nnbar_t));
    CHECK(amp_text(bchannel) == amp_text(bgraphs));
    CHECK_THAT(amp_text(bchannel), ContainsSubstring("i/((p1+p2)^2-m^2+i*eps)"));
    CHECK_THAT(amp_text(bchannel), ContainsSubstring("i/((p1-p1')^2-m^2+i*eps)"));

    // Meson decay at first order.
    auto dds = channel_diagrams(1, {kMeson}, {kNucleon, kAntinucleon});
    REQUIRE(dds.size() == 1);
    AmplitudeExpr dchannel = amplitude_channel(dds, {{kMeson, "p1"}},
                                               {{kNucleon, "p1'"}, {kAntinucleon, "p2'"}});
    CHECK(amp_text(dchannel) == amp_text(feynman_rules(graph_file("meson_decay"))));

    // Species mismatch between diagrams and channel legs is rejected.
    CHECK_THROWS_AS(amplitude_channel(ds, bins, bouts), std::invalid_argument);
}

TEST_CASE("identity and vacuum channels at order zero") {
    auto vac = channel_diagrams(0, {}, {});
    REQUIRE(vac.size() == 1);
    CHECK(amp_text(amplitude_channel(vac, {}, {})) == "1");

    // The order-0 term scatters nothing: each external line passes straight
    // through, leaving a conservation delta per line.
    AmplitudeExpr fwd =
        amplitude_channel(vac, {{kMeson, "p1"}}, {{kMeson, "p1'"}});
    CHECK(amp_text(fwd) == "delta4(p1'-p1)");

    AmplitudeExpr two = amplitude_channel(vac, {{kMeson, "p1"}, {kMeson, "p2"}},
                                          {{kMeson, "p1'"}, {kMeson, "p2'"}});
    CHECK(amp_text(two) ==
          "delta4(p1'-p1) * delta4(p2'-p2) + delta4(p2'-p1) * delta4(p1'-p2)");

    CHECK_THROWS_AS(amplitude_channel(vac, {{kMeson, "p1"}}, {{kNucleon, "p1'"}}),
                    std::invalid_argument);
}

TEST_CASE("conservation extraction splits the invariant amplitude from the delta") {
    auto [ia, delta] = extract_conservation(feynman_rules(graph_file("nn")));
    CHECK(amp_text(ia) == "(-i*g)^2 * i/((p1-p1')^2-m^2+i*eps)");
    CHECK(amp_text(delta) == "delta4(p1'+p2'-p1-p2)");

    // Pure numbers split off a trivial factor.
    AmpTerm num;
    num.coeff = Rat(3, 4);
    auto [ia0, delta0] = extract_conservation(AmplitudeExpr{{num}});
    CHECK(amp_text(ia0) == "3/4");
    CHECK(amp_text(delta0) == "1");

    // Two disconnected decays carry two independent deltas: printed side by
    // side, but not extractable as a single overall factor.
    FeynmanGraph twin;
    twin.vertices = {"x1", "x2"};
    twin.legs = {{"x1", kMeson, LegDir::in, "p1"},
                 {"x1", kNucleon, LegDir::out, "p1'"},
                 {"x1", kAntinucleon, LegDir::out, "p2'"},
                 {"x2", kMeson, LegDir::in, "q1"},
                 {"x2", kNucleon, LegDir::out, "q1'"},
                 {"x2", kAntinucleon, LegDir::out, "q2'"}};
    AmplitudeExpr pair = feynman_rules(twin);
    CHECK(amp_text(pair) ==
          "(-i*g)^2 * delta4(p1'+p2'-p1) * delta4(q1'+q2'-q1)");
    CHECK_THROWS_WITH(extract_conservation(pair), ContainsSubstring("disconnected"));

    // Terms with different conservation factors cannot share one delta.
    FeynmanGraph other = graph_file("meson_decay");
    for (auto& l : other.legs) l.mom = "q" + l.mom.substr(1);
    AmplitudeExpr mixed =
        amp_plus(feynman_rules(graph_file("meson_decay")), feynman_rules(other));
    CHECK_THROWS_WITH(extract_conservation(mixed), ContainsSubstring("different"));
}

TEST_CASE("numeric evaluation matches hand arithmetic on the tree formulas") {
    AmplitudeExpr both = amp_plus(feynman_rules(graph_file("nn")),
                                  feynman_rules(graph_file("nn_u")));

    MomentumAssignment a;
    a.p["p1"] = {Rat(1), Rat(1, 5)};
    a.p["p2"] = {Rat(1), Rat(-1, 5)};
    a.p["p1'"] = {Rat(1), Rat(1, 5)};
    a.p["p2'"] = {Rat(1), Rat(-1, 5)};

    EvalOptions opt;  // pole propagator, eps = 1e-6, unit masses
    Complex got = eval_amplitude(both, a, opt);
    Complex eps(0.0, opt.epsilon);
    auto pole = [&](double q2m2) { return Complex(0.0, 1.0) / (Complex(q2m2, 0.0) + eps); };
    // Zero transfer in the direct diagram, q = (0, 2/5) in the crossed one.
    Complex expected = Complex(-1.0, 0.0) * (pole(-1.0) + pole(-29.0 / 25.0));
    CHECK(std::abs(got - expected) < 1e-12);

    // Violating overall conservation kills both terms through the delta.
    MomentumAssignment off = a;
    off.p["p2'"] = {Rat(1), Rat(-3, 5)};
    CHECK(std::abs(eval_amplitude(both, off, opt)) == 0.0);

    // The trivial expression evaluates to one; missing labels are rejected.
    CHECK(std::abs(eval_amplitude(AmplitudeExpr{{AmpTerm{}}}, {}, opt) - Complex(1.0, 0.0)) == 0.0);
    MomentumAssignment missing;
    CHECK_THROWS_AS(eval_amplitude(both, missing, opt), std::invalid_argument);
    MomentumAssignment narrow = a;
    narrow.p["p1"] = {Rat(1)};
    CHECK_THROWS_AS(eval_amplitude(both, narrow, opt), std::invalid_argument);

    // At eps = 0 an exactly on-shell propagator is a pole, and says so.
    AmpTerm bare;
    bare.props = {prop({{"p1", 1}}, PropMass::meson)};
    MomentumAssignment at_pole;
    at_pole.p["p1"] = {Rat(1), Rat(0)};
    EvalOptions raw;
    raw.epsilon = 0.0;
    CHECK_THROWS_AS(eval_amplitude(AmplitudeExpr{{bare}}, at_pole, raw), std::domain_error);
}

TEST_CASE("rewriting one momentum through conservation leaves the value unchanged") {
    AmplitudeExpr both = amp_plus(feynman_rules(graph_file("nn")),
                                  feynman_rules(graph_file("nn_u")));
    AmplitudeExpr rewritten = substitute_label(
        both, "p2'", lc({{"p1", 1}, {"p2", 1}, {"p1'", -1}}));

    MomentumAssignment a;
    a.p["p1"] = {Rat(1), Rat(1, 5)};
    a.p["p2"] = {Rat(1), Rat(-1, 5)};
    a.p["p1'"] = {Rat(1), Rat(2, 5)};
    a.p["p2'"] = {Rat(1), Rat(-2, 5)};

    Complex v1 = eval_amplitude(both, a, {});
    Complex v2 = eval_amplitude(rewritten, a, {});
    CHECK(std::abs(v1) > 1e-6);
    CHECK(std::abs(v1 - v2) < 1e-12);
}

TEST_CASE("loop sums evaluate stably as i*eps shrinks") {
    AmplitudeExpr mm = feynman_rules(graph_file("meson_meson_loop"));

    MomentumAssignment a;
    a.p["p1"] = {Rat(1, 2), Rat(1, 11)};
    a.p["p2"] = {Rat(1, 30), Rat(129, 1001)};  // fixed by conservation
    a.p["p1'"] = {Rat(1, 3), Rat(1, 7)};
    a.p["p2'"] = {Rat(1, 5), Rat(1, 13)};
    a.loop_omega = 4;  // interior grid, clear of the propagator poles
    a.loop_denom = 5;
    a.dim4 = 2;

    EvalOptions o1, o2;
    o1.epsilon = 1e-10;
    o2.epsilon = 5e-11;
    Complex v1 = eval_amplitude(mm, a, o1);
    Complex v2 = eval_amplitude(mm, a, o2);
    REQUIRE(std::abs(v1) > 0.0);
    CHECK(std::abs(v1 - v2) / std::abs(v1) < 1e-6);
}

TEST_CASE("lattice model: meson decay matrix element matches the mode-sum route") {
    // A meson heavy enough to decay: mass 2 against unit nucleons.
    const FockEngine eng2{{3, 5, 1}, Rat(2), Rat(1)};
    FockBasis basis(eng2, {kNucleon, kAntinucleon, kMeson}, 2, 2);
    NumericEvaluator ev(eng2, basis);

    FeynmanGraph g = graph_file("meson_decay");
    Eigen::MatrixXcd m = ev.via_string(linearize(translate(g)));

    long long s0 = site_index(Coords{0}, eng2.lp.group_size());
    long long s1 = site_index(Coords{1}, eng2.lp.group_size());
    long long s1m = site_index(Coords{-1}, eng2.lp.group_size());
    Occupancy in{{{kMeson, s0}, 1}};
    Occupancy out{{{kNucleon, s1}, 1}, {{kAntinucleon, s1m}, 1}};
    Complex lhs = m(basis.index_of(out), basis.index_of(in));

    MomentumAssignment a;
    a.p["p1"] = onshell_ext(eng2, kMeson, 0);
    a.p["p1'"] = onshell_ext(eng2, kNucleon, 1);
    a.p["p2'"] = onshell_ext(eng2, kAntinucleon, -1);
    REQUIRE(a.p["p1"][0] == Rat(2));  // the meson sits at rest with E = 2

    EvalOptions opt;
    opt.model = make_lattice_model(eng2);
    Complex amp = eval_amplitude(feynman_rules(g), a, opt);

    double vertex = std::pow(static_cast<double>(eng2.lp.omega_ir), eng2.lp.n_space + 1);
    double legs = ext_norm(eng2, kMeson, 0) * ext_norm(eng2, kNucleon, 1) *
                  ext_norm(eng2, kAntinucleon, -1);
    Complex rhs = amp * vertex * legs;

    REQUIRE(std::abs(lhs) > 1e-3);
    CHECK(std::abs(lhs - rhs) < 1e-6);
}

TEST_CASE("lattice model: elastic scattering matches the mode-sum route") {
    const FockEngine desk{};
    FockBasis basis(desk, {kNucleon, kAntinucleon, kMeson}, 2, 2);
    NumericEvaluator ev(desk, basis);

    // (1,-1) -> (2,-2) elastic scattering: every leg has E = 1 exactly.
    OperatorString s = linearize(translate(graph_file("nn")));
    Eigen::MatrixXcd m = ev.via_string(s);
    auto site = [&](long long j) { return site_index(Coords{j}, desk.lp.group_size()); };
    Occupancy in{{{kNucleon, site(1)}, 1}, {{kNucleon, site(-1)}, 1}};
    Occupancy out{{{kNucleon, site(2)}, 1}, {{kNucleon, site(-2)}, 1}};
    Complex lhs = m(basis.index_of(out), basis.index_of(in));

    // Direct expectation from the propagator table: t- and u-channel meson
    // exchange with lattice momentum transfers (0,-1) and (0,3).
    PropagatorTable meson(desk, desk.meson_mass);
    Complex expect = -(meson.feynman_momentum(Coords{0, -1}) +
                       meson.feynman_momentum(Coords{0, 3})) *
                     Complex(25.0 / 100.0, 0.0);
    CHECK(std::abs(lhs - expect) < 1e-6);

    // Momentum-rules route: both exchange graphs, lattice propagator model.
    AmplitudeExpr both = amp_plus(feynman_rules(graph_file("nn")),
                                  feynman_rules(graph_file("nn_u")));
    MomentumAssignment a;
    a.p["p1"] = onshell_ext(desk, kNucleon, 1);
    a.p["p2"] = onshell_ext(desk, kNucleon, -1);
    a.p["p1'"] = onshell_ext(desk, kNucleon, 2);
    a.p["p2'"] = onshell_ext(desk, kNucleon, -2);
    EvalOptions opt;
    opt.model = make_lattice_model(desk);
    Complex amp = eval_amplitude(both, a, opt);

    double vertex = std::pow(static_cast<double>(desk.lp.omega_ir), desk.lp.n_space + 1);
    double legs = ext_norm(desk, kNucleon, 1) * ext_norm(desk, kNucleon, -1) *
                  ext_norm(desk, kNucleon, 2) * ext_norm(desk, kNucleon, -2);
    Complex rhs = amp * vertex * legs;

    REQUIRE(std::abs(lhs) > 1e-3);
    CHECK(std::abs(lhs - rhs) < 1e-6);

    // Off the lattice the propagator table has no value to offer.
    MomentumAssignment bad = a;
    bad.p["p1'"] = {Rat(1), Rat(1, 7)};
    bad.p["p2'"] = {Rat(1), Rat(1, 5) - Rat(1, 7) - Rat(1, 5)};
    CHECK_THROWS_AS(eval_amplitude(both, bad, opt), std::invalid_argument);
}

TEST_CASE("momenta files parse labels and rational components") {
    auto p = parse_momenta(
        "# external kinematics\n"
        "p1  1 1/5\n"
        "p1' 1 2/5   # outgoing\n"
        "\n"
        "p2 -1/2 3\n");
    REQUIRE(p.size() == 3);
    CHECK(p.at("p1") == FourMom{Rat(1), Rat(1, 5)});
    CHECK(p.at("p1'") == FourMom{Rat(1), Rat(2, 5)});
    CHECK(p.at("p2") == FourMom{Rat(-1, 2), Rat(3)});

    CHECK_THROWS_WITH(parse_momenta("p1 1\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_momenta("p1 1 1/5\np2 1 x/3\n"),
                      ContainsSubstring("line 2") && ContainsSubstring("bad rational"));
    CHECK_THROWS_WITH(parse_momenta("p1 1 0\np1 1 0\n"), ContainsSubstring("duplicate"));
    CHECK_THROWS_AS(load_momenta("graphs/no_such_file.mom"), std::runtime_error);
}
