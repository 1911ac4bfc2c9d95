#ifndef FEYNCAT_VERIFY_HPP
#define FEYNCAT_VERIFY_HPP

// Built-in self-checks: every structural property of the engine is verified
// at a given run configuration and reported with its worst residual.  One
// check (the literal splitter's counting factor) measures a deviation that
// is present by design; it is reported as WAIVED and never asserted.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "feyncat/config.hpp"
#include "feyncat/splitmerge.hpp"

namespace feyncat {

struct PropertyResult {
    std::string name;
    bool pass = false;
    bool waived = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string note;
};

namespace detail {

inline PropertyResult property(std::string name, double residual, double tol,
                               std::string note = "") {
    PropertyResult r;
    r.name = std::move(name);
    r.residual = residual;
    r.tolerance = tol;
    r.pass = residual <= tol;
    r.note = std::move(note);
    return r;
}

inline double fock_diff_norm(FockState a, const FockState& b) {
    for (const auto& [occ, c] : b) add_term(a, occ, -c);
    double r = 0.0;
    for (const auto& [occ, c] : a) r = std::max(r, std::abs(c));
    return r;
}

inline double multi_diff_norm(MultiState a, const MultiState& b) {
    for (const auto& [tup, c] : b) add_term(a, tup, -c);
    double r = 0.0;
    for (const auto& [tup, c] : a) r = std::max(r, std::abs(c));
    return r;
}

// Graph sources are embedded so that verification does not depend on the
// working directory.
inline const char* builtin_graph(const std::string& name) {
    static const std::map<std::string, const char*> graphs = {
        {"decay",
         "vertices: x1\nedges:\nlegs:\n"
         "  x1 M  in  p1\n  x1 N+ out p1'\n  x1 N- out p2'\n"},
        {"nn",
         "vertices: x1 x2\nedges:\n  x1 x2 phi\nlegs:\n"
         "  x1 N+ in  p1\n  x2 N+ in  p2\n  x1 N+ out p1'\n  x2 N+ out p2'\n"},
        {"nn_u",
         "vertices: x1 x2\nedges:\n  x1 x2 phi\nlegs:\n"
         "  x1 N+ in  p1\n  x2 N+ in  p2\n  x2 N+ out p1'\n  x1 N+ out p2'\n"},
        {"nnbar_s",
         "vertices: x1 x2\nedges:\n  x1 x2 phi\nlegs:\n"
         "  x1 N+ in  p1\n  x1 N- in  p2\n  x2 N+ out p1'\n  x2 N- out p2'\n"},
        {"nn_loop",
         "vertices: x1 x2 x3 x4\nedges:\n"
         "  x1 x3 phi\n  x2 x4 phi\n  x3 x4 psi\n  x4 x3 psi\nlegs:\n"
         "  x1 N+ in  p1\n  x1 N+ out p1'\n  x2 N+ in  p2\n  x2 N+ out p2'\n"},
        {"mm_loop",
         "vertices: x1 x2 x3 x4\nedges:\n"
         "  x1 x3 psi\n  x3 x4 psi\n  x4 x2 psi\n  x2 x1 psi\nlegs:\n"
         "  x1 M in  p1\n  x2 M in  p2\n  x3 M out p1'\n  x4 M out p2'\n"},
        {"wire", "vertices:\nedges:\nlegs:\n  - M thru p1\n"},
    };
    return graphs.at(name);
}

// [a_p, a^dag_q] = omega_ir^nu delta_pq, checked on the columns whose exact
// image stays inside the capped basis (one extra quantum fits both budgets).
inline PropertyResult check_ladder_commutator(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    FockBasis basis(eng, {kMeson}, cfg.tau, cfg.nmax);
    const long long S = eng.modes();
    const long long dim = basis.size();
    const double w = eng.omega_ir_nu();

    std::vector<int> total(dim, 0);
    for (long long j = 0; j < dim; ++j)
        for (const auto& [mode, n] : basis.state(j)) total[j] += n;

    std::vector<Eigen::MatrixXcd> A(S), C(S);
    for (long long ps = 0; ps < S; ++ps) {
        A[ps] = basis.matrix_of(
            [&](const FockState& s) { return apply_annihilate(eng, s, kMeson, ps); });
        C[ps] = basis.matrix_of(
            [&](const FockState& s) { return apply_create(eng, s, kMeson, ps); });
    }

    double worst = 0.0;
    long long checked = 0;
    for (long long q = 0; q < S; ++q) {
        std::vector<long long> cols;
        for (long long j = 0; j < dim; ++j) {
            auto it = basis.state(j).find({kMeson, q});
            int nq = it == basis.state(j).end() ? 0 : it->second;
            if (total[j] <= cfg.tau - 1 && nq <= cfg.nmax - 1) cols.push_back(j);
        }
        checked += static_cast<long long>(cols.size());
        for (long long p = 0; p < S; ++p) {
            Eigen::MatrixXcd M = A[p] * C[q] - C[q] * A[p];
            for (long long j : cols)
                for (long long i = 0; i < dim; ++i) {
                    double expect = (p == q && i == j) ? w : 0.0;
                    worst = std::max(worst, std::abs(M(i, j) - Complex(expect, 0.0)));
                }
        }
    }
    std::string note = checked == 0
                           ? "no truncation-safe states at this cap; vacuously true"
                           : std::to_string(S * S) + " mode pairs on a dim-" +
                                 std::to_string(dim) + " meson basis";
    return property("ladder-commutator", worst, 1e-9, note);
}

// <delta_x|delta_y> = w_uv^n delta_xy, <chi_p|chi_q> = w_ir^n delta_pq,
// <delta_x|chi_p> = e^{i 2 pi p.x}.
inline PropertyResult check_wave_inners(const RunConfig& cfg) {
    WaveSpace ws(cfg.lattice);
    const long long dim = ws.size();
    const double wuv = static_cast<double>(ll_pow(cfg.lattice.omega_uv, cfg.lattice.n_space));
    const double wir = static_cast<double>(ll_pow(cfg.lattice.omega_ir, cfg.lattice.n_space));

    double worst = 0.0;
    for (long long i = 0; i < dim; ++i) {
        Eigen::VectorXcd di = ws.delta_x(ws.coords(i));
        Eigen::VectorXcd ci = ws.chi_p(ws.coords(i));
        for (long long j = 0; j < dim; ++j) {
            Coords cj = ws.coords(j);
            double kron = i == j ? 1.0 : 0.0;
            worst = std::max(worst,
                             std::abs(ws.inner(di, ws.delta_x(cj)) - Complex(wuv * kron, 0.0)));
            worst = std::max(worst,
                             std::abs(ws.inner(ci, ws.chi_p(cj)) - Complex(wir * kron, 0.0)));
            worst = std::max(worst, std::abs(ws.inner(di, ws.chi_p(cj)) -
                                             pairing_phase(cfg.lattice, cj, ws.coords(i))));
        }
    }
    return property("wave-inner-products", worst, 1e-12,
                    std::to_string(dim) + " positions and momenta");
}

// Relativistic one-particle states: <p|q> = w_ir^nu 2 E_p delta_pq, and the
// n-quanta norm picks up the n! together with the n-th power of that factor.
inline PropertyResult check_rel_normalization(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    const double w = eng.omega_ir_nu();
    double worst = 0.0;
    for (int pt : {kMeson, kNucleon}) {
        for (long long ps = 0; ps < eng.modes(); ++ps) {
            FockState s = particle_state(eng, {{{pt, ps}, 1}});
            double e2 = w * 2.0 * to_double(eng.energy(pt, ps));
            worst = std::max(worst, std::abs(fock_inner(s, s) - Complex(e2, 0.0)));
        }
        FockState a = particle_state(eng, {{{pt, 0}, 1}});
        FockState b = particle_state(eng, {{{pt, eng.modes() - 1}, 1}});
        if (eng.modes() > 1) worst = std::max(worst, std::abs(fock_inner(a, b)));
        FockState two = particle_state(eng, {{{pt, 0}, 2}});
        double e0 = w * 2.0 * to_double(eng.energy(pt, 0));
        worst = std::max(worst, std::abs(fock_inner(two, two) - Complex(2.0 * e0 * e0, 0.0)));
    }
    return property("relativistic-normalization", worst, 1e-9);
}

// The time-ordered two-point function is even in its space-time argument.
inline PropertyResult check_feynman_even(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    const long long N = eng.lp.group_size();
    const int d4 = eng.lp.n_space + 1;
    const long long n4 = num_sites(N, d4);
    double worst = 0.0;
    for (const Rat& mass : {eng.meson_mass, eng.nucleon_mass}) {
        PropagatorTable tab(eng, mass);
        for (long long iz = 0; iz < n4; ++iz) {
            Coords z = site_coords(iz, N, d4);
            Coords mz = z;
            for (auto& v : mz) v = -v;
            worst = std::max(worst, std::abs(tab.feynman(z) - tab.feynman(mz)));
        }
    }
    return property("feynman-even", worst, 1e-12);
}

// [phi^+(x), phi^-(0)] acts as multiplication by the pair function D(x).
inline PropertyResult check_field_commutator(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    PropagatorTable tab(eng, eng.meson_mass);
    const long long N = eng.lp.group_size();
    const int d4 = eng.lp.n_space + 1;
    const long long n4 = num_sites(N, d4);
    const long long S = eng.modes();
    const Coords zero(d4, 0);

    long long s0 = 0, s1 = (S > 1 ? 3 % S : 0), s2 = 5 % S;
    std::vector<FockState> samples = {
        {{{}, Complex(1.0, 0.0)}},
        {{{{{kMeson, s0}, 1}}, Complex(1.0, 0.0)}},
        {{{{{kMeson, s0}, 1}, {{kMeson, s1}, 1}}, Complex(0.5, -0.25)}},
        {{{{{kNucleon, s2}, 1}}, Complex(0.0, 1.0)}},
    };

    double worst = 0.0;
    for (long long ix = 0; ix < n4; ++ix) {
        Coords x = site_coords(ix, N, d4);
        Complex dx = tab.pair(x);
        for (const FockState& psi : samples) {
            FockState ab = apply_field_part(
                eng, apply_field_part(eng, psi, FieldKind::phi, true, zero), FieldKind::phi,
                false, x);
            FockState ba = apply_field_part(
                eng, apply_field_part(eng, psi, FieldKind::phi, false, x), FieldKind::phi, true,
                zero);
            FockState expect;
            for (const auto& [occ, c] : psi) expect[occ] = c * dx;
            for (const auto& [occ, c] : ba) add_term(ab, occ, -c);
            worst = std::max(worst, fock_diff_norm(ab, expect));
        }
    }
    return property("field-commutator", worst, 1e-9,
                    std::to_string(n4) + " positions, " + std::to_string(samples.size()) +
                        " states");
}

inline FockState verify_sample_fock(const FockEngine& eng) {
    ModeKey mp{kMeson, 1 % eng.modes()}, mq{kMeson, (eng.modes() - 1) % eng.modes()};
    FockState psi;
    psi[{}] = {0.25, -0.5};
    psi[{{mp, 1}}] = {0.5, 0.125};
    psi[{{mq, 1}}] = {1.0, -0.25};
    psi[{{mp, 2}, {mq, 1}}] = {-0.375, 0.75};
    return psi;
}

// <split psi, phi> = <psi, merge phi> for both weightings.
inline PropertyResult check_split_adjoint(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    ModeKey mp{kMeson, 1 % eng.modes()}, mq{kMeson, (eng.modes() - 1) % eng.modes()};
    FockState psi = verify_sample_fock(eng);

    double worst = 0.0;
    for (int k : {2, 3}) {
        MultiState phi;
        MultiOccupancy t1(k), t2(k), t3(k);
        t1[0] = {{mp, 1}};
        t2[k - 1] = {{mp, 1}, {mq, 1}};
        t3[0] = {{mq, 1}};
        t3[k - 1] = {{mp, 2}};
        add_term(phi, MultiOccupancy(k), {0.125, 0.25});
        add_term(phi, t1, {0.5, 0.5});
        add_term(phi, t2, {-0.25, 1.0});
        add_term(phi, t3, {0.75, -0.125});
        for (Weighting w : {Weighting::literal, Weighting::multinomial}) {
            Complex lhs = multi_inner(split(psi, k, w), phi);
            Complex rhs = fock_inner(psi, merge(phi, w));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return property("split-merge-adjoint", worst, 1e-12, "k = 2, 3, both weightings");
}

// Ladder factors slide through the multinomial splitter: annihilating on any
// one tensor slot of the split equals splitting the annihilated state.
inline PropertyResult check_multinomial_sliding(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    const long long S = eng.modes();
    std::vector<ModeKey> modes = {{kMeson, 0}, {kMeson, 1 % S}, {kMeson, 2 % S}};

    FockState psi;
    int i = 0;
    for (int n0 = 0; n0 <= 3; ++n0)
        for (int n1 = 0; n0 + n1 <= 3; ++n1)
            for (int n2 = 0; n0 + n1 + n2 <= 3; ++n2) {
                Occupancy occ;
                if (n0) occ[modes[0]] = n0;
                if (n1) occ[modes[1]] = n1;
                if (n2) occ[modes[2]] = n2;
                add_term(psi, occ, Complex(1.0 / (1 + i), 0.5 - 0.0625 * i));
                ++i;
            }

    double worst = 0.0;
    int cases = 0;
    for (int k : {1, 2, 3})
        for (int j = 0; j < k; ++j)
            for (const ModeKey& m : {modes[0], modes[1]}) {
                MultiState lhs = apply_annihilate_factor(
                    eng, split(psi, k, Weighting::multinomial), j, m.first, m.second);
                MultiState rhs = split(apply_annihilate(eng, psi, m.first, m.second), k,
                                       Weighting::multinomial);
                worst = std::max(worst, multi_diff_norm(lhs, rhs));
                ++cases;
            }
    return property("multinomial-sliding", worst, 1e-12,
                    std::to_string(i) + " occupancies of up to 3 quanta, " +
                        std::to_string(cases) + " slot/mode cases");
}

// merge after split with the literal weighting rescales |beta_n> by the
// number of split tuples -- a state-dependent factor, so the literal splitter
// is not an isometry.  The factor itself is measured and reported; the check
// is waived by design and never counts toward failure.
inline PropertyResult check_literal_isometry(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    ModeKey mp{kMeson, 1 % eng.modes()}, mq{kMeson, (eng.modes() - 1) % eng.modes()};
    Occupancy two = {{mp, 2}};
    Occupancy mix = {{mp, 2}, {mq, 1}};

    double worst = 0.0;
    std::ostringstream measured;
    measured << "measured factors";
    for (const Occupancy& n : {two, mix})
        for (int k : {2, 3}) {
            FockState in = {{n, Complex(1.0, 0.0)}};
            FockState out = merge(split(in, k, Weighting::literal), Weighting::literal);
            long long count = split_count(n, k);
            worst = std::max(worst,
                             std::abs(out.at(n) - Complex(static_cast<double>(count), 0.0)));
            measured << " " << count;
        }
    PropertyResult r = property("literal-isometry", worst, 1e-12,
                                measured.str() + " (number of split tuples); not an isometry, "
                                                 "reported only");
    r.waived = true;
    return r;
}

// Flattening the 2-D presentation of a normal-ordered resolution returns the
// resolution itself, for every Wick resolution up to second order and for
// the whole built-in graph corpus.
inline PropertyResult check_round_trip(const RunConfig& cfg) {
    Weighting w = cfg.weighting_enum();
    int bad = 0, checked = 0;
    for (int order = 0; order <= 2; ++order)
        for (const auto& term : wick_expand(smatrix_term(order)))
            for (const auto& res : part_expand(term)) {
                OperatorString ns = res.wrap == Wrapper::normal ? normal_order(res) : res;
                if (canonical_text(linearize(two_dimensionalize(ns, w))) != canonical_text(ns))
                    ++bad;
                ++checked;
            }
    for (const char* name : {"decay", "nn", "nn_u", "nnbar_s", "nn_loop", "mm_loop", "wire"}) {
        OperatorString s = linearize(translate(parse_feynman_graph(builtin_graph(name)), w));
        if (canonical_text(linearize(two_dimensionalize(s, w))) != canonical_text(s)) ++bad;
        ++checked;
    }
    return property("round-trip", static_cast<double>(bad), 0.0,
                    std::to_string(checked) + " strings round-tripped");
}

// The mode-sum and sequential-box evaluations agree matrix-for-matrix on
// every Wick resolution up to second order.
inline PropertyResult check_evaluation_agreement(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    FockBasis basis(eng, {kNucleon, kAntinucleon, kMeson}, cfg.tau, cfg.nmax);
    NumericEvaluator ev(eng, basis);
    Weighting w = cfg.weighting_enum();

    double worst = 0.0;
    int compared = 0;
    for (int order = 0; order <= 2; ++order)
        for (const auto& term : wick_expand(smatrix_term(order)))
            for (const auto& res : part_expand(term)) {
                OperatorString ns = res.wrap == Wrapper::normal ? normal_order(res) : res;
                Eigen::MatrixXcd m1 = ev.via_string(ns);
                Eigen::MatrixXcd m2 = ev.via_boxes(two_dimensionalize(ns, w));
                worst = std::max(worst, (m1 - m2).cwiseAbs().maxCoeff());
                ++compared;
            }
    return property("evaluation-agreement", worst, 1e-8,
                    std::to_string(compared) + " resolutions on a dim-" +
                        std::to_string(basis.size()) + " basis");
}

// Sequential composition: the 7-term normal-ordered sum for elastic
// scattering after elastic scattering, and its numeric identity with the
// matrix product of the factors.
inline PropertyResult check_composition(const RunConfig& cfg) {
    FockEngine eng = cfg.engine();
    CatDiagram d = translate(parse_feynman_graph(builtin_graph("nn")), cfg.weighting_enum());
    std::vector<CatDiagram> terms = compose_sequential(d, d);
    if (terms.size() != 7)
        return property("composition", static_cast<double>(terms.size()), 1e-8,
                        "expected 7 composite terms, got " + std::to_string(terms.size()));

    FockBasis basis(eng, {kNucleon}, cfg.tau, cfg.nmax);
    NumericEvaluator ev(eng, basis);
    Eigen::MatrixXcd m = ev.via_boxes(d);
    double worst = (ev.via_boxes_sum(terms) - m * m).cwiseAbs().maxCoeff();
    return property("composition", worst, 1e-8,
                    "7 composite terms vs the matrix product, dim " +
                        std::to_string(basis.size()));
}

// The canonical 1-D readings of the translated graph corpus.
inline PropertyResult check_translations(const RunConfig& cfg) {
    const std::vector<std::pair<const char*, const char*>> pinned = {
        {"decay", "(-i*g) * sum[x1] w_uv^-4 * N+d(x1) N-d(x1) M(x1)"},
        {"nn",
         "(-i*g)^2/2 * sum[x1,x2] w_uv^-8 * N+d(x1) N+d(x2) N+(x1) N+(x2) * DF[m](x1-x2)"},
        {"nnbar_s",
         "(-i*g)^2/2 * sum[x1,x2] w_uv^-8 * N+d(x2) N-d(x2) N+(x1) N-(x1) * DF[m](x1-x2)"},
        {"mm_loop",
         "(-i*g)^4/24 * sum[x1,x2,x3,x4] w_uv^-16 * Md(x3) Md(x4) M(x1) M(x2) * "
         "DF[M](x1-x3) * DF[M](x3-x4) * DF[M](x2-x4) * DF[M](x1-x2)"},
    };
    int bad = 0;
    for (const auto& [name, expect] : pinned) {
        CatDiagram d = translate(parse_feynman_graph(builtin_graph(name)), cfg.weighting_enum());
        if (canonical_text(linearize(d)) != expect) ++bad;
    }
    return property("translation-strings", static_cast<double>(bad), 0.0,
                    std::to_string(pinned.size()) + " pinned canonical strings");
}

// The graph-rule amplitude and the categorical-pipeline amplitude agree on
// the whole corpus, and the full elastic channel is the two-term sum of the
// transfer graphs.
inline PropertyResult check_amplitude_pipelines(const RunConfig& cfg) {
    Weighting w = cfg.weighting_enum();
    int bad = 0, checked = 0;
    for (const char* name : {"decay", "nn", "nn_u", "nnbar_s", "nn_loop", "mm_loop", "wire"}) {
        FeynmanGraph g = parse_feynman_graph(builtin_graph(name));
        AmplitudeExpr a = feynman_rules(g);
        AmplitudeExpr b = amplitude_from_categorical(translate(g, w), ins_of(g), outs_of(g));
        if (!amp_equal(a, b)) ++bad;
        ++checked;
    }

    auto picked = select_channel(wick_expand(smatrix_term(2)), {kNucleon, kNucleon},
                                 {kNucleon, kNucleon});
    std::vector<CatDiagram> ds;
    for (const auto& s : picked) ds.push_back(two_dimensionalize(s, w));
    AmplitudeExpr channel =
        amplitude_channel(ds, channel_legs({kNucleon, kNucleon}, false),
                          channel_legs({kNucleon, kNucleon}, true));
    AmplitudeExpr expect = amp_plus(feynman_rules(parse_feynman_graph(builtin_graph("nn"))),
                                    feynman_rules(parse_feynman_graph(builtin_graph("nn_u"))));
    if (!amp_equal(channel, expect)) ++bad;
    ++checked;

    return property("amplitude-pipelines", static_cast<double>(bad), 0.0,
                    std::to_string(checked) + " pipeline comparisons");
}

}  // namespace detail

inline std::vector<PropertyResult> run_verification(const RunConfig& cfg) {
    cfg.validate();
    return {
        detail::check_ladder_commutator(cfg),
        detail::check_wave_inners(cfg),
        detail::check_rel_normalization(cfg),
        detail::check_feynman_even(cfg),
        detail::check_field_commutator(cfg),
        detail::check_split_adjoint(cfg),
        detail::check_multinomial_sliding(cfg),
        detail::check_literal_isometry(cfg),
        detail::check_round_trip(cfg),
        detail::check_evaluation_agreement(cfg),
        detail::check_composition(cfg),
        detail::check_translations(cfg),
        detail::check_amplitude_pipelines(cfg),
    };
}

inline bool verify_ok(const std::vector<PropertyResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const PropertyResult& r) { return r.waived || r.pass; });
}

inline std::string verify_report(const std::vector<PropertyResult>& results) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3);
    int failed = 0, waived = 0;
    for (const auto& r : results) {
        std::string status = r.waived ? "WAIVED" : (r.pass ? "PASS" : "FAIL");
        if (r.waived)
            ++waived;
        else if (!r.pass)
            ++failed;
        os << std::left << std::setw(26) << r.name << " " << std::setw(6) << status
           << "  residual " << r.residual;
        if (!r.waived) os << " (tol " << r.tolerance << ")";
        if (!r.note.empty()) os << "  -- " << r.note;
        os << "\n";
    }
    os << (results.size() - failed - waived) << "/" << (results.size() - waived)
       << " properties hold, " << waived << " waived\n";
    return os.str();
}

}  // namespace feyncat

#endif  // FEYNCAT_VERIFY_HPP
