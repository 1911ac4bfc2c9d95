#ifndef FEYNCAT_EVALUATE_HPP
#define FEYNCAT_EVALUATE_HPP

#include <array>
#include <climits>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "feyncat/diagram.hpp"
#include "feyncat/fock.hpp"

namespace feyncat {

// Numeric value of a prefactor with the coupling set to 1: coeff * (-i)^gpow.
// The w_uv power is not part of the value; it records the per-vertex spider
// weights, which numeric evaluation applies dimension-correctly on its own.
inline Complex prefactor_value(const Prefactor& p) {
    static const Complex ipow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return to_double(p.coeff) * ipow[((p.gpow % 4) + 4) % 4];
}

inline int prop_mass_index(PropMass m) { return m == PropMass::meson ? 0 : 1; }
inline int mass_rep_particle(int mass_idx) { return mass_idx == 0 ? kMeson : kNucleon; }

// Evaluates operator strings and categorical diagrams as matrices on a capped
// Fock basis, by two deliberately different routes:
//
//  * via_string (mode-sum route): after the per-vertex position sums are
//    carried out, each vertex imposes 4-momentum conservation mod N and
//    yields a factor omega_ir^(nu+1). Matrix elements are the sum over all
//    mode assignments (ladder modes, propagator momenta) satisfying every
//    vertex constraint; the solver propagates single-unknown constraints and
//    branches on the smallest remaining domain.
//
//  * via_boxes (sequential route): the boxes of a diagram are applied one at
//    a time to a sparse bundle of intermediate states, each keyed by its
//    occupancy together with the accumulated 4-momentum numerators of the
//    vertices whose boxes are not yet all applied; once a vertex completes,
//    non-conserving states are dropped and the vertex factor applied.
//
// Both routes treat application exactly and project onto the basis only at
// the end. A string/diagram with more annihilators (or more creators) than
// the basis particle cap is identically zero after projection and returns a
// zero matrix at once.
class NumericEvaluator {
public:
    NumericEvaluator(const FockEngine& eng, const FockBasis& basis)
        : eng_(eng), basis_(&basis) {
        if (basis.size() > 4096)
            throw std::length_error("Fock basis dimension " + std::to_string(basis.size()) +
                                    " exceeds the 4096 budget");
        N_ = eng.lp.group_size();
        d4_ = eng.lp.n_space + 1;
        S_ = eng.modes();
        n4_ = num_sites(N_, d4_);
        wir_nu_ = eng.omega_ir_nu();
        vertex_factor_ = wir_nu_ * static_cast<double>(eng.lp.omega_ir);
        for (int pt : {kNucleon, kAntinucleon, kMeson}) {
            onshell_[pt].resize(S_);
            fweight_[pt].resize(S_);
            for (long long ps = 0; ps < S_; ++ps) {
                onshell_[pt][ps] = eng.onshell_mom(pt, ps);
                fweight_[pt][ps] = eng.field_weight(pt, ps);
            }
        }
        kap4_.resize(n4_);
        for (long long k = 0; k < n4_; ++k) kap4_[k] = site_coords(k, N_, d4_);
        for (int mi = 0; mi < 2; ++mi) {
            int pt = mass_rep_particle(mi);
            PropagatorTable tab(eng, eng.mass_of(pt));
            feyw_[mi].resize(n4_);
            for (long long k = 0; k < n4_; ++k)
                feyw_[mi][k] = tab.feynman_momentum(kap4_[k]) / vertex_factor_;
            ordw_[mi].resize(S_);
            for (long long ps = 0; ps < S_; ++ps)
                ordw_[mi][ps] = 1.0 / (wir_nu_ * 2.0 * to_double(eng.energy(pt, ps)));
        }
    }

    const FockEngine& engine() const { return eng_; }
    const FockBasis& basis() const { return *basis_; }

    // Mode-sum route. Full fields are part-expanded; normal-product wrappers
    // are rearranged (their defining property); bare strings must already be
    // normal-ordered.
    Eigen::MatrixXcd via_string(const OperatorString& s) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis_->size(), basis_->size());
        if (s.wrap == Wrapper::time_ordered)
            throw std::invalid_argument("via_string: cannot evaluate time-ordered products");
        for (const auto& res : part_expand(s)) {
            OperatorString ns = res.wrap == Wrapper::normal ? normal_order(res) : res;
            if (!is_normal_ordered(ns))
                throw std::invalid_argument("via_string: bare string is not normal-ordered");
            m += csp_matrix(ns);
        }
        return m;
    }

    Eigen::MatrixXcd via_string_sum(const std::vector<OperatorString>& terms) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis_->size(), basis_->size());
        for (const auto& t : terms) m += via_string(t);
        return m;
    }

    // Sequential-box route.
    Eigen::MatrixXcd via_boxes(const CatDiagram& d) const { return boxes_matrix(d); }

    Eigen::MatrixXcd via_boxes_sum(const std::vector<CatDiagram>& sum) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis_->size(), basis_->size());
        for (const auto& d : sum) m += boxes_matrix(d);
        return m;
    }

private:
    struct CspVar {
        enum Kind { ann, cre, fey, ord } kind;
        int particle = -1;                     // ladder vars and ord props (mass rep)
        int mass = 0;                          // prop vars
        std::vector<std::pair<int, int>> inc;  // (vertex, sign of contribution)
    };

    std::map<std::string, int> vertex_index(const std::vector<std::string>& bound) const {
        std::map<std::string, int> vidx;
        for (const auto& b : bound)
            if (!vidx.emplace(b, static_cast<int>(vidx.size())).second)
                throw std::invalid_argument("duplicate bound label '" + b + "'");
        return vidx;
    }

    void check_uvpow(const Prefactor& pre, int nv) const {
        if (pre.uvpow != -4 * nv)
            throw std::logic_error("prefactor w_uv power does not match vertex count");
    }

    Eigen::MatrixXcd csp_matrix(const OperatorString& rs) const {
        const long long dim = basis_->size();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        std::map<std::string, int> vidx = vertex_index(rs.bound);
        const int nv = static_cast<int>(rs.bound.size());
        check_uvpow(rs.pre, nv);

        // ladder slots in application order (rightmost factor acts first)
        struct Slot {
            int particle;
            bool create;
            int var;
        };
        std::vector<Slot> slots;
        std::vector<CspVar> vars;
        int n_ann = 0, n_cre = 0;
        for (auto it = rs.factors.rbegin(); it != rs.factors.rend(); ++it) {
            LadderAction act = field_part_action(it->species, it->part == Part::minus);
            auto v = vidx.find(it->pos);
            if (v == vidx.end())
                throw std::invalid_argument("csp: factor at free position '" + it->pos + "'");
            CspVar var;
            var.kind = act.create ? CspVar::cre : CspVar::ann;
            var.particle = act.particle;
            var.inc = {{v->second, act.create ? +1 : -1}};
            slots.push_back({act.particle, act.create, static_cast<int>(vars.size())});
            vars.push_back(var);
            (act.create ? n_cre : n_ann)++;
        }
        if (n_ann > basis_->tau() || n_cre > basis_->tau()) return m;
        const int nslots = static_cast<int>(slots.size());

        for (const auto& p : rs.props) {
            auto a = vidx.find(p.a), b = vidx.find(p.b);
            if (a == vidx.end() || b == vidx.end())
                throw std::invalid_argument("csp: propagator at free position");
            if (a == b) throw std::invalid_argument("csp: propagator with equal endpoints");
            CspVar var;
            var.mass = prop_mass_index(p.mass);
            var.particle = mass_rep_particle(var.mass);
            if (p.kind == PropKind::feynman) {
                var.kind = CspVar::fey;
                var.inc = {{a->second, +1}, {b->second, -1}};
            } else {
                var.kind = CspVar::ord;
                var.inc = {{a->second, -1}, {b->second, +1}};
            }
            vars.push_back(var);
        }
        const int nvar = static_cast<int>(vars.size());
        std::vector<std::vector<int>> vinc(nv);
        for (int u = 0; u < nvar; ++u)
            for (auto [v, sg] : vars[u].inc) vinc[v].push_back(u);

        std::array<int, 3> need{0, 0, 0};
        for (const auto& sl : slots)
            if (!sl.create) ++need[sl.particle];

        double vpow = 1.0;
        for (int v = 0; v < nv; ++v) vpow *= vertex_factor_;

        // one column: sum over all consistent mode assignments
        auto column_rows = [&](const Occupancy& col) {
            std::map<long long, Complex> rows;
            std::array<std::vector<long long>, 3> sites;
            for (const auto& [mode, n] : col)
                if (n > 0) sites[mode.first].push_back(mode.second);

            std::vector<char> assigned(nvar, 0);
            std::vector<Coords> avec(nvar);
            std::vector<long long> apsite(nvar, -1);
            std::vector<Coords> resid(nv, Coords(d4_, 0));
            std::vector<int> una(nv, 0);
            for (int v = 0; v < nv; ++v) una[v] = static_cast<int>(vinc[v].size());

            auto apply = [&](int u, Coords vec, long long ps) {
                assigned[u] = 1;
                avec[u] = std::move(vec);
                apsite[u] = ps;
                for (auto [v, sg] : vars[u].inc) {
                    for (int c = 0; c < d4_; ++c) resid[v][c] += sg * avec[u][c];
                    --una[v];
                }
            };
            auto unapply = [&](int u) {
                for (auto [v, sg] : vars[u].inc) {
                    for (int c = 0; c < d4_; ++c) resid[v][c] -= sg * avec[u][c];
                    ++una[v];
                }
                assigned[u] = 0;
            };

            auto leaf = [&]() {
                Occupancy occ = col;
                double lad = 1.0;
                for (const auto& sl : slots) {
                    long long ps = apsite[sl.var];
                    int& n = occ[{sl.particle, ps}];
                    if (sl.create) {
                        lad *= std::sqrt(wir_nu_ * (n + 1)) * fweight_[sl.particle][ps];
                        ++n;
                    } else {
                        if (n == 0) return;
                        lad *= std::sqrt(wir_nu_ * n) * fweight_[sl.particle][ps];
                        --n;
                    }
                }
                for (auto it = occ.begin(); it != occ.end();)
                    it = it->second == 0 ? occ.erase(it) : std::next(it);
                long long r = basis_->index_of(occ);
                if (r < 0) return;
                Complex amp(lad * vpow, 0.0);
                for (int u = nslots; u < nvar; ++u)
                    amp *= vars[u].kind == CspVar::fey
                               ? feyw_[vars[u].mass][site_index(avec[u], N_)]
                               : Complex(ordw_[vars[u].mass][apsite[u]], 0.0);
                rows[r] += amp;
            };

            std::function<void()> solve = [&]() {
                for (int v = 0; v < nv; ++v)
                    if (una[v] == 0 && !conserves(resid[v], N_)) return;
                for (int v = 0; v < nv; ++v) {
                    if (una[v] != 1) continue;
                    int u = -1, sg = 0;
                    for (int w : vinc[v])
                        if (!assigned[w]) {
                            u = w;
                            break;
                        }
                    for (auto [vv, ss] : vars[u].inc)
                        if (vv == v) sg = ss;
                    if (vars[u].kind == CspVar::fey) {
                        Coords k(d4_);
                        for (int c = 0; c < d4_; ++c) k[c] = wrap_rep(-sg * resid[v][c], N_);
                        apply(u, std::move(k), -1);
                        solve();
                        unapply(u);
                    } else {
                        Coords sp(d4_ - 1);
                        for (int c = 1; c < d4_; ++c) sp[c - 1] = wrap_rep(-sg * resid[v][c], N_);
                        long long ps = site_index(sp, N_);
                        const Coords& k = onshell_[vars[u].particle][ps];
                        if (((sg * k[0] + resid[v][0]) % N_ + N_) % N_ != 0) return;
                        apply(u, k, ps);
                        solve();
                        unapply(u);
                    }
                    return;
                }
                int best = -1;
                long long best_dom = LLONG_MAX;
                for (int u = 0; u < nvar; ++u) {
                    if (assigned[u]) continue;
                    long long dom = vars[u].kind == CspVar::ann
                                        ? static_cast<long long>(sites[vars[u].particle].size())
                                        : vars[u].kind == CspVar::fey ? n4_ : S_;
                    if (dom < best_dom) {
                        best_dom = dom;
                        best = u;
                    }
                }
                if (best == -1) {
                    leaf();
                    return;
                }
                const CspVar& var = vars[best];
                if (var.kind == CspVar::fey)
                    for (long long k4 = 0; k4 < n4_; ++k4) {
                        apply(best, kap4_[k4], -1);
                        solve();
                        unapply(best);
                    }
                else if (var.kind == CspVar::ann)
                    for (long long ps : sites[var.particle]) {
                        apply(best, onshell_[var.particle][ps], ps);
                        solve();
                        unapply(best);
                    }
                else
                    for (long long ps = 0; ps < S_; ++ps) {
                        apply(best, onshell_[var.particle][ps], ps);
                        solve();
                        unapply(best);
                    }
            };
            solve();
            return rows;
        };

        if (nslots == 0) {
            // pure scalar times the identity: one solve suffices
            Occupancy vac;
            auto rows = column_rows(vac);
            Complex s0{};
            auto it = rows.find(basis_->index_of(vac));
            if (it != rows.end()) s0 = it->second;
            for (long long j = 0; j < dim; ++j) m(j, j) = s0;
            return m * prefactor_value(rs.pre);
        }

        for (long long cj = 0; cj < dim; ++cj) {
            const Occupancy& col = basis_->state(cj);
            std::array<int, 3> have{0, 0, 0};
            int colsz = 0;
            for (const auto& [mode, n] : col) {
                have[mode.first] += n;
                colsz += n;
            }
            if (have[0] < need[0] || have[1] < need[1] || have[2] < need[2]) continue;
            if (colsz - n_ann + n_cre > basis_->tau()) continue;
            for (auto [r, amp] : column_rows(col)) m(r, cj) += amp;
        }
        return m * prefactor_value(rs.pre);
    }

    Eigen::MatrixXcd boxes_matrix(const CatDiagram& d) const {
        const long long dim = basis_->size();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        std::map<std::string, int> vidx = vertex_index(d.vertices);
        const int nv = static_cast<int>(d.vertices.size());
        check_uvpow(d.pre, nv);
        const int n_ann = static_cast<int>(d.ann_boxes.size());
        const int n_cre = static_cast<int>(d.cre_boxes.size());
        if (n_ann > basis_->tau() || n_cre > basis_->tau()) return m;

        struct Step {
            int kind;  // 0 annihilate, 1 create, 2 feynman box, 3 ordered box
            int particle = -1;
            int mass = 0;
            int va = -1, vb = -1;
        };
        std::vector<Step> sched;
        std::vector<Step> cand;
        for (auto it = d.ann_boxes.rbegin(); it != d.ann_boxes.rend(); ++it)
            sched.push_back({0, it->particle, 0, vidx.at(it->vertex), -1});
        for (const auto& p : d.props) {
            if (p.a == p.b)
                throw std::invalid_argument("boxes: propagator with equal endpoints");
            int mi = prop_mass_index(p.mass);
            cand.push_back({p.kind == PropKind::feynman ? 2 : 3, mass_rep_particle(mi), mi,
                            vidx.at(p.a), vidx.at(p.b)});
        }
        for (auto it = d.cre_boxes.rbegin(); it != d.cre_boxes.rend(); ++it)
            cand.push_back({1, it->particle, 0, vidx.at(it->vertex), -1});

        std::vector<int> pend(nv, 0);
        auto touch = [&](const Step& st, int delta) {
            pend[st.va] += delta;
            if (st.vb >= 0) pend[st.vb] += delta;
        };
        for (const auto& st : sched) touch(st, +1);
        for (const auto& st : cand) touch(st, +1);

        // spiders with no boxes or propagator ends contribute their bare sum
        double base = 1.0;
        for (int v = 0; v < nv; ++v)
            if (pend[v] == 0) base *= vertex_factor_;

        // schedule: annihilators first (they act first); then greedily prefer
        // steps that complete a vertex (their value is forced by conservation),
        // then smaller sum domains. Creation boxes commute with one another
        // and propagator boxes with everything, so this reordering is exact.
        for (const auto& st : sched) touch(st, -1);
        std::vector<char> done(cand.size(), 0);
        for (size_t n = 0; n < cand.size(); ++n) {
            int best = -1, best_score = -1;
            long long best_dom = LLONG_MAX;
            for (size_t i = 0; i < cand.size(); ++i) {
                if (done[i]) continue;
                const Step& st = cand[i];
                int score = (pend[st.va] == 1 ? 1 : 0) + (st.vb >= 0 && pend[st.vb] == 1 ? 1 : 0);
                long long dom = st.kind == 2 ? n4_ : S_;
                if (score > best_score || (score == best_score && dom < best_dom)) {
                    best = static_cast<int>(i);
                    best_score = score;
                    best_dom = dom;
                }
            }
            done[best] = 1;
            touch(cand[best], -1);
            sched.push_back(cand[best]);
        }

        // which vertices complete at which scheduled step
        std::vector<std::vector<int>> completions(sched.size());
        std::vector<int> remaining(nv, 0);
        for (const auto& st : sched) {
            ++remaining[st.va];
            if (st.vb >= 0) ++remaining[st.vb];
        }
        std::vector<int> open0;
        for (int v = 0; v < nv; ++v)
            if (remaining[v] > 0) open0.push_back(v);
        for (size_t k = 0; k < sched.size(); ++k) {
            if (--remaining[sched[k].va] == 0) completions[k].push_back(sched[k].va);
            if (sched[k].vb >= 0 && --remaining[sched[k].vb] == 0)
                completions[k].push_back(sched[k].vb);
        }

        using State = std::pair<Occupancy, std::vector<Coords>>;

        std::array<int, 3> need{0, 0, 0};
        for (const auto& b : d.ann_boxes) ++need[b.particle];

        // a diagram without coherent boxes never touches the occupancy, so it
        // is a scalar times the identity: the vacuum column (index 0) suffices
        const bool scalar_identity = d.ann_boxes.empty() && d.cre_boxes.empty();
        const long long cols = scalar_identity ? 1 : dim;

        for (long long cj = 0; cj < cols; ++cj) {
            const Occupancy& col = basis_->state(cj);
            std::array<int, 3> have{0, 0, 0};
            int colsz = 0;
            for (const auto& [mode, n] : col) {
                have[mode.first] += n;
                colsz += n;
            }
            if (have[0] < need[0] || have[1] < need[1] || have[2] < need[2]) continue;
            if (colsz - n_ann + n_cre > basis_->tau()) continue;

            std::vector<int> open = open0;
            std::map<State, Complex> cur;
            cur[{col, std::vector<Coords>(open.size(), Coords(d4_, 0))}] = Complex(1.0, 0.0);

            for (size_t k = 0; k < sched.size() && !cur.empty(); ++k) {
                const Step& st = sched[k];
                int pa = static_cast<int>(std::find(open.begin(), open.end(), st.va) -
                                          open.begin());
                int pb = st.vb >= 0 ? static_cast<int>(std::find(open.begin(), open.end(),
                                                                 st.vb) -
                                                       open.begin())
                                    : -1;
                const std::vector<int>& compl_here = completions[k];
                bool fva = std::find(compl_here.begin(), compl_here.end(), st.va) !=
                           compl_here.end();
                bool fvb = st.vb >= 0 && std::find(compl_here.begin(), compl_here.end(),
                                                   st.vb) != compl_here.end();

                std::map<State, Complex> nxt;
                auto push = [&](const State& base_state, Complex coeff, const Coords& vec,
                                const Occupancy* occ_override) {
                    State ns;
                    ns.first = occ_override ? *occ_override : base_state.first;
                    ns.second = base_state.second;
                    auto add_at = [&](int pos, int sign) {
                        for (int c = 0; c < d4_; ++c)
                            ns.second[pos][c] = wrap_rep(ns.second[pos][c] + sign * vec[c], N_);
                    };
                    switch (st.kind) {
                        case 0: add_at(pa, -1); break;
                        case 1: add_at(pa, +1); break;
                        case 2: add_at(pa, +1); add_at(pb, -1); break;
                        case 3: add_at(pa, -1); add_at(pb, +1); break;
                    }
                    // close completed vertices, largest position first
                    std::vector<int> close;
                    for (int v : compl_here)
                        close.push_back(v == st.va ? pa : pb);
                    std::sort(close.rbegin(), close.rend());
                    for (int pos : close) {
                        for (int c = 0; c < d4_; ++c)
                            if (ns.second[pos][c] != 0) return;
                        coeff *= vertex_factor_;
                        ns.second.erase(ns.second.begin() + pos);
                    }
                    nxt[ns] += coeff;
                };

                for (const auto& [state, coeff] : cur) {
                    const Occupancy& occ = state.first;
                    const std::vector<Coords>& tot = state.second;
                    switch (st.kind) {
                        case 0: {  // annihilation box: modes from the occupancy
                            for (const auto& [mode, n] : occ) {
                                if (mode.first != st.particle || n == 0) continue;
                                long long ps = mode.second;
                                Occupancy o = occ;
                                if (--o[mode] == 0) o.erase(mode);
                                Complex c2 = coeff * std::sqrt(wir_nu_ * n) *
                                             fweight_[st.particle][ps];
                                push(state, c2, onshell_[st.particle][ps], &o);
                            }
                            break;
                        }
                        case 1: {  // creation box
                            auto create_at = [&](long long ps) {
                                Occupancy o = occ;
                                int& n = o[{st.particle, ps}];
                                Complex c2 = coeff * std::sqrt(wir_nu_ * (n + 1)) *
                                             fweight_[st.particle][ps];
                                ++n;
                                push(state, c2, onshell_[st.particle][ps], &o);
                            };
                            if (fva) {  // forced: +k must cancel the vertex total
                                Coords sp(d4_ - 1);
                                for (int c = 1; c < d4_; ++c)
                                    sp[c - 1] = wrap_rep(-tot[pa][c], N_);
                                long long ps = site_index(sp, N_);
                                long long e = onshell_[st.particle][ps][0];
                                if (((e + tot[pa][0]) % N_ + N_) % N_ == 0) create_at(ps);
                            } else {
                                for (long long ps = 0; ps < S_; ++ps) create_at(ps);
                            }
                            break;
                        }
                        case 2: {  // Feynman propagator box: +kappa at a, -kappa at b
                            auto with_k = [&](const Coords& kap) {
                                Complex c2 = coeff * feyw_[st.mass][site_index(kap, N_)];
                                push(state, c2, kap, nullptr);
                            };
                            if (fva) {
                                Coords kap(d4_);
                                for (int c = 0; c < d4_; ++c)
                                    kap[c] = wrap_rep(-tot[pa][c], N_);
                                with_k(kap);
                            } else if (fvb) {
                                Coords kap(d4_);
                                for (int c = 0; c < d4_; ++c) kap[c] = wrap_rep(tot[pb][c], N_);
                                with_k(kap);
                            } else {
                                for (long long k4 = 0; k4 < n4_; ++k4) with_k(kap4_[k4]);
                            }
                            break;
                        }
                        case 3: {  // ordered pair-function box: -p at a, +p at b
                            auto with_p = [&](long long ps) {
                                Complex c2 = coeff * ordw_[st.mass][ps];
                                push(state, c2, onshell_[st.particle][ps], nullptr);
                            };
                            if (fva || fvb) {
                                Coords sp(d4_ - 1);
                                for (int c = 1; c < d4_; ++c)
                                    sp[c - 1] = fva ? wrap_rep(tot[pa][c], N_)
                                                    : wrap_rep(-tot[pb][c], N_);
                                long long ps = site_index(sp, N_);
                                long long e = onshell_[st.particle][ps][0];
                                long long want = fva ? tot[pa][0] : -tot[pb][0];
                                if (((e - want) % N_ + N_) % N_ == 0) with_p(ps);
                            } else {
                                for (long long ps = 0; ps < S_; ++ps) with_p(ps);
                            }
                            break;
                        }
                    }
                }
                for (int v : compl_here) open.erase(std::find(open.begin(), open.end(), v));
                cur.swap(nxt);
            }

            for (const auto& [state, coeff] : cur) {
                long long r = basis_->index_of(state.first);
                if (r >= 0) m(r, cj) += coeff;
            }
        }
        if (scalar_identity)
            for (long long j = 1; j < dim; ++j) m(j, j) = m(0, 0);
        return m * (base * prefactor_value(d.pre));
    }

    FockEngine eng_;
    const FockBasis* basis_;
    long long N_, S_, n4_;
    int d4_;
    double wir_nu_, vertex_factor_;
    std::array<std::vector<Coords>, 3> onshell_;
    std::array<std::vector<double>, 3> fweight_;
    std::array<std::vector<double>, 2> ordw_;
    std::vector<Coords> kap4_;
    std::array<std::vector<Complex>, 2> feyw_;
};

}  // namespace feyncat

#endif  // FEYNCAT_EVALUATE_HPP
