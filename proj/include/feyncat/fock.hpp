#ifndef FEYNCAT_FOCK_HPP
#define FEYNCAT_FOCK_HPP

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "feyncat/lattice.hpp"
#include "feyncat/rational.hpp"

namespace feyncat {

// Particle species of the scalar-Yukawa model.
constexpr int kNucleon = 0;      // N+
constexpr int kAntinucleon = 1;  // N-
constexpr int kMeson = 2;        // M

using ModeKey = std::pair<int, long long>;  // (particle, spatial momentum site)
using Occupancy = std::map<ModeKey, int>;

// A vector in Fock space, expressed over the orthonormal beta basis
// |beta_n> indexed by occupancy maps. States are sparse and uncapped: ladder
// operators act exactly, and truncation happens only when projecting onto a
// finite basis at the very end of a computation.
using FockState = std::map<Occupancy, Complex>;

inline void add_term(FockState& s, const Occupancy& occ, Complex c) {
    if (c == Complex{}) return;
    auto [it, fresh] = s.emplace(occ, c);
    if (!fresh) it->second += c;
}

inline void merge_into(FockState& dst, const FockState& src) {
    for (const auto& [occ, c] : src) add_term(dst, occ, c);
}

inline void scale(FockState& s, Complex c) {
    for (auto& [occ, v] : s) v *= c;
}

inline void prune(FockState& s, double eps = 1e-14) {
    for (auto it = s.begin(); it != s.end();)
        it = std::abs(it->second) < eps ? s.erase(it) : std::next(it);
}

// <a|b> over the orthonormal beta basis.
inline Complex fock_inner(const FockState& a, const FockState& b) {
    Complex r{};
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first)
            ++ia;
        else if (ib->first < ia->first)
            ++ib;
        else {
            r += std::conj(ia->second) * ib->second;
            ++ia, ++ib;
        }
    }
    return r;
}

// --- Engine parameters --------------------------------------------------------

struct FockEngine {
    LatticeParams lp{3, 5, 1};
    Rat meson_mass{1};
    Rat nucleon_mass{1};

    long long modes() const { return num_sites(lp.group_size(), lp.n_space); }
    Rat mass_of(int particle) const { return particle == kMeson ? meson_mass : nucleon_mass; }

    double omega_ir_nu() const {
        return static_cast<double>(ll_pow(lp.omega_ir, lp.n_space));
    }

    Coords mode_coords(long long psite) const {
        return site_coords(psite, lp.group_size(), lp.n_space);
    }

    // On-shell lattice energy numerator (units 1/omega_ir), unwrapped.
    long long energy_num(int particle, long long psite) const {
        return dispersion_numerator(lp, mode_coords(psite), mass_of(particle));
    }

    Rat energy(int particle, long long psite) const {
        return Rat(energy_num(particle, psite), lp.omega_ir);
    }

    // On-shell 4-momentum numerators (E; p).
    Coords onshell_mom(int particle, long long psite) const {
        return onshell(lp, mode_coords(psite), mass_of(particle));
    }

    // Mode weight appearing in field expansions: omega_ir^-nu (2 E_p)^-1/2.
    double field_weight(int particle, long long psite) const {
        return 1.0 / (omega_ir_nu() * std::sqrt(2.0 * to_double(energy(particle, psite))));
    }
};

// --- Ladder operators ----------------------------------------------------------

// a^dag(p)|beta_n> = sqrt(omega_ir^nu) sqrt(n_p + 1) |beta_{n + delta_p}>
inline FockState apply_create(const FockEngine& eng, const FockState& s, int particle,
                              long long psite, Complex coeff = {1.0, 0.0}) {
    FockState out;
    const double w = eng.omega_ir_nu();
    for (const auto& [occ, c] : s) {
        Occupancy o = occ;
        int& n = o[{particle, psite}];
        Complex f = coeff * std::sqrt(w * (n + 1));
        ++n;
        add_term(out, o, c * f);
    }
    return out;
}

// a(p)|beta_n> = sqrt(omega_ir^nu n_p) |beta_{n - delta_p}>
inline FockState apply_annihilate(const FockEngine& eng, const FockState& s, int particle,
                                  long long psite, Complex coeff = {1.0, 0.0}) {
    FockState out;
    const double w = eng.omega_ir_nu();
    for (const auto& [occ, c] : s) {
        auto it = occ.find({particle, psite});
        if (it == occ.end() || it->second == 0) continue;
        Occupancy o = occ;
        int& n = o[{particle, psite}];
        Complex f = coeff * std::sqrt(w * n);
        if (--n == 0) o.erase({particle, psite});
        add_term(out, o, c * f);
    }
    return out;
}

// Relativistically normalized multi-particle state
// |n>_rel = prod_p sqrt(omega_ir^nu 2 E_p)^{n_p} sqrt(n_p!) |beta_n>,
// so that <n|n> = prod_p n_p! (omega_ir^nu 2 E_p)^{n_p}.
inline FockState particle_state(const FockEngine& eng, const Occupancy& occ) {
    double c = 1.0;
    for (const auto& [mode, n] : occ) {
        if (n < 0) throw std::invalid_argument("particle_state: negative occupancy");
        double x = eng.omega_ir_nu() * 2.0 * to_double(eng.energy(mode.first, mode.second));
        c *= std::pow(x, 0.5 * n) * std::sqrt(static_cast<double>(factorial(n)));
    }
    Occupancy clean;
    for (const auto& [mode, n] : occ)
        if (n > 0) clean[mode] = n;
    return {{clean, Complex(c, 0.0)}};
}

// --- Interaction-picture fields --------------------------------------------------

enum class FieldKind { psi, psid, phi };

struct LadderAction {
    int particle;
    bool create;
};

// Which ladder operator each field part carries:
//   psi   = (annihilate N+) + (create N-),
//   psi^dag = (annihilate N-) + (create N+),
//   phi   = (annihilate M)  + (create M).
// The "plus" (annihilation) part always carries e^{-i 2 pi p.x}, the "minus"
// (creation) part e^{+i 2 pi p.x}, with p.x the Minkowski pairing at on-shell p.
inline LadderAction field_part_action(FieldKind k, bool minus_part) {
    switch (k) {
        case FieldKind::psi:
            return minus_part ? LadderAction{kAntinucleon, true} : LadderAction{kNucleon, false};
        case FieldKind::psid:
            return minus_part ? LadderAction{kNucleon, true} : LadderAction{kAntinucleon, false};
        case FieldKind::phi:
        default:
            return minus_part ? LadderAction{kMeson, true} : LadderAction{kMeson, false};
    }
}

// Applies one part of a field at space-time point z (numerators, time first):
//   part(x) = sum_p omega_ir^-nu (2 E_p)^-1/2 ladder(p) e^{-+ i 2 pi p.x}.
inline FockState apply_field_part(const FockEngine& eng, const FockState& s, FieldKind k,
                                  bool minus_part, const Coords& z) {
    if (static_cast<int>(z.size()) != eng.lp.n_space + 1)
        throw std::invalid_argument("apply_field_part: z must have n_space+1 components");
    LadderAction act = field_part_action(k, minus_part);
    FockState out;
    for (long long ps = 0; ps < eng.modes(); ++ps) {
        long long ph = minkowski_num(eng.onshell_mom(act.particle, ps), z);
        Complex c = eng.field_weight(act.particle, ps) *
                    phase(minus_part ? ph : -ph, eng.lp.group_size());
        FockState piece = act.create ? apply_create(eng, s, act.particle, ps, c)
                                     : apply_annihilate(eng, s, act.particle, ps, c);
        merge_into(out, piece);
    }
    return out;
}

// Full field = annihilation part + creation part.
inline FockState apply_field(const FockEngine& eng, const FockState& s, FieldKind k,
                             const Coords& z) {
    FockState out = apply_field_part(eng, s, k, false, z);
    merge_into(out, apply_field_part(eng, s, k, true, z));
    return out;
}

// Free time evolution U(t): multiplies |beta_n> by e^{+i 2 pi t sum_p n_p E_p}.
// t_num is the time numerator in units 1/omega_uv; the products t*E land on the
// 1/N lattice, so every phase is exact.
inline FockState apply_time_evolution(const FockEngine& eng, const FockState& s, long long t_num) {
    FockState out;
    for (const auto& [occ, c] : s) {
        long long e = 0;
        for (const auto& [mode, n] : occ) e += n * eng.energy_num(mode.first, mode.second);
        add_term(out, occ, c * phase(t_num * e, eng.lp.group_size()));
    }
    return out;
}

// --- Finite basis and matrix projection ------------------------------------------

// All occupancies over the given species with total particle number <= tau and
// per-mode occupation <= nmax, in lexicographic order of the occupancy map.
class FockBasis {
public:
    FockBasis(const FockEngine& eng, std::vector<int> species, int tau, int nmax)
        : eng_(eng), tau_(tau), nmax_(nmax) {
        for (int pt : species)
            for (long long ps = 0; ps < eng.modes(); ++ps) modes_.push_back({pt, ps});
        Occupancy occ;
        build(0, tau, occ);
        for (size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = static_cast<long long>(i);
    }

    long long size() const { return static_cast<long long>(states_.size()); }
    const Occupancy& state(long long i) const { return states_[i]; }
    int tau() const { return tau_; }
    int nmax() const { return nmax_; }

    long long index_of(const Occupancy& occ) const {
        auto it = index_.find(occ);
        return it == index_.end() ? -1 : it->second;
    }

    FockState basis_state(long long i) const { return {{states_[i], Complex(1.0, 0.0)}}; }

    // Orthogonal projection onto the span of the basis.
    Eigen::VectorXcd project(const FockState& s) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size());
        for (const auto& [occ, c] : s) {
            long long i = index_of(occ);
            if (i >= 0) v(i) += c;
        }
        return v;
    }

    // Matrix of a linear map given as a FockState -> FockState function; the
    // map itself runs uncapped, only its output columns are projected.
    template <class Op>
    Eigen::MatrixXcd matrix_of(Op&& op) const {
        Eigen::MatrixXcd m(size(), size());
        for (long long j = 0; j < size(); ++j) m.col(j) = project(op(basis_state(j)));
        return m;
    }

private:
    // Each occupancy is reached along exactly one path (modes in increasing
    // order, multiplicities fixed), and is recorded once on entry.
    void build(size_t from, int budget, Occupancy& occ) {
        states_.push_back(occ);
        if (budget == 0) return;
        for (size_t k = from; k < modes_.size(); ++k) {
            for (int add = 1; add <= std::min(budget, nmax_); ++add) {
                occ[modes_[k]] = add;
                build(k + 1, budget - add, occ);
            }
            occ.erase(modes_[k]);
        }
    }

    FockEngine eng_;
    int tau_;
    int nmax_;
    std::vector<ModeKey> modes_;
    std::vector<Occupancy> states_;
    std::map<Occupancy, long long> index_;
};

// --- Two-point functions ----------------------------------------------------------

// Pair function, Feynman propagator and its 4-momentum transform for one mass,
// tabulated over the whole space-time lattice:
//   D(z)        = sum_p omega_ir^-nu (2 E_p)^-1 e^{-i 2 pi p.z}  (p on-shell),
//   DF(z)       = D(z) for z0 > 0, D(-z) for z0 < 0, their mean at z0 = 0,
//   DF_hat(kap) = sum_z omega_uv^-(nu+1) DF(z) e^{-i 2 pi kap.z},
// with all pairings Minkowski and z wrapped onto representatives first.
class PropagatorTable {
public:
    PropagatorTable(const FockEngine& eng, Rat mass) : lp_(eng.lp), mass_(mass) {
        lp_.validate();
        const long long N = lp_.group_size();
        const int d4 = lp_.n_space + 1;
        const long long n4 = num_sites(N, d4);
        const long long nsp = num_sites(N, lp_.n_space);

        std::vector<Coords> kappas(nsp);
        std::vector<double> weights(nsp);
        double wir = static_cast<double>(ll_pow(lp_.omega_ir, lp_.n_space));
        for (long long ps = 0; ps < nsp; ++ps) {
            Coords p = site_coords(ps, N, lp_.n_space);
            kappas[ps] = onshell(lp_, p, mass_);
            weights[ps] = 1.0 / (wir * 2.0 * to_double(Rat(kappas[ps][0], lp_.omega_ir)));
        }

        d_.resize(n4);
        for (long long iz = 0; iz < n4; ++iz) {
            Coords z = site_coords(iz, N, d4);
            Complex acc{};
            for (long long ps = 0; ps < nsp; ++ps)
                acc += weights[ps] * phase(-minkowski_num(kappas[ps], z), N);
            d_[iz] = acc;
        }

        df_.resize(n4);
        for (long long iz = 0; iz < n4; ++iz) {
            Coords z = site_coords(iz, N, d4);
            Coords mz = z;
            for (auto& v : mz) v = -v;
            long long imz = site_index(mz, N);
            if (z[0] > 0)
                df_[iz] = d_[iz];
            else if (z[0] < 0)
                df_[iz] = d_[imz];
            else
                df_[iz] = 0.5 * (d_[iz] + d_[imz]);
        }

        double wuv = static_cast<double>(ll_pow(lp_.omega_uv, d4));
        dfhat_.resize(n4);
        for (long long ik = 0; ik < n4; ++ik) {
            Coords kap = site_coords(ik, N, d4);
            Complex acc{};
            for (long long iz = 0; iz < n4; ++iz)
                acc += df_[iz] * phase(-minkowski_num(kap, site_coords(iz, N, d4)), N);
            dfhat_[ik] = acc / wuv;
        }
    }

    const LatticeParams& params() const { return lp_; }
    Rat mass() const { return mass_; }

    Complex pair(const Coords& z4) const { return d_[wrap_index(z4)]; }
    Complex feynman(const Coords& z4) const { return df_[wrap_index(z4)]; }

    Complex feynman_momentum(const Coords& k4) const { return dfhat_[wrap_index(k4)]; }

private:
    long long wrap_index(const Coords& z4) const {
        if (static_cast<int>(z4.size()) != lp_.n_space + 1)
            throw std::invalid_argument("PropagatorTable: expected n_space+1 components");
        return site_index(z4, lp_.group_size());
    }

    LatticeParams lp_;
    Rat mass_;
    std::vector<Complex> d_;
    std::vector<Complex> df_;
    std::vector<Complex> dfhat_;
};

}  // namespace feyncat

#endif  // FEYNCAT_FOCK_HPP
