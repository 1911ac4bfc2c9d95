#ifndef FEYNCAT_LATTICE_HPP
#define FEYNCAT_LATTICE_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "feyncat/rational.hpp"

namespace feyncat {

using Complex = std::complex<double>;

// A finite position/momentum lattice pair: positions live on (1/omega_uv)*Z_N,
// momenta on (1/omega_ir)*Z_N with N = omega_uv*omega_ir = 2*omega+1, in
// n_space spatial dimensions. Coordinates are stored as integer numerators
// with representatives in {-omega, ..., +omega}.
struct LatticeParams {
    long long omega_uv = 3;
    long long omega_ir = 5;
    int n_space = 1;

    void validate() const {
        if (omega_uv < 1 || omega_uv % 2 == 0)
            throw std::invalid_argument("omega_uv must be an odd positive integer");
        if (omega_ir < 1 || omega_ir % 2 == 0)
            throw std::invalid_argument("omega_ir must be an odd positive integer");
        if (n_space < 1) throw std::invalid_argument("n_space must be >= 1");
    }

    long long group_size() const { return omega_uv * omega_ir; }  // 2*omega + 1
    long long omega() const { return (group_size() - 1) / 2; }

    // The dual lattice swaps the roles of the two cut-offs (and of
    // position/momentum); the dual of the dual is the original lattice.
    LatticeParams dual() const { return {omega_ir, omega_uv, n_space}; }

    bool operator==(const LatticeParams& o) const {
        return omega_uv == o.omega_uv && omega_ir == o.omega_ir && n_space == o.n_space;
    }
};

// Wraps an integer onto the representative range {-omega, ..., +omega} of Z_N.
inline long long wrap_rep(long long v, long long group_size) {
    long long omega = (group_size - 1) / 2;
    long long m = v % group_size;
    if (m > omega) m -= group_size;
    if (m < -omega) m += group_size;
    return m;
}

// Group addition of coordinate numerators in Z_N, result in {-omega..+omega}.
inline long long group_add(long long a, long long b, long long group_size) {
    return wrap_rep(a + b, group_size);
}

using Coords = std::vector<long long>;  // integer numerators, one per dimension

inline long long num_sites(long long group_size, int dim) {
    long long n = 1;
    for (int k = 0; k < dim; ++k) n *= group_size;
    return n;
}

// Mixed-radix bijection between site indices and coordinate vectors.
inline Coords site_coords(long long index, long long group_size, int dim) {
    long long omega = (group_size - 1) / 2;
    Coords c(dim);
    for (int k = 0; k < dim; ++k) {
        c[k] = index % group_size - omega;
        index /= group_size;
    }
    return c;
}

inline long long site_index(const Coords& c, long long group_size) {
    long long omega = (group_size - 1) / 2;
    long long idx = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        long long rep = wrap_rep(c[k], group_size);
        idx = idx * group_size + (rep + omega);
    }
    return idx;
}

// exp(i*2*pi*num/den); the exponent is reduced mod den first so the phase is
// exact for every integer numerator, however large.
inline Complex phase(long long num, long long den) {
    num %= den;
    double arg = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(arg), std::sin(arg)};
}

// Phase exponent numerator (in units of 1/N) of the Euclidean pairing p.x of
// momentum numerators (units 1/omega_ir) with position numerators
// (units 1/omega_uv): each numerator product contributes 1/N of a turn.
inline long long pairing_num(const Coords& p, const Coords& x) {
    if (p.size() != x.size()) throw std::invalid_argument("pairing_num: dimension mismatch");
    long long n = 0;
    for (size_t k = 0; k < p.size(); ++k) n += p[k] * x[k];
    return n;
}

// e^{i 2 pi p.x}
inline Complex pairing_phase(const LatticeParams& lp, const Coords& p, const Coords& x) {
    return phase(pairing_num(p, x), lp.group_size());
}

// --- Relativistic dispersion -------------------------------------------------

// E_p = (1/omega_ir) * floor(omega_ir * sqrt(|p|^2 + m^2)), computed exactly:
// with |p|^2 + m^2 = num/den the floor equals isqrt(omega_ir^2*num*den)/den.
inline long long dispersion_numerator(const LatticeParams& lp, const Coords& p_num, const Rat& mass) {
    long long sumsq = 0;
    for (long long b : p_num) sumsq += b * b;
    long long mn = mass.numerator(), md = mass.denominator();
    long long w = lp.omega_ir;
    long long num = sumsq * md * md + mn * mn * w * w;
    long long den = w * w * md * md;
    long long a = w * w * num * den;
    return isqrt(a) / den;
}

inline Rat dispersion(const LatticeParams& lp, const Coords& p_num, const Rat& mass) {
    return Rat(dispersion_numerator(lp, p_num, mass), lp.omega_ir);
}

// --- Wave-functions on the spatial lattice -----------------------------------

// States are complex functions of position, stored as Eigen vectors indexed by
// site_index over n_space dimensions. The inner product carries the lattice
// measure omega_uv^-n, under which <delta_x|delta_x> = omega_uv^n,
// <chi_p|chi_p> = omega_ir^n and <delta_x|chi_p> = e^{i 2 pi p.x}.
class WaveSpace {
public:
    explicit WaveSpace(const LatticeParams& lp) : lp_(lp) {
        lp.validate();
        dim_ = num_sites(lp.group_size(), lp.n_space);
    }

    const LatticeParams& params() const { return lp_; }
    long long size() const { return dim_; }

    Coords coords(long long index) const { return site_coords(index, lp_.group_size(), lp_.n_space); }
    long long index(const Coords& c) const { return site_index(c, lp_.group_size()); }

    // Position eigenstate: amplitude omega_uv^n at x, so that <delta_x|psi> = psi(x).
    Eigen::VectorXcd delta_x(const Coords& x) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
        v(index(x)) = static_cast<double>(ll_pow(lp_.omega_uv, lp_.n_space));
        return v;
    }

    // Momentum eigenstate (plane wave): chi_p(x) = e^{i 2 pi p.x}.
    Eigen::VectorXcd chi_p(const Coords& p) const {
        Eigen::VectorXcd v(dim_);
        for (long long ix = 0; ix < dim_; ++ix)
            v(ix) = pairing_phase(lp_, p, coords(ix));
        return v;
    }

    // <a|b> = sum_x omega_uv^-n conj(a(x)) b(x)
    Complex inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
        double w = 1.0 / static_cast<double>(ll_pow(lp_.omega_uv, lp_.n_space));
        return w * a.dot(b);
    }

    // Momentum representation psi_hat(p) = <chi_p|psi>.
    Complex fourier_at(const Eigen::VectorXcd& psi, const Coords& p) const {
        return inner(chi_p(p), psi);
    }

    // psi(x) = sum_p omega_ir^-n psi_hat(p) e^{i 2 pi p.x}
    Eigen::VectorXcd fourier_inverse(const std::vector<Complex>& psi_hat) const {
        if (static_cast<long long>(psi_hat.size()) != dim_)
            throw std::invalid_argument("fourier_inverse: size mismatch");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_);
        double w = 1.0 / static_cast<double>(ll_pow(lp_.omega_ir, lp_.n_space));
        for (long long ip = 0; ip < dim_; ++ip) {
            Coords p = coords(ip);
            for (long long ix = 0; ix < dim_; ++ix)
                v(ix) += w * psi_hat[ip] * pairing_phase(lp_, p, coords(ix));
        }
        return v;
    }

private:
    LatticeParams lp_;
    long long dim_;
};

// --- 4-vectors ----------------------------------------------------------------

// Space-time points carry numerators (t; x1..xn) in units 1/omega_uv; 4-momenta
// carry numerators (E; p1..pn) in units 1/omega_ir. Component 0 is time/energy.

// Minkowski pairing exponent numerator (units 1/N): k.z = E t - p.x.
inline long long minkowski_num(const Coords& k, const Coords& z) {
    if (k.size() != z.size()) throw std::invalid_argument("minkowski_num: dimension mismatch");
    long long n = k[0] * z[0];
    for (size_t j = 1; j < k.size(); ++j) n -= k[j] * z[j];
    return n;
}

// e^{i 2 pi k.z}
inline Complex minkowski_phase(const LatticeParams& lp, const Coords& k, const Coords& z) {
    return phase(minkowski_num(k, z), lp.group_size());
}

// Per-vertex conservation on the dual lattice: a sum over one vertex position
// of e^{i 2 pi q.x} with weight omega_uv^-(n+1) equals omega_ir^(n+1) exactly
// when every component numerator of q vanishes mod N, and 0 otherwise.
inline bool conserves(const Coords& q_num, long long group_size) {
    for (long long c : q_num)
        if (c % group_size != 0) return false;
    return true;
}

// On-shell 4-momentum numerators (E_p; p) for spatial mode p.
inline Coords onshell(const LatticeParams& lp, const Coords& p_num, const Rat& mass) {
    Coords k(p_num.size() + 1);
    k[0] = dispersion_numerator(lp, p_num, mass);
    for (size_t j = 0; j < p_num.size(); ++j) k[j + 1] = p_num[j];
    return k;
}

}  // namespace feyncat

#endif  // FEYNCAT_LATTICE_HPP
