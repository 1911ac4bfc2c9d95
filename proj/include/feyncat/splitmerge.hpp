#ifndef FEYNCAT_SPLITMERGE_HPP
#define FEYNCAT_SPLITMERGE_HPP

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "feyncat/fock.hpp"

namespace feyncat {

// States of the k-fold tensor power of Fock space: sparse combinations of
// k-tuples of beta-basis occupancies.
using MultiOccupancy = std::vector<Occupancy>;
using MultiState = std::map<MultiOccupancy, Complex>;

inline void add_term(MultiState& s, const MultiOccupancy& occ, Complex c) {
    if (c == Complex{}) return;
    auto [it, fresh] = s.emplace(occ, c);
    if (!fresh) it->second += c;
}

inline Complex multi_inner(const MultiState& a, const MultiState& b) {
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

// How the split/merge spiders weight each way of distributing quanta.
enum class Weighting { literal, multinomial };

namespace detail {
// Ordered compositions of n into k non-negative parts, first part descending.
inline void compositions(int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (k == 1) {
        cur.push_back(n);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = n; first >= 0; --first) {
        cur.push_back(first);
        compositions(n - first, k - 1, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

// All ordered k-tuples of occupancies summing to n, mode by mode; the tuple
// count is prod_p C(n_p + k - 1, k - 1).
inline std::vector<MultiOccupancy> split_tuples(const Occupancy& n, int k) {
    if (k < 1) throw std::invalid_argument("split_tuples: k must be >= 1");
    std::vector<MultiOccupancy> tuples = {MultiOccupancy(k)};
    for (const auto& [mode, count] : n) {
        std::vector<std::vector<int>> parts;
        std::vector<int> cur;
        detail::compositions(count, k, cur, parts);
        std::vector<MultiOccupancy> next;
        next.reserve(tuples.size() * parts.size());
        for (const auto& t : tuples)
            for (const auto& part : parts) {
                MultiOccupancy u = t;
                for (int j = 0; j < k; ++j)
                    if (part[j] > 0) u[j][mode] = part[j];
                next.push_back(std::move(u));
            }
        tuples = std::move(next);
    }
    return tuples;
}

inline long long split_count(const Occupancy& n, int k) {
    long long c = 1;
    for (const auto& [mode, count] : n) c *= binomial(count + k - 1, k - 1);
    return c;
}

// Multinomial weight c(n, i) = prod_p n_p! / prod_j (i_j)_p!  (an integer).
inline long long multinomial_weight(const Occupancy& n, const MultiOccupancy& i) {
    long long c = 1;
    for (const auto& [mode, count] : n) {
        long long num = factorial(count);
        for (const auto& part : i) {
            auto it = part.find(mode);
            if (it != part.end()) num /= factorial(it->second);
        }
        c *= num;
    }
    return c;
}

// split_k |beta_n> = sum_{i in Theta_n^k} w(n, i) (x)_j |beta_{i_j}>, with
// w = 1 for the literal weighting and w = sqrt(c(n, i)) for the multinomial one.
inline MultiState split(const FockState& s, int k, Weighting w) {
    MultiState out;
    for (const auto& [occ, c] : s)
        for (const auto& tuple : split_tuples(occ, k)) {
            double f = w == Weighting::multinomial
                           ? std::sqrt(static_cast<double>(multinomial_weight(occ, tuple)))
                           : 1.0;
            add_term(out, tuple, c * f);
        }
    return out;
}

// merge is the adjoint of split for either weighting:
// merge((x)_j |beta_{i_j}>) = w(sum_j i_j, i) |beta_{sum_j i_j}>.
inline FockState merge(const MultiState& s, Weighting w) {
    FockState out;
    for (const auto& [tuple, c] : s) {
        Occupancy total;
        for (const auto& part : tuple)
            for (const auto& [mode, count] : part) total[mode] += count;
        double f = w == Weighting::multinomial
                       ? std::sqrt(static_cast<double>(multinomial_weight(total, tuple)))
                       : 1.0;
        add_term(out, total, c * f);
    }
    return out;
}

// Ladder operator acting on the j-th tensor factor only.
inline MultiState apply_annihilate_factor(const FockEngine& eng, const MultiState& s, int j,
                                          int particle, long long psite) {
    MultiState out;
    const double w = eng.omega_ir_nu();
    for (const auto& [tuple, c] : s) {
        auto it = tuple[j].find({particle, psite});
        if (it == tuple[j].end() || it->second == 0) continue;
        MultiOccupancy u = tuple;
        int& n = u[j][{particle, psite}];
        Complex f = c * std::sqrt(w * n);
        if (--n == 0) u[j].erase({particle, psite});
        add_term(out, u, f);
    }
    return out;
}

inline MultiState apply_create_factor(const FockEngine& eng, const MultiState& s, int j,
                                      int particle, long long psite) {
    MultiState out;
    const double w = eng.omega_ir_nu();
    for (const auto& [tuple, c] : s) {
        MultiOccupancy u = tuple;
        int& n = u[j][{particle, psite}];
        Complex f = c * std::sqrt(w * (n + 1));
        ++n;
        add_term(out, u, f);
    }
    return out;
}

}  // namespace feyncat

#endif  // FEYNCAT_SPLITMERGE_HPP
