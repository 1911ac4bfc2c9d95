#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "feyncat/splitmerge.hpp"

using namespace feyncat;

namespace {
const FockEngine desk{};
const ModeKey mp{kMeson, 3};
const ModeKey mq{kMeson, 9};

FockState random_state(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FockState s;
    s[{}] = {u(rng), u(rng)};
    s[{{mp, 1}}] = {u(rng), u(rng)};
    s[{{mp, 2}}] = {u(rng), u(rng)};
    s[{{mp, 1}, {mq, 1}}] = {u(rng), u(rng)};
    s[{{mp, 2}, {mq, 1}}] = {u(rng), u(rng)};
    return s;
}

MultiState random_multi(std::mt19937& rng, int k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Occupancy> pool = {{}, {{mp, 1}}, {{mp, 2}}, {{mq, 1}}, {{mp, 1}, {mq, 1}}};
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    MultiState s;
    for (int t = 0; t < 12; ++t) {
        MultiOccupancy tup(k);
        for (int j = 0; j < k; ++j) tup[j] = pool[pick(rng)];
        add_term(s, tup, {u(rng), u(rng)});
    }
    return s;
}
}  // namespace

TEST_CASE("tuple enumeration and counting") {
    CHECK(split_tuples({}, 2).size() == 1);  // vacuum splits to vacuum (x) vacuum

    Occupancy two = {{mp, 2}};
    auto t = split_tuples(two, 2);
    REQUIRE(t.size() == 3);
    CHECK(split_count(two, 2) == 3);
    CHECK(t[0] == MultiOccupancy{{{mp, 2}}, {}});
    CHECK(t[1] == MultiOccupancy{{{mp, 1}}, {{mp, 1}}});
    CHECK(t[2] == MultiOccupancy{{}, {{mp, 2}}});

    Occupancy pq = {{mp, 1}, {mq, 1}};
    CHECK(split_tuples(pq, 2).size() == 4);
    CHECK(split_count(pq, 2) == 4);

    CHECK(split_count(two, 3) == 6);  // C(4,2)
    CHECK(split_tuples(two, 3).size() == 6);
    CHECK(split_count({{mp, 2}, {mq, 1}}, 3) == 18);
}

TEST_CASE("multinomial weights: two quanta split two ways gives 1,2,1") {
    Occupancy two = {{mp, 2}};
    auto t = split_tuples(two, 2);
    CHECK(multinomial_weight(two, t[0]) == 1);
    CHECK(multinomial_weight(two, t[1]) == 2);
    CHECK(multinomial_weight(two, t[2]) == 1);

    MultiState s = split(FockState{{two, 1.0}}, 2, Weighting::multinomial);
    REQUIRE(s.size() == 3);
    CHECK(std::abs(s.at(t[1]) - Complex(std::sqrt(2.0), 0.0)) < 1e-12);
    CHECK(std::abs(s.at(t[0]) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("splitting one way is the identity") {
    std::mt19937 rng(7);
    FockState s = random_state(rng);
    for (Weighting w : {Weighting::literal, Weighting::multinomial}) {
        MultiState m = split(s, 1, w);
        FockState back = merge(m, w);
        for (const auto& [occ, c] : s) {
            CHECK(std::abs(m.at({occ}) - c) < 1e-12);
            CHECK(std::abs(back.at(occ) - c) < 1e-12);
        }
    }
}

TEST_CASE("merge is the adjoint of split for both weightings") {
    std::mt19937 rng(20260815);
    for (int k : {2, 3}) {
        FockState psi = random_state(rng);
        MultiState phi = random_multi(rng, k);
        for (Weighting w : {Weighting::literal, Weighting::multinomial}) {
            Complex lhs = multi_inner(split(psi, k, w), phi);
            Complex rhs = fock_inner(psi, merge(phi, w));
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("merge after split: counting factors") {
    Occupancy two = {{mp, 2}};
    Occupancy mix = {{mp, 2}, {mq, 1}};

    // literal weighting: the factor is the number of tuples, which depends on
    // the state being split, so the literal splitter is not an isometry
    for (const Occupancy& n : {two, mix}) {
        for (int k : {2, 3}) {
            FockState in = {{n, 1.0}};
            FockState out = merge(split(in, k, Weighting::literal), Weighting::literal);
            REQUIRE(out.size() == 1);
            CHECK(std::abs(out.at(n) - Complex(static_cast<double>(split_count(n, k)), 0.0)) <
                  1e-12);
            // squared norm of the split state measures the same factor
            MultiState sp = split(in, k, Weighting::literal);
            CHECK(std::abs(multi_inner(sp, sp) -
                           Complex(static_cast<double>(split_count(n, k)), 0.0)) < 1e-12);
        }
    }

    // multinomial weighting: the factor is prod_p k^{n_p}
    FockState out2 = merge(split(FockState{{mix, 1.0}}, 2, Weighting::multinomial),
                           Weighting::multinomial);
    CHECK(std::abs(out2.at(mix) - Complex(8.0, 0.0)) < 1e-12);  // 2^2 * 2^1
    FockState out3 = merge(split(FockState{{two, 1.0}}, 3, Weighting::multinomial),
                           Weighting::multinomial);
    CHECK(std::abs(out3.at(two) - Complex(9.0, 0.0)) < 1e-12);  // 3^2
}

TEST_CASE("annihilators slide through the multinomial splitter") {
    std::mt19937 rng(99);
    FockState psi = random_state(rng);
    for (int k : {2, 3}) {
        for (int j = 0; j < k; ++j) {
            MultiState lhs = apply_annihilate_factor(
                desk, split(psi, k, Weighting::multinomial), j, mp.first, mp.second);
            MultiState rhs =
                split(apply_annihilate(desk, psi, mp.first, mp.second), k, Weighting::multinomial);
            double worst = 0.0;
            MultiState diff = lhs;
            for (const auto& [t, c] : rhs) add_term(diff, t, -c);
            for (const auto& [t, c] : diff) worst = std::max(worst, std::abs(c));
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("annihilators do not slide through the literal splitter") {
    // On |beta_{2p}> with k = 2, acting on factor 0 after the literal split
    // gives per target tuple i the coefficient sqrt(omega ((i_0)_p + 1)),
    // against sqrt(omega n_p) for split-after-annihilate: the ratio
    // sqrt(((i_0)_p + 1) / n_p) is 1 only by accident and 1/sqrt(2) in general.
    Occupancy two = {{mp, 2}};
    FockState in = {{two, 1.0}};
    MultiState lhs =
        apply_annihilate_factor(desk, split(in, 2, Weighting::literal), 0, mp.first, mp.second);
    MultiState rhs = split(apply_annihilate(desk, in, mp.first, mp.second), 2, Weighting::literal);

    MultiOccupancy t10 = {{{mp, 1}}, {}};  // came from (2,0): factor sqrt(omega*2)
    MultiOccupancy t01 = {{}, {{mp, 1}}};  // came from (1,1): factor sqrt(omega*1)
    REQUIRE(lhs.count(t10) == 1);
    REQUIRE(lhs.count(t01) == 1);
    CHECK(std::abs(lhs.at(t10) / rhs.at(t10) - 1.0) < 1e-12);
    CHECK(std::abs(lhs.at(t01) / rhs.at(t01) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("creation on a factor is adjoint to annihilation on the same factor") {
    std::mt19937 rng(5);
    MultiState a = random_multi(rng, 2);
    MultiState b = random_multi(rng, 2);
    Complex lhs = multi_inner(apply_create_factor(desk, a, 1, mp.first, mp.second), b);
    Complex rhs = multi_inner(a, apply_annihilate_factor(desk, b, 1, mp.first, mp.second));
    CHECK(std::abs(lhs - rhs) < 1e-12);
}
