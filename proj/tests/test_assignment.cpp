#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fairtt/assignment.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace fairtt;

namespace {

CostMatrix matrix(int n, std::vector<long long> entries) {
    CostMatrix c;
    c.n = n;
    c.cost = std::move(entries);
    return c;
}

GlbopInstance glbop(int n, std::vector<WeightMultiset> weights) {
    GlbopInstance g;
    g.n = n;
    g.weight = std::move(weights);
    return g;
}

// The weights of the worked two-course/two-room example: rows are courses
// e1, e2; columns rooms r1, r2.
GlbopInstance example_instance() {
    return glbop(2, {WeightMultiset({5}), WeightMultiset({7}), WeightMultiset({5, 4}),
                     WeightMultiset({7, 6})});
}

long long brute_force_lsap(const CostMatrix& c) {
    std::vector<int> perm(c.n);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = -1;
    do {
        bool ok = true;
        long long total = 0;
        for (int i = 0; i < c.n && ok; ++i) {
            if (c.is_forbidden(i, perm[i])) ok = false;
            else total += c.at(i, perm[i]);
        }
        if (ok && (best < 0 || total < best)) best = total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

GlbopInstance random_glbop(std::mt19937_64& rng, int max_n = 6, int max_card = 3, int max_value = 8) {
    const int n = 1 + static_cast<int>(rng() % max_n);
    std::vector<WeightMultiset> weights;
    for (int e = 0; e < n * n; ++e) {
        std::vector<Penalty> items(rng() % (max_card + 1));
        for (auto& v : items) v = static_cast<Penalty>(rng() % (max_value + 1));
        weights.emplace_back(std::move(items));
    }
    return glbop(n, std::move(weights));
}

}  // namespace

TEST_CASE("solve_lsap basics") {
    CostMatrix c = matrix(3, {0, 9, 9, 9, 0, 9, 9, 9, 0});
    const auto sol = solve_lsap(c);
    CHECK(sol.total == 0);
    CHECK(sol.matching.sigma == std::vector<int>{0, 1, 2});

    // all-equal entries: any permutation is optimal; the deterministic tie
    // rule yields the identity
    const auto flat = solve_lsap(matrix(3, std::vector<long long>(9, 4)));
    CHECK(flat.total == 12);
    CHECK(flat.matching.sigma == std::vector<int>{0, 1, 2});
}

TEST_CASE("solve_lsap equals brute force on random instances") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<long long> entries(n * n);
        for (auto& e : entries) e = static_cast<long long>(rng() % 21);
        const CostMatrix c = matrix(n, std::move(entries));
        const auto sol = solve_lsap(c);
        CHECK(sol.total == brute_force_lsap(c));
        // sanity: sigma is a permutation
        std::vector<int> seen(n, 0);
        for (int i = 0; i < n; ++i) seen[sol.matching.sigma[i]]++;
        CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
    }
}

TEST_CASE("solve_lsap never loses to random permutations") {
    std::mt19937_64 rng(3);
    const int n = 9;
    std::vector<long long> entries(n * n);
    for (auto& e : entries) e = static_cast<long long>(rng() % 100);
    const CostMatrix c = matrix(n, std::move(entries));
    const auto sol = solve_lsap(c);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        long long total = 0;
        for (int i = 0; i < n; ++i) total += c.at(i, perm[i]);
        CHECK(sol.total <= total);
    }
}

TEST_CASE("distinct_values") {
    CHECK(distinct_values(example_instance()) == std::vector<Penalty>{7, 6, 5, 4});
    CHECK(distinct_values(glbop(2, std::vector<WeightMultiset>(4))).empty());
    CHECK(distinct_values(glbop(1, {WeightMultiset({3})})) == std::vector<Penalty>{3});
}

TEST_CASE("encode_vector") {
    const std::vector<Penalty> values{7, 6, 5, 4};
    CHECK(encode_vector(WeightMultiset({5, 4}), values).counts == std::vector<long long>{0, 0, 1, 1});
    CHECK(encode_vector(WeightMultiset{}, values).counts == std::vector<long long>{0, 0, 0, 0});
    CHECK(encode_vector(WeightMultiset({7, 7, 4}), values).counts == std::vector<long long>{2, 0, 0, 1});
    CHECK_THROWS_AS(encode_vector(WeightMultiset({3}), values), std::invalid_argument);
}

TEST_CASE("vector arithmetic matches multiset union") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Penalty> items_a(rng() % 5), items_b(rng() % 5);
        for (auto& v : items_a) v = static_cast<Penalty>(rng() % 6);
        for (auto& v : items_b) v = static_cast<Penalty>(rng() % 6);
        WeightMultiset a(items_a), b(items_b);
        WeightMultiset ab = a;
        ab.merge(b);
        GlbopInstance g = glbop(1, {ab});
        const auto values = distinct_values(g);
        CHECK(encode_vector(ab, values) == encode_vector(a, values) + encode_vector(b, values));
    }
}

TEST_CASE("solve_glbop on the worked example") {
    const auto sol = solve_glbop(example_instance());
    CHECK(sol.matching.sigma == std::vector<int>{1, 0});  // e1 -> r2, e2 -> r1
    CHECK(sol.weight == WeightMultiset({7, 5, 4}));
}

TEST_CASE("solve_glbop degenerate cases") {
    // singleton equal weights: any matching gives n copies of v
    GlbopInstance g = glbop(3, std::vector<WeightMultiset>(9, WeightMultiset({2})));
    const auto sol = solve_glbop(g);
    CHECK(sol.weight == WeightMultiset({2, 2, 2}));
    CHECK(sol.matching.sigma == std::vector<int>{0, 1, 2});  // tie rule

    const auto one = solve_glbop(glbop(1, {WeightMultiset({4, 1})}));
    CHECK(one.weight == WeightMultiset({4, 1}));
}

TEST_CASE("solve_glbop equals the brute-force oracle") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const GlbopInstance g = random_glbop(rng);
        const auto fast = solve_glbop(g);
        const auto oracle = brute_force_glbop(g);
        REQUIRE(fast.weight == oracle.weight);
        // matchings must agree as well: both sides tie-break to the
        // lexicographically smallest optimal permutation
        REQUIRE(fast.matching == oracle.matching);
    }
}

TEST_CASE("GLBOP dominance: scalarizing to sums never beats the leximax solver") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const GlbopInstance g = random_glbop(rng, 5);
        std::vector<long long> sums(g.weight.size(), 0);
        for (std::size_t e = 0; e < g.weight.size(); ++e) {
            for (Penalty v : g.weight[e].items()) sums[e] += v;
        }
        const auto lsap_sol = solve_lsap(matrix(g.n, std::move(sums)));
        WeightMultiset via_sums;
        for (int i = 0; i < g.n; ++i) via_sums.merge(g.at(i, lsap_sol.matching.sigma[i]));
        const auto exact = solve_glbop(g);
        CHECK(leximax_compare(SortedAllocation(exact.weight), SortedAllocation(via_sums)) !=
              std::strong_ordering::greater);
    }
}

TEST_CASE("dummy row padding never changes the optimum on real edges") {
    // the production shape: fewer rows (courses) than columns (rooms);
    // padding adds empty-weight rows that absorb the surplus columns
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const int cols = 3 + static_cast<int>(rng() % 3);
        const int rows = 1 + static_cast<int>(rng() % (cols - 1));
        std::vector<WeightMultiset> rect;
        for (int e = 0; e < rows * cols; ++e) {
            std::vector<Penalty> items(rng() % 3);
            for (auto& v : items) v = static_cast<Penalty>(rng() % 7);
            rect.emplace_back(std::move(items));
        }

        GlbopInstance padded = pad_to_square(rows, cols, rect);
        const auto sol = solve_glbop(padded);
        WeightMultiset real_part;
        for (int i = 0; i < rows; ++i) {
            real_part.merge(rect[static_cast<std::size_t>(i) * cols + sol.matching.sigma[i]]);
        }

        // oracle: leximax-best union over all injective row->column maps
        std::vector<int> cols_perm(cols);
        std::iota(cols_perm.begin(), cols_perm.end(), 0);
        WeightMultiset best;
        bool have_best = false;
        do {
            WeightMultiset total;
            for (int i = 0; i < rows; ++i) {
                total.merge(rect[static_cast<std::size_t>(i) * cols + cols_perm[i]]);
            }
            if (!have_best || leximax_compare(SortedAllocation(total), SortedAllocation(best)) ==
                                  std::strong_ordering::less) {
                best = std::move(total);
                have_best = true;
            }
        } while (std::next_permutation(cols_perm.begin(), cols_perm.end()));
        CHECK(real_part == best);
    }
}

TEST_CASE("solve_lbap on the worked example's scalar projections") {
    const auto first = solve_lbap(matrix(2, {5, 7, 5, 7}));
    CHECK(SortedAllocation(WeightMultiset({7, 5})) == first.costs);
    const auto second = solve_lbap(matrix(2, {5, 7, 4, 6}));
    CHECK(SortedAllocation(WeightMultiset({6, 5})) == second.costs);
    const auto zero = solve_lbap(matrix(3, std::vector<long long>(9, 0)));
    CHECK(zero.costs == SortedAllocation::of({0, 0, 0}));
}

TEST_CASE("forbidden edges are never chosen") {
    CostMatrix c = matrix(3, {0, 5, 5, 5, 0, 5, 5, 5, 0});
    c.forbidden.assign(9, 0);
    c.forbidden[0] = 1;  // (0,0) blocked despite being cheapest
    const auto sol = solve_lsap(c);
    CHECK(sol.matching.sigma[0] != 0);
    CHECK(sol.total == 10);

    // fully blocked row -> no perfect matching
    CostMatrix blocked = matrix(2, {1, 1, 1, 1});
    blocked.forbidden = {1, 1, 0, 0};
    CHECK_THROWS_AS(solve_lsap(blocked), std::runtime_error);
}

TEST_CASE("brute_force_glbop guards its size limit") {
    GlbopInstance g = glbop(1, {WeightMultiset({1})});
    g.n = 9;
    g.weight.assign(81, WeightMultiset{});
    CHECK_THROWS_AS(brute_force_glbop(g), std::invalid_argument);
}
