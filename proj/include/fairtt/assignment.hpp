// Exact solvers for the linear sum assignment problem and for the
// generalized lexicographic bottleneck problem on perfect matchings
// (multiset edge weights, leximax objective), plus brute-force oracles.
//
// The bottleneck solver reduces multiset weights to multiplicity vectors
// over the instance's distinct values (largest value first) and runs the
// sum-assignment algorithm over those vectors with lexicographic
// comparison; the lexicographically minimal vector sum corresponds exactly
// to the leximax-minimal multiset union.
#pragma once

#include "fairtt/fairness.hpp"

#include <compare>
#include <span>
#include <vector>

namespace fairtt {

// sigma[i] = right node assigned to left node i; always a permutation.
struct Matching {
    std::vector<int> sigma;

    friend bool operator==(const Matching&, const Matching&) = default;
};

// Square scalar cost matrix, row-major. `forbidden` is either empty or
// n*n; marked edges are excluded from any matching.
struct CostMatrix {
    int n = 0;
    std::vector<long long> cost;
    std::vector<char> forbidden;

    long long at(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
    bool is_forbidden(int i, int j) const {
        return !forbidden.empty() && forbidden[static_cast<std::size_t>(i) * n + j];
    }
};

// Square instance with one weight multiset per edge (possibly empty).
struct GlbopInstance {
    int n = 0;
    std::vector<WeightMultiset> weight;
    std::vector<char> forbidden;

    const WeightMultiset& at(int i, int j) const { return weight[static_cast<std::size_t>(i) * n + j]; }
    bool is_forbidden(int i, int j) const {
        return !forbidden.empty() && forbidden[static_cast<std::size_t>(i) * n + j];
    }
};

// Multiplicity vector over the distinct values of an instance, position j
// counting occurrences of the j-th largest value. Added component-wise,
// compared lexicographically.
struct VectorCost {
    std::vector<long long> counts;

    VectorCost& operator+=(const VectorCost& o);
    VectorCost& operator-=(const VectorCost& o);
    friend VectorCost operator+(VectorCost a, const VectorCost& b) { return a += b; }
    friend VectorCost operator-(VectorCost a, const VectorCost& b) { return a -= b; }
    friend std::strong_ordering operator<=>(const VectorCost& a, const VectorCost& b);
    friend bool operator==(const VectorCost&, const VectorCost&) = default;
};

struct LsapSolution {
    Matching matching;
    long long total = 0;
};

struct GlbopSolution {
    Matching matching;
    WeightMultiset weight;
};

struct LbapSolution {
    Matching matching;
    SortedAllocation costs;
};

// Minimum-sum perfect matching. Deterministic: among optimal matchings the
// lexicographically smallest permutation is returned (row 0 gets the
// smallest column it can keep in some optimum, and so on). Throws
// std::runtime_error if forbidden edges leave no perfect matching.
LsapSolution solve_lsap(const CostMatrix& c);

// All values occurring in any edge multiset, sorted decreasingly.
std::vector<Penalty> distinct_values(const GlbopInstance& g);

// Multiplicity vector of w over `values` (sorted decreasingly). Throws
// std::invalid_argument if an item of w does not occur in `values`.
VectorCost encode_vector(const WeightMultiset& w, std::span<const Penalty> values);

// Leximax-minimal perfect matching; the returned multiset is the disjoint
// union of the chosen edges' weights. Same tie rule as solve_lsap.
GlbopSolution solve_glbop(const GlbopInstance& g);

// Scalar special case: singleton weights {c[i][j]}; returns the sorted cost
// vector of the optimal matching.
LbapSolution solve_lbap(const CostMatrix& c);

// Test oracle: enumerates all n! matchings (n <= 8 enforced) and returns a
// leximax-minimal one, first in permutation order.
GlbopSolution brute_force_glbop(const GlbopInstance& g);

// Dummy padding to a square instance: missing rows/columns get empty
// weights (zero cost for the scalar variant).
GlbopInstance pad_to_square(int rows, int cols, std::vector<WeightMultiset> weights);
CostMatrix pad_to_square(int rows, int cols, std::vector<long long> costs);

}  // namespace fairtt
