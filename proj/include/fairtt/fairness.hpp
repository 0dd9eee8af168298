// Leximax (max-min fair) comparison of penalty multisets and the exact
// order isomorphism between sorted allocations of fixed length and the
// natural numbers. The isomorphism maps a non-increasing sequence s of
// length n to the number of sorted sequences lexicographically below s,
// which makes averaging and rank statistics on allocations well-defined.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairtt {

// Penalty values are dimensionless non-negative cost units.
using Penalty = long long;

// Ranks grow like binom(n+k, k); for realistic instances they exceed any
// fixed-width integer, so everything here is exact arbitrary precision.
using Rank = boost::multiprecision::cpp_int;

// A finite multiset of penalty values. Insertion order is unobservable;
// internally the items are kept sorted non-increasingly.
class WeightMultiset {
public:
    WeightMultiset() = default;
    explicit WeightMultiset(std::vector<Penalty> items);

    void insert(Penalty value);
    // Disjoint union: multiplicities add up.
    void merge(const WeightMultiset& other);

    // Non-increasing.
    const std::vector<Penalty>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    friend bool operator==(const WeightMultiset&, const WeightMultiset&) = default;

private:
    std::vector<Penalty> items_;
};

// A sequence of penalties in non-increasing order; the canonical form of a
// WeightMultiset and the object leximax comparison is defined on.
class SortedAllocation {
public:
    SortedAllocation() = default;
    explicit SortedAllocation(const WeightMultiset& m) : values_(m.items()) {}
    // Sorts its argument; accepts values in any order.
    static SortedAllocation of(std::vector<Penalty> values);

    const std::vector<Penalty>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    friend bool operator==(const SortedAllocation&, const SortedAllocation&) = default;

private:
    struct sorted_tag {};
    SortedAllocation(sorted_tag, std::vector<Penalty> v) : values_(std::move(v)) {}
    friend SortedAllocation unrank(const Rank&, std::size_t);
    friend Rank rho_max(const WeightMultiset&, Penalty);

    std::vector<Penalty> values_;
};

// Lexicographic comparison of sorted sequences; lengths may differ, a proper
// prefix precedes its extensions. `less` means strictly fairer for
// minimization problems.
std::strong_ordering leximax_compare(const SortedAllocation& a, const SortedAllocation& b);

// binom(top, bottom) in exact arithmetic; zero when bottom < 0 or bottom > top.
Rank binomial(long long top, long long bottom);

// rank(s) = sum_i binom(n + s_i - i, s_i - 1), 1-based i: the number of sorted
// length-n sequences strictly below s in lexicographic order.
Rank rank(const SortedAllocation& s);

// Same value via the head/tail recursion instead of the closed form; kept as
// an independent cross-check.
Rank rank_recursive(const SortedAllocation& s);

// Inverse of rank for fixed length n: the unique sorted sequence s with
// rank(s) == r. Greedy per position, verified by re-ranking.
SortedAllocation unrank(const Rank& r, std::size_t n);

// Order isomorphism for minimization: sort non-increasingly, then rank.
Rank rho_min(const WeightMultiset& x);

// Order isomorphism for maximization: rank of (cap,...,cap) minus the items
// sorted non-decreasingly. Every item must be <= value_cap.
Rank rho_max(const WeightMultiset& x, Penalty value_cap);

// Exact rational mean of the ranks, rounded half up, mapped back through
// unrank. All inputs must have length n; throws std::invalid_argument on an
// empty list or a length mismatch.
SortedAllocation average_allocation(std::span<const SortedAllocation> xs, std::size_t n);

// Compressed notation: non-increasing values with multiplicities as
// exponents, e.g. "6,5^3,4,2^2" or, in braced style, "6,5^{3},4,2^{2}".
// Multiplicity 1 prints bare. The parser accepts both styles.
std::string format_allocation(const SortedAllocation& a, bool braced = false);
SortedAllocation parse_allocation(std::string_view text);

}  // namespace fairtt
