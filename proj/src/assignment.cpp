#include "fairtt/assignment.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace fairtt {

VectorCost& VectorCost::operator+=(const VectorCost& o) {
    if (counts.size() != o.counts.size()) throw std::invalid_argument("VectorCost: size mismatch");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
}

VectorCost& VectorCost::operator-=(const VectorCost& o) {
    if (counts.size() != o.counts.size()) throw std::invalid_argument("VectorCost: size mismatch");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] -= o.counts[i];
    return *this;
}

std::strong_ordering operator<=>(const VectorCost& a, const VectorCost& b) {
    return std::lexicographical_compare_three_way(a.counts.begin(), a.counts.end(), b.counts.begin(),
                                                  b.counts.end());
}

namespace {

template <class Cost>
struct JvOutcome {
    bool feasible = false;
    std::vector<int> col_row;  // 1-based: col_row[j] = row matched to column j
    std::vector<Cost> u, v;    // 1-based dual potentials
};

// Shortest-augmenting-path sum assignment with dual potentials. Works over
// any totally ordered abelian group: the only operations on costs are
// addition, subtraction and comparison, and all reduced costs stay
// non-negative because the input costs are. Forbidden edges never enter the
// alternating tree; if a row cannot be augmented the instance is infeasible.
template <class Cost, class CostFn, class ForbFn>
JvOutcome<Cost> jv_core(int n, CostFn&& cost, ForbFn&& forb, const Cost& zero) {
    std::vector<Cost> u(n + 1, zero), v(n + 1, zero);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<Cost> minv(n + 1, zero);
    std::vector<char> minv_inf(n + 1), used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv_inf.begin(), minv_inf.end(), char(1));
        std::fill(used.begin(), used.end(), char(0));
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            Cost delta = zero;
            bool have_delta = false;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                if (!forb(i0 - 1, j - 1)) {
                    Cost cur = cost(i0 - 1, j - 1);
                    cur -= u[i0];
                    cur -= v[j];
                    if (minv_inf[j] || cur < minv[j]) {
                        minv[j] = std::move(cur);
                        minv_inf[j] = 0;
                        way[j] = j0;
                    }
                }
                if (!minv_inf[j] && (!have_delta || minv[j] < delta)) {
                    delta = minv[j];
                    have_delta = true;
                    j1 = j;
                }
            }
            if (!have_delta) return {};  // every reachable column exhausted
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else if (!minv_inf[j]) {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    JvOutcome<Cost> out;
    out.feasible = true;
    out.col_row = std::move(p);
    out.u = std::move(u);
    out.v = std::move(v);
    return out;
}

// Among the perfect matchings of the tight subgraph (all of which are
// optimal, and which contain every optimal matching by complementary
// slackness), pick the lexicographically smallest permutation: fix rows in
// ascending order, trying columns in ascending order, keeping the rest
// rematchable.
std::vector<int> lex_smallest_matching(int n, const std::vector<std::vector<int>>& adj,
                                       std::vector<int> row_col) {
    std::vector<int> col_row(n, -1);
    for (int i = 0; i < n; ++i) col_row[row_col[i]] = i;
    std::vector<char> col_fixed(n, 0), visited(n, 0);

    std::function<bool(int)> rematch = [&](int row) -> bool {
        for (int c : adj[row]) {
            if (col_fixed[c] || visited[c]) continue;
            visited[c] = 1;
            if (col_row[c] == -1 || rematch(col_row[c])) {
                row_col[row] = c;
                col_row[c] = row;
                return true;
            }
        }
        return false;
    };

    for (int i = 0; i < n; ++i) {
        for (int c : adj[i]) {
            if (col_fixed[c]) continue;
            if (row_col[i] == c) break;  // nothing smaller worked; keep it
            const int old_c = row_col[i];
            const int displaced = col_row[c];
            row_col[i] = c;
            col_row[c] = i;
            row_col[displaced] = -1;
            col_row[old_c] = -1;
            std::fill(visited.begin(), visited.end(), char(0));
            visited[c] = 1;
            if (rematch(displaced)) break;
            row_col[i] = old_c;
            col_row[old_c] = i;
            row_col[displaced] = c;
            col_row[c] = displaced;
        }
        col_fixed[row_col[i]] = 1;
    }
    return row_col;
}

template <class Cost, class CostFn, class ForbFn>
std::vector<int> solve_generic(int n, CostFn&& cost, ForbFn&& forb, const Cost& zero) {
    auto jv = jv_core<Cost>(n, cost, forb, zero);
    if (!jv.feasible) throw std::runtime_error("assignment: forbidden edges leave no perfect matching");

    std::vector<int> row_col(n, -1);
    for (int j = 1; j <= n; ++j) row_col[jv.col_row[j] - 1] = j - 1;

    std::vector<std::vector<int>> tight(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (forb(i, j)) continue;
            Cost reduced = cost(i, j);
            reduced -= jv.u[i + 1];
            reduced -= jv.v[j + 1];
            if (reduced == zero) tight[i].push_back(j);
        }
    }
    return lex_smallest_matching(n, tight, std::move(row_col));
}

}  // namespace

LsapSolution solve_lsap(const CostMatrix& c) {
    for (long long v : c.cost) {
        if (v < 0) throw std::invalid_argument("solve_lsap: negative cost");
    }
    auto cost = [&c](int i, int j) { return c.at(i, j); };
    auto forb = [&c](int i, int j) { return c.is_forbidden(i, j); };
    LsapSolution sol;
    sol.matching.sigma = solve_generic<long long>(c.n, cost, forb, 0LL);
    for (int i = 0; i < c.n; ++i) sol.total += c.at(i, sol.matching.sigma[i]);
    return sol;
}

std::vector<Penalty> distinct_values(const GlbopInstance& g) {
    std::vector<Penalty> values;
    for (const auto& w : g.weight) {
        values.insert(values.end(), w.items().begin(), w.items().end());
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

VectorCost encode_vector(const WeightMultiset& w, std::span<const Penalty> values) {
    VectorCost vc;
    vc.counts.assign(values.size(), 0);
    for (Penalty item : w.items()) {
        auto it = std::lower_bound(values.begin(), values.end(), item, std::greater<>());
        if (it == values.end() || *it != item) {
            throw std::invalid_argument("encode_vector: item not in value list");
        }
        ++vc.counts[static_cast<std::size_t>(it - values.begin())];
    }
    return vc;
}

GlbopSolution solve_glbop(const GlbopInstance& g) {
    const auto values = distinct_values(g);
    std::vector<VectorCost> encoded;
    encoded.reserve(g.weight.size());
    for (const auto& w : g.weight) encoded.push_back(encode_vector(w, values));

    VectorCost zero;
    zero.counts.assign(values.size(), 0);
    auto cost = [&](int i, int j) -> const VectorCost& {
        return encoded[static_cast<std::size_t>(i) * g.n + j];
    };
    auto forb = [&g](int i, int j) { return g.is_forbidden(i, j); };

    GlbopSolution sol;
    sol.matching.sigma = solve_generic<VectorCost>(g.n, cost, forb, zero);
    for (int i = 0; i < g.n; ++i) sol.weight.merge(g.at(i, sol.matching.sigma[i]));
    return sol;
}

LbapSolution solve_lbap(const CostMatrix& c) {
    GlbopInstance g;
    g.n = c.n;
    g.forbidden = c.forbidden;
    g.weight.reserve(c.cost.size());
    for (long long v : c.cost) g.weight.push_back(WeightMultiset({v}));
    auto sol = solve_glbop(g);
    return LbapSolution{std::move(sol.matching), SortedAllocation(sol.weight)};
}

GlbopSolution brute_force_glbop(const GlbopInstance& g) {
    if (g.n > 8) throw std::invalid_argument("brute_force_glbop: instance too large for the oracle");
    std::vector<int> perm(g.n);
    std::iota(perm.begin(), perm.end(), 0);

    GlbopSolution best;
    bool have_best = false;
    do {
        bool ok = true;
        for (int i = 0; i < g.n && ok; ++i) ok = !g.is_forbidden(i, perm[i]);
        if (!ok) continue;
        WeightMultiset total;
        for (int i = 0; i < g.n; ++i) total.merge(g.at(i, perm[i]));
        if (!have_best ||
            leximax_compare(SortedAllocation(total), SortedAllocation(best.weight)) == std::strong_ordering::less) {
            best.matching.sigma = perm;
            best.weight = std::move(total);
            have_best = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (!have_best) throw std::runtime_error("brute_force_glbop: no feasible matching");
    return best;
}

GlbopInstance pad_to_square(int rows, int cols, std::vector<WeightMultiset> weights) {
    if (static_cast<std::size_t>(rows) * cols != weights.size()) {
        throw std::invalid_argument("pad_to_square: dimension mismatch");
    }
    const int n = std::max(rows, cols);
    GlbopInstance g;
    g.n = n;
    g.weight.assign(static_cast<std::size_t>(n) * n, WeightMultiset{});
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            g.weight[static_cast<std::size_t>(i) * n + j] = std::move(weights[static_cast<std::size_t>(i) * cols + j]);
        }
    }
    return g;
}

CostMatrix pad_to_square(int rows, int cols, std::vector<long long> costs) {
    if (static_cast<std::size_t>(rows) * cols != costs.size()) {
        throw std::invalid_argument("pad_to_square: dimension mismatch");
    }
    const int n = std::max(rows, cols);
    CostMatrix c;
    c.n = n;
    c.cost.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            c.cost[static_cast<std::size_t>(i) * n + j] = costs[static_cast<std::size_t>(i) * cols + j];
        }
    }
    return c;
}

}  // namespace fairtt
