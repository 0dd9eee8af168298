#include "fairtt/sa.hpp"

#include "fairtt/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace fairtt {

double temperature(const SAConfig& cfg, long long iteration) {
    if (cfg.iterations <= 1) return cfg.t_max;
    const double frac = static_cast<double>(iteration) / static_cast<double>(cfg.iterations - 1);
    return cfg.t_max * std::pow(cfg.t_min / cfg.t_max, frac);
}

namespace {

// One constructive attempt; returns false on a dead end.
bool try_construct(const Instance& inst, std::mt19937_64& rng, Timetable& out) {
    const int nc = inst.course_count();
    const int P = inst.periods();
    const int R = inst.room_count();
    const std::uint64_t all_periods = P == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << P) - 1;

    std::vector<int> remaining(nc);
    std::vector<std::uint64_t> course_used(nc, 0);
    std::vector<std::uint64_t> curriculum_busy(inst.curriculum_count(), 0);
    std::vector<std::uint64_t> teacher_busy(inst.teachers.size(), 0);
    std::vector<int> period_load(P, 0);
    std::uint64_t full_periods = 0;

    int unplaced = 0;
    for (int c = 0; c < nc; ++c) {
        remaining[c] = inst.courses[c].lectures;
        unplaced += remaining[c];
    }

    auto feasible_mask = [&](int c) {
        std::uint64_t busy = inst.unavailable_mask(c) | course_used[c] | full_periods |
                             teacher_busy[inst.courses[c].teacher];
        for (int u : inst.courses[c].curricula) busy |= curriculum_busy[u];
        return all_periods & ~busy;
    };

    out = Timetable::empty(inst);
    std::vector<int> ties;
    while (unplaced > 0) {
        int pick = -1;
        int best_slack = 0;
        ties.clear();
        for (int c = 0; c < nc; ++c) {
            if (remaining[c] == 0) continue;
            const int slack = std::popcount(feasible_mask(c)) - remaining[c];
            if (slack < 0) return false;
            if (pick == -1 || slack < best_slack ||
                (slack == best_slack &&
                 inst.conflict_degree(c) > inst.conflict_degree(pick))) {
                pick = c;
                best_slack = slack;
                ties.assign(1, c);
            } else if (slack == best_slack &&
                       inst.conflict_degree(c) == inst.conflict_degree(pick)) {
                ties.push_back(c);
            }
        }
        if (ties.size() > 1) pick = ties[uniform_below(rng, ties.size())];

        const std::uint64_t mask = feasible_mask(pick);
        const int nth = static_cast<int>(uniform_below(rng, std::popcount(mask)));
        std::uint64_t m = mask;
        for (int k = 0; k < nth; ++k) m &= m - 1;
        const int period = std::countr_zero(m);

        const int lecture = inst.lecture_begin(pick) + inst.courses[pick].lectures - remaining[pick];
        out.slots[lecture].period = period;
        course_used[pick] |= std::uint64_t{1} << period;
        teacher_busy[inst.courses[pick].teacher] |= std::uint64_t{1} << period;
        for (int u : inst.courses[pick].curricula) curriculum_busy[u] |= std::uint64_t{1} << period;
        if (++period_load[period] == R) full_periods |= std::uint64_t{1} << period;
        --remaining[pick];
        --unplaced;
    }

    // Rooms: biggest course to biggest room, per period.
    for (int p = 0; p < P; ++p) {
        std::vector<int> lectures;
        for (int l = 0; l < inst.total_lectures(); ++l) {
            if (out.slots[l].period == p) lectures.push_back(l);
        }
        std::sort(lectures.begin(), lectures.end(), [&](int a, int b) {
            const int sa = inst.courses[inst.lecture_course(a)].students;
            const int sb = inst.courses[inst.lecture_course(b)].students;
            return sa != sb ? sa > sb : a < b;
        });
        std::vector<int> rooms(R);
        std::iota(rooms.begin(), rooms.end(), 0);
        std::sort(rooms.begin(), rooms.end(), [&](int a, int b) {
            return inst.rooms[a].capacity != inst.rooms[b].capacity
                       ? inst.rooms[a].capacity > inst.rooms[b].capacity
                       : a < b;
        });
        for (std::size_t k = 0; k < lectures.size(); ++k) out.slots[lectures[k]].room = rooms[k];
    }
    return true;
}

}  // namespace

Timetable construct_initial(const Instance& inst, std::mt19937_64& rng, Variant variant,
                            int max_restarts) {
    Timetable t;
    bool built = false;
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        if (try_construct(inst, rng, t)) {
            built = true;
            break;
        }
    }
    if (!built) {
        throw ConstructionError("no feasible timetable found within " +
                                std::to_string(max_restarts) + " construction attempts");
    }
    t.canonicalize(inst);
    for (int p = 0; p < inst.periods(); ++p) t = solve_rooms(inst, t, p, variant);
    return t;
}

std::optional<Timetable> kempe_move(const Instance& inst, const Timetable& t, int p, int q,
                                    int seed_lecture, Variant variant) {
    const int R = inst.room_count();
    std::vector<int> side_p, side_q;
    for (int l = 0; l < inst.total_lectures(); ++l) {
        if (t.slots[l].period == p) side_p.push_back(l);
        else if (t.slots[l].period == q) side_q.push_back(l);
    }

    // Kempe chain: connected component of the conflict graph on the two
    // periods' lectures containing the seed (edges only run between the
    // periods; within a period a feasible timetable has no conflicts).
    std::vector<int> chain{seed_lecture};
    std::vector<char> in_chain(inst.total_lectures(), 0);
    in_chain[seed_lecture] = 1;
    for (std::size_t head = 0; head < chain.size(); ++head) {
        const int l = chain[head];
        const int cl = inst.lecture_course(l);
        const auto& other_side = t.slots[l].period == p ? side_q : side_p;
        for (int m : other_side) {
            if (in_chain[m]) continue;
            const int cm = inst.lecture_course(m);
            if (cl == cm || inst.conflicts(cl, cm)) {
                in_chain[m] = 1;
                chain.push_back(m);
            }
        }
    }

    int to_q = 0, to_p = 0;
    for (int l : chain) (t.slots[l].period == p ? to_q : to_p)++;
    if (static_cast<int>(side_p.size()) - to_q + to_p > R) return std::nullopt;
    if (static_cast<int>(side_q.size()) - to_p + to_q > R) return std::nullopt;

    for (int l : chain) {
        const int c = inst.lecture_course(l);
        const int target = t.slots[l].period == p ? q : p;
        if (!inst.available(c, target)) return std::nullopt;
        // A second lecture of the course already sits in the target period
        // and is not moving out: cannot happen for a connected chain, but
        // the check keeps the contract explicit.
        for (int l2 = inst.lecture_begin(c); l2 < inst.lecture_begin(c) + inst.courses[c].lectures; ++l2) {
            if (l2 != l && !in_chain[l2] && t.slots[l2].period == target) return std::nullopt;
        }
    }

    Timetable next = t;
    for (int l : chain) next.slots[l].period = next.slots[l].period == p ? q : p;
    next.canonicalize(inst);

    // Rooms within the touched periods may now collide; make them injective
    // again (first come keeps its room) before the proper re-solve.
    for (int period : {std::min(p, q), std::max(p, q)}) {
        std::uint64_t taken = 0;
        std::vector<int> homeless;
        for (int l = 0; l < inst.total_lectures(); ++l) {
            if (next.slots[l].period != period) continue;
            const std::uint64_t bit = std::uint64_t{1} << next.slots[l].room;
            if (taken & bit) homeless.push_back(l);
            else taken |= bit;
        }
        for (int l : homeless) {
            const int r = std::countr_zero(~taken);
            next.slots[l].room = r;
            taken |= std::uint64_t{1} << r;
        }
        next = solve_rooms(inst, next, period, variant);
    }
    return next;
}

bool accept(const SortedAllocation& current, const SortedAllocation& candidate, double temp,
            std::mt19937_64& rng) {
    if (leximax_compare(candidate, current) != std::strong_ordering::greater) return true;
    long long delta = 0;
    const auto& cur = current.values();
    const auto& cand = candidate.values();
    for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cand[i] > cur[i]) delta += cand[i] - cur[i];
    }
    return uniform_real(rng) < std::exp(-static_cast<double>(delta) / temp);
}

SAResult run(const Instance& inst, const SAConfig& cfg, SARunTrace* trace) {
    std::mt19937_64 rng(cfg.seed);
    const int P = inst.periods();

    Timetable current = construct_initial(inst, rng, cfg.variant, cfg.max_construction_restarts);
    SortedAllocation current_alloc = allocation(inst, current).sorted();

    SAResult result;
    result.best_timetable = current;
    result.best_allocation = current_alloc;

    std::vector<int> period_load(P, 0);
    for (const auto& s : current.slots) ++period_load[s.period];

    const bool moves_possible = P >= 2 && inst.total_lectures() > 0;
    for (long long k = 0; moves_possible && k < cfg.iterations; ++k) {
        const double temp = temperature(cfg, k);

        int p, q;
        do {
            p = static_cast<int>(uniform_below(rng, P));
            q = static_cast<int>(uniform_below(rng, P));
        } while (p == q || period_load[p] + period_load[q] == 0);

        const int pair_count = period_load[p] + period_load[q];
        int nth = static_cast<int>(uniform_below(rng, pair_count));
        int seed_lecture = -1;
        for (int l = 0; l < inst.total_lectures(); ++l) {
            const int pl = current.slots[l].period;
            if (pl == p || pl == q) {
                if (nth-- == 0) {
                    seed_lecture = l;
                    break;
                }
            }
        }
        if (trace) trace->moves.push_back({p, q, seed_lecture});

        auto candidate = kempe_move(inst, current, p, q, seed_lecture, cfg.variant);
        if (!candidate) {
            ++result.rejected_infeasible;
            continue;
        }
        SortedAllocation cand_alloc = allocation(inst, *candidate).sorted();
        if (accept(current_alloc, cand_alloc, temp, rng)) {
            current = std::move(*candidate);
            current_alloc = std::move(cand_alloc);
            ++result.accepted;
            for (auto& load : period_load) load = 0;
            for (const auto& s : current.slots) ++period_load[s.period];
            if (leximax_compare(current_alloc, result.best_allocation) == std::strong_ordering::less) {
                result.best_timetable = current;
                result.best_allocation = current_alloc;
                ++result.improved_best;
            }
        }
    }
    result.iterations_run = cfg.iterations;

    if (cfg.variant == Variant::glbop) {
        // Drive the best timetable to a fixpoint of the exact room solver;
        // each re-solve is non-worsening, so this only improves the result.
        bool changed = true;
        while (changed) {
            changed = false;
            for (int p = 0; p < P; ++p) {
                Timetable polished = solve_rooms_glbop(inst, result.best_timetable, p);
                SortedAllocation alloc = allocation(inst, polished).sorted();
                if (leximax_compare(alloc, result.best_allocation) == std::strong_ordering::less) {
                    result.best_timetable = std::move(polished);
                    result.best_allocation = std::move(alloc);
                    changed = true;
                }
            }
        }
    }
    return result;
}

}  // namespace fairtt
