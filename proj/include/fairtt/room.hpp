// The room assignment subproblem for one period: the timetable outside the
// period is fixed, and the courses scheduled in the period are matched to
// rooms. Solved either exactly under the leximax objective (one weight
// multiset per edge, one item per curriculum of the course) or as a plain
// sum assignment over the scalarized costs.
#pragma once

#include "fairtt/assignment.hpp"
#include "fairtt/cbctt.hpp"

namespace fairtt {

enum class Variant { glbop, lsap };

const char* variant_name(Variant v);

struct PeriodSubproblem {
    int period = -1;
    std::vector<int> courses;   // courses scheduled in the period, by lecture order
    std::vector<int> lectures;  // the corresponding lecture ids
    std::vector<int> rooms;     // all room indices

    // courses.size() x rooms.size(), row-major. edge_weights[e][r] holds,
    // for each curriculum containing course e, the curriculum's full cost
    // with e's lecture moved to room r and everything else unchanged.
    std::vector<WeightMultiset> edge_weights;
    std::vector<long long> scalar_costs;  // sum of the multiset items

    const WeightMultiset& weight(int course_pos, int room) const {
        return edge_weights[static_cast<std::size_t>(course_pos) * rooms.size() + room];
    }
    long long scalar(int course_pos, int room) const {
        return scalar_costs[static_cast<std::size_t>(course_pos) * rooms.size() + room];
    }
};

// Throws std::out_of_range for a bad period; requires a feasible timetable.
PeriodSubproblem build_subproblem(const Instance& inst, const Timetable& t, int period,
                                  const SoftWeights& w = {});

// Returns t with the period's room assignment replaced by an optimal one;
// everything outside the period is untouched.
Timetable solve_rooms_glbop(const Instance& inst, const Timetable& t, int period,
                            const SoftWeights& w = {});
Timetable solve_rooms_lsap(const Instance& inst, const Timetable& t, int period,
                           const SoftWeights& w = {});
Timetable solve_rooms(const Instance& inst, const Timetable& t, int period, Variant variant,
                      const SoftWeights& w = {});

}  // namespace fairtt
