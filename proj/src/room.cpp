#include "fairtt/room.hpp"

#include <bit>
#include <stdexcept>

namespace fairtt {

const char* variant_name(Variant v) { return v == Variant::glbop ? "glbop" : "lsap"; }

PeriodSubproblem build_subproblem(const Instance& inst, const Timetable& t, int period,
                                  const SoftWeights& w) {
    if (period < 0 || period >= inst.periods()) throw std::out_of_range("build_subproblem: period out of range");

    PeriodSubproblem sub;
    sub.period = period;
    for (int l = 0; l < inst.total_lectures(); ++l) {
        if (t.slots[l].period == period) {
            sub.lectures.push_back(l);
            sub.courses.push_back(inst.lecture_course(l));
        }
    }
    const int R = inst.room_count();
    sub.rooms.resize(R);
    for (int r = 0; r < R; ++r) sub.rooms[r] = r;
    if (static_cast<int>(sub.courses.size()) > R) {
        throw std::invalid_argument("build_subproblem: more courses than rooms in the period");
    }

    // Shared course penalty pieces; the pieces of the courses in the period
    // are recomputed below with the period's lecture excluded, so their
    // current room assignment never leaks into the weights.
    std::vector<long long> course_pen(inst.course_count(), 0);
    for (int c = 0; c < inst.course_count(); ++c) {
        course_pen[c] = detail::course_pieces(inst, t, c, w).sum();
    }

    sub.edge_weights.assign(sub.courses.size() * static_cast<std::size_t>(R), WeightMultiset{});
    sub.scalar_costs.assign(sub.courses.size() * static_cast<std::size_t>(R), 0);

    for (std::size_t k = 0; k < sub.courses.size(); ++k) {
        const int e = sub.courses[k];
        const int lecture = sub.lectures[k];
        const Course& course = inst.courses[e];

        // Room-independent part of course e: capacity penalties of its other
        // lectures, plus MinWorkingDays (periods only).
        long long e_fixed = 0;
        std::uint64_t other_rooms = 0;
        std::uint32_t day_mask = 0;
        const int begin = inst.lecture_begin(e);
        const int end = begin + course.lectures;
        for (int l = begin; l < end; ++l) {
            day_mask |= std::uint32_t{1} << (t.slots[l].period / inst.periods_per_day);
            if (l == lecture) continue;
            other_rooms |= std::uint64_t{1} << t.slots[l].room;
            const long long excess = course.students - inst.rooms[t.slots[l].room].capacity;
            if (excess > 0) e_fixed += w.room_capacity * excess;
        }
        const int days_used = std::popcount(day_mask);
        if (days_used < course.min_working_days) {
            e_fixed += w.min_working_days * (course.min_working_days - days_used);
        }

        // Curriculum costs with course e's contribution stripped.
        std::vector<long long> fixed_per_curriculum;
        fixed_per_curriculum.reserve(course.curricula.size());
        for (int u : course.curricula) {
            long long fixed = w.isolated_lectures * detail::isolated_lectures(inst, t, u) + e_fixed;
            for (int other : inst.curricula[u].courses) {
                if (other != e) fixed += course_pen[other];
            }
            fixed_per_curriculum.push_back(fixed);
        }

        for (int r = 0; r < R; ++r) {
            long long room_dep = 0;
            const long long excess = course.students - inst.rooms[r].capacity;
            if (excess > 0) room_dep += w.room_capacity * excess;
            room_dep +=
                w.room_stability * (std::popcount(other_rooms | (std::uint64_t{1} << r)) - 1);

            WeightMultiset& weight = sub.edge_weights[k * R + r];
            long long scalar = 0;
            for (long long fixed : fixed_per_curriculum) {
                weight.insert(fixed + room_dep);
                scalar += fixed + room_dep;
            }
            sub.scalar_costs[k * R + r] = scalar;
        }
    }
    return sub;
}

namespace {

// Only the rooms of the period's lectures change; every other slot stays
// bit-identical.
Timetable apply_matching(Timetable t, const PeriodSubproblem& sub, const Matching& m) {
    for (std::size_t k = 0; k < sub.lectures.size(); ++k) {
        t.slots[sub.lectures[k]].room = m.sigma[k];
    }
    return t;
}

}  // namespace

Timetable solve_rooms_glbop(const Instance& inst, const Timetable& t, int period, const SoftWeights& w) {
    PeriodSubproblem sub = build_subproblem(inst, t, period, w);
    if (sub.courses.empty()) return t;
    GlbopInstance g = pad_to_square(static_cast<int>(sub.courses.size()), inst.room_count(),
                                    std::move(sub.edge_weights));
    const GlbopSolution sol = solve_glbop(g);
    return apply_matching(t, sub, sol.matching);
}

Timetable solve_rooms_lsap(const Instance& inst, const Timetable& t, int period, const SoftWeights& w) {
    PeriodSubproblem sub = build_subproblem(inst, t, period, w);
    if (sub.courses.empty()) return t;
    CostMatrix c = pad_to_square(static_cast<int>(sub.courses.size()), inst.room_count(),
                                 std::move(sub.scalar_costs));
    const LsapSolution sol = solve_lsap(c);
    return apply_matching(t, sub, sol.matching);
}

Timetable solve_rooms(const Instance& inst, const Timetable& t, int period, Variant variant,
                      const SoftWeights& w) {
    return variant == Variant::glbop ? solve_rooms_glbop(inst, t, period, w)
                                     : solve_rooms_lsap(inst, t, period, w);
}

}  // namespace fairtt
