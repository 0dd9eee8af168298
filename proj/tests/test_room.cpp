#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fairtt/room.hpp"
#include "fairtt/sa.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace fairtt;

namespace {

Instance parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

// Period 0 holds e1 (one curriculum) and e2 (two curricula); with the
// isolation weight zeroed the edge weights come out as {5} / {7} for e1 and
// {5,4} / {7,6} for e2 against rooms r1/r2 — the two-course example whose
// sum-optimal and leximax-optimal assignments coincide on the matching
// {e1->r2, e2->r1} with union {7,5,4}.
struct PatternFixture {
    Instance inst = parse_text(
        "Name: pattern\nCourses: 3\nRooms: 2\nDays: 1\nPeriods_per_day: 2\nCurricula: 3\n"
        "Constraints: 0\n"
        "COURSES:\n"
        "e1 t1 1 1 15\n"
        "e2 t2 1 1 14\n"
        "g t3 1 1 11\n"
        "ROOMS:\nr1 10\nr2 8\n"
        "CURRICULA:\n"
        "u1 1 e1\n"
        "u2 1 e2\n"
        "u3 2 e2 g\n"
        "UNAVAILABILITY_CONSTRAINTS:\nEND.\n");
    SoftWeights weights{1, 5, 0, 1};  // isolation silenced to pin the pattern
    Timetable t;

    PatternFixture() {
        t = Timetable::empty(inst);
        t.slots[0] = {0, 0};  // e1 in r1
        t.slots[1] = {0, 1};  // e2 in r2
        t.slots[2] = {1, 0};  // g in r1 (11 students, capacity 10 -> cost 1)
        REQUIRE(validate_hard(inst, t).empty());
    }
};

// Small random instances that construct_initial can always satisfy.
Instance random_toy(std::mt19937_64& rng) {
    const int days = 2, ppd = 2 + static_cast<int>(rng() % 2);
    const int rooms = 2 + static_cast<int>(rng() % 2);
    const int courses = 3 + static_cast<int>(rng() % 3);
    std::ostringstream text;
    std::ostringstream body;
    for (int c = 0; c < courses; ++c) {
        body << "c" << c << " t" << (rng() % 3) << " " << 1 + rng() % 2 << " " << 1 + rng() % 2 << " "
             << 5 + rng() % 20 << "\n";
    }
    const int curricula = 2;
    std::ostringstream curr;
    for (int u = 0; u < curricula; ++u) {
        std::vector<int> members;
        for (int c = 0; c < courses; ++c) {
            if (rng() % 2) members.push_back(c);
        }
        if (members.empty()) members.push_back(static_cast<int>(rng() % courses));
        curr << "q" << u << " " << members.size();
        for (int m : members) curr << " c" << m;
        curr << "\n";
    }
    text << "Name: toy\nCourses: " << courses << "\nRooms: " << rooms << "\nDays: " << days
         << "\nPeriods_per_day: " << ppd << "\nCurricula: " << curricula << "\nConstraints: 0\n"
         << "COURSES:\n" << body.str();
    text << "ROOMS:\n";
    for (int r = 0; r < rooms; ++r) text << "r" << r << " " << 8 + 6 * r << "\n";
    text << "CURRICULA:\n" << curr.str() << "UNAVAILABILITY_CONSTRAINTS:\nEND.\n";
    return parse_text(text.str());
}

}  // namespace

TEST_CASE("subproblem weights reproduce the two-course pattern") {
    PatternFixture fx;
    const PeriodSubproblem sub = build_subproblem(fx.inst, fx.t, 0, fx.weights);
    REQUIRE(sub.courses.size() == 2);
    REQUIRE(sub.rooms.size() == 2);
    CHECK(sub.weight(0, 0) == WeightMultiset({5}));
    CHECK(sub.weight(0, 1) == WeightMultiset({7}));
    CHECK(sub.weight(1, 0) == WeightMultiset({5, 4}));
    CHECK(sub.weight(1, 1) == WeightMultiset({7, 6}));
    CHECK(sub.scalar(0, 0) == 5);
    CHECK(sub.scalar(0, 1) == 7);
    CHECK(sub.scalar(1, 0) == 9);
    CHECK(sub.scalar(1, 1) == 13);

    const Timetable solved = solve_rooms_glbop(fx.inst, fx.t, 0, fx.weights);
    CHECK(solved.slots[0].room == 1);  // e1 -> r2
    CHECK(solved.slots[1].room == 0);  // e2 -> r1

    // on this instance the scalar baseline picks the same matching
    const Timetable lsap = solve_rooms_lsap(fx.inst, fx.t, 0, fx.weights);
    CHECK(lsap.slots[0].room == 1);
    CHECK(lsap.slots[1].room == 0);
}

TEST_CASE("course in no curriculum gets empty edge weights") {
    Instance inst = parse_text(
        "Name: lone\nCourses: 1\nRooms: 2\nDays: 1\nPeriods_per_day: 1\nCurricula: 0\nConstraints: 0\n"
        "COURSES:\nc t 1 1 30\nROOMS:\nr1 10\nr2 40\nCURRICULA:\nUNAVAILABILITY_CONSTRAINTS:\nEND.\n");
    Timetable t = Timetable::empty(inst);
    t.slots[0] = {0, 0};
    const PeriodSubproblem sub = build_subproblem(inst, t, 0);
    CHECK(sub.weight(0, 0).empty());
    CHECK(sub.weight(0, 1).empty());
    CHECK(sub.scalar(0, 0) == 0);
}

TEST_CASE("build_subproblem rejects a bad period") {
    PatternFixture fx;
    CHECK_THROWS_AS(build_subproblem(fx.inst, fx.t, 99, fx.weights), std::out_of_range);
    CHECK_THROWS_AS(build_subproblem(fx.inst, fx.t, -1, fx.weights), std::out_of_range);
}

TEST_CASE("edge items equal the full re-evaluation oracle") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const Instance inst = random_toy(rng);
        Timetable t;
        try {
            t = construct_initial(inst, rng, Variant::glbop, 200);
        } catch (const ConstructionError&) {
            continue;
        }
        for (int p = 0; p < inst.periods(); ++p) {
            const PeriodSubproblem sub = build_subproblem(inst, t, p);
            for (std::size_t k = 0; k < sub.courses.size(); ++k) {
                const int course = sub.courses[k];
                for (int r = 0; r < inst.room_count(); ++r) {
                    Timetable probe = t;
                    probe.slots[sub.lectures[k]].room = r;
                    // rooms may now collide inside the period; the weights
                    // must not depend on the other courses' rooms there, so
                    // bump colliding lectures to free rooms before evaluating
                    std::uint64_t taken = std::uint64_t{1} << r;
                    for (int l = 0; l < inst.total_lectures(); ++l) {
                        if (probe.slots[l].period != p || l == sub.lectures[k]) continue;
                        if (taken >> probe.slots[l].room & 1) {
                            probe.slots[l].room = std::countr_zero(~taken);
                        }
                        taken |= std::uint64_t{1} << probe.slots[l].room;
                    }
                    REQUIRE(validate_hard(inst, probe).empty());
                    const Allocation full = allocation(inst, probe);
                    WeightMultiset expected;
                    for (int u : inst.courses[course].curricula) {
                        expected.insert(full.per_curriculum[u]);
                    }
                    REQUIRE(sub.weight(static_cast<int>(k), r) == expected);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("glbop room solve is optimal over all room permutations") {
    std::mt19937_64 rng(99);
    int instances_checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Instance inst = random_toy(rng);
        Timetable t;
        try {
            t = construct_initial(inst, rng, Variant::glbop, 200);
        } catch (const ConstructionError&) {
            continue;
        }
        ++instances_checked;
        for (int p = 0; p < inst.periods(); ++p) {
            const Timetable solved = solve_rooms_glbop(inst, t, p);
            const SortedAllocation solved_alloc = allocation(inst, solved).sorted();

            // non-worsening against the incoming timetable
            CHECK(leximax_compare(solved_alloc, allocation(inst, t).sorted()) !=
                  std::strong_ordering::greater);

            // locality: nothing outside p moved
            for (int l = 0; l < inst.total_lectures(); ++l) {
                if (t.slots[l].period != p) CHECK(t.slots[l] == solved.slots[l]);
            }

            // exhaustive: try every injective room assignment of the period
            std::vector<int> lectures;
            for (int l = 0; l < inst.total_lectures(); ++l) {
                if (t.slots[l].period == p) lectures.push_back(l);
            }
            std::vector<int> rooms(inst.room_count());
            std::iota(rooms.begin(), rooms.end(), 0);
            do {
                Timetable probe = t;
                for (std::size_t k = 0; k < lectures.size(); ++k) probe.slots[lectures[k]].room = rooms[k];
                const SortedAllocation probe_alloc = allocation(inst, probe).sorted();
                CHECK(leximax_compare(solved_alloc, probe_alloc) != std::strong_ordering::greater);
            } while (std::next_permutation(rooms.begin(), rooms.end()));
        }
    }
    CHECK(instances_checked >= 5);
}

TEST_CASE("lsap room solve minimizes the scalar sum") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        const Instance inst = random_toy(rng);
        Timetable t;
        try {
            t = construct_initial(inst, rng, Variant::lsap, 200);
        } catch (const ConstructionError&) {
            continue;
        }
        for (int p = 0; p < inst.periods(); ++p) {
            const PeriodSubproblem sub = build_subproblem(inst, t, p);
            const Timetable solved = solve_rooms_lsap(inst, t, p);
            long long solved_sum = 0;
            for (std::size_t k = 0; k < sub.lectures.size(); ++k) {
                solved_sum += sub.scalar(static_cast<int>(k), solved.slots[sub.lectures[k]].room);
            }
            std::vector<int> rooms(inst.room_count());
            std::iota(rooms.begin(), rooms.end(), 0);
            do {
                long long sum = 0;
                for (std::size_t k = 0; k < sub.lectures.size(); ++k) {
                    sum += sub.scalar(static_cast<int>(k), rooms[k]);
                }
                CHECK(solved_sum <= sum);
            } while (std::next_permutation(rooms.begin(), rooms.end()));
        }
    }
}

TEST_CASE("sum-optimal and leximax-optimal room assignments can differ") {
    // sums prefer packing the damage onto f (allocation (8,2,2), total 12);
    // leximax prefers spreading it (allocation (6,6,4), total 16)
    Instance inst = parse_text(
        "Name: split\nCourses: 3\nRooms: 2\nDays: 1\nPeriods_per_day: 2\nCurricula: 3\nConstraints: 0\n"
        "COURSES:\n"
        "e t1 1 1 12\n"
        "f t2 1 1 14\n"
        "g t3 1 1 10\n"
        "ROOMS:\nr1 10\nr2 6\n"
        "CURRICULA:\nu1 1 e\nu2 2 e g\nu3 1 f\n"
        "UNAVAILABILITY_CONSTRAINTS:\nEND.\n");
    SoftWeights w{1, 5, 0, 1};
    Timetable t = Timetable::empty(inst);
    t.slots[0] = {0, 0};  // e
    t.slots[1] = {0, 1};  // f
    t.slots[2] = {1, 0};  // g: fits, no cost
    REQUIRE(validate_hard(inst, t).empty());

    const PeriodSubproblem sub = build_subproblem(inst, t, 0, w);
    // e: {2,2} in r1, {6,6} in r2; f: {4} in r1, {8} in r2
    CHECK(sub.scalar(0, 0) == 4);
    CHECK(sub.scalar(0, 1) == 12);
    CHECK(sub.scalar(1, 0) == 4);
    CHECK(sub.scalar(1, 1) == 8);

    const Timetable by_sum = solve_rooms_lsap(inst, t, 0, w);
    CHECK(by_sum.slots[0].room == 0);  // e->r1, f->r2: total 12
    CHECK(allocation(inst, by_sum, w).sorted() == SortedAllocation::of({8, 2, 2}));

    const Timetable by_leximax = solve_rooms_glbop(inst, t, 0, w);
    CHECK(by_leximax.slots[0].room == 1);  // e->r2, f->r1: fairer
    CHECK(allocation(inst, by_leximax, w).sorted() == SortedAllocation::of({6, 6, 4}));
}

TEST_CASE("leximax can prefer the larger sum") {
    // {9,8} is fairer than {10} although its sum is larger
    GlbopInstance g;
    g.n = 2;
    g.weight = {WeightMultiset({10}), WeightMultiset({9, 8}), WeightMultiset{}, WeightMultiset{}};
    const auto exact = solve_glbop(g);
    CHECK(exact.matching.sigma == std::vector<int>{1, 0});
    CHECK(exact.weight == WeightMultiset({9, 8}));

    CostMatrix sums;
    sums.n = 2;
    sums.cost = {10, 17, 0, 0};
    CHECK(solve_lsap(sums).matching.sigma == std::vector<int>{0, 1});
}
