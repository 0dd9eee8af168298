// Simulated-annealing master solver with a Kempe-chain neighborhood,
// geometric cooling and leximax-aware acceptance. The two variants differ
// only in how the room assignment of a touched period is re-solved: exactly
// under the leximax objective, or as a scalar sum assignment.
#pragma once

#include "fairtt/cbctt.hpp"
#include "fairtt/room.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace fairtt {

struct SAConfig {
    double t_max = 5.0;
    double t_min = 0.01;
    long long iterations = 1'000'000;
    Variant variant = Variant::glbop;
    std::uint64_t seed = 0;
    int max_construction_restarts = 5000;
};

struct SAResult {
    Timetable best_timetable;
    SortedAllocation best_allocation;
    long long iterations_run = 0;
    long long accepted = 0;
    long long rejected_infeasible = 0;
    long long improved_best = 0;
};

// Optional instrumentation: the (p, q, seed lecture) draw of every
// iteration, recorded before any room re-solve happens.
struct SARunTrace {
    std::vector<std::array<int, 3>> moves;
};

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Geometric schedule: t_max * (t_min/t_max)^(k/(iterations-1)).
double temperature(const SAConfig& cfg, long long iteration);

// Feasible start: repeatedly place one lecture of the currently most
// constrained course (fewest feasible periods minus remaining lectures,
// then most conflicts, random among ties) into a random feasible period,
// restarting from scratch on dead ends; then rooms greedily by size and one
// pass of the variant's room solver per period. Throws ConstructionError
// once the restart budget is exhausted.
Timetable construct_initial(const Instance& inst, std::mt19937_64& rng, Variant variant,
                            int max_restarts = 5000);

// Swaps the Kempe chain of seed_lecture between periods p and q and
// re-solves the rooms of both periods with the variant's solver. Returns
// std::nullopt if the swapped timetable would break availability or
// overfill a period; rejection is a normal outcome.
std::optional<Timetable> kempe_move(const Instance& inst, const Timetable& t, int p, int q,
                                    int seed_lecture, Variant variant);

// Non-worsening candidates are always accepted; worsening ones with
// probability exp(-delta/temp), delta being the sum of the positive
// component-wise deteriorations over sorted positions.
bool accept(const SortedAllocation& current, const SortedAllocation& candidate, double temp,
            std::mt19937_64& rng);

// Runs the full annealing loop; fully reproducible from cfg.seed. Under the
// glbop variant the best timetable is additionally polished to a fixpoint
// of solve_rooms_glbop over all periods before being returned (re-solving
// never worsens, so the result only improves).
SAResult run(const Instance& inst, const SAConfig& cfg, SARunTrace* trace = nullptr);

}  // namespace fairtt
