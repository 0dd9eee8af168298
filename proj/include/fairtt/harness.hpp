// Experiment pipeline: batched SA runs over instances and variants with
// per-run derived seeds, line-delimited run records, fairness-aware
// aggregation (best and rank-average allocation) and the one-sided
// Wilcoxon rank-sum test on rank values.
#pragma once

#include "fairtt/fairness.hpp"
#include "fairtt/room.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fairtt {

struct ExperimentSpec {
    std::vector<std::string> instances;  // paths to .ctt/.ectt files
    std::vector<Variant> variants{Variant::glbop, Variant::lsap};
    int runs = 50;
    long long iterations = 1'000'000;
    std::uint64_t base_seed = 2007;
    double t_max = 5.0;
    double t_min = 0.01;
    std::string out_dir = "results";
    int jobs = 0;   // 0: hardware concurrency
    int scale = 1;  // divides runs and iterations for smoke experiments

    int effective_runs() const { return std::max(1, runs / std::max(1, scale)); }
    long long effective_iterations() const {
        return std::max<long long>(1, iterations / std::max(1, scale));
    }
};

// Key-value text: "key = value" (or "key value"), '#' comments. Relative
// instance paths are resolved against base_dir.
ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir);

struct RunRecord {
    std::string instance;  // file stem, e.g. "comp11"
    Variant variant = Variant::glbop;
    std::uint64_t seed = 0;
    SortedAllocation best;
    Rank rank;  // rho_min of best
    long long iterations = 0;
    long long wall_ms = 0;
};

// Schema-versioned line format; from_line rejects unknown versions.
std::string record_to_line(const RunRecord& r);
RunRecord record_from_line(const std::string& line);

std::vector<RunRecord> load_records(const std::string& path);

struct AggregateResult {
    SortedAllocation best;
    SortedAllocation average;
};

// best = leximax minimum, average = rank-mean rounded half up, unranked.
// All records must share one instance and allocation length.
AggregateResult aggregate(std::span<const RunRecord> records);

struct WilcoxonResult {
    double p_value = 1.0;
    bool significant = false;
    bool exact = false;
};

// Tests H1: a stochastically smaller than b. Exact enumeration when
// |a|+|b| <= 20 and tie-free, otherwise normal approximation with midrank
// tie handling and continuity correction.
WilcoxonResult wilcoxon_one_sided(std::span<const Rank> a, std::span<const Rank> b, double alpha);

namespace detail {

struct RankSumStats {
    double rank_sum_a = 0;
    std::size_t n1 = 0, n2 = 0;
    bool ties = false;
    double tie_term = 0;  // sum of t^3 - t over tie groups
};

RankSumStats rank_sum(std::span<const Rank> a, std::span<const Rank> b);
// P(rank sum of a <= observed) by enumerating subset sums; tie-free only.
double wilcoxon_exact_p(const RankSumStats& s);
// Normal approximation with tie and continuity correction.
double wilcoxon_normal_p(const RankSumStats& s);

}  // namespace detail

// Runs the whole spec, appending records to <out_dir>/records.txt through a
// single serialized writer; per-run seeds come from derive_seed, so the two
// variants use disjoint streams. Progress goes to `log`.
void run_experiment(const ExperimentSpec& spec, std::ostream& log);

// Table-1-style text: per instance, best and average per variant plus the
// one-sided Wilcoxon verdicts at alpha = 0.01.
std::string report_table(std::vector<RunRecord> records);
// Machine-readable companion, one key=value line per aggregate.
std::string report_summary(std::vector<RunRecord> records);

}  // namespace fairtt
