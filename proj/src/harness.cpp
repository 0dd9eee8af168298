#include "fairtt/harness.hpp"

#include "fairtt/cbctt.hpp"
#include "fairtt/rng.hpp"
#include "fairtt/sa.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace fairtt {

namespace {

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

Variant variant_from_name(const std::string& name) {
    if (name == "glbop") return Variant::glbop;
    if (name == "lsap") return Variant::lsap;
    throw std::invalid_argument("unknown variant '" + name + "' (expected glbop or lsap)");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    for (char c : value) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) items.push_back(std::exchange(current, {}));
        } else {
            current += c;
        }
    }
    if (!current.empty()) items.push_back(current);
    return items;
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir) {
    ExperimentSpec spec;
    spec.variants.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string key, value;
        if (auto eq = line.find('='); eq != std::string::npos) {
            key = line.substr(0, eq);
            value = line.substr(eq + 1);
        } else {
            std::istringstream ss(line);
            ss >> key;
            std::getline(ss, value);
        }
        auto trim = [](std::string& s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        };
        trim(key);
        trim(value);
        if (key.empty()) continue;

        try {
            if (key == "instances") {
                for (const auto& item : split_list(value)) {
                    std::filesystem::path p(item);
                    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
                    spec.instances.push_back(p.string());
                }
            } else if (key == "variants") {
                for (const auto& item : split_list(value)) spec.variants.push_back(variant_from_name(item));
            } else if (key == "runs") {
                spec.runs = std::stoi(value);
            } else if (key == "iterations") {
                spec.iterations = std::stoll(value);
            } else if (key == "seed") {
                spec.base_seed = std::stoull(value);
            } else if (key == "tmax") {
                spec.t_max = std::stod(value);
            } else if (key == "tmin") {
                spec.t_min = std::stod(value);
            } else if (key == "out") {
                std::filesystem::path p(value);
                if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
                spec.out_dir = p.string();
            } else if (key == "jobs") {
                spec.jobs = std::stoi(value);
            } else if (key == "scale") {
                spec.scale = std::stoi(value);
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("experiment spec line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (spec.variants.empty()) spec.variants = {Variant::glbop, Variant::lsap};
    if (spec.instances.empty()) throw std::invalid_argument("experiment spec: no instances given");
    if (spec.runs < 1) throw std::invalid_argument("experiment spec: runs must be >= 1");
    return spec;
}

std::string record_to_line(const RunRecord& r) {
    std::string alloc;
    for (std::size_t i = 0; i < r.best.values().size(); ++i) {
        if (i) alloc += ',';
        alloc += std::to_string(r.best.values()[i]);
    }
    std::ostringstream out;
    out << "v=1 instance=" << r.instance << " variant=" << variant_name(r.variant) << " seed=" << r.seed
        << " alloc=" << alloc << " rank=" << r.rank << " iters=" << r.iterations
        << " wall_ms=" << r.wall_ms;
    return out.str();
}

RunRecord record_from_line(const std::string& line) {
    std::map<std::string, std::string> fields;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("record: token without '=': " + tok);
        fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end()) throw std::invalid_argument(std::string("record: missing field ") + key);
        return it->second;
    };
    if (need("v") != "1") throw std::invalid_argument("record: unsupported schema version " + need("v"));

    RunRecord r;
    r.instance = need("instance");
    r.variant = variant_from_name(need("variant"));
    r.seed = std::stoull(need("seed"));
    std::vector<Penalty> values;
    for (const auto& item : split_list(need("alloc"))) values.push_back(std::stoll(item));
    r.best = SortedAllocation::of(std::move(values));
    r.rank = Rank(need("rank"));
    r.iterations = std::stoll(need("iters"));
    r.wall_ms = std::stoll(need("wall_ms"));
    if (r.rank != rho_min(WeightMultiset(r.best.values()))) {
        throw std::invalid_argument("record: rank does not match allocation");
    }
    return r;
}

std::vector<RunRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file " + path);
    std::vector<RunRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_line(line));
    }
    return records;
}

AggregateResult aggregate(std::span<const RunRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    const std::size_t n = records.front().best.size();
    AggregateResult agg;
    agg.best = records.front().best;
    std::vector<SortedAllocation> allocations;
    allocations.reserve(records.size());
    for (const auto& r : records) {
        if (r.best.size() != n) throw std::invalid_argument("aggregate: allocation length mismatch");
        allocations.push_back(r.best);
        if (leximax_compare(r.best, agg.best) == std::strong_ordering::less) agg.best = r.best;
    }
    agg.average = average_allocation(allocations, n);
    return agg;
}

namespace detail {

RankSumStats rank_sum(std::span<const Rank> a, std::span<const Rank> b) {
    RankSumStats stats;
    stats.n1 = a.size();
    stats.n2 = b.size();
    const std::size_t N = stats.n1 + stats.n2;

    struct Obs {
        const Rank* value;
        bool in_a;
    };
    std::vector<Obs> pooled;
    pooled.reserve(N);
    for (const auto& v : a) pooled.push_back({&v, true});
    for (const auto& v : b) pooled.push_back({&v, false});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const Obs& x, const Obs& y) { return *x.value < *y.value; });

    for (std::size_t i = 0; i < N;) {
        std::size_t j = i;
        while (j < N && *pooled[j].value == *pooled[i].value) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const double t = static_cast<double>(j - i);
        if (j - i > 1) {
            stats.ties = true;
            stats.tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].in_a) stats.rank_sum_a += midrank;
        }
        i = j;
    }
    return stats;
}

double wilcoxon_exact_p(const RankSumStats& s) {
    // Null distribution of the rank sum: all size-n1 subsets of {1..N},
    // counted via a subset-sum table. Tie-free, so ranks are 1..N exactly.
    const std::size_t N = s.n1 + s.n2;
    const long long w = static_cast<long long>(s.rank_sum_a);
    const long long max_sum = static_cast<long long>(N) * (N + 1) / 2;
    std::vector<std::vector<unsigned long long>> ways(s.n1 + 1,
                                                      std::vector<unsigned long long>(max_sum + 1, 0));
    ways[0][0] = 1;
    for (std::size_t r = 1; r <= N; ++r) {
        for (std::size_t k = std::min(s.n1, r); k >= 1; --k) {
            for (long long sum = max_sum; sum >= static_cast<long long>(r); --sum) {
                ways[k][sum] += ways[k - 1][sum - r];
            }
        }
    }
    unsigned long long below = 0, total = 0;
    for (long long sum = 0; sum <= max_sum; ++sum) {
        total += ways[s.n1][sum];
        if (sum <= w) below += ways[s.n1][sum];
    }
    return static_cast<double>(below) / static_cast<double>(total);
}

double wilcoxon_normal_p(const RankSumStats& s) {
    const double n1 = static_cast<double>(s.n1), n2 = static_cast<double>(s.n2);
    const double N = n1 + n2;
    const double mean = n1 * (N + 1) / 2.0;
    const double variance = n1 * n2 / 12.0 * ((N + 1) - s.tie_term / (N * (N - 1)));
    if (variance <= 0) return 1.0;  // everything tied
    const double z = (s.rank_sum_a - mean + 0.5) / std::sqrt(variance);
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace detail

WilcoxonResult wilcoxon_one_sided(std::span<const Rank> a, std::span<const Rank> b, double alpha) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon: empty sample");
    const detail::RankSumStats stats = detail::rank_sum(a, b);

    WilcoxonResult result;
    if (a.size() + b.size() <= 20 && !stats.ties) {
        result.p_value = detail::wilcoxon_exact_p(stats);
        result.exact = true;
    } else {
        result.p_value = detail::wilcoxon_normal_p(stats);
    }
    result.significant = result.p_value < alpha;
    return result;
}

void run_experiment(const ExperimentSpec& spec, std::ostream& log) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    const std::string records_path = (fs::path(spec.out_dir) / "records.txt").string();
    std::ofstream records_out(records_path, std::ios::app);
    if (!records_out) throw std::runtime_error("cannot open " + records_path + " for appending");

    struct LoadedInstance {
        std::string tag;
        Instance instance;
    };
    std::vector<LoadedInstance> loaded;
    for (const auto& path : spec.instances) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open instance " + path);
        std::vector<std::string> warnings;
        LoadedInstance li{file_stem(path), parse_instance(in, &warnings)};
        for (const auto& w : warnings) log << path << ": " << w << "\n";
        loaded.push_back(std::move(li));
    }

    struct Task {
        const LoadedInstance* instance;
        Variant variant;
        std::uint64_t variant_tag;
        int run_index;
    };
    std::vector<Task> tasks;
    for (const auto& li : loaded) {
        for (std::size_t v = 0; v < spec.variants.size(); ++v) {
            for (int r = 0; r < spec.effective_runs(); ++r) {
                tasks.push_back({&li, spec.variants[v],
                                 static_cast<std::uint64_t>(spec.variants[v] == Variant::glbop ? 0 : 1), r});
            }
        }
    }

    std::atomic<std::size_t> next_task{0};
    std::mutex sink;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next_task.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& task = tasks[idx];

            SAConfig cfg;
            cfg.t_max = spec.t_max;
            cfg.t_min = spec.t_min;
            cfg.iterations = spec.effective_iterations();
            cfg.variant = task.variant;
            cfg.seed = derive_seed(spec.base_seed, task.instance->tag, task.variant_tag,
                                   static_cast<std::uint64_t>(task.run_index));

            const auto start = std::chrono::steady_clock::now();
            const SAResult result = run(task.instance->instance, cfg);
            const auto wall =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

            RunRecord record;
            record.instance = task.instance->tag;
            record.variant = task.variant;
            record.seed = cfg.seed;
            record.best = result.best_allocation;
            record.rank = rho_min(WeightMultiset(result.best_allocation.values()));
            record.iterations = result.iterations_run;
            record.wall_ms = wall.count();

            std::lock_guard<std::mutex> guard(sink);
            records_out << record_to_line(record) << "\n";
            records_out.flush();
            log << record.instance << " " << variant_name(record.variant) << " run " << task.run_index
                << ": " << format_allocation(record.best) << " (" << record.wall_ms << " ms)\n";
        }
    };

    unsigned jobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, tasks.size());
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

namespace {

using Grouped = std::map<std::string, std::map<Variant, std::vector<RunRecord>>>;

Grouped group_records(std::vector<RunRecord> records) {
    Grouped grouped;
    for (auto& r : records) {
        auto instance = r.instance;
        auto variant = r.variant;
        grouped[instance][variant].push_back(std::move(r));
    }
    return grouped;
}

std::vector<Rank> ranks_of(const std::vector<RunRecord>& records) {
    std::vector<Rank> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.rank);
    return out;
}

}  // namespace

std::string report_table(std::vector<RunRecord> records) {
    const Grouped grouped = group_records(std::move(records));
    auto pad = [](std::string s, std::size_t width) {
        if (s.size() < width) s.append(width - s.size(), ' ');
        else s += ' ';
        return s;
    };
    std::ostringstream out;
    out << pad("instance", 14) << pad("variant", 8) << pad("runs", 6) << pad("best", 44) << "average\n";
    for (const auto& [instance, by_variant] : grouped) {
        for (const auto& [variant, recs] : by_variant) {
            const AggregateResult agg = aggregate(recs);
            out << pad(instance, 14) << pad(variant_name(variant), 8)
                << pad(std::to_string(recs.size()), 6) << pad(format_allocation(agg.best, true), 44)
                << format_allocation(agg.average, true) << "\n";
        }
        auto glbop_it = by_variant.find(Variant::glbop);
        auto lsap_it = by_variant.find(Variant::lsap);
        if (glbop_it != by_variant.end() && lsap_it != by_variant.end()) {
            const auto gip_better =
                wilcoxon_one_sided(ranks_of(glbop_it->second), ranks_of(lsap_it->second), 0.01);
            const auto nogip_better =
                wilcoxon_one_sided(ranks_of(lsap_it->second), ranks_of(glbop_it->second), 0.01);
            out << instance << ": wilcoxon one-sided p(glbop<lsap)=" << gip_better.p_value
                << (gip_better.significant ? " [significant at 0.01]" : "")
                << ", p(lsap<glbop)=" << nogip_better.p_value
                << (nogip_better.significant ? " [significant at 0.01]" : "") << "\n";
        }
    }
    return out.str();
}

std::string report_summary(std::vector<RunRecord> records) {
    const Grouped grouped = group_records(std::move(records));
    std::ostringstream out;
    for (const auto& [instance, by_variant] : grouped) {
        for (const auto& [variant, recs] : by_variant) {
            const AggregateResult agg = aggregate(recs);
            out << "instance=" << instance << " variant=" << variant_name(variant) << " runs=" << recs.size()
                << " best=" << format_allocation(agg.best) << " average=" << format_allocation(agg.average)
                << "\n";
        }
        auto glbop_it = by_variant.find(Variant::glbop);
        auto lsap_it = by_variant.find(Variant::lsap);
        if (glbop_it != by_variant.end() && lsap_it != by_variant.end()) {
            const auto gip = wilcoxon_one_sided(ranks_of(glbop_it->second), ranks_of(lsap_it->second), 0.01);
            const auto nogip = wilcoxon_one_sided(ranks_of(lsap_it->second), ranks_of(glbop_it->second), 0.01);
            out << "instance=" << instance << " wilcoxon_p_glbop_less=" << gip.p_value
                << " glbop_significant=" << (gip.significant ? 1 : 0)
                << " wilcoxon_p_lsap_less=" << nogip.p_value
                << " lsap_significant=" << (nogip.significant ? 1 : 0) << "\n";
        }
    }
    return out.str();
}

}  // namespace fairtt
