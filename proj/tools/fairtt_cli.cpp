// Command-line front end: validate instances, run a single annealing solve,
// run batch experiments from a spec file and render reports.
#include "CLI11.hpp"

#include "fairtt/cbctt.hpp"
#include "fairtt/harness.hpp"
#include "fairtt/rng.hpp"
#include "fairtt/sa.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

fairtt::Instance load_instance(const std::string& path, bool print_warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> warnings;
    fairtt::Instance inst = fairtt::parse_instance(in, &warnings);
    if (print_warnings) {
        for (const auto& w : warnings) std::cerr << path << ": warning: " << w << "\n";
    }
    return inst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"max-min fair curriculum-based course timetabling"};
    app.require_subcommand(1);

    std::string instance_path, out_path, variant_name = "glbop", spec_path, results_dir;
    long long iterations = 1'000'000;
    double t_max = 5.0, t_min = 0.01;
    std::uint64_t seed = 0;
    int scale = 1, jobs = 0;
    std::string out_dir_override;

    auto* validate = app.add_subcommand("validate", "parse an instance and report its shape");
    validate->add_option("instance", instance_path, "instance file (.ctt/.ectt)")->required();

    auto* solve = app.add_subcommand("solve", "run one annealing solve");
    solve->add_option("instance", instance_path)->required();
    solve->add_option("--variant", variant_name, "glbop|lsap")->check(CLI::IsMember({"glbop", "lsap"}));
    solve->add_option("--iters", iterations, "annealing iterations");
    solve->add_option("--tmax", t_max, "initial temperature");
    solve->add_option("--tmin", t_min, "final temperature");
    solve->add_option("--seed", seed, "rng seed");
    solve->add_option("--out", out_path, "solution file (default: <instance stem>.sol)");

    auto* bench = app.add_subcommand("bench", "run the experiment described by a spec file");
    bench->add_option("spec", spec_path, "experiment spec (key=value lines)")->required();
    bench->add_option("--scale", scale, "divide runs and iterations by this factor");
    bench->add_option("--jobs", jobs, "worker threads (0: hardware)");
    bench->add_option("--out", out_dir_override, "override the spec's output directory");

    auto* report = app.add_subcommand("report", "aggregate a results directory");
    report->add_option("results", results_dir, "directory containing records.txt")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const fairtt::Instance inst = load_instance(instance_path, true);
            std::cout << "name: " << inst.name << "\n"
                      << "courses: " << inst.course_count() << "\n"
                      << "rooms: " << inst.room_count() << "\n"
                      << "days: " << inst.days << " x " << inst.periods_per_day << " periods\n"
                      << "curricula: " << inst.curriculum_count() << "\n"
                      << "lectures: " << inst.total_lectures() << "\n";
            return 0;
        }
        if (*solve) {
            const fairtt::Instance inst = load_instance(instance_path, true);
            fairtt::SAConfig cfg;
            cfg.iterations = iterations;
            cfg.t_max = t_max;
            cfg.t_min = t_min;
            cfg.seed = seed;
            cfg.variant = variant_name == "glbop" ? fairtt::Variant::glbop : fairtt::Variant::lsap;

            const fairtt::SAResult result = fairtt::run(inst, cfg);
            if (out_path.empty()) {
                out_path = std::filesystem::path(instance_path).stem().string() + ".sol";
            }
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            out << fairtt::write_solution(inst, result.best_timetable);

            std::cout << "allocation: " << fairtt::format_allocation(result.best_allocation) << "\n"
                      << "rank: " << fairtt::rho_min(fairtt::WeightMultiset(result.best_allocation.values()))
                      << "\n"
                      << "accepted: " << result.accepted << " / " << result.iterations_run
                      << " (infeasible moves: " << result.rejected_infeasible << ")\n"
                      << "solution: " << out_path << "\n";
            return 0;
        }
        if (*bench) {
            std::ifstream in(spec_path);
            if (!in) throw std::runtime_error("cannot open " + spec_path);
            fairtt::ExperimentSpec spec =
                fairtt::parse_experiment_spec(in, std::filesystem::path(spec_path).parent_path().string());
            if (scale > 1) spec.scale = scale;
            if (jobs > 0) spec.jobs = jobs;
            if (!out_dir_override.empty()) spec.out_dir = out_dir_override;
            fairtt::run_experiment(spec, std::cout);
            std::cout << "records: " << (std::filesystem::path(spec.out_dir) / "records.txt").string() << "\n";
            return 0;
        }
        if (*report) {
            const auto records =
                fairtt::load_records((std::filesystem::path(results_dir) / "records.txt").string());
            std::cout << fairtt::report_table(records);
            const std::string summary = fairtt::report_summary(records);
            const std::string summary_path = (std::filesystem::path(results_dir) / "summary.txt").string();
            std::ofstream out(summary_path);
            if (!out) throw std::runtime_error("cannot write " + summary_path);
            out << summary;
            std::cout << "summary: " << summary_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
