// Command-line front end for the cooperative-execution simulator.
//
//   coopsim run <config>         simulate one scenario file
//   coopsim sweep-groups         ET vs. number of groups
//   coopsim compare-controls     centralized vs. decentralized across m
//   coopsim dependency-study     sparse/dense x partition study
//   coopsim check-theorems       waiting-time laws vs. Monte Carlo/enumeration
//   coopsim task-distribution    per-group completion counts under the
//                                dependency-affinity partition
//
// Global flags: --seed, --replications, --out <csv>, --trace.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopsim/coopsim.hpp"

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::size_t replications = 20;
    std::string out_path;
    bool trace = false;
};

void write_csv(const coopsim::ExperimentResult& result,
               const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw coopsim::ParseError("cannot open output file: " + path);
    out << coopsim::to_csv(result);
    std::printf("wrote %zu rows to %s\n", result.rows.size(), path.c_str());
}

void print_summary_table(const coopsim::ExperimentResult& result) {
    std::printf("%-28s %-14s %12s %12s %6s\n", "cell", "column", "mean",
                "stddev", "n");
    for (const coopsim::SummaryStat& s : result.summary)
        std::printf("%-28s %-14s %12.4f %12.4f %6zu\n", s.label.c_str(),
                    s.column.c_str(), s.mean, s.stddev, s.n);
}

int cmd_run(const std::string& config_path, const GlobalOpts& g) {
    coopsim::Scenario s = coopsim::load_scenario_file(config_path);
    if (g.seed) s.master_seed = *g.seed;
    if (g.trace) s.trace = true;
    coopsim::SimulationReport rep = coopsim::run_simulation(s);

    std::printf("tasks: %zu, events: %zu, knowledge hits: %zu, validation "
                "failures: %zu\n",
                rep.task_count, rep.event_count, rep.knowledge_hits,
                rep.validation_failures);
    std::printf("system ET: %.4f  system TWT: %.4f\n", rep.et_system,
                rep.twt_system);
    for (const auto& [gid, et] : rep.et_group)
        std::printf("  group %d: ET %.4f  TWT %.4f  assigned %zu  completed "
                    "%zu\n",
                    gid, et, rep.twt_group.at(gid), rep.tasks_assigned.at(gid),
                    rep.tasks_completed.at(gid));
    if (g.trace)
        for (const std::string& line : rep.trace)
            std::printf("%s\n", line.c_str());

    coopsim::ExperimentResult result;
    result.name = "run";
    result.columns = {"et", "twt", "assigned", "completed"};
    coopsim::ExperimentRow system_row;
    system_row.label = "system";
    system_row.seed = s.master_seed;
    double assigned = 0, completed = 0;
    for (const auto& [gid, n] : rep.tasks_assigned) assigned += n;
    for (const auto& [gid, n] : rep.tasks_completed) completed += n;
    system_row.values = {rep.et_system, rep.twt_system, assigned, completed};
    result.rows.push_back(system_row);
    for (const auto& [gid, et] : rep.et_group) {
        coopsim::ExperimentRow row;
        row.label = "g" + std::to_string(gid);
        row.seed = s.master_seed;
        row.values = {et, rep.twt_group.at(gid),
                      static_cast<double>(rep.tasks_assigned.at(gid)),
                      static_cast<double>(rep.tasks_completed.at(gid))};
        result.rows.push_back(row);
    }
    coopsim::finalize_result(result);
    write_csv(result, g.out_path);
    return 0;
}

int cmd_sweep_groups(const std::string& config_path,
                     std::vector<std::size_t> groups, bool per_group,
                     const GlobalOpts& g) {
    coopsim::Scenario base = config_path.empty()
                                 ? coopsim::table_sweep_scenario()
                                 : coopsim::load_scenario_file(config_path);
    if (g.seed) base.master_seed = *g.seed;
    if (groups.empty()) groups = {1, 2, 4, 6, 8, 10};
    coopsim::ExperimentResult r = coopsim::group_sweep(
        base, groups,
        per_group ? coopsim::FixedDimension::AgentsPerGroup
                  : coopsim::FixedDimension::TotalAgents,
        g.replications);
    print_summary_table(r);
    write_csv(r, g.out_path);
    return 0;
}

int cmd_compare_controls(const std::string& config_path,
                         std::vector<std::size_t> tasks, const GlobalOpts& g) {
    coopsim::Scenario base = config_path.empty()
                                 ? coopsim::crossover_scenario()
                                 : coopsim::load_scenario_file(config_path);
    if (g.seed) base.master_seed = *g.seed;
    if (tasks.empty()) tasks = {20, 60, 120, 240};
    coopsim::ExperimentResult r =
        coopsim::control_crossover(base, tasks, g.replications);
    print_summary_table(r);
    for (std::size_t m : tasks) {
        const std::string label = "m=" + std::to_string(m);
        double gap = coopsim::cell_mean(r, label, "et_centralized") -
                     coopsim::cell_mean(r, label, "et_decentralized");
        std::printf("%s: mean ET(centralized) - ET(decentralized) = %+.4f "
                    "(%s wins)\n",
                    label.c_str(), gap,
                    gap < 0.0 ? "centralized" : "decentralized");
    }
    write_csv(r, g.out_path);
    return 0;
}

int cmd_dependency_study(const std::string& config_path, std::size_t m,
                         const GlobalOpts& g) {
    coopsim::Scenario base = config_path.empty()
                                 ? coopsim::waiting_comparison_scenario()
                                 : coopsim::load_scenario_file(config_path);
    if (g.seed) base.master_seed = *g.seed;
    coopsim::TaskGraph lds = coopsim::lds_analogue(
        m, coopsim::derive_seed(base.master_seed, "lds-graph"));
    coopsim::TaskGraph hds = coopsim::hds_analogue(
        m, coopsim::derive_seed(base.master_seed, "hds-graph"));
    std::printf("sparse graph: %zu tasks, %zu edges; dense graph: %zu tasks, "
                "%zu edges\n",
                lds.task_count(), lds.edge_count(), hds.task_count(),
                hds.edge_count());
    coopsim::ExperimentResult r =
        coopsim::dependency_study(lds, hds, base, g.replications);
    print_summary_table(r);
    write_csv(r, g.out_path);
    return 0;
}

int cmd_check_theorems(std::size_t trials, const GlobalOpts& g) {
    const std::uint64_t seed = g.seed.value_or(20260815);
    coopsim::ExperimentResult grid = coopsim::waiting_law_grid(trials, seed);
    std::printf("%-22s %12s %12s %12s %8s\n", "cell", "exact", "estimate",
                "std error", "|z|");
    double worst_z = 0.0;
    for (const coopsim::ExperimentRow& row : grid.rows) {
        const double exact = row.values[3], est = row.values[4],
                     se = row.values[5];
        const double z = se > 0.0 ? std::fabs(est - exact) / se : 0.0;
        worst_z = std::max(worst_z, z);
        std::printf("%-22s %12.4f %12.4f %12.5f %8.2f\n", row.label.c_str(),
                    exact, est, se, z);
    }
    std::printf("worst |z| over the grid: %.3f (3.0 is the alarm line)\n",
                worst_z);

    double worst_gap = 0.0;
    for (std::size_t m = 2; m <= 12; ++m)
        for (double p : {0.1, 0.3, 0.5, 0.7, 0.9})
            worst_gap = std::max(
                worst_gap,
                std::fabs(coopsim::fully_connected_waiting(m, p).exact -
                          coopsim::enumerate_fully_connected(m, p)));
    std::printf("fully connected closed form vs. enumeration (m <= 12): "
                "worst gap %.3e\n",
                worst_gap);
    write_csv(grid, g.out_path);
    return worst_z <= 3.0 && worst_gap <= 1e-10 ? 0 : 1;
}

int cmd_task_distribution(const std::string& config_path, bool dense,
                          int group_a, int group_b, const GlobalOpts& g) {
    coopsim::Scenario base = config_path.empty()
                                 ? coopsim::skew_scenario(dense)
                                 : coopsim::load_scenario_file(config_path);
    if (g.seed) base.master_seed = *g.seed;
    coopsim::ExperimentResult r;
    r.name = "task-distribution";
    r.columns = {"completed_a", "completed_b", "gap"};
    double mean_gap = 0.0;
    for (std::size_t rep = 0; rep < g.replications; ++rep) {
        coopsim::Scenario s = base;
        s.master_seed = coopsim::derive_seed(base.master_seed, "rep", rep);
        coopsim::SimulationReport report = coopsim::run_simulation(s);
        coopsim::TaskDistribution d =
            coopsim::collect_task_distribution(report, group_a, group_b);
        const double gap = std::fabs(static_cast<double>(d.completed_a) -
                                     static_cast<double>(d.completed_b));
        mean_gap += gap;
        coopsim::ExperimentRow row;
        row.label = "rep=" + std::to_string(rep);
        row.seed = s.master_seed;
        row.values = {static_cast<double>(d.completed_a),
                      static_cast<double>(d.completed_b), gap};
        r.rows.push_back(row);
    }
    coopsim::finalize_result(r);
    print_summary_table(r);
    std::printf("mean |completed(g%d) - completed(g%d)| over %zu seeds: %.3f\n",
                group_a, group_b, g.replications,
                mean_gap / static_cast<double>(g.replications));
    write_csv(r, g.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative task execution simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed override");
    app.add_option("--replications", g.replications,
                   "seeds per experiment cell")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out_path, "write results as CSV to this path");
    app.add_flag("--trace", g.trace, "record and print the event trace");

    std::string config_path;
    auto* run = app.add_subcommand("run", "simulate one scenario file");
    run->add_option("config", config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);

    std::vector<std::size_t> groups;
    bool per_group = false;
    auto* sweep = app.add_subcommand(
        "sweep-groups", "execution time as the group count changes");
    std::string sweep_config;
    sweep->add_option("--config", sweep_config, "base scenario file")
        ->check(CLI::ExistingFile);
    sweep->add_option("--groups", groups, "group counts to sweep")
        ->delimiter(',');
    sweep->add_flag("--agents-per-group", per_group,
                    "hold the per-group headcount fixed instead of the total");

    std::vector<std::size_t> tasks;
    std::string cmp_config;
    auto* cmp = app.add_subcommand(
        "compare-controls", "centralized vs. decentralized across task counts");
    cmp->add_option("--config", cmp_config, "base scenario file")
        ->check(CLI::ExistingFile);
    cmp->add_option("--tasks", tasks, "task counts to sweep")->delimiter(',');

    std::string dep_config;
    std::size_t dep_tasks = 90;
    auto* dep = app.add_subcommand(
        "dependency-study", "sparse vs. dense graphs under both partitions");
    dep->add_option("--config", dep_config, "base scenario file")
        ->check(CLI::ExistingFile);
    dep->add_option("--tasks", dep_tasks, "graph size for both families")
        ->check(CLI::PositiveNumber);

    std::size_t trials = 100000;
    auto* thm = app.add_subcommand(
        "check-theorems", "waiting-time laws vs. sampling and enumeration");
    thm->add_option("--trials", trials, "Monte Carlo trials per grid point")
        ->check(CLI::PositiveNumber);

    std::string dist_config;
    bool dense = false;
    std::pair<int, int> dist_groups{0, 1};
    auto* dist = app.add_subcommand(
        "task-distribution", "per-group completion counts and their skew");
    dist->add_option("--config", dist_config, "base scenario file")
        ->check(CLI::ExistingFile);
    dist->add_flag("--dense", dense, "use the dense graph family");
    dist->add_option("--groups", dist_groups,
                     "the two group ids to compare (default 0 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, g);
        if (sweep->parsed()) return cmd_sweep_groups(sweep_config, groups,
                                                     per_group, g);
        if (cmp->parsed()) return cmd_compare_controls(cmp_config, tasks, g);
        if (dep->parsed()) return cmd_dependency_study(dep_config, dep_tasks, g);
        if (thm->parsed()) return cmd_check_theorems(trials, g);
        if (dist->parsed())
            return cmd_task_distribution(dist_config, dense, dist_groups.first,
                                         dist_groups.second, g);
    } catch (const coopsim::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
