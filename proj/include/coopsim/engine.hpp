#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "coopsim/control.hpp"
#include "coopsim/errors.hpp"
#include "coopsim/knowledge.hpp"
#include "coopsim/maze.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/taskgraph.hpp"

namespace coopsim {

// Used when the scenario builds its task set procedurally instead of
// loading an explicit graph.
struct GeneratorSpec {
    std::size_t n_tasks = 0;
    double density = 0.0;
    std::int64_t reward_lo = 1;
    std::int64_t reward_hi = 100;
};

struct Scenario {
    std::optional<TaskGraph> graph;  // explicit graph wins over the generator
    GeneratorSpec generator;

    std::size_t groups = 1;
    std::size_t total_agents = 1;    // split near-evenly across groups
    ControlMode control = ControlMode::Centralized;
    PartitionMode partition = PartitionMode::Balanced;

    int maze_width = 15;
    int maze_height = 15;
    double agent_speed = 1.0;
    std::vector<double> agent_speeds;  // optional per-agent override

    double inference_q = 0.2;        // chance a task joins a shared class
    double validation_fail_p = 0.0;  // injected solution-check failures

    double assign_overhead = 0.05;   // coordinator time per dispatch
    double pull_overhead = 0.002;    // contention per agent in the group
    double split_overhead = 0.5;     // one-time cost to cut the task set
    double collect_overhead = 0.5;   // one-time cost to merge results

    std::uint64_t master_seed = 1;
    bool trace = false;
};

struct SimulationReport {
    double et_system = 0.0;
    double twt_system = 0.0;
    std::map<int, double> et_group;
    std::map<int, double> twt_group;
    std::map<int, std::size_t> tasks_assigned;   // per group
    std::map<int, std::size_t> tasks_completed;  // per group
    std::map<int, std::vector<double>> completion_times;  // per group, ascending
    std::map<int, std::int64_t> agent_rewards;   // per agent
    std::size_t task_count = 0;
    std::size_t event_count = 0;
    std::size_t knowledge_hits = 0;
    std::size_t validation_failures = 0;
    std::uint64_t log_digest = 0;
    std::vector<std::string> trace;  // filled only when Scenario::trace

    bool operator==(const SimulationReport&) const = default;
};

// Test instrumentation points. Both are optional and default to no-ops.
struct RunHooks {
    // After a solution lands in a group store (task id, time).
    std::function<void(const GroupState&, const TaskId&, double)> after_share;
    // After every processed event, before the next one pops.
    std::function<void(const std::vector<GroupState>&, double)> after_event;
};

namespace detail {

// One entry per in-flight exploration, keyed by agent id.
struct InFlight {
    TaskId task;
    Solution solution;
    bool from_knowledge = false;
    int attempt = 0;
};

struct Event {
    double time = 0.0;
    int group = 0;
    int agent = 0;
    std::uint64_t seq = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.group != b.group) return a.group > b.group;
        if (a.agent != b.agent) return a.agent > b.agent;
        return a.seq > b.seq;
    }
};

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline void fnv_mix(std::uint64_t& h, const std::string& line) {
    for (unsigned char c : line) {
        h ^= c;
        h *= kFnvPrime;
    }
    h ^= '\n';
    h *= kFnvPrime;
}

inline std::string log_line(double time, const char* kind, int group,
                            int agent, const TaskId& task,
                            const std::string& detail) {
    char head[96];
    std::snprintf(head, sizeof head, "%.6f %s g%d a%d ", time, kind, group,
                  agent);
    std::string line = head;
    line += task;
    if (!detail.empty()) {
        line += ' ';
        line += detail;
    }
    return line;
}

}  // namespace detail

inline void validate_scenario(const Scenario& s) {
    if (!s.graph && s.generator.n_tasks == 0)
        throw InvalidParam("scenario needs a task graph or a generator size");
    if (s.groups < 1) throw InvalidParam("group count must be at least 1");
    if (s.total_agents < s.groups)
        throw InvalidParam("need at least one agent per group");
    if (s.maze_width < 2 || s.maze_height < 2)
        throw InvalidParam("maze dimensions must be at least 2x2");
    if (s.agent_speed <= 0.0) throw InvalidParam("agent speed must be positive");
    for (double v : s.agent_speeds)
        if (v <= 0.0) throw InvalidParam("agent speed must be positive");
    if (!s.agent_speeds.empty() && s.agent_speeds.size() != s.total_agents)
        throw InvalidParam("per-agent speed list must cover every agent");
    if (s.inference_q < 0.0 || s.inference_q > 1.0)
        throw InvalidParam("inference probability must be in [0, 1]");
    if (s.validation_fail_p < 0.0 || s.validation_fail_p >= 1.0)
        throw InvalidParam(
            "validation failure probability must be in [0, 1): certain "
            "failure would retry forever");
    if (s.assign_overhead < 0.0 || s.pull_overhead < 0.0 ||
        s.split_overhead < 0.0 || s.collect_overhead < 0.0)
        throw InvalidParam("overheads must be non-negative");
}

// Materializes the run's task graph: explicit graph as-is, otherwise the
// seeded generator. Inference classes from the graph are respected; a
// graph with no classes at all gets them drawn with probability q.
inline TaskGraph resolve_task_graph(const Scenario& s) {
    TaskGraph graph;
    if (s.graph) {
        graph = *s.graph;
        validate_task_graph(graph);
    } else {
        graph = generate_program_graph(
            s.generator.n_tasks, s.generator.density, s.generator.reward_lo,
            s.generator.reward_hi, derive_seed(s.master_seed, "graph"));
    }
    bool any_class = false;
    for (const auto& [id, task] : graph.tasks)
        if (!task.inference_class.empty()) any_class = true;
    if (!any_class && s.inference_q > 0.0)
        graph = assign_inference_classes(graph, s.inference_q,
                                         derive_seed(s.master_seed, "classes"));
    return graph;
}

class Simulation {
  public:
    explicit Simulation(Scenario scenario, RunHooks hooks = {})
        : scenario_(std::move(scenario)), hooks_(std::move(hooks)) {
        validate_scenario(scenario_);
        graph_ = resolve_task_graph(scenario_);
        if (scenario_.groups > graph_.task_count())
            throw InvalidParam("more groups than tasks");
        build_groups();
        build_dependency_board();
    }

    SimulationReport run() {
        seed_initial_ready();
        // Splitting the task set happens before anyone works.
        now_ = 0.0;
        assignment_round();
        while (!events_.empty()) {
            detail::Event ev = events_.top();
            events_.pop();
            now_ = ev.time;
            ++event_count_;
            handle_finish(ev);
            assignment_round();
            if (hooks_.after_event) hooks_.after_event(groups_, now_);
        }
        check_all_done();
        return make_report();
    }

    const TaskGraph& graph() const { return graph_; }
    const std::vector<GroupState>& groups() const { return groups_; }

  private:
    void build_groups() {
        auto subsets =
            partition_tasks(graph_, scenario_.groups, scenario_.partition,
                            derive_seed(scenario_.master_seed, "partition"));
        groups_.reserve(subsets.size());
        for (auto& subset : subsets) {
            GroupState g;
            g.id = subset.group_id;
            g.kb = KnowledgeBase(subset.group_id, graph_);
            for (const TaskId& id : subset.task_ids)
                g.rewards[id] = graph_.at(id).reward;
            g.assigned = std::move(subset);
            groups_.push_back(std::move(g));
        }
        // Agents 0..n-1 dealt to groups in order, front groups get the
        // remainder, so sizes differ by at most one.
        const std::size_t n = scenario_.total_agents;
        const std::size_t l = scenario_.groups;
        int next_id = 0;
        for (std::size_t k = 0; k < l; ++k) {
            std::size_t size = n / l + (k < n % l ? 1 : 0);
            for (std::size_t i = 0; i < size; ++i, ++next_id) {
                Agent a;
                a.id = next_id;
                a.group_id = groups_[k].id;
                a.speed = scenario_.agent_speeds.empty()
                              ? scenario_.agent_speed
                              : scenario_.agent_speeds[next_id];
                groups_[k].agents.push_back(a);
            }
        }
    }

    void build_dependency_board() {
        for (std::size_t k = 0; k < groups_.size(); ++k)
            for (const TaskId& id : groups_[k].assigned.task_ids)
                owner_[id] = k;
        for (const auto& [id, task] : graph_.tasks) {
            deps_left_[id] = task.deps.size();
            for (const TaskId& dep : task.deps) dependents_[dep].insert(id);
        }
    }

    void seed_initial_ready() {
        for (const auto& [id, left] : deps_left_)
            if (left == 0) groups_[owner_.at(id)].mark_ready(id);
    }

    // Pairs idle agents with ready tasks in every group, then refreshes
    // the waiting intervals. Runs after every event; groups with nothing
    // to hand out fall through cheaply.
    void assignment_round() {
        for (GroupState& group : groups_) {
            if (scenario_.control == ControlMode::Centralized) {
                for (Assignment& a :
                     assign_tasks(group, now_, scenario_.assign_overhead))
                    launch(group, a, /*pull_cost=*/0.0);
            } else {
                const double pull_cost =
                    scenario_.pull_overhead *
                    static_cast<double>(group.agents.size());
                for (Agent& agent : group.agents) {
                    if (agent.state == AgentState::Exploring) continue;
                    auto a = pull_task(group, agent, now_);
                    if (!a) break;
                    launch(group, *a, pull_cost);
                }
            }
            settle_idle_agents(group, now_);
        }
    }

    // Turns an assignment into a scheduled finish event. Exploration runs
    // from the dispatch time; known solutions finish instantly.
    void launch(GroupState& group, const Assignment& a, double pull_cost) {
        Agent& agent = agent_ref(group, a.agent_id);
        detail::InFlight fl;
        fl.task = a.task;
        fl.attempt = attempts_[a.task];
        double finish = a.dispatch_time;
        if (a.from_knowledge) {
            fl.from_knowledge = true;
            fl.solution = a.known_solution;
            fl.solution.task_id = a.task;
            ++knowledge_hits_;
            log(a.dispatch_time, "infer", group.id, agent.id, a.task, "");
        } else {
            ExploreResult res = explore_task(a.task, fl.attempt, agent.speed);
            fl.solution = std::move(res.solution);
            finish += pull_cost + res.duration;
            log(a.dispatch_time, "assign", group.id, agent.id, a.task, "");
        }
        agent.finish_time = finish;
        in_flight_[agent.id] = std::move(fl);
        events_.push(detail::Event{finish, group.id, agent.id, seq_++});
    }

    ExploreResult explore_task(const TaskId& task, int attempt, double speed) {
        auto it = mazes_.find(task);
        if (it == mazes_.end()) {
            Maze maze =
                generate_maze(scenario_.maze_width, scenario_.maze_height,
                              derive_seed(scenario_.master_seed, "maze", task));
            it = mazes_.emplace(task, std::move(maze)).first;
        }
        ExploreResult res = explore(
            it->second, speed,
            derive_seed(scenario_.master_seed, "explore", task,
                        static_cast<std::uint64_t>(attempt)));
        res.solution.task_id = task;
        return res;
    }

    void handle_finish(const detail::Event& ev) {
        GroupState& group = groups_[static_cast<std::size_t>(ev.group)];
        Agent& agent = agent_ref(group, ev.agent);
        detail::InFlight fl = std::move(in_flight_.at(agent.id));
        in_flight_.erase(agent.id);

        bool valid = true;
        if (!fl.from_knowledge && scenario_.validation_fail_p > 0.0) {
            Rng vr(derive_seed(scenario_.master_seed, "validate", fl.task,
                               static_cast<std::uint64_t>(fl.attempt)));
            valid = !vr.bernoulli(scenario_.validation_fail_p);
        }
        CompletionResult res =
            complete_task(group, agent, fl.task, fl.solution, now_, valid);
        if (!res.rewarded) {
            ++validation_failures_;
            ++attempts_[fl.task];
            log(now_, "reject", group.id, agent.id, fl.task, "");
            return;
        }
        char detail[32];
        std::snprintf(detail, sizeof detail, "reward=%" PRId64, res.reward);
        log(now_, "complete", group.id, agent.id, fl.task, detail);
        completion_times_[group.id].push_back(now_);
        if (hooks_.after_share) hooks_.after_share(group, fl.task, now_);
        clear_dependency(fl.task);
    }

    // The dependency board: a completion unblocks successors everywhere,
    // including groups the completing agent does not belong to.
    void clear_dependency(const TaskId& task) {
        auto it = dependents_.find(task);
        if (it == dependents_.end()) return;
        for (const TaskId& succ : it->second)
            if (--deps_left_.at(succ) == 0)
                groups_[owner_.at(succ)].mark_ready(succ);
    }

    Agent& agent_ref(GroupState& group, int agent_id) {
        // Agent ids are dealt contiguously per group.
        int base = group.agents.front().id;
        return group.agents[static_cast<std::size_t>(agent_id - base)];
    }

    void check_all_done() {
        std::size_t done = 0;
        for (const GroupState& g : groups_) done += g.completed.size();
        if (done != graph_.task_count())
            throw DeadlockError(
                "run stalled with " + std::to_string(done) + " of " +
                std::to_string(graph_.task_count()) + " tasks completed");
    }

    SimulationReport make_report() {
        SimulationReport r;
        r.task_count = graph_.task_count();
        r.event_count = event_count_;
        r.knowledge_hits = knowledge_hits_;
        r.validation_failures = validation_failures_;
        double latest = 0.0;
        for (const GroupState& g : groups_) {
            r.et_group[g.id] = g.last_completion_time;
            latest = std::max(latest, g.last_completion_time);
            double twt = 0.0;
            for (const Agent& a : g.agents) {
                twt += a.total_wait;
                r.agent_rewards[a.id] = a.rewards_earned;
            }
            r.twt_group[g.id] = twt;
            r.twt_system += twt;
            r.tasks_assigned[g.id] = g.assigned.task_ids.size();
            r.tasks_completed[g.id] = g.completed.size();
            r.completion_times[g.id] = completion_times_[g.id];
        }
        r.et_system =
            latest + scenario_.split_overhead + scenario_.collect_overhead;
        r.log_digest = digest_;
        if (scenario_.trace) r.trace = std::move(trace_);
        return r;
    }

    void log(double time, const char* kind, int group, int agent,
             const TaskId& task, const std::string& detail) {
        std::string line = detail::log_line(time, kind, group, agent, task,
                                            detail);
        detail::fnv_mix(digest_, line);
        if (scenario_.trace) trace_.push_back(std::move(line));
    }

    Scenario scenario_;
    RunHooks hooks_;
    TaskGraph graph_;
    std::vector<GroupState> groups_;
    TaskIdMap<std::size_t> owner_;      // task -> index into groups_
    TaskIdMap<std::size_t> deps_left_;  // unmet dependency counts
    TaskIdMap<TaskIdSet> dependents_;   // reverse edges
    TaskIdMap<int> attempts_;           // retries after failed validation
    TaskIdMap<Maze> mazes_;             // lazily built, one per task
    std::map<int, std::vector<double>> completion_times_;
    std::map<int, detail::InFlight> in_flight_;  // keyed by agent id
    std::priority_queue<detail::Event, std::vector<detail::Event>,
                        detail::EventAfter>
        events_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    std::size_t event_count_ = 0;
    std::size_t knowledge_hits_ = 0;
    std::size_t validation_failures_ = 0;
    std::uint64_t digest_ = detail::kFnvOffset;
    std::vector<std::string> trace_;
};

inline SimulationReport run_simulation(const Scenario& scenario,
                                       RunHooks hooks = {}) {
    return Simulation(scenario, std::move(hooks)).run();
}

// Same seed, same tasks, both coordination styles side by side.
struct ControlComparison {
    std::size_t n_tasks = 0;
    double et_centralized = 0.0;
    double et_decentralized = 0.0;
    double twt_centralized = 0.0;
    double twt_decentralized = 0.0;
};

inline ControlComparison compare_controls(const Scenario& base) {
    Scenario s = base;
    ControlComparison out;
    s.control = ControlMode::Centralized;
    SimulationReport c = run_simulation(s);
    s.control = ControlMode::Decentralized;
    SimulationReport d = run_simulation(s);
    out.n_tasks = c.task_count;
    out.et_centralized = c.et_system;
    out.et_decentralized = d.et_system;
    out.twt_centralized = c.twt_system;
    out.twt_decentralized = d.twt_system;
    return out;
}

// How the finished work of two groups interleaves over the run: counts of
// completions per group in event-log order, for skew comparisons.
struct TaskDistribution {
    int group_a = 0;
    int group_b = 0;
    std::size_t completed_a = 0;
    std::size_t completed_b = 0;
    // Completion times per group, ascending.
    std::vector<double> times_a;
    std::vector<double> times_b;
};

inline TaskDistribution collect_task_distribution(const SimulationReport& report,
                                                  int group_a, int group_b) {
    auto ita = report.completion_times.find(group_a);
    if (ita == report.completion_times.end())
        throw UnknownGroup("no group " + std::to_string(group_a));
    auto itb = report.completion_times.find(group_b);
    if (itb == report.completion_times.end())
        throw UnknownGroup("no group " + std::to_string(group_b));
    TaskDistribution dist;
    dist.group_a = group_a;
    dist.group_b = group_b;
    dist.times_a = ita->second;
    dist.times_b = itb->second;
    dist.completed_a = dist.times_a.size();
    dist.completed_b = dist.times_b.size();
    return dist;
}

}  // namespace coopsim
