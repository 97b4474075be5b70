#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coopsim/errors.hpp"
#include "coopsim/rng.hpp"

namespace coopsim {

using TaskId = std::string;

// Ascending task-id order used for every tie-break in the library.
// All-digit ids compare numerically ("2" < "10"), everything else
// lexicographically; the two classes never interleave.
inline bool natural_less(std::string_view a, std::string_view b) {
    auto all_digits = [](std::string_view s) {
        if (s.empty()) return false;
        return std::all_of(s.begin(), s.end(),
                           [](char c) { return c >= '0' && c <= '9'; });
    };
    const bool da = all_digits(a);
    const bool db = all_digits(b);
    if (da != db) return da;
    if (da && a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

struct TaskIdLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const {
        return natural_less(a, b);
    }
};

using TaskIdSet = std::set<TaskId, TaskIdLess>;
template <class V>
using TaskIdMap = std::map<TaskId, V, TaskIdLess>;

struct Task {
    TaskId id;
    std::int64_t reward = 0;
    TaskIdSet deps;
    std::string inference_class;  // empty: no class, solution is not shared

    friend bool operator==(const Task&, const Task&) = default;
};

// Dependency-structured task set. `tasks` is keyed in ascending id order,
// so iteration is deterministic everywhere.
struct TaskGraph {
    TaskIdMap<Task> tasks;

    std::size_t task_count() const { return tasks.size(); }

    bool contains(std::string_view id) const {
        return tasks.find(id) != tasks.end();
    }

    const Task& at(std::string_view id) const {
        auto it = tasks.find(id);
        if (it == tasks.end())
            throw UnknownTask("unknown task id '" + std::string(id) + "'");
        return it->second;
    }

    std::int64_t total_reward() const {
        std::int64_t sum = 0;
        for (const auto& [id, t] : tasks) sum += t.reward;
        return sum;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& [id, t] : tasks) n += t.deps.size();
        return n;
    }

    friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

// One group's share of the task set.
struct TaskSubset {
    int group_id = 0;
    TaskIdSet task_ids;
};

enum class PartitionMode { Balanced, Independent };

inline std::string to_string(PartitionMode m) {
    return m == PartitionMode::Balanced ? "balanced" : "independent";
}

// Kahn's algorithm; picks the smallest ready id first so the order is
// unique. Throws CycleError when no topological order exists.
inline std::vector<TaskId> topological_order(const TaskGraph& graph) {
    TaskIdMap<std::size_t> remaining;
    TaskIdMap<std::vector<TaskId>> dependents;
    TaskIdSet ready;
    for (const auto& [id, task] : graph.tasks) {
        remaining[id] = task.deps.size();
        if (task.deps.empty()) ready.insert(id);
        for (const auto& dep : task.deps) dependents[dep].push_back(id);
    }
    std::vector<TaskId> order;
    order.reserve(graph.task_count());
    while (!ready.empty()) {
        TaskId id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& dependent : dependents[id]) {
            if (--remaining[dependent] == 0) ready.insert(dependent);
        }
    }
    if (order.size() != graph.task_count())
        throw CycleError("task dependencies contain a cycle");
    return order;
}

// Structural checks shared by the parser and the generator: ids referenced
// by deps must exist, no self-dependency, rewards non-negative, acyclic.
inline void validate_task_graph(const TaskGraph& graph) {
    for (const auto& [id, task] : graph.tasks) {
        if (task.reward < 0)
            throw InvalidParam("task '" + id + "' has negative reward");
        for (const auto& dep : task.deps) {
            if (dep == id)
                throw CycleError("task '" + id + "' depends on itself");
            if (!graph.contains(dep))
                throw DanglingDep("task '" + id + "' depends on unknown task '" +
                                  dep + "'");
        }
    }
    topological_order(graph);
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

inline std::int64_t parse_int(const std::string& tok, const std::string& what) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw ParseError("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected integer for " + what + ", got '" + tok + "'");
    }
}

}  // namespace detail

// Graph file format, line oriented:
//   tasks <m>
//   task <id> reward <int> deps <id,id,...|none> class <classid|none>
// '#' starts a comment line.
inline TaskGraph load_task_graph(std::string_view text) {
    TaskGraph graph;
    std::istringstream in{std::string(text)};
    std::string line;
    long declared = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto where = " (line " + std::to_string(lineno) + ")";
        std::string_view sv = line;
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t'))
            sv.remove_prefix(1);
        if (sv.empty() || sv.front() == '#') continue;
        auto toks = detail::split_ws(sv);
        if (toks[0] == "tasks") {
            if (declared >= 0) throw ParseError("duplicate 'tasks' header" + where);
            if (toks.size() != 2)
                throw ParseError("'tasks' header needs a count" + where);
            declared = detail::parse_int(toks[1], "task count");
            if (declared < 0) throw ParseError("negative task count" + where);
            continue;
        }
        if (toks[0] != "task")
            throw ParseError("unexpected line '" + toks[0] + "'" + where);
        if (declared < 0)
            throw ParseError("'tasks <m>' header must come first" + where);
        if (toks.size() != 8 || toks[2] != "reward" || toks[4] != "deps" ||
            toks[6] != "class")
            throw ParseError(
                "expected 'task <id> reward <int> deps <list> class <id>'" +
                where);
        Task task;
        task.id = toks[1];
        task.reward = detail::parse_int(toks[3], "reward");
        if (toks[5] != "none") {
            for (auto& dep : detail::split_commas(toks[5])) {
                if (dep.empty())
                    throw ParseError("empty id in deps list" + where);
                task.deps.insert(std::move(dep));
            }
        }
        if (toks[7] != "none") task.inference_class = toks[7];
        if (graph.contains(task.id))
            throw ParseError("duplicate task id '" + task.id + "'" + where);
        graph.tasks.emplace(task.id, std::move(task));
    }
    if (declared < 0) throw ParseError("missing 'tasks <m>' header");
    if (static_cast<std::size_t>(declared) != graph.task_count())
        throw ParseError("header declares " + std::to_string(declared) +
                         " tasks but file defines " +
                         std::to_string(graph.task_count()));
    validate_task_graph(graph);
    return graph;
}

inline std::string format_task_graph(const TaskGraph& graph) {
    std::ostringstream out;
    out << "tasks " << graph.task_count() << "\n";
    for (const auto& [id, task] : graph.tasks) {
        out << "task " << id << " reward " << task.reward << " deps ";
        if (task.deps.empty()) {
            out << "none";
        } else {
            bool first = true;
            for (const auto& dep : task.deps) {
                if (!first) out << ',';
                out << dep;
                first = false;
            }
        }
        out << " class "
            << (task.inference_class.empty() ? "none" : task.inference_class)
            << "\n";
    }
    return out.str();
}

// Random program-graph instance: tasks "1".."n" in a seeded random
// topological order, each forward pair wired with probability `density`,
// rewards uniform integers in [reward_lo, reward_hi]. Acyclic by
// construction and fully determined by the seed.
inline TaskGraph generate_program_graph(std::size_t n_tasks, double density,
                                        std::int64_t reward_lo,
                                        std::int64_t reward_hi,
                                        std::uint64_t seed) {
    if (n_tasks < 1) throw InvalidParam("n_tasks must be >= 1");
    if (density < 0.0 || density > 1.0)
        throw InvalidParam("density must be in [0, 1]");
    if (reward_lo > reward_hi) throw InvalidParam("empty reward range");
    if (reward_lo < 0) throw InvalidParam("rewards must be non-negative");

    std::vector<TaskId> order(n_tasks);
    for (std::size_t i = 0; i < n_tasks; ++i) order[i] = std::to_string(i + 1);
    Rng order_rng(derive_seed(seed, "graph-order"));
    order_rng.shuffle(order);

    TaskGraph graph;
    for (std::size_t i = 0; i < n_tasks; ++i) {
        Task t;
        t.id = std::to_string(i + 1);
        graph.tasks.emplace(t.id, std::move(t));
    }
    Rng edge_rng(derive_seed(seed, "graph-edges"));
    for (std::size_t b = 1; b < n_tasks; ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            if (edge_rng.bernoulli(density))
                graph.tasks[order[b]].deps.insert(order[a]);
        }
    }
    Rng reward_rng(derive_seed(seed, "graph-rewards"));
    for (auto& [id, task] : graph.tasks)
        task.reward = reward_rng.uniform_int(reward_lo, reward_hi);
    return graph;
}

// Marks each task, with probability q, as a member of one of a small pool
// of shared inference classes ("c0", "c1", ...). Pool size m/8 keeps the
// expected class membership above one, so nontrivial classes actually
// occur. Tasks that do not join keep a private solution.
inline TaskGraph assign_inference_classes(TaskGraph graph, double q,
                                          std::uint64_t seed) {
    if (q < 0.0 || q > 1.0) throw InvalidParam("inference_q must be in [0, 1]");
    if (q == 0.0) return graph;
    const std::uint64_t pools =
        std::max<std::uint64_t>(1, graph.task_count() / 8);
    Rng rng(derive_seed(seed, "inference-classes"));
    for (auto& [id, task] : graph.tasks) {
        if (rng.bernoulli(q))
            task.inference_class = "c" + std::to_string(rng.uniform(pools));
    }
    return graph;
}

namespace detail {

inline std::size_t smallest_subset(const std::vector<TaskSubset>& subsets) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < subsets.size(); ++i)
        if (subsets[i].task_ids.size() < subsets[best].task_ids.size()) best = i;
    return best;
}

}  // namespace detail

// Splits the task set into l disjoint subsets covering all tasks.
//
// Balanced: round-robin over the reward-descending task order (ties by
// ascending id); the seed rotates the starting subset. Sizes differ by at
// most one.
//
// Independent: greedy cut that places each task (in topological order)
// with the subset already holding most of its dependencies, then moves
// low-affinity tasks out of any subset more than 10% above the even share.
// The cut keeps dependency edges inside subsets where it can, which is
// what the cross-group dependency experiments vary.
inline std::vector<TaskSubset> partition_tasks(const TaskGraph& graph,
                                               std::size_t l,
                                               PartitionMode mode,
                                               std::uint64_t seed = 0) {
    const std::size_t m = graph.task_count();
    if (l < 1 || l > m)
        throw InvalidParam("group count " + std::to_string(l) +
                           " not in [1, " + std::to_string(m) + "]");
    std::vector<TaskSubset> subsets(l);
    for (std::size_t k = 0; k < l; ++k) subsets[k].group_id = static_cast<int>(k);

    if (mode == PartitionMode::Balanced) {
        std::vector<const Task*> by_reward;
        by_reward.reserve(m);
        for (const auto& [id, task] : graph.tasks) by_reward.push_back(&task);
        std::stable_sort(by_reward.begin(), by_reward.end(),
                         [](const Task* a, const Task* b) {
                             if (a->reward != b->reward)
                                 return a->reward > b->reward;
                             return natural_less(a->id, b->id);
                         });
        std::size_t k = static_cast<std::size_t>(
            derive_seed(seed, "partition-start") % l);
        for (const Task* task : by_reward) {
            subsets[k].task_ids.insert(task->id);
            k = (k + 1) % l;
        }
        return subsets;
    }

    // Independent mode.
    TaskIdMap<std::size_t> owner;
    TaskIdMap<std::vector<TaskId>> dependents;
    for (const auto& [id, task] : graph.tasks)
        for (const auto& dep : task.deps) dependents[dep].push_back(id);

    for (const auto& id : topological_order(graph)) {
        const Task& task = graph.at(id);
        std::vector<std::size_t> affinity(l, 0);
        for (const auto& dep : task.deps) ++affinity[owner[dep]];
        std::size_t best = detail::smallest_subset(subsets);
        for (std::size_t k = 0; k < l; ++k) {
            if (affinity[k] == 0) continue;
            if (affinity[k] > affinity[best] ||
                (affinity[k] == affinity[best] &&
                 subsets[k].task_ids.size() < subsets[best].task_ids.size()))
                best = k;
        }
        owner[id] = best;
        subsets[best].task_ids.insert(id);
    }

    // Rebalance: cap every subset at ceil(1.1 * m / l) and forbid empties.
    const std::size_t cap = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(1.1 * static_cast<double>(m) / static_cast<double>(l))));
    auto links_inside = [&](const TaskId& id, std::size_t k) {
        std::size_t n = 0;
        for (const auto& dep : graph.at(id).deps)
            if (owner[dep] == k) ++n;
        auto it = dependents.find(id);
        if (it != dependents.end())
            for (const auto& d : it->second)
                if (owner[d] == k) ++n;
        return n;
    };
    auto move_one = [&](std::size_t from, std::size_t to) {
        TaskId pick;
        std::size_t pick_links = 0;
        for (const auto& id : subsets[from].task_ids) {
            std::size_t links = links_inside(id, from);
            if (pick.empty() || links < pick_links) {
                pick = id;
                pick_links = links;
            }
        }
        subsets[from].task_ids.erase(pick);
        subsets[to].task_ids.insert(pick);
        owner[pick] = to;
    };
    for (bool moved = true; moved;) {
        moved = false;
        for (std::size_t k = 0; k < l; ++k) {
            if (!subsets[k].task_ids.empty()) continue;
            std::size_t largest = 0;
            for (std::size_t j = 1; j < l; ++j)
                if (subsets[j].task_ids.size() > subsets[largest].task_ids.size())
                    largest = j;
            move_one(largest, k);
            moved = true;
        }
        for (std::size_t k = 0; k < l; ++k) {
            if (subsets[k].task_ids.size() <= cap) continue;
            move_one(k, detail::smallest_subset(subsets));
            moved = true;
        }
    }
    return subsets;
}

// Tasks that can start now: not yet completed or assigned, and all
// dependencies completed.
inline TaskIdSet ready_tasks(const TaskGraph& graph, const TaskIdSet& completed,
                             const TaskIdSet& assigned) {
    TaskIdSet ready;
    for (const auto& [id, task] : graph.tasks) {
        if (completed.count(id) || assigned.count(id)) continue;
        bool ok = true;
        for (const auto& dep : task.deps) {
            if (!completed.count(dep)) {
                ok = false;
                break;
            }
        }
        if (ok) ready.insert(id);
    }
    return ready;
}

// Clears `completed_task` from every remaining dependency list. Idempotent.
inline TaskGraph update_dependencies(TaskGraph graph,
                                     const TaskId& completed_task) {
    if (!graph.contains(completed_task))
        throw UnknownTask("unknown task id '" + completed_task + "'");
    for (auto& [id, task] : graph.tasks) task.deps.erase(completed_task);
    return graph;
}

// Dependency edges whose endpoints live in different subsets.
inline std::size_t cross_subset_edges(const TaskGraph& graph,
                                      const std::vector<TaskSubset>& subsets) {
    TaskIdMap<int> owner;
    for (const auto& s : subsets)
        for (const auto& id : s.task_ids) owner[id] = s.group_id;
    std::size_t n = 0;
    for (const auto& [id, task] : graph.tasks)
        for (const auto& dep : task.deps)
            if (owner[dep] != owner[id]) ++n;
    return n;
}

}  // namespace coopsim
