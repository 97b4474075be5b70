#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "coopsim/errors.hpp"
#include "coopsim/knowledge.hpp"
#include "coopsim/maze.hpp"
#include "coopsim/taskgraph.hpp"

namespace coopsim {

enum class ControlMode { Centralized, Decentralized };

inline std::string to_string(ControlMode m) {
    return m == ControlMode::Centralized ? "centralized" : "decentralized";
}

enum class AgentState { Idle, Exploring, Waiting };

struct Agent {
    int id = 0;
    int group_id = 0;
    double speed = 1.0;
    AgentState state = AgentState::Idle;
    TaskId current_task;        // valid while exploring
    double finish_time = 0.0;   // valid while exploring
    double waiting_since = 0.0; // valid while waiting
    double total_wait = 0.0;
    std::int64_t rewards_earned = 0;
};

// Ready pool ordered highest reward first, ties by ascending id.
struct ReadyOrder {
    bool operator()(const std::pair<std::int64_t, TaskId>& a,
                    const std::pair<std::int64_t, TaskId>& b) const {
        if (a.first != b.first) return a.first > b.first;
        return natural_less(a.second, b.second);
    }
};
using ReadyQueue = std::set<std::pair<std::int64_t, TaskId>, ReadyOrder>;

// Everything one group owns during a run: its agents, its slice of the
// task set, its knowledge store, and the scheduling state for it.
struct GroupState {
    int id = 0;
    std::vector<Agent> agents;       // ascending agent id
    TaskSubset assigned;             // fixed at partition time
    TaskIdSet completed;
    KnowledgeBase kb;
    TaskIdSet pending;               // being explored right now
    ReadyQueue ready;
    TaskIdMap<std::int64_t> rewards; // rewards of the assigned subset
    double coordinator_free_at = 0.0;
    double last_completion_time = 0.0;

    // Tasks still needing an agent (not done, not being worked).
    std::size_t unassigned_count() const {
        return assigned.task_ids.size() - completed.size() - pending.size();
    }
    bool work_remaining() const { return unassigned_count() > 0; }
    bool finished() const { return completed.size() == assigned.task_ids.size(); }

    void mark_ready(const TaskId& task) {
        ready.emplace(rewards.at(task), task);
    }
};

// One task handed to one agent. When the group store already knows the
// solution the task needs no exploration and completes at dispatch time.
struct Assignment {
    int agent_id = 0;
    TaskId task;
    double dispatch_time = 0.0;
    bool from_knowledge = false;
    Solution known_solution;
};

namespace detail {

inline Assignment start_task(GroupState& group, Agent& agent, double now,
                             double dispatch) {
    auto best = *group.ready.begin();
    group.ready.erase(group.ready.begin());
    Assignment a;
    a.agent_id = agent.id;
    a.task = best.second;
    if (const Solution* hit = lookup(group.kb, best.second)) {
        a.from_knowledge = true;
        a.known_solution = *hit;
        a.dispatch_time = now;  // inference skips the exploration phase
    } else {
        a.dispatch_time = dispatch;
    }
    const double waited_from =
        agent.state == AgentState::Waiting ? agent.waiting_since : now;
    agent.total_wait += a.dispatch_time - waited_from;
    agent.state = AgentState::Exploring;
    agent.current_task = a.task;
    group.pending.insert(a.task);
    return a;
}

}  // namespace detail

// Centralized round: the group coordinator pairs idle agents with ready
// tasks in descending reward order. The coordinator hands tasks out one at
// a time, occupying itself for `delta` per assignment, so dispatches queue
// behind `coordinator_free_at` and agents wait for the handout.
inline std::vector<Assignment> assign_tasks(GroupState& group, double now,
                                            double delta) {
    std::vector<Assignment> out;
    group.coordinator_free_at = std::max(group.coordinator_free_at, now);
    for (Agent& agent : group.agents) {
        if (agent.state == AgentState::Exploring) continue;
        if (group.ready.empty()) break;
        double dispatch = group.coordinator_free_at;
        Assignment a = detail::start_task(group, agent, now, dispatch);
        if (!a.from_knowledge) group.coordinator_free_at = dispatch + delta;
        out.push_back(std::move(a));
    }
    return out;
}

// Decentralized: one idle agent grabs the best ready task itself. The
// shared task list costs `gamma * group size` of contention per pull,
// which the engine folds into the exploration span.
inline std::optional<Assignment> pull_task(GroupState& group, Agent& agent,
                                           double now) {
    if (agent.state == AgentState::Exploring)
        throw StateError("agent is busy and cannot pull");
    if (group.ready.empty()) return std::nullopt;
    return detail::start_task(group, agent, now, now);
}

struct CompletionResult {
    bool rewarded = false;
    std::int64_t reward = 0;
};

// Applies a finished exploration: validation gate, reward allocation,
// knowledge sharing. Returning the task to the ready pool on a failed
// validation is what makes retries happen. Cross-group dependency
// clearing stays with the engine, which owns the dependency board.
inline CompletionResult complete_task(GroupState& group, Agent& agent,
                                      const TaskId& task,
                                      const Solution& solution, double now,
                                      bool validation_passed) {
    if (!group.pending.count(task) || agent.current_task != task ||
        agent.state != AgentState::Exploring)
        throw StateError("task '" + task + "' is not pending for agent " +
                         std::to_string(agent.id));
    group.pending.erase(task);
    agent.state = AgentState::Idle;
    agent.current_task.clear();

    CompletionResult result;
    if (!validation_passed) {
        group.mark_ready(task);  // no reward; someone retries it
        return result;
    }
    group.completed.insert(task);
    group.last_completion_time = now;
    result.rewarded = true;
    result.reward = group.rewards.at(task);
    agent.rewards_earned += result.reward;
    share_knowledge(group.kb, task, solution, now, agent.id);
    return result;
}

// Re-derives idle/waiting states once the event's assignments are done.
// An agent waits only while its group still has tasks nobody works on;
// when the last unassigned task is handed out, open intervals close.
inline void settle_idle_agents(GroupState& group, double now) {
    const bool blocked_work = group.work_remaining();
    for (Agent& agent : group.agents) {
        if (agent.state == AgentState::Exploring) continue;
        if (blocked_work) {
            if (agent.state != AgentState::Waiting) {
                agent.state = AgentState::Waiting;
                agent.waiting_since = now;
            }
        } else if (agent.state == AgentState::Waiting) {
            agent.total_wait += now - agent.waiting_since;
            agent.state = AgentState::Idle;
        }
    }
}

}  // namespace coopsim
