#include "coopsim/control.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "coopsim/knowledge.hpp"
#include "coopsim/taskgraph.hpp"

using namespace coopsim;

namespace {

constexpr double kDelta = 0.05;

// A group with `agents` idle members and the given (id, reward) tasks all
// ready at once.
GroupState make_group(int agents,
                      const std::vector<std::pair<TaskId, std::int64_t>>& tasks) {
    TaskGraph graph;
    for (const auto& [id, reward] : tasks) {
        Task t;
        t.id = id;
        t.reward = reward;
        graph.tasks.emplace(id, std::move(t));
    }
    GroupState g;
    g.id = 0;
    g.kb = KnowledgeBase(0, graph);
    for (const auto& [id, reward] : tasks) {
        g.assigned.task_ids.insert(id);
        g.rewards[id] = reward;
        g.mark_ready(id);
    }
    for (int i = 0; i < agents; ++i) {
        Agent a;
        a.id = i;
        a.group_id = 0;
        g.agents.push_back(a);
    }
    return g;
}

Solution make_solution(const TaskId& task) {
    Solution s;
    s.task_id = task;
    s.path = {{0, 0}, {0, 1}};
    s.steps_explored = 2;
    return s;
}

TEST(AssignTasks, CoordinatorSerializesDispatches) {
    GroupState g = make_group(3, {{"a", 5}, {"b", 9}, {"c", 7}});
    auto out = assign_tasks(g, 0.0, kDelta);
    ASSERT_EQ(out.size(), 3u);
    // Highest reward first, one dispatch slot each.
    EXPECT_EQ(out[0].task, "b");
    EXPECT_EQ(out[1].task, "c");
    EXPECT_EQ(out[2].task, "a");
    EXPECT_DOUBLE_EQ(out[0].dispatch_time, 0.0);
    EXPECT_DOUBLE_EQ(out[1].dispatch_time, kDelta);
    EXPECT_DOUBLE_EQ(out[2].dispatch_time, 2 * kDelta);
    EXPECT_DOUBLE_EQ(g.coordinator_free_at, 3 * kDelta);
    // Agents are taken in id order and the dispatch delay is waiting time.
    EXPECT_EQ(out[0].agent_id, 0);
    EXPECT_EQ(out[2].agent_id, 2);
    EXPECT_DOUBLE_EQ(g.agents[0].total_wait, 0.0);
    EXPECT_DOUBLE_EQ(g.agents[1].total_wait, kDelta);
    EXPECT_DOUBLE_EQ(g.agents[2].total_wait, 2 * kDelta);
    for (const Agent& a : g.agents) EXPECT_EQ(a.state, AgentState::Exploring);
    EXPECT_EQ(g.pending.size(), 3u);
    EXPECT_TRUE(g.ready.empty());
}

TEST(AssignTasks, MoreTasksThanAgentsLeavesRest) {
    GroupState g = make_group(1, {{"a", 5}, {"b", 9}});
    auto out = assign_tasks(g, 1.0, kDelta);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].task, "b");
    EXPECT_DOUBLE_EQ(out[0].dispatch_time, 1.0);
    EXPECT_EQ(g.ready.size(), 1u);
    EXPECT_EQ(g.unassigned_count(), 1u);
}

TEST(AssignTasks, ReuseKeepsCoordinatorClock) {
    GroupState g = make_group(2, {{"a", 5}, {"b", 9}});
    assign_tasks(g, 0.0, kDelta);
    // Later rounds queue behind the clock only if it is still ahead.
    g.mark_ready("a");  // pretend a retry
    g.pending.erase("a");
    g.agents[0].state = AgentState::Idle;
    auto out = assign_tasks(g, 10.0, kDelta);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out[0].dispatch_time, 10.0);
}

TEST(AssignTasks, KnownSolutionSkipsTheCoordinator) {
    GroupState g = make_group(2, {{"a", 5}, {"b", 9}});
    // Both tasks share a class; learn one of them first.
    g.kb.class_of["a"] = "cls";
    g.kb.class_of["b"] = "cls";
    share_knowledge(g.kb, "a", make_solution("a"), 0.0, 7);
    g.completed.insert("a");
    g.ready.erase({5, "a"});
    g.assigned.task_ids.erase("a");

    auto out = assign_tasks(g, 3.0, kDelta);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].from_knowledge);
    EXPECT_EQ(out[0].known_solution, make_solution("a"));
    EXPECT_DOUBLE_EQ(out[0].dispatch_time, 3.0);
    // The handout cost nothing: the clock did not move.
    EXPECT_DOUBLE_EQ(g.coordinator_free_at, 3.0);
}

TEST(PullTask, TakesBestRewardImmediately) {
    GroupState g = make_group(3, {{"a", 5}, {"b", 9}});
    auto a = pull_task(g, g.agents[0], 2.0);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->task, "b");
    EXPECT_DOUBLE_EQ(a->dispatch_time, 2.0);
    EXPECT_FALSE(a->from_knowledge);
    EXPECT_EQ(g.agents[0].state, AgentState::Exploring);
    EXPECT_THROW(pull_task(g, g.agents[0], 2.0), StateError);
    auto b = pull_task(g, g.agents[1], 2.0);
    ASSERT_TRUE(b.has_value());
    EXPECT_EQ(b->task, "a");
    EXPECT_TRUE(g.ready.empty());
    // Nothing left: an idle agent's pull comes back empty.
    EXPECT_FALSE(pull_task(g, g.agents[2], 2.0).has_value());
}

TEST(PullTask, ClosesAWaitingInterval) {
    GroupState g = make_group(1, {{"a", 5}});
    g.agents[0].state = AgentState::Waiting;
    g.agents[0].waiting_since = 1.0;
    auto a = pull_task(g, g.agents[0], 4.0);
    ASSERT_TRUE(a.has_value());
    EXPECT_DOUBLE_EQ(g.agents[0].total_wait, 3.0);
}

TEST(CompleteTask, RewardsAndShares) {
    GroupState g = make_group(1, {{"a", 5}, {"b", 9}});
    assign_tasks(g, 0.0, kDelta);  // agent 0 takes "b"
    auto res = complete_task(g, g.agents[0], "b", make_solution("b"), 7.0, true);
    EXPECT_TRUE(res.rewarded);
    EXPECT_EQ(res.reward, 9);
    EXPECT_EQ(g.agents[0].rewards_earned, 9);
    EXPECT_EQ(g.agents[0].state, AgentState::Idle);
    EXPECT_EQ(g.completed, (TaskIdSet{"b"}));
    EXPECT_TRUE(g.pending.empty());
    EXPECT_DOUBLE_EQ(g.last_completion_time, 7.0);
    ASSERT_NE(lookup(g.kb, "b"), nullptr);
}

TEST(CompleteTask, FailedValidationReturnsTaskToReady) {
    GroupState g = make_group(1, {{"a", 5}});
    assign_tasks(g, 0.0, kDelta);
    auto res = complete_task(g, g.agents[0], "a", make_solution("a"), 3.0, false);
    EXPECT_FALSE(res.rewarded);
    EXPECT_EQ(g.agents[0].rewards_earned, 0);
    EXPECT_TRUE(g.completed.empty());
    EXPECT_EQ(g.ready.size(), 1u);  // retryable
    EXPECT_EQ(lookup(g.kb, "a"), nullptr);
    EXPECT_DOUBLE_EQ(g.last_completion_time, 0.0);
}

TEST(CompleteTask, RejectsMismatchedState) {
    GroupState g = make_group(2, {{"a", 5}, {"b", 9}});
    assign_tasks(g, 0.0, kDelta);
    // Wrong task for this agent.
    EXPECT_THROW(
        complete_task(g, g.agents[0], "a", make_solution("a"), 1.0, true),
        StateError);
    // Unknown / not pending task.
    complete_task(g, g.agents[0], "b", make_solution("b"), 1.0, true);
    EXPECT_THROW(
        complete_task(g, g.agents[0], "b", make_solution("b"), 2.0, true),
        StateError);
}

TEST(SettleIdleAgents, WaitsOnlyWhileWorkIsUnassigned) {
    GroupState g = make_group(3, {{"a", 5}, {"b", 9}});
    // One ready task taken, one still unassigned: idle agents wait.
    pull_task(g, g.agents[0], 0.0);
    g.ready.clear();  // pretend "a" is blocked on a dependency
    settle_idle_agents(g, 0.0);
    EXPECT_EQ(g.agents[1].state, AgentState::Waiting);
    EXPECT_EQ(g.agents[2].state, AgentState::Waiting);
    EXPECT_DOUBLE_EQ(g.agents[1].waiting_since, 0.0);

    // "a" gets assigned later: nothing unassigned remains, intervals close.
    g.mark_ready("a");
    pull_task(g, g.agents[1], 4.0);
    settle_idle_agents(g, 4.0);
    EXPECT_EQ(g.agents[2].state, AgentState::Idle);
    EXPECT_DOUBLE_EQ(g.agents[2].total_wait, 4.0);
    // The puller's own interval closed at pull time.
    EXPECT_DOUBLE_EQ(g.agents[1].total_wait, 4.0);
}

TEST(SettleIdleAgents, NoWaitWithNothingLeft) {
    GroupState g = make_group(2, {{"a", 5}});
    pull_task(g, g.agents[0], 0.0);
    settle_idle_agents(g, 0.0);
    // The only task is being worked; the second agent idles free of charge.
    EXPECT_EQ(g.agents[1].state, AgentState::Idle);
    EXPECT_DOUBLE_EQ(g.agents[1].total_wait, 0.0);
}

}  // namespace
