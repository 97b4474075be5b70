#include "coopsim/knowledge.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "coopsim/rng.hpp"
#include "coopsim/taskgraph.hpp"

using namespace coopsim;

namespace {

Solution make_solution(const TaskId& task, int marker) {
    Solution s;
    s.task_id = task;
    s.path = {{marker, 0}, {marker, 1}};
    s.steps_explored = static_cast<std::size_t>(marker);
    return s;
}

TaskGraph classed_graph() {
    // 1 and 2 share class "alpha"; 3 shares "beta" with 4; 5 is private.
    TaskGraph g;
    for (int i = 1; i <= 5; ++i) {
        Task t;
        t.id = std::to_string(i);
        t.reward = 1;
        g.tasks.emplace(t.id, std::move(t));
    }
    g.tasks["1"].inference_class = "alpha";
    g.tasks["2"].inference_class = "alpha";
    g.tasks["3"].inference_class = "beta";
    g.tasks["4"].inference_class = "beta";
    return g;
}

TEST(Knowledge, DirectLookupAfterShare) {
    KnowledgeBase kb(0, classed_graph());
    EXPECT_EQ(lookup(kb, "5"), nullptr);
    share_knowledge(kb, "5", make_solution("5", 7), 2.5, 11);
    ASSERT_NE(lookup(kb, "5"), nullptr);
    EXPECT_EQ(*lookup(kb, "5"), make_solution("5", 7));
    EXPECT_EQ(kb.entries.at("5").learned_at, 2.5);
    EXPECT_EQ(kb.entries.at("5").source_agent, 11);
}

TEST(Knowledge, ClassMatesAreAnswerableWithoutExploration) {
    KnowledgeBase kb(0, classed_graph());
    share_knowledge(kb, "1", make_solution("1", 3), 1.0, 0);
    // Task 2 was never shared, but its class has a canonical solution.
    ASSERT_NE(lookup(kb, "2"), nullptr);
    EXPECT_EQ(*lookup(kb, "2"), make_solution("1", 3));
    EXPECT_EQ(lookup(kb, "3"), nullptr);  // different class
    EXPECT_EQ(lookup(kb, "5"), nullptr);  // no class
}

TEST(Knowledge, FirstSharePerClassIsCanonical) {
    KnowledgeBase kb(0, classed_graph());
    share_knowledge(kb, "1", make_solution("1", 3), 1.0, 0);
    share_knowledge(kb, "2", make_solution("2", 9), 2.0, 1);
    // The later share of a class mate adopts the canonical solution, so
    // every member of the class answers identically.
    EXPECT_EQ(*lookup(kb, "2"), make_solution("1", 3));
    EXPECT_EQ(*lookup(kb, "1"), make_solution("1", 3));
}

TEST(Knowledge, ResharingIsANoOp) {
    KnowledgeBase kb(0, classed_graph());
    share_knowledge(kb, "5", make_solution("5", 1), 1.0, 0);
    share_knowledge(kb, "5", make_solution("5", 2), 2.0, 1);
    EXPECT_EQ(*lookup(kb, "5"), make_solution("5", 1));
    EXPECT_EQ(kb.entries.at("5").source_agent, 0);
}

TEST(Knowledge, KnownTasksListsDirectAndInferred) {
    KnowledgeBase kb(0, classed_graph());
    EXPECT_TRUE(known_tasks(kb).empty());
    share_knowledge(kb, "1", make_solution("1", 3), 1.0, 0);
    EXPECT_EQ(known_tasks(kb), (TaskIdSet{"1", "2"}));
    share_knowledge(kb, "3", make_solution("3", 4), 2.0, 0);
    EXPECT_EQ(known_tasks(kb), (TaskIdSet{"1", "2", "3", "4"}));
}

TEST(Knowledge, TransitivityHoldsUnderRandomShareOrders) {
    // Share random subsets in random order; the one-canonical-solution
    // rule must keep the store transitive after every single share.
    TaskGraph g = generate_program_graph(24, 0.0, 1, 5, 99);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        TaskGraph classed =
            assign_inference_classes(g, 0.5, derive_seed(seed, "cls"));
        KnowledgeBase kb(0, classed);
        std::vector<TaskId> order;
        for (const auto& [id, t] : classed.tasks) order.push_back(id);
        Rng rng(derive_seed(seed, "order"));
        rng.shuffle(order);
        int marker = 0;
        for (const TaskId& id : order) {
            ++marker;
            share_knowledge(kb, id, make_solution(id, marker),
                            static_cast<double>(marker), 0);
            ASSERT_TRUE(transitivity_check(kb))
                << "seed " << seed << " after sharing " << id;
        }
    }
}

TEST(Knowledge, TransitivityCatchesACorruptedStore) {
    KnowledgeBase kb(0, classed_graph());
    share_knowledge(kb, "1", make_solution("1", 3), 1.0, 0);
    share_knowledge(kb, "2", make_solution("2", 9), 2.0, 1);
    ASSERT_TRUE(transitivity_check(kb));
    // Force a divergent entry behind the API's back.
    kb.entries.at("2").solution = make_solution("2", 9);
    EXPECT_FALSE(transitivity_check(kb));
}

}  // namespace
