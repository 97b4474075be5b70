#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "coopsim/maze.hpp"
#include "coopsim/taskgraph.hpp"

namespace coopsim {

struct KnowledgeEntry {
    TaskId task_id;
    Solution solution;
    double learned_at = 0.0;
    int source_agent = -1;
};

// Group-scoped store of explored solutions plus the inference-class index.
// Knowledge never leaves the group: each group owns exactly one of these.
// A class keeps a single canonical solution (the first one learned); tasks
// of that class are interchangeable, so later entries adopt it.
struct KnowledgeBase {
    int group_id = 0;
    TaskIdMap<KnowledgeEntry> entries;
    std::map<std::string, Solution> class_index;
    TaskIdMap<std::string> class_of;

    KnowledgeBase() = default;
    KnowledgeBase(int group, const TaskGraph& graph) : group_id(group) {
        for (const auto& [id, task] : graph.tasks)
            class_of[id] = task.inference_class;
    }
};

inline const std::string& inference_class_of(const KnowledgeBase& kb,
                                             const TaskId& task) {
    static const std::string none;
    auto it = kb.class_of.find(task);
    return it == kb.class_of.end() ? none : it->second;
}

// Direct entry first, then the task's inference class. Null means the
// group has to explore.
inline const Solution* lookup(const KnowledgeBase& kb, const TaskId& task) {
    auto it = kb.entries.find(task);
    if (it != kb.entries.end()) return &it->second.solution;
    const std::string& cls = inference_class_of(kb, task);
    if (!cls.empty()) {
        auto ci = kb.class_index.find(cls);
        if (ci != kb.class_index.end()) return &ci->second;
    }
    return nullptr;
}

// Records a validated solution for the whole group. Re-sharing a task is a
// no-op (the earliest entry wins), and a task whose class already has a
// canonical solution stores that one.
inline void share_knowledge(KnowledgeBase& kb, const TaskId& task,
                            const Solution& solution, double now,
                            int source_agent) {
    if (kb.entries.count(task)) return;
    const std::string& cls = inference_class_of(kb, task);
    KnowledgeEntry entry{task, solution, now, source_agent};
    if (!cls.empty()) {
        auto ci = kb.class_index.find(cls);
        if (ci != kb.class_index.end())
            entry.solution = ci->second;
        else
            kb.class_index.emplace(cls, solution);
    }
    kb.entries.emplace(task, std::move(entry));
}

// Knowledge transitivity, stated over the group store: every solution an
// agent contributed is reachable, under the same class, from every task of
// that class. Group membership is implicit since the store is group-wide.
inline bool transitivity_check(const KnowledgeBase& kb) {
    for (const auto& [task, entry] : kb.entries) {
        const std::string& cls = inference_class_of(kb, task);
        if (cls.empty()) continue;
        for (const auto& [other, other_cls] : kb.class_of) {
            if (other_cls != cls) continue;
            const Solution* found = lookup(kb, other);
            if (found == nullptr || !(*found == entry.solution)) return false;
        }
    }
    return true;
}

// Tasks currently answerable from the store, directly or via a class.
inline TaskIdSet known_tasks(const KnowledgeBase& kb) {
    TaskIdSet known;
    for (const auto& [task, cls] : kb.class_of)
        if (lookup(kb, task) != nullptr) known.insert(task);
    return known;
}

}  // namespace coopsim
