#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coopsim/engine.hpp"
#include "coopsim/errors.hpp"

namespace coopsim {

// Scenario files are flat `key = value` text. `#` starts a comment, blank
// lines are skipped, every key is optional except that a run needs either
// `graph` (a task-graph file path) or `tasks` (generator size). Unknown
// keys are rejected so typos fail loudly.
//
//   graph = data/g10.graph   # or: tasks = 40 / density = 0.1 / reward_lo..
//   groups = 2               # alias: l
//   agents = 10              # defaults to 5 per group
//   control = decentralized  # or centralized
//   partition = balanced     # or independent
//   maze = 15x15
//   speed = 1.0
//   speeds = 1.0,2.0         # per-agent override, length must equal agents
//   inference_q = 0.2
//   validation_fail_p = 0.0
//   assign_overhead = 0.05
//   pull_overhead = 0.002
//   split_overhead = 0.5
//   collect_overhead = 0.5
//   seed = 1
//   trace = false

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double field_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw SchemaError(key, "expected a number, got '" + value + "'");
    return out;
}

inline std::int64_t field_int(const std::string& key, const std::string& value) {
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw SchemaError(key, "expected an integer, got '" + value + "'");
    return out;
}

inline std::uint64_t field_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw SchemaError(key, "expected a non-negative integer, got '" + value + "'");
    return out;
}

inline bool field_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw SchemaError(key, "expected true/false, got '" + value + "'");
}

inline double field_prob(const std::string& key, const std::string& value) {
    double p = field_double(key, value);
    if (p < 0.0 || p > 1.0)
        throw SchemaError(key, "must be in [0, 1], got '" + value + "'");
    return p;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace detail

// Parses scenario config text. Graph paths are resolved against
// `base_dir` when given (load_scenario_file passes the config's own
// directory), otherwise against the working directory.
inline Scenario load_scenario(std::string_view source,
                              const std::string& base_dir = "") {
    using detail::trim;
    Scenario s;
    std::string graph_path;
    bool has_generator = false;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t nl = source.find('\n', pos);
        std::string_view raw = source.substr(
            pos, nl == std::string_view::npos ? source.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;

        std::string line(raw);
        if (std::size_t hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        if (value.empty()) throw SchemaError(key, "empty value");
        if (!seen.insert(key).second) throw SchemaError(key, "duplicate key");

        if (key == "graph") {
            graph_path = value;
        } else if (key == "tasks") {
            std::int64_t n = detail::field_int(key, value);
            if (n < 1) throw SchemaError(key, "must be at least 1");
            s.generator.n_tasks = static_cast<std::size_t>(n);
            has_generator = true;
        } else if (key == "density") {
            s.generator.density = detail::field_prob(key, value);
        } else if (key == "reward_lo") {
            s.generator.reward_lo = detail::field_int(key, value);
        } else if (key == "reward_hi") {
            s.generator.reward_hi = detail::field_int(key, value);
        } else if (key == "groups" || key == "l") {
            std::int64_t l = detail::field_int(key, value);
            if (l < 1) throw SchemaError(key, "must be at least 1");
            s.groups = static_cast<std::size_t>(l);
        } else if (key == "agents") {
            std::int64_t n = detail::field_int(key, value);
            if (n < 1) throw SchemaError(key, "must be at least 1");
            s.total_agents = static_cast<std::size_t>(n);
        } else if (key == "control") {
            if (value == "centralized") s.control = ControlMode::Centralized;
            else if (value == "decentralized") s.control = ControlMode::Decentralized;
            else throw SchemaError(key, "expected centralized or decentralized");
        } else if (key == "partition") {
            if (value == "balanced") s.partition = PartitionMode::Balanced;
            else if (value == "independent") s.partition = PartitionMode::Independent;
            else throw SchemaError(key, "expected balanced or independent");
        } else if (key == "maze") {
            std::size_t x = value.find('x');
            if (x == std::string::npos)
                throw SchemaError(key, "expected WIDTHxHEIGHT, got '" + value + "'");
            std::int64_t w = detail::field_int(key, trim(value.substr(0, x)));
            std::int64_t h = detail::field_int(key, trim(value.substr(x + 1)));
            if (w < 2 || h < 2) throw SchemaError(key, "sides must be at least 2");
            s.maze_width = static_cast<int>(w);
            s.maze_height = static_cast<int>(h);
        } else if (key == "speed") {
            double v = detail::field_double(key, value);
            if (v <= 0.0) throw SchemaError(key, "must be positive");
            s.agent_speed = v;
        } else if (key == "speeds") {
            std::vector<double> speeds;
            std::size_t start = 0;
            while (start <= value.size()) {
                std::size_t comma = value.find(',', start);
                std::string item = trim(value.substr(
                    start, comma == std::string::npos ? std::string::npos
                                                      : comma - start));
                if (item.empty()) throw SchemaError(key, "empty list entry");
                double v = detail::field_double(key, item);
                if (v <= 0.0) throw SchemaError(key, "speeds must be positive");
                speeds.push_back(v);
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            s.agent_speeds = std::move(speeds);
        } else if (key == "inference_q") {
            s.inference_q = detail::field_prob(key, value);
        } else if (key == "validation_fail_p") {
            s.validation_fail_p = detail::field_prob(key, value);
            if (s.validation_fail_p >= 1.0)
                throw SchemaError(key, "must be below 1 or tasks retry forever");
        } else if (key == "assign_overhead") {
            double v = detail::field_double(key, value);
            if (v < 0.0) throw SchemaError(key, "must be non-negative");
            s.assign_overhead = v;
        } else if (key == "pull_overhead") {
            double v = detail::field_double(key, value);
            if (v < 0.0) throw SchemaError(key, "must be non-negative");
            s.pull_overhead = v;
        } else if (key == "split_overhead") {
            double v = detail::field_double(key, value);
            if (v < 0.0) throw SchemaError(key, "must be non-negative");
            s.split_overhead = v;
        } else if (key == "collect_overhead") {
            double v = detail::field_double(key, value);
            if (v < 0.0) throw SchemaError(key, "must be non-negative");
            s.collect_overhead = v;
        } else if (key == "seed") {
            s.master_seed = detail::field_u64(key, value);
        } else if (key == "trace") {
            s.trace = detail::field_bool(key, value);
        } else {
            throw SchemaError(key, "unknown key");
        }
    }

    if (!graph_path.empty() && has_generator)
        throw SchemaError("graph", "give either a graph file or a task count, not both");
    if (graph_path.empty() && !has_generator)
        throw SchemaError("graph", "a graph file or a task count is required");
    if (!seen.count("agents")) s.total_agents = 5 * s.groups;
    if (!graph_path.empty()) {
        std::string full = graph_path;
        if (!base_dir.empty() && graph_path.front() != '/')
            full = base_dir + "/" + graph_path;
        s.graph = load_task_graph(detail::read_text_file(full));
    }
    if (!s.agent_speeds.empty() && s.agent_speeds.size() != s.total_agents)
        throw SchemaError("speeds", "need exactly one speed per agent (" +
                                        std::to_string(s.total_agents) + ")");
    try {
        validate_scenario(s);
    } catch (const InvalidParam& e) {
        throw SchemaError("scenario", e.what());
    }
    return s;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::string text = detail::read_text_file(path);
    std::size_t slash = path.find_last_of('/');
    std::string dir = slash == std::string::npos ? "" : path.substr(0, slash);
    return load_scenario(text, dir);
}

}  // namespace coopsim
