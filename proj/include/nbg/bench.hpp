#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbg/adjacency_io.hpp"
#include "nbg/snapshot.hpp"

namespace nbg::bench {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class QueryKind { Bfs, Sssp, Bc };

const char* to_string(QueryKind k) noexcept;
QueryKind parse_query_kind(const std::string& s);
Consistency parse_mode(const std::string& s);
const char* mode_name(Consistency m) noexcept;

// Percentages of updates, searches and queries.
struct Distribution {
    double update = 40;
    double search = 10;
    double query = 50;
};

// Parses "U/S/Q"; the three parts must sum to 100.
Distribution parse_dist(const std::string& s);
std::string format_dist(const Distribution& d);

enum class OpClass : int { PutVertex, RemoveVertex, PutEdge, RemoveEdge, GetVertex, GetEdge, Query, Count };
inline constexpr std::size_t kOpClasses = static_cast<std::size_t>(OpClass::Count);
const char* to_string(OpClass c) noexcept;

// Probability of each class: a quarter of the update share per update kind, half
// of the search share per search kind.
std::array<double, kOpClasses> class_probabilities(const Distribution& d);

struct PlannedOp {
    OpClass cls;
    Key a;
    Key b;
    double w;
    friend bool operator==(const PlannedOp&, const PlannedOp&) = default;
};

struct WorkloadSpec {
    Distribution dist;
    QueryKind query = QueryKind::Bfs;
    std::size_t total_ops = 10000;
    double warmup_fraction = 0.05;
    Consistency mode = Consistency::Linearizable;
    std::size_t iterations = 5;
    std::uint64_t seed = 1;
    std::chrono::milliseconds query_timeout{30000};
    std::chrono::milliseconds window{100};
    bool verify = false;  // post-run structural and oracle checks
};

void validate(const WorkloadSpec& spec, std::size_t threads);

// Per-thread op streams. Thread t gets ops / threads operations, the first
// ops % threads threads one more. Keys are uniform in [0, 2V); query sources
// in [0, V).
std::vector<std::vector<PlannedOp>> plan_ops(const WorkloadSpec& spec, std::size_t threads, std::size_t ops,
                                             std::size_t vertices, std::uint64_t seed);

struct ClassStats {
    std::uint64_t count = 0;
    double mean_latency_us = 0;
};

struct RunReport {
    std::size_t threads = 0;
    std::string dist;
    std::string graph;
    std::string mode;
    std::string query;
    std::size_t ops = 0;
    std::size_t iterations = 0;
    double wall_seconds = 0;
    double throughput = 0;  // timed ops per second
    std::array<ClassStats, kOpClasses> classes{};
    double mean_collects = 0;  // over queries that returned an answer
    double mean_interrupts = 0;
    std::uint64_t windows = 0;
    std::uint64_t stalled_windows = 0;
    bool starved = false;
    bool verified = false;
    std::string verify_detail;
};

// Loads a fresh graph per iteration, runs warmup then the timed stream on
// `threads` workers, and returns the iteration with the median wall time.
RunReport run(const WorkloadSpec& spec, const EdgeList& graph, std::size_t threads, const std::string& graph_name);

void emit_csv(const std::vector<RunReport>& reports, std::ostream& out);

}  // namespace nbg::bench
