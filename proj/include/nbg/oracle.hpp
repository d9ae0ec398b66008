#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbg/adjacency_io.hpp"
#include "nbg/graph.hpp"
#include "nbg/queries.hpp"

namespace nbg::oracle {

// Sequential reference graph. Self-loops are rejected like in Graph.
class SeqGraph {
public:
    SeqGraph() = default;
    explicit SeqGraph(Adjacency adj) : adj_(std::move(adj)) {}
    static SeqGraph from_edges(const EdgeList& list);

    bool put_vertex(Key v);
    bool remove_vertex(Key v);
    bool get_vertex(Key v) const { return adj_.contains(v); }
    EdgeResult put_edge(Key u, Key v, double w);
    EdgeResult remove_edge(Key u, Key v);
    EdgeResult get_edge(Key u, Key v) const;

    const Adjacency& adjacency() const noexcept { return adj_; }
    std::size_t vertex_count() const noexcept { return adj_.size(); }
    // Canonical text form, equal for equal graphs.
    std::string state_key() const;

private:
    Adjacency adj_;
};

// Breadth-first tree with neighbours taken in key order. Empty if v is absent.
std::vector<BfsEntry> bfs(const SeqGraph& g, Key source);

struct SsspOutcome {
    bool present = false;
    bool neg_cycle = false;
    std::map<Key, double> dist;  // reachable vertices only
};

// Textbook Bellman-Ford: V-1 rounds over every edge plus one probe round.
SsspOutcome bellman_ford(const SeqGraph& g, Key source);

// Betweenness of v from explicit pair enumeration over unweighted shortest paths.
double brute_bc(const SeqGraph& g, Key v);

enum class OpKind { PutVertex, RemoveVertex, GetVertex, PutEdge, RemoveEdge, GetEdge, Bfs, Sssp };

struct Op {
    OpKind kind;
    Key a = 0;
    Key b = 0;
    double w = 0;
};

const char* op_name(OpKind k) noexcept;
std::string op_args(const Op& op);
std::optional<Op> parse_op(const std::string& name, const std::string& args);

// Return values in the shared text encoding used by histories.
std::string format_bool(bool b);
std::string format_edge(const EdgeResult& r);
std::string format_bfs(const std::vector<BfsEntry>& tree);
std::string format_sssp(const SsspResult& r);
std::string format_sssp(const SsspOutcome& r);

std::string seq_apply(SeqGraph& g, const Op& op);

// Runs op on the concurrent graph and encodes the result like seq_apply.
std::string apply(Graph& g, ThreadHandle& h, const Op& op);

struct Event {
    std::uint64_t seq;
    std::size_t tid;
    char phase;  // 'I' or 'R'
    std::string op;
    std::string args;
    std::string ret;
};

// Lock-free per-thread event logs stamped from one global sequence counter.
class HistoryRecorder {
public:
    explicit HistoryRecorder(std::size_t threads) : logs_(threads) {}
    void invoke(std::size_t tid, const Op& op);
    void respond(std::size_t tid, const std::string& ret);
    std::vector<Event> events() const;  // ordered by seq

private:
    std::atomic<std::uint64_t> seq_{0};
    std::vector<std::vector<Event>> logs_;
};

void write_history(const std::vector<Event>& events, std::ostream& out);
std::vector<Event> read_history(std::istream& in);

struct LinearizabilityResult {
    bool ok = false;
    std::string detail;  // first event no witness order could place, when !ok
};

// Exhaustive search for a sequential witness consistent with real-time order.
// Unanswered invocations may be placed anywhere or dropped.
LinearizabilityResult check_linearizable(const std::vector<Event>& history, const SeqGraph& initial);

inline constexpr std::size_t kMaxCheckedOps = 20;

// Pairs of calls whose invocation-response intervals overlap.
std::size_t overlapping_pairs(const std::vector<Event>& history);

struct HistoryShape {
    std::size_t threads = 4;
    std::size_t ops_per_thread = 4;
    Key keys = 4;         // vertex keys drawn from [0, keys)
    bool queries = true;  // mix in bfs and sssp
};

struct RecordedHistory {
    EdgeList initial;  // vertices 0..keys-1 with random weighted edges
    std::vector<Event> events;
};

// Loads a random initial graph, then runs a short random workload with
// shape.threads concurrent threads and records every call. Workers yield at
// each step point inside edge updates.
RecordedHistory record_history(std::uint64_t seed, const HistoryShape& shape = {});

}  // namespace nbg::oracle
