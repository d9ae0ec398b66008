#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>

#include "nbg/common.hpp"
#include "nbg/nodes.hpp"
#include "nbg/reclaim.hpp"
#include "nbg/vertex_store.hpp"

namespace nbg {

struct EdgeResult {
    bool status = false;
    double weight = kInfinity;
    friend bool operator==(const EdgeResult&, const EdgeResult&) = default;
};

struct GraphOptions {
    std::size_t thread_capacity = kDefaultThreadCapacity;
    std::size_t initial_buckets = 16;
    double grow_load = 4.0;
    double shrink_load = 0.25;
    bool auto_resize = true;
};

struct Scratch;

struct ThreadState {
    ThreadState();
    ~ThreadState();
    Context ctx;
    std::uint64_t collect_counter = 0;
    std::unique_ptr<Scratch> scratch;
    std::atomic<bool> in_use{false};
};

class Graph;

// Registration of the calling thread with a graph. Owns a slot id until
// destroyed. Not shareable between threads.
class ThreadHandle {
public:
    ThreadHandle(ThreadHandle&& other) noexcept;
    ThreadHandle& operator=(ThreadHandle&&) = delete;
    ThreadHandle(const ThreadHandle&) = delete;
    ~ThreadHandle();

    std::size_t tid() const noexcept { return tid_; }
    Graph& graph() const noexcept { return *graph_; }

private:
    friend class Graph;
    ThreadHandle(Graph* g, std::size_t tid) : graph_(g), tid_(tid) {}
    Graph* graph_;
    std::size_t tid_;
};

using Adjacency = std::map<Key, std::map<Key, double>>;

struct IntegrityReport {
    StoreReport store;
    std::size_t edges = 0;
    std::size_t stale_edges = 0;     // edges whose target vertex was removed
    std::size_t marked_edges = 0;    // logically removed but still linked
    std::size_t flagged_nodes = 0;   // op words left with a pending descriptor
    bool trees_ordered = true;
    bool ok() const {
        return store.sorted && store.placed && store.unique && store.pred_cleared && flagged_nodes == 0 &&
               trees_ordered;
    }
};

// Concurrent directed weighted graph. Updates are lock-free; every operation
// takes the caller's registration handle.
class Graph {
public:
    explicit Graph(const GraphOptions& opts = {});
    ~Graph();
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // Throws std::runtime_error when every slot is taken.
    ThreadHandle register_thread();

    bool put_vertex(ThreadHandle& h, Key v);
    bool remove_vertex(ThreadHandle& h, Key v);
    bool get_vertex(ThreadHandle& h, Key v);

    struct VertexPair {
        VertexNode* u = nullptr;
        VertexNode* v = nullptr;
        bool ok = false;
    };
    // Both vertices alive. Caller must keep the handle's epoch pinned while it
    // uses the returned nodes.
    VertexPair con_v_plus(ThreadHandle& h, Key u, Key v);

    EdgeResult put_edge(ThreadHandle& h, Key u, Key v, double w);
    EdgeResult remove_edge(ThreadHandle& h, Key u, Key v);
    EdgeResult get_edge(ThreadHandle& h, Key u, Key v);

    // Edge-operation count of the alive vertex v.
    std::optional<std::uint64_t> ecnt(ThreadHandle& h, Key v);

    // Alive vertices with their edges to alive targets. Meant for quiescent use.
    Adjacency export_adjacency(ThreadHandle& h);
    IntegrityReport check_integrity(ThreadHandle& h);

    std::size_t thread_capacity() const noexcept { return opts_.thread_capacity; }
    const GraphOptions& options() const noexcept { return opts_; }
    VertexStore& store() noexcept { return store_; }
    EpochDomain& epochs() noexcept { return epochs_; }
    ThreadState& state(ThreadHandle& h) noexcept { return states_[h.tid()]; }

private:
    friend class ThreadHandle;
    void unregister(std::size_t tid);

    GraphOptions opts_;
    EpochDomain epochs_;
    std::unique_ptr<ThreadState[]> states_;
    VertexStore store_;
};

// Reads the adjacency text format (see adjacency_io.hpp) and inserts vertices
// 0..V-1 followed by every edge. Unweighted files get weight 1. Returns V.
std::size_t load_adjacency(Graph& g, ThreadHandle& h, std::istream& in);

}  // namespace nbg
