#include "nbg/graph.hpp"

#include <stdexcept>

#include "nbg/adjacency_io.hpp"
#include "nbg/edge_tree.hpp"
#include "nbg/snapshot.hpp"

namespace nbg {

ThreadState::ThreadState() : scratch(std::make_unique<Scratch>()) {}
ThreadState::~ThreadState() = default;

ThreadHandle::ThreadHandle(ThreadHandle&& other) noexcept : graph_(other.graph_), tid_(other.tid_) {
    other.graph_ = nullptr;
}

ThreadHandle::~ThreadHandle() {
    if (graph_) graph_->unregister(tid_);
}

namespace {

StoreOptions store_options(const GraphOptions& o) {
    StoreOptions s;
    s.initial_buckets = o.initial_buckets;
    s.grow_load = o.grow_load;
    s.shrink_load = o.shrink_load;
    s.auto_resize = o.auto_resize;
    s.thread_capacity = o.thread_capacity;
    return s;
}

}  // namespace

Graph::Graph(const GraphOptions& opts)
    : opts_(opts),
      epochs_(opts.thread_capacity),
      states_(std::make_unique<ThreadState[]>(opts.thread_capacity)),
      store_(store_options(opts)) {
    for (std::size_t i = 0; i < opts_.thread_capacity; ++i) {
        states_[i].ctx.tid = i;
        states_[i].ctx.epochs = &epochs_;
    }
}

Graph::~Graph() { epochs_.drain(); }

ThreadHandle Graph::register_thread() {
    for (std::size_t i = 0; i < opts_.thread_capacity; ++i) {
        bool expect = false;
        if (states_[i].in_use.compare_exchange_strong(expect, true, std::memory_order_acq_rel)) {
            return ThreadHandle(this, i);
        }
    }
    throw std::runtime_error("graph thread capacity exhausted");
}

void Graph::unregister(std::size_t tid) {
    epochs_.collect(tid);
    states_[tid].in_use.store(false, std::memory_order_release);
}

bool Graph::put_vertex(ThreadHandle& h, Key v) {
    EpochGuard g(epochs_, h.tid());
    return store_.add(state(h).ctx, v);
}

bool Graph::remove_vertex(ThreadHandle& h, Key v) {
    EpochGuard g(epochs_, h.tid());
    return store_.remove(state(h).ctx, v);
}

bool Graph::get_vertex(ThreadHandle& h, Key v) {
    EpochGuard g(epochs_, h.tid());
    return store_.contains(state(h).ctx, v) != nullptr;
}

Graph::VertexPair Graph::con_v_plus(ThreadHandle& h, Key u, Key v) {
    VertexPair r;
    if (u == v) return r;
    Context& ctx = state(h).ctx;
    r.u = store_.contains(ctx, u);
    r.v = store_.contains(ctx, v);
    r.ok = r.u != nullptr && r.v != nullptr;
    return r;
}

EdgeResult Graph::put_edge(ThreadHandle& h, Key u, Key v, double w) {
    require_weight(w);
    EpochGuard g(epochs_, h.tid());
    VertexPair p = con_v_plus(h, u, v);
    if (!p.ok) return {};
    auto r = edge_tree::insert_or_update(state(h).ctx, *p.u, *p.v, w);
    switch (r.outcome) {
        case edge_tree::PutOutcome::Inserted: return {true, kInfinity};
        case edge_tree::PutOutcome::Updated: return {true, r.previous};
        case edge_tree::PutOutcome::Unchanged: return {false, r.previous};
        case edge_tree::PutOutcome::VertexGone: break;
    }
    return {};
}

EdgeResult Graph::remove_edge(ThreadHandle& h, Key u, Key v) {
    EpochGuard g(epochs_, h.tid());
    VertexPair p = con_v_plus(h, u, v);
    if (!p.ok) return {};
    auto r = edge_tree::remove(state(h).ctx, *p.u, *p.v);
    if (!r.removed) return {};
    return {true, r.weight};
}

EdgeResult Graph::get_edge(ThreadHandle& h, Key u, Key v) {
    EpochGuard g(epochs_, h.tid());
    VertexPair p = con_v_plus(h, u, v);
    if (!p.ok) return {};
    Payload* e = edge_tree::lookup(state(h).ctx, *p.u, v);
    if (!e || e->target != p.v) return {};
    if (p.u->marked() || p.v->marked()) return {};
    return {true, e->weight};
}

std::optional<std::uint64_t> Graph::ecnt(ThreadHandle& h, Key v) {
    EpochGuard g(epochs_, h.tid());
    VertexNode* n = store_.contains(state(h).ctx, v);
    if (!n) return std::nullopt;
    return n->oi.ecnt();
}

Adjacency Graph::export_adjacency(ThreadHandle& h) {
    EpochGuard g(epochs_, h.tid());
    Adjacency out;
    std::vector<const EdgeNode*> stack;
    store_.for_each_alive(state(h).ctx, [&](VertexNode* v) {
        auto& row = out[v->key];
        edge_tree::in_order_collect(v->root, stack, [&](const Payload& p) {
            if (!p.target->marked()) row[p.key] = p.weight;
        });
    });
    return out;
}

IntegrityReport Graph::check_integrity(ThreadHandle& h) {
    EpochGuard g(epochs_, h.tid());
    IntegrityReport rep;
    Context& ctx = state(h).ctx;
    rep.store = store_.inspect(ctx);
    std::vector<const EdgeNode*> stack;
    store_.for_each_alive(ctx, [&](VertexNode* v) {
        edge_tree::TreeReport t = edge_tree::inspect(v->root);
        rep.marked_edges += t.marked;
        rep.flagged_nodes += t.flagged;
        if (!t.ordered) rep.trees_ordered = false;
        edge_tree::in_order_collect(v->root, stack, [&](const Payload& p) {
            if (p.target->marked()) {
                ++rep.stale_edges;
            } else {
                ++rep.edges;
            }
        });
    });
    return rep;
}

std::size_t load_adjacency(Graph& g, ThreadHandle& h, std::istream& in) {
    EdgeList list = read_adjacency(in);
    for (std::size_t v = 0; v < list.vertices; ++v) g.put_vertex(h, static_cast<Key>(v));
    for (const EdgeRecord& e : list.edges) g.put_edge(h, e.src, e.dst, list.weighted ? e.weight : 1.0);
    return list.vertices;
}

}  // namespace nbg
