#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nbg/edge_tree.hpp"
#include "nbg/graph.hpp"

namespace nbg {

enum class Consistency { Linearizable, SingleCollect };

struct QueryOptions {
    Consistency mode = Consistency::Linearizable;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Test hook, called after every collect with its 1-based index.
    std::function<void(std::uint32_t)> after_collect;
};

struct QueryStats {
    std::uint32_t collects = 0;
};

struct SnapNode {
    VertexNode* n;
    std::int32_t parent;  // index into the same chain, -1 for the source
    std::uint64_t ecnt_stamp;
    std::uint32_t edge_begin = 0;  // span of this vertex's payloads in Chain::edges
    std::uint32_t edge_end = 0;
};

// Output of one collect, in visit order.
struct Chain {
    std::vector<SnapNode> nodes;
    // Payloads read per vertex. Payloads are immutable and never reused while the
    // reader stays pinned, so equal pointers mean equal edges.
    std::vector<const Payload*> edges;
    bool dirty = false;         // an edge tree changed or was mid-update while read
    bool source_alive = true;
    bool neg_cycle = false;
    void reset() {
        nodes.clear();
        edges.clear();
        dirty = false;
        source_alive = true;
        neg_cycle = false;
    }
};

struct EdgeView {
    std::int32_t to;
    double weight;
};

struct PredEntry {
    VertexNode* n;
    std::int32_t next;
};

struct Scratch {
    Chain chains[2];
    std::vector<const EdgeNode*> stack;
    std::vector<std::uint32_t> edge_begin;
    std::vector<EdgeView> edges;
    std::vector<PredEntry> preds;
    std::vector<double> dist;
    std::vector<std::int32_t> via;
};

bool chk_visit(const VertexNode& v, std::size_t tid, std::uint64_t cnt);

// Equal length and, position by position, the same vertex node, the same parent
// vertex node, the same edge-counter stamp and the same payloads. Dirty chains
// never match.
bool cmp_tree(const Chain& a, const Chain& b);

// Appends a newly visited vertex: stamps VisA, records the counter stamp.
inline std::int32_t visit_vertex(Chain& chain, VertexNode* v, std::int32_t parent, std::size_t tid,
                                 std::uint64_t cnt) {
    ThreadSlot& s = v->oi.slot(tid);
    s.visit = cnt;
    s.position = static_cast<std::int32_t>(chain.nodes.size());
    chain.nodes.push_back({v, parent, v->oi.stamp(), 0, 0});
    return s.position;
}

// Walks the out-edges of chain entry idx in key order, recording each payload
// and passing alive targets to on_edge. A payload met twice in a row is a
// relocation caught between its payload copy and its mark, and counts once.
// Marks the chain dirty on any other disorder or if the vertex's counter moved
// during the walk.
template <class OnEdge>
void scan_out_edges(Scratch& sc, Chain& chain, std::int32_t idx, OnEdge&& on_edge) {
    VertexNode* u = chain.nodes[idx].n;
    const std::uint64_t stamp = chain.nodes[idx].ecnt_stamp;
    const Payload* prev = nullptr;
    chain.nodes[idx].edge_begin = static_cast<std::uint32_t>(chain.edges.size());
    edge_tree::in_order_collect(u->root, sc.stack, [&](const Payload& p) {
        if (&p == prev) return;
        if (prev && p.key <= prev->key) {
            chain.dirty = true;
            return;
        }
        prev = &p;
        if (p.target->marked()) return;
        chain.edges.push_back(&p);
        on_edge(p);
    });
    chain.nodes[idx].edge_end = static_cast<std::uint32_t>(chain.edges.size());
    if (u->oi.stamp() != stamp) chain.dirty = true;
}

// Breadth-first collect over alive vertices reachable from src.
void tree_collect(ThreadState& ts, VertexNode* src, Chain& chain, std::uint64_t cnt);

enum class ScanStatus { Complete, SourceGone, TimedOut };

// Repeats collect until two consecutive chains match (or once in SingleCollect
// mode). On Complete, *out points at the accepted chain, which is also the most
// recent collect.
template <class Collect>
ScanStatus scan(ThreadState& ts, const QueryOptions& opts, QueryStats& stats, Collect&& collect, Chain** out) {
    Chain* prev = &ts.scratch->chains[0];
    Chain* next = &ts.scratch->chains[1];
    auto run = [&](Chain& c) {
        c.reset();
        collect(c, ++ts.collect_counter);
        ++stats.collects;
        if (opts.after_collect) opts.after_collect(stats.collects);
    };
    run(*prev);
    if (!prev->source_alive) return ScanStatus::SourceGone;
    if (opts.mode == Consistency::SingleCollect) {
        *out = prev;
        return ScanStatus::Complete;
    }
    for (;;) {
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) return ScanStatus::TimedOut;
        run(*next);
        if (!next->source_alive) return ScanStatus::SourceGone;
        if (cmp_tree(*prev, *next)) {
            *out = next;
            return ScanStatus::Complete;
        }
        std::swap(prev, next);
    }
}

}  // namespace nbg
