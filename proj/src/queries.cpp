#include "nbg/queries.hpp"

#include <ostream>

namespace nbg {

namespace {

QueryStatus from_scan(ScanStatus s) {
    switch (s) {
        case ScanStatus::Complete: return QueryStatus::Ok;
        case ScanStatus::SourceGone: return QueryStatus::VertexMissing;
        case ScanStatus::TimedOut: return QueryStatus::TimedOut;
    }
    return QueryStatus::VertexMissing;
}

// BFS-order collect that also buffers every out-edge as (chain index, weight),
// then runs Bellman-Ford rounds over the buffer.
void sp_collect(ThreadState& ts, VertexNode* src, Chain& chain, std::uint64_t cnt) {
    Scratch& sc = *ts.scratch;
    const std::size_t tid = ts.ctx.tid;
    if (src->marked()) {
        chain.source_alive = false;
        return;
    }
    sc.edge_begin.clear();
    sc.edges.clear();
    visit_vertex(chain, src, -1, tid, cnt);
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
        sc.edge_begin.push_back(static_cast<std::uint32_t>(sc.edges.size()));
        if (chain.nodes[i].n->marked()) continue;
        const auto idx = static_cast<std::int32_t>(i);
        scan_out_edges(sc, chain, idx, [&](const Payload& p) {
            std::int32_t to = chk_visit(*p.target, tid, cnt) ? p.target->oi.slot(tid).position
                                                             : visit_vertex(chain, p.target, idx, tid, cnt);
            sc.edges.push_back({to, p.weight});
        });
    }
    sc.edge_begin.push_back(static_cast<std::uint32_t>(sc.edges.size()));

    const std::size_t n = chain.nodes.size();
    sc.dist.assign(n, kInfinity);
    sc.via.assign(n, -1);
    sc.dist[0] = 0.0;
    auto round = [&]() {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
            if (sc.dist[u] == kInfinity) continue;
            for (std::uint32_t e = sc.edge_begin[u]; e < sc.edge_begin[u + 1]; ++e) {
                const EdgeView& ev = sc.edges[e];
                const double cand = sc.dist[u] + ev.weight;
                if (cand < sc.dist[ev.to]) {
                    sc.dist[ev.to] = cand;
                    sc.via[ev.to] = static_cast<std::int32_t>(u);
                    changed = true;
                }
            }
        }
        return changed;
    };
    bool changed = true;
    for (std::size_t r = 0; r + 1 < n && changed; ++r) changed = round();
    chain.neg_cycle = changed && n > 1 && round();
    for (std::size_t i = 0; i < n; ++i) chain.nodes[i].n->oi.slot(tid).distance = sc.dist[i];
}

// Unweighted BFS with shortest-path counts and predecessor lists.
void bc_collect(ThreadState& ts, VertexNode* src, Chain& chain, std::uint64_t cnt) {
    Scratch& sc = *ts.scratch;
    const std::size_t tid = ts.ctx.tid;
    if (src->marked()) {
        chain.source_alive = false;
        return;
    }
    sc.preds.clear();
    visit_vertex(chain, src, -1, tid, cnt);
    ThreadSlot& s0 = src->oi.slot(tid);
    s0.distance = 0;
    s0.path_count = 1;
    s0.dependency = 0;
    s0.pred_head = -1;
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
        VertexNode* u = chain.nodes[i].n;
        if (u->marked()) continue;
        const auto idx = static_cast<std::int32_t>(i);
        scan_out_edges(sc, chain, idx, [&](const Payload& p) {
            VertexNode* t = p.target;
            const ThreadSlot& su = u->oi.slot(tid);
            ThreadSlot& st = t->oi.slot(tid);
            if (!chk_visit(*t, tid, cnt)) {
                visit_vertex(chain, t, idx, tid, cnt);
                st.distance = su.distance + 1;
                st.path_count = 0;
                st.dependency = 0;
                st.pred_head = -1;
            }
            if (st.distance == su.distance + 1) {
                st.path_count += su.path_count;
                sc.preds.push_back({u, st.pred_head});
                st.pred_head = static_cast<std::int32_t>(sc.preds.size() - 1);
            }
        });
    }
}

template <class Fn>
ScanStatus run_scan(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts, QueryStats& stats,
                    Chain** out, Fn&& collect) {
    ThreadState& ts = g.state(h);
    VertexNode* src = g.store().contains(ts.ctx, source);
    if (!src) return ScanStatus::SourceGone;
    return scan(ts, opts, stats, [&](Chain& c, std::uint64_t cnt) { collect(ts, src, c, cnt); }, out);
}

std::optional<Key> parent_key(const Chain& c, std::int32_t p) {
    if (p < 0) return std::nullopt;
    return c.nodes[p].n->key;
}

}  // namespace

const char* to_string(QueryStatus s) noexcept {
    switch (s) {
        case QueryStatus::Ok: return "ok";
        case QueryStatus::VertexMissing: return "vertex-missing";
        case QueryStatus::NegativeCycle: return "negative-cycle";
        case QueryStatus::TimedOut: return "timed-out";
    }
    return "unknown";
}

BfsResult bfs(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts) {
    BfsResult r;
    EpochGuard guard(g.epochs(), h.tid());
    Chain* c = nullptr;
    r.status = from_scan(run_scan(g, h, source, opts, r.stats, &c, tree_collect));
    if (r.status != QueryStatus::Ok) return r;
    std::vector<std::uint32_t> level(c->nodes.size(), 0);
    r.tree.reserve(c->nodes.size());
    for (std::size_t i = 0; i < c->nodes.size(); ++i) {
        const SnapNode& sn = c->nodes[i];
        if (sn.parent >= 0) level[i] = level[sn.parent] + 1;
        r.tree.push_back({sn.n->key, parent_key(*c, sn.parent), level[i]});
    }
    return r;
}

SsspResult sssp(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts) {
    SsspResult r;
    EpochGuard guard(g.epochs(), h.tid());
    Chain* c = nullptr;
    r.status = from_scan(run_scan(g, h, source, opts, r.stats, &c, sp_collect));
    if (r.status != QueryStatus::Ok) return r;
    if (c->neg_cycle) {
        r.status = QueryStatus::NegativeCycle;
        return r;
    }
    const Scratch& sc = *g.state(h).scratch;
    r.tree.reserve(c->nodes.size());
    for (std::size_t i = 0; i < c->nodes.size(); ++i) {
        r.tree.push_back({c->nodes[i].n->key, parent_key(*c, sc.via[i]), sc.dist[i]});
    }
    return r;
}

BcSourceResult bc_single_source(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts) {
    BcSourceResult r;
    EpochGuard guard(g.epochs(), h.tid());
    Chain* c = nullptr;
    r.status = from_scan(run_scan(g, h, source, opts, r.stats, &c, bc_collect));
    if (r.status != QueryStatus::Ok) return r;
    const std::size_t tid = h.tid();
    const Scratch& sc = *g.state(h).scratch;
    for (std::size_t i = c->nodes.size(); i-- > 1;) {
        const ThreadSlot& sw = c->nodes[i].n->oi.slot(tid);
        for (std::int32_t p = sw.pred_head; p >= 0; p = sc.preds[p].next) {
            ThreadSlot& sp = sc.preds[p].n->oi.slot(tid);
            sp.dependency += sp.path_count / sw.path_count * (1.0 + sw.dependency);
        }
    }
    r.dependencies.reserve(c->nodes.size() - 1);
    for (std::size_t i = 1; i < c->nodes.size(); ++i) {
        r.dependencies.push_back({c->nodes[i].n->key, c->nodes[i].n->oi.slot(tid).dependency});
    }
    return r;
}

BcResult bc(Graph& g, ThreadHandle& h, Key v, const QueryOptions& opts) {
    BcResult r;
    std::vector<Key> sources;
    {
        EpochGuard guard(g.epochs(), h.tid());
        ThreadState& ts = g.state(h);
        VertexNode* target = g.store().contains(ts.ctx, v);
        if (!target) return r;
        target->oi.slot(h.tid()).centrality = 0;
        g.store().for_each_alive(ts.ctx, [&](VertexNode* n) {
            if (n->key != v) sources.push_back(n->key);
        });
    }
    double total = 0;
    for (Key s : sources) {
        BcSourceResult one = bc_single_source(g, h, s, opts);
        r.stats.collects += one.stats.collects;
        if (one.status == QueryStatus::TimedOut) {
            r.status = QueryStatus::TimedOut;
            return r;
        }
        if (one.status != QueryStatus::Ok) continue;
        ++r.sources;
        for (const DependencyEntry& d : one.dependencies) {
            if (d.vertex == v) total += d.dependency;
        }
    }
    {
        EpochGuard guard(g.epochs(), h.tid());
        VertexNode* target = g.store().contains(g.state(h).ctx, v);
        if (!target) return r;
        target->oi.slot(h.tid()).centrality = total;
    }
    r.centrality = total;
    r.status = QueryStatus::Ok;
    return r;
}

namespace {

void put_parent(std::ostream& out, const std::optional<Key>& p) {
    if (p) {
        out << *p;
    } else {
        out << '-';
    }
}

}  // namespace

void write_result(const BfsResult& r, std::ostream& out) {
    out << "# bfs " << to_string(r.status) << " collects=" << r.stats.collects << '\n';
    for (const BfsEntry& e : r.tree) {
        out << e.vertex << ' ';
        put_parent(out, e.parent);
        out << ' ' << e.level << '\n';
    }
}

void write_result(const SsspResult& r, std::ostream& out) {
    out << "# sssp " << to_string(r.status) << " collects=" << r.stats.collects << '\n';
    for (const SsspEntry& e : r.tree) {
        out << e.vertex << ' ';
        put_parent(out, e.parent);
        out << ' ' << e.distance << '\n';
    }
}

void write_result(const BcSourceResult& r, std::ostream& out) {
    out << "# bc " << to_string(r.status) << " collects=" << r.stats.collects << '\n';
    for (const DependencyEntry& e : r.dependencies) out << e.vertex << ' ' << e.dependency << '\n';
}

}  // namespace nbg
