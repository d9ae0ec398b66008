#include "nbg/snapshot.hpp"

#include <algorithm>

namespace nbg {

bool chk_visit(const VertexNode& v, std::size_t tid, std::uint64_t cnt) { return v.oi.slot(tid).visit == cnt; }

bool cmp_tree(const Chain& a, const Chain& b) {
    if (a.dirty || b.dirty) return false;
    if (a.nodes.size() != b.nodes.size()) return false;
    if (a.source_alive != b.source_alive || a.neg_cycle != b.neg_cycle) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const SnapNode& x = a.nodes[i];
        const SnapNode& y = b.nodes[i];
        if (x.n != y.n || x.ecnt_stamp != y.ecnt_stamp) return false;
        if ((x.parent < 0) != (y.parent < 0)) return false;
        if (x.parent >= 0 && a.nodes[x.parent].n != b.nodes[y.parent].n) return false;
        if (x.edge_end - x.edge_begin != y.edge_end - y.edge_begin) return false;
        if (!std::equal(a.edges.begin() + x.edge_begin, a.edges.begin() + x.edge_end, b.edges.begin() + y.edge_begin)) {
            return false;
        }
    }
    return true;
}

void tree_collect(ThreadState& ts, VertexNode* src, Chain& chain, std::uint64_t cnt) {
    const std::size_t tid = ts.ctx.tid;
    if (src->marked()) {
        chain.source_alive = false;
        return;
    }
    visit_vertex(chain, src, -1, tid, cnt);
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
        if (chain.nodes[i].n->marked()) continue;
        const auto idx = static_cast<std::int32_t>(i);
        scan_out_edges(*ts.scratch, chain, idx, [&](const Payload& p) {
            if (!chk_visit(*p.target, tid, cnt)) visit_vertex(chain, p.target, idx, tid, cnt);
        });
    }
}

}  // namespace nbg
