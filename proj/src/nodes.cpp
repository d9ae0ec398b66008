#include "nbg/nodes.hpp"

#include <cassert>
#include <vector>

namespace nbg {

namespace {

void destroy_descriptor(void* p) {
    auto* d = static_cast<Descriptor*>(p);
    switch (d->kind) {
        case DescriptorKind::Child: delete static_cast<ChildCasOp*>(d); break;
        case DescriptorKind::Weight: delete static_cast<WeightCasOp*>(d); break;
        case DescriptorKind::Relocate: delete static_cast<RelocateOp*>(d); break;
    }
}

template <class T>
void release_thunk(void* p) {
    release(static_cast<T*>(p));
}

// Drops membership of every node still linked below the sentinel. Runs only
// once no thread can reach the vertex's tree.
void tear_down_tree(VertexNode* v) {
    if (Descriptor* d = descriptor_of(v->root.op.exchange(0, std::memory_order_acq_rel))) release(d);
    Word top = v->root.right.exchange(1, std::memory_order_acq_rel);
    std::vector<EdgeNode*> stack;
    if (!is_null_child(top)) stack.push_back(as_edge(top));
    while (!stack.empty()) {
        EdgeNode* n = stack.back();
        stack.pop_back();
        Word l = n->left.load(std::memory_order_acquire);
        Word r = n->right.load(std::memory_order_acquire);
        if (!is_null_child(l)) stack.push_back(as_edge(l));
        if (!is_null_child(r)) stack.push_back(as_edge(r));
        release(n);
    }
}

void release_vertex(VertexNode* v) {
    if (v->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(v, &destroy_object<VertexNode>);
}

}  // namespace

Payload::Payload(Key k, VertexNode* t, double w) : key(k), target(t), weight(w) {
    retain_edge_ref(t);
    track_created(Tracked::Payload);
}

Payload::~Payload() {
    release_edge_ref(target);
    track_destroyed(Tracked::Payload);
}

EdgeNode::EdgeNode(Payload* p, Word left_null, Word right_null) : payload(p), left(left_null), right(right_null) {
    track_created(Tracked::Edge);
}

EdgeNode::~EdgeNode() {
    if (Payload* p = payload.load(std::memory_order_relaxed)) release(p);
    if (Descriptor* d = descriptor_of(op.load(std::memory_order_relaxed))) release(d);
    track_destroyed(Tracked::Edge);
}

ChildCasOp::ChildCasOp(bool left, Word exp, Word upd)
    : Descriptor(DescriptorKind::Child, 1), is_left(left), expected(exp), update(upd) {
    if (!is_null_child(expected)) retain(as_edge(expected));
    if (!is_null_child(update)) retain(as_edge(update));
    track_created(Tracked::Descriptor);
}

ChildCasOp::~ChildCasOp() {
    if (!is_null_child(expected)) release(as_edge(expected));
    if (!is_null_child(update)) release(as_edge(update));
    track_destroyed(Tracked::Descriptor);
}

WeightCasOp::WeightCasOp(Payload* exp, Payload* upd)
    : Descriptor(DescriptorKind::Weight, 1), expected(exp), update(upd) {
    retain(expected);
    track_created(Tracked::Descriptor);
}

WeightCasOp::~WeightCasOp() {
    release(expected);
    release(update);
    track_destroyed(Tracked::Descriptor);
}

RelocateOp::RelocateOp(EdgeNode* d, Word d_op, Payload* d_payload, EdgeNode* r, Payload* r_payload)
    : Descriptor(DescriptorKind::Relocate, 2),
      dest(d),
      dest_op(d_op),
      dest_payload(d_payload),
      replace(r),
      replace_payload(r_payload),
      remove_key(d_payload->key),
      replace_key(r_payload->key) {
    retain(dest);
    retain(replace);
    if (Descriptor* prev = descriptor_of(dest_op)) retain(prev);
    retain(dest_payload);
    retain(replace_payload);
    track_created(Tracked::Descriptor);
}

RelocateOp::~RelocateOp() {
    if (!detached.load(std::memory_order_acquire)) {
        release(dest);
        release(replace);
        if (Descriptor* prev = descriptor_of(dest_op)) release(prev);
    }
    release(dest_payload);
    release(replace_payload);
    track_destroyed(Tracked::Descriptor);
}

void RelocateOp::detach(Context& ctx) {
    if (detached.exchange(true, std::memory_order_acq_rel)) return;
    defer_release(ctx, dest);
    defer_release(ctx, replace);
    if (Descriptor* prev = descriptor_of(dest_op)) defer_release(ctx, prev);
}

OpItem::OpItem(std::size_t capacity) : slots_(std::make_unique<ThreadSlot[]>(capacity)) {}

VertexNode::VertexNode(Key k, std::size_t capacity) : key(k), root(nullptr, 1, 1), oi(capacity) {
    track_created(Tracked::Vertex);
}

VertexNode::~VertexNode() {
    tear_down_tree(this);
    track_destroyed(Tracked::Vertex);
}

void retain(Payload* p) noexcept { p->refs.fetch_add(1, std::memory_order_relaxed); }
void retain(EdgeNode* n) noexcept { n->refs.fetch_add(1, std::memory_order_relaxed); }
void retain(Descriptor* d) noexcept { d->refs.fetch_add(1, std::memory_order_relaxed); }
void retain_edge_ref(VertexNode* v) noexcept { v->refs.fetch_add(1, std::memory_order_relaxed); }

void retain_table_ref(VertexNode* v) noexcept {
    v->refs.fetch_add(1, std::memory_order_relaxed);
    v->table_refs.fetch_add(1, std::memory_order_relaxed);
}

void release(Payload* p) {
    if (p->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(p, &destroy_object<Payload>);
}

void release(EdgeNode* n) {
    if (n->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(n, &destroy_object<EdgeNode>);
}

void release(Descriptor* d) {
    if (d->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(d, &destroy_descriptor);
}

void release_edge_ref(VertexNode* v) { release_vertex(v); }

void release_table_ref(VertexNode* v) {
    if (v->table_refs.fetch_sub(1, std::memory_order_acq_rel) == 1) tear_down_tree(v);
    release_vertex(v);
}

void defer_release(Context& ctx, Payload* p) { ctx.epochs->retire(ctx.tid, p, &release_thunk<Payload>); }
void defer_release(Context& ctx, EdgeNode* n) { ctx.epochs->retire(ctx.tid, n, &release_thunk<EdgeNode>); }
void defer_release(Context& ctx, Descriptor* d) { ctx.epochs->retire(ctx.tid, d, &release_thunk<Descriptor>); }

}  // namespace nbg
