#include "nbg/vertex_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace nbg {

namespace {

void release(FSetNode* n) {
    if (n->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(n, &destroy_object<FSetNode>);
}

void release(HNode* h) {
    if (h->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) dispose(h, &destroy_object<HNode>);
}

void release_fset_thunk(void* p) { release(static_cast<FSetNode*>(p)); }
void release_table_thunk(void* p) { release(static_cast<HNode*>(p)); }

void defer_release(Context& ctx, FSetNode* n) { ctx.epochs->retire(ctx.tid, n, &release_fset_thunk); }
void defer_release(Context& ctx, HNode* h) { ctx.epochs->retire(ctx.tid, h, &release_table_thunk); }

std::vector<VertexNode*> alive_members(const FSetNode* n) {
    std::vector<VertexNode*> out;
    out.reserve(n->members.size());
    for (VertexNode* v : n->members) {
        if (!v->marked()) out.push_back(v);
    }
    return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

FSetNode::FSetNode(std::vector<VertexNode*> m, bool flag) : members(std::move(m)), mutable_flag(flag) {
    for (VertexNode* v : members) retain_table_ref(v);
    track_created(Tracked::BucketSet);
}

FSetNode::~FSetNode() {
    for (VertexNode* v : members) release_table_ref(v);
    track_destroyed(Tracked::BucketSet);
}

VertexNode* FSetNode::find_alive(Key key) const noexcept {
    for (VertexNode* v : members) {
        if (v->key == key && !v->marked()) return v;
        if (v->key > key) break;
    }
    return nullptr;
}

FSet::~FSet() { release(node.load(std::memory_order_relaxed)); }

HNode::HNode(std::size_t n, HNode* p) : buckets(std::make_unique<std::atomic<FSet*>[]>(n)), size(n), pred(p) {
    for (std::size_t i = 0; i < n; ++i) buckets[i].store(nullptr, std::memory_order_relaxed);
    if (p) p->refs.fetch_add(1, std::memory_order_relaxed);
    track_created(Tracked::Table);
}

HNode::~HNode() {
    for (std::size_t i = 0; i < size; ++i) delete buckets[i].load(std::memory_order_relaxed);
    if (HNode* p = pred.load(std::memory_order_relaxed)) release(p);
    track_destroyed(Tracked::Table);
}

VertexStore::VertexStore(const StoreOptions& opts) : opts_(opts) {
    if (!is_power_of_two(opts.initial_buckets)) throw std::invalid_argument("initial bucket count must be a power of two");
    auto* t = new HNode(opts.initial_buckets, nullptr);
    for (std::size_t i = 0; i < t->size; ++i) {
        t->buckets[i].store(new FSet(new FSetNode({}, true)), std::memory_order_relaxed);
    }
    head_.store(t, std::memory_order_release);
}

VertexStore::~VertexStore() { release(head_.load(std::memory_order_acquire)); }

bool VertexStore::invoke(Context& ctx, FSet* bucket, FSetOp& op) {
    FSetNode* o = bucket->node.load(std::memory_order_acquire);
    while (o->mutable_flag) {
        VertexNode* current = o->find_alive(op.key);
        if (op.op_type == FSetOpType::Add) {
            if (current) {
                op.resp = false;
                op.done = true;
                return true;
            }
            if (!op.node) op.node = new VertexNode(op.key, opts_.thread_capacity);
            std::vector<VertexNode*> m = alive_members(o);
            m.insert(std::upper_bound(m.begin(), m.end(), op.key, [](Key k, VertexNode* v) { return k < v->key; }),
                     op.node);
            auto* n = new FSetNode(std::move(m), true);
            if (bucket->node.compare_exchange_strong(o, n, std::memory_order_acq_rel)) {
                defer_release(ctx, o);
                op.resp = true;
                op.done = true;
                return true;
            }
            release(n);
        } else {
            if (!current) {
                op.resp = false;
                op.done = true;
                return true;
            }
            if (current->mark()) {
                op.resp = true;
                op.done = true;
                auto* n = new FSetNode(alive_members(o), true);
                if (bucket->node.compare_exchange_strong(o, n, std::memory_order_acq_rel)) {
                    defer_release(ctx, o);
                } else {
                    release(n);
                }
                return true;
            }
            o = bucket->node.load(std::memory_order_acquire);
        }
    }
    return false;
}

FSet* VertexStore::bucket_for(Context& ctx, HNode* t, Key key) {
    std::size_t i = bucket_index(key, t->size);
    FSet* b = t->buckets[i].load(std::memory_order_acquire);
    return b ? b : init_bucket(ctx, t, i);
}

bool VertexStore::add(Context& ctx, Key key) {
    require_vertex_key(key);
    FSetOp op{FSetOpType::Add, key};
    for (;;) {
        FSet* b = bucket_for(ctx, head(), key);
        if (invoke(ctx, b, op)) break;
    }
    // Drop the creation hold; published nodes stay alive through their bucket.
    if (op.node) release_edge_ref(op.node);
    if (op.resp) {
        alive_.fetch_add(1, std::memory_order_relaxed);
        maybe_resize(ctx, true);
    }
    return op.resp;
}

bool VertexStore::remove(Context& ctx, Key key) {
    require_vertex_key(key);
    FSetOp op{FSetOpType::Remove, key};
    for (;;) {
        FSet* b = bucket_for(ctx, head(), key);
        if (invoke(ctx, b, op)) break;
    }
    if (op.resp) {
        alive_.fetch_sub(1, std::memory_order_relaxed);
        maybe_resize(ctx, false);
    }
    return op.resp;
}

VertexNode* VertexStore::contains(Context&, Key key) {
    if (is_sentinel(key)) return nullptr;
    HNode* t = head();
    std::size_t i = bucket_index(key, t->size);
    FSet* b = t->buckets[i].load(std::memory_order_acquire);
    if (!b) {
        if (hooks_.contains_saw_null_bucket) hooks_.contains_saw_null_bucket();
        HNode* s = t->pred.load(std::memory_order_acquire);
        b = s ? s->buckets[bucket_index(key, s->size)].load(std::memory_order_acquire)
              : t->buckets[i].load(std::memory_order_acquire);
    }
    return b->node.load(std::memory_order_acquire)->find_alive(key);
}

FSet* VertexStore::init_bucket(Context& ctx, HNode* t, std::size_t i) {
    FSet* b = t->buckets[i].load(std::memory_order_acquire);
    HNode* s = t->pred.load(std::memory_order_acquire);
    if (!b && s) {
        std::vector<VertexNode*> set;
        if (t->size == 2 * s->size) {
            for (VertexNode* v : freeze(ctx, s->buckets[i % s->size].load(std::memory_order_acquire))) {
                if (bucket_index(v->key, t->size) == i) set.push_back(v);
            }
        } else {
            auto low = freeze(ctx, s->buckets[i].load(std::memory_order_acquire));
            auto high = freeze(ctx, s->buckets[i + t->size].load(std::memory_order_acquire));
            set.reserve(low.size() + high.size());
            std::merge(low.begin(), low.end(), high.begin(), high.end(), std::back_inserter(set),
                       [](VertexNode* a, VertexNode* c) { return a->key < c->key; });
        }
        std::erase_if(set, [](VertexNode* v) { return v->marked(); });
        auto* fresh = new FSet(new FSetNode(std::move(set), true));
        FSet* expect = nullptr;
        if (!t->buckets[i].compare_exchange_strong(expect, fresh, std::memory_order_acq_rel)) delete fresh;
    }
    return t->buckets[i].load(std::memory_order_acquire);
}

std::vector<VertexNode*> VertexStore::freeze(Context& ctx, FSet* bucket) {
    FSetNode* o = bucket->node.load(std::memory_order_acquire);
    while (o->mutable_flag) {
        auto* n = new FSetNode(alive_members(o), false);
        if (bucket->node.compare_exchange_strong(o, n, std::memory_order_acq_rel)) {
            defer_release(ctx, o);
            o = n;
            break;
        }
        release(n);
    }
    return o->members;
}

void VertexStore::resize(Context& ctx, bool grow) {
    HNode* t = head();
    if (t->size <= 1 && !grow) return;
    for (std::size_t i = 0; i < t->size; ++i) init_bucket(ctx, t, i);
    if (HNode* p = t->pred.exchange(nullptr, std::memory_order_acq_rel)) defer_release(ctx, p);
    auto* next = new HNode(grow ? t->size * 2 : t->size / 2, t);
    HNode* expect = t;
    if (head_.compare_exchange_strong(expect, next, std::memory_order_acq_rel)) {
        defer_release(ctx, t);
    } else {
        release(next);
    }
}

void VertexStore::maybe_resize(Context& ctx, bool after_add) {
    if (!opts_.auto_resize) return;
    const double alive = static_cast<double>(alive_.load(std::memory_order_relaxed));
    const std::size_t size = head_size();
    if (after_add) {
        if (alive > opts_.grow_load * static_cast<double>(size)) resize(ctx, true);
    } else if (size > 1 && alive < opts_.shrink_load * static_cast<double>(size)) {
        resize(ctx, false);
    }
}

void VertexStore::for_each_alive(Context& ctx, const std::function<void(VertexNode*)>& fn) {
    HNode* t = head();
    for (std::size_t i = 0; i < t->size; ++i) {
        FSet* b = t->buckets[i].load(std::memory_order_acquire);
        if (!b) b = init_bucket(ctx, t, i);
        for (VertexNode* v : b->node.load(std::memory_order_acquire)->members) {
            if (!v->marked()) fn(v);
        }
    }
}

StoreReport VertexStore::inspect(Context& ctx) {
    StoreReport rep;
    HNode* t = head();
    rep.head_size = t->size;
    HNode* p = t->pred.load(std::memory_order_acquire);
    rep.pred_cleared = p == nullptr || p->pred.load(std::memory_order_acquire) == nullptr;
    for (std::size_t i = 0; i < t->size; ++i) {
        FSet* b = t->buckets[i].load(std::memory_order_acquire);
        if (!b) b = init_bucket(ctx, t, i);
        const auto& m = b->node.load(std::memory_order_acquire)->members;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (bucket_index(m[j]->key, t->size) != i) rep.placed = false;
            if (j > 0 && m[j - 1]->key > m[j]->key) rep.sorted = false;
            if (m[j]->marked()) {
                ++rep.marked_members;
                continue;
            }
            ++rep.alive;
            for (std::size_t k = j + 1; k < m.size(); ++k) {
                if (m[k]->key == m[j]->key && !m[k]->marked()) rep.unique = false;
            }
        }
    }
    return rep;
}

}  // namespace nbg
