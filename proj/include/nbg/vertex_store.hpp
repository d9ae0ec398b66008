#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "nbg/nodes.hpp"

namespace nbg {

// Immutable member list of one bucket. Replaced as a whole on every change.
struct FSetNode {
    FSetNode(std::vector<VertexNode*> members, bool mutable_flag);
    ~FSetNode();
    FSetNode(const FSetNode&) = delete;
    FSetNode& operator=(const FSetNode&) = delete;

    VertexNode* find_alive(Key key) const noexcept;

    std::atomic<std::int64_t> refs{1};
    const std::vector<VertexNode*> members;  // sorted by key
    const bool mutable_flag;
};

struct FSet {
    explicit FSet(FSetNode* n) : node(n) {}
    ~FSet();
    std::atomic<FSetNode*> node;
};

enum class FSetOpType { Add, Remove };

struct FSetOp {
    FSetOpType op_type;
    Key key;
    VertexNode* node = nullptr;  // inserted on Add
    bool done = false;
    bool resp = false;
};

struct HNode {
    HNode(std::size_t size, HNode* pred);
    ~HNode();
    HNode(const HNode&) = delete;
    HNode& operator=(const HNode&) = delete;

    std::atomic<std::int64_t> refs{1};
    std::unique_ptr<std::atomic<FSet*>[]> buckets;
    const std::size_t size;
    std::atomic<HNode*> pred;
};

struct StoreOptions {
    std::size_t initial_buckets = 16;
    double grow_load = 4.0;    // grow when alive > grow_load * buckets
    double shrink_load = 0.25; // shrink when alive < shrink_load * buckets
    bool auto_resize = true;
    std::size_t thread_capacity = kDefaultThreadCapacity;
};

struct StoreHooks {
    // Runs inside contains between the null-bucket read and the pred read.
    std::function<void()> contains_saw_null_bucket;
};

struct StoreReport {
    std::size_t head_size = 0;
    std::size_t alive = 0;
    std::size_t marked_members = 0;
    bool sorted = true;
    bool placed = true;      // every member sits in the bucket its key maps to
    bool unique = true;      // no key appears twice among alive members
    bool pred_cleared = true;
};

// Resizable hash table of vertex nodes built from freezable sets. Every member
// function must be called by a pinned, registered thread.
class VertexStore {
public:
    explicit VertexStore(const StoreOptions& opts);
    ~VertexStore();
    VertexStore(const VertexStore&) = delete;
    VertexStore& operator=(const VertexStore&) = delete;

    bool add(Context& ctx, Key key);
    bool remove(Context& ctx, Key key);
    VertexNode* contains(Context& ctx, Key key);

    FSet* init_bucket(Context& ctx, HNode* table, std::size_t index);
    std::vector<VertexNode*> freeze(Context& ctx, FSet* bucket);
    void resize(Context& ctx, bool grow);

    HNode* head() const noexcept { return head_.load(std::memory_order_acquire); }
    std::size_t head_size() const noexcept { return head()->size; }
    std::int64_t alive_count() const noexcept { return alive_.load(std::memory_order_relaxed); }

    // Alive vertices in bucket order. Not atomic with respect to updates.
    void for_each_alive(Context& ctx, const std::function<void(VertexNode*)>& fn);

    // Quiescent structural check.
    StoreReport inspect(Context& ctx);

    StoreHooks& hooks() noexcept { return hooks_; }

private:
    bool invoke(Context& ctx, FSet* bucket, FSetOp& op);
    FSet* bucket_for(Context& ctx, HNode* t, Key key);
    void maybe_resize(Context& ctx, bool after_add);

    StoreOptions opts_;
    std::atomic<HNode*> head_;
    std::atomic<std::int64_t> alive_{0};
    StoreHooks hooks_;
};

inline std::size_t bucket_index(Key key, std::size_t size) noexcept {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(key) & (size - 1));
}

}  // namespace nbg
