#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "nbg/common.hpp"
#include "nbg/reclaim.hpp"

namespace nbg {

struct VertexNode;

using Word = std::uintptr_t;

// Low two bits of an edge node's op word.
enum Flag : Word { kNone = 0, kMarked = 1, kChildCas = 2, kRelocate = 3 };

inline constexpr Word kFlagMask = 3;

// Per-thread state every shared operation needs.
// Fixed points inside edge updates where a test can park a thread.
enum class Step {
    Published,   // descriptor or mark installed, change not yet applied
    Relocating,  // successor payload copied, successor not yet marked
    Applied,     // change visible, edge counter not yet bumped
};

struct Context {
    std::size_t tid = 0;
    EpochDomain* epochs = nullptr;
    std::uint64_t null_serial = 0;
    void (*on_step)(Step, void*) = nullptr;
    void* step_arg = nullptr;

    void step(Step s) {
        if (on_step) on_step(s, step_arg);
    }

    // Child words with the low bit set are null. Each null is unique so a child
    // slot never returns to a value a stale descriptor expects.
    Word fresh_null() noexcept {
        return static_cast<Word>(((static_cast<std::uint64_t>(tid) << 48) | ++null_serial) << 1) | 1;
    }
};

// Destination, key and weight of an edge. Immutable; replaced as a whole.
struct Payload {
    Payload(Key k, VertexNode* t, double w);
    ~Payload();
    Payload(const Payload&) = delete;
    Payload& operator=(const Payload&) = delete;

    std::atomic<std::int64_t> refs{1};
    const Key key;
    VertexNode* const target;
    const double weight;
};

struct EdgeNode {
    EdgeNode(Payload* p, Word left_null, Word right_null);
    ~EdgeNode();
    EdgeNode(const EdgeNode&) = delete;
    EdgeNode& operator=(const EdgeNode&) = delete;

    std::atomic<std::int64_t> refs{1};
    std::atomic<Payload*> payload;
    std::atomic<Word> left;
    std::atomic<Word> right;
    std::atomic<Word> op{0};
};

enum class DescriptorKind : std::uint8_t { Child, Weight, Relocate };

struct alignas(8) Descriptor {
    explicit Descriptor(DescriptorKind k, std::int64_t r) : refs(r), kind(k) {}
    std::atomic<std::int64_t> refs;
    const DescriptorKind kind;
};

// Swings one child word of the node that carries it.
struct ChildCasOp : Descriptor {
    ChildCasOp(bool left, Word exp, Word upd);
    ~ChildCasOp();
    const bool is_left;
    const Word expected;
    const Word update;
};

// Swings the payload of the node that carries it.
struct WeightCasOp : Descriptor {
    WeightCasOp(Payload* exp, Payload* upd);
    ~WeightCasOp();
    Payload* const expected;
    Payload* const update;
};

enum RelocateState : int { kOngoing = 0, kSuccessful = 1, kFailed = 2 };

// Moves the successor's payload into a two-child node being removed.
struct RelocateOp : Descriptor {
    RelocateOp(EdgeNode* dest, Word dest_op, Payload* dest_payload, EdgeNode* replace, Payload* replace_payload);
    ~RelocateOp();
    // Drops the holds on both nodes and on the destination's prior descriptor
    // once no op word carries this descriptor with the RELOCATE flag. Those
    // nodes point back here, so keeping the holds would form a cycle.
    void detach(Context& ctx);
    std::atomic<int> state{kOngoing};
    std::atomic<bool> detached{false};
    EdgeNode* const dest;
    const Word dest_op;
    Payload* const dest_payload;
    EdgeNode* const replace;
    Payload* const replace_payload;
    const Key remove_key;
    const Key replace_key;
};

inline Word flag_of(Word op) noexcept { return op & kFlagMask; }
inline Descriptor* descriptor_of(Word op) noexcept { return reinterpret_cast<Descriptor*>(op & ~kFlagMask); }
inline Word with_flag(const Descriptor* d, Flag f) noexcept { return reinterpret_cast<Word>(d) | f; }
inline Word with_flag(Word op, Flag f) noexcept { return (op & ~kFlagMask) | f; }
inline bool is_null_child(Word w) noexcept { return (w & 1) != 0 || w == 0; }
inline EdgeNode* as_edge(Word w) noexcept { return reinterpret_cast<EdgeNode*>(w); }
inline Word as_word(const EdgeNode* n) noexcept { return reinterpret_cast<Word>(n); }

// Per-thread query scratch stored inside each vertex. Slot t is written only
// by the thread registered as t.
struct alignas(64) ThreadSlot {
    std::uint64_t visit = 0;
    double distance = kInfinity;
    double path_count = 0;
    double dependency = 0;
    double centrality = 0;
    std::int32_t pred_head = -1;
    std::int32_t position = -1;
};

// Edge-operation counter plus the number of edge updates currently publishing
// changes to this vertex's tree. Low bits count in-flight updates, high bits
// count completed ones.
class OpItem {
public:
    static constexpr unsigned kActivityBits = 16;
    static constexpr std::uint64_t kActivityMask = (std::uint64_t{1} << kActivityBits) - 1;

    explicit OpItem(std::size_t capacity);

    std::uint64_t ecnt() const noexcept { return word_.load(std::memory_order_seq_cst) >> kActivityBits; }
    std::uint64_t stamp() const noexcept { return word_.load(std::memory_order_seq_cst); }
    static bool quiet(std::uint64_t stamp) noexcept { return (stamp & kActivityMask) == 0; }

    void begin() noexcept { word_.fetch_add(1, std::memory_order_seq_cst); }
    void commit() noexcept { word_.fetch_add((std::uint64_t{1} << kActivityBits) - 1, std::memory_order_seq_cst); }
    void abort() noexcept { word_.fetch_sub(1, std::memory_order_seq_cst); }

    ThreadSlot& slot(std::size_t tid) noexcept { return slots_[tid]; }
    const ThreadSlot& slot(std::size_t tid) const noexcept { return slots_[tid]; }

private:
    std::atomic<std::uint64_t> word_{0};
    std::unique_ptr<ThreadSlot[]> slots_;
};

struct VertexNode {
    VertexNode(Key k, std::size_t capacity);
    ~VertexNode();
    VertexNode(const VertexNode&) = delete;
    VertexNode& operator=(const VertexNode&) = delete;

    bool marked() const noexcept { return removed.load(std::memory_order_acquire) != 0; }
    bool mark() noexcept {
        std::uint32_t expect = 0;
        return removed.compare_exchange_strong(expect, 1, std::memory_order_acq_rel);
    }

    const Key key;
    std::atomic<std::uint32_t> removed{0};
    EdgeNode root;  // sentinel; edges hang from root.right
    OpItem oi;
    std::atomic<std::int64_t> table_refs{0};
    std::atomic<std::int64_t> refs{1};
};

// Reference management. release_* drops a count immediately; defer_* drops it
// after every currently pinned thread has unpinned.
void retain(Payload* p) noexcept;
void retain(EdgeNode* n) noexcept;
void retain(Descriptor* d) noexcept;
void retain_edge_ref(VertexNode* v) noexcept;
void retain_table_ref(VertexNode* v) noexcept;

void release(Payload* p);
void release(EdgeNode* n);
void release(Descriptor* d);
void release_edge_ref(VertexNode* v);
void release_table_ref(VertexNode* v);

void defer_release(Context& ctx, Payload* p);
void defer_release(Context& ctx, EdgeNode* n);
void defer_release(Context& ctx, Descriptor* d);

}  // namespace nbg
