#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace nbg {

// Epoch-based deferred reclamation. Each registered slot pins before touching
// shared nodes; retired callbacks run once every pinned slot has moved past the
// epoch in which the object was retired.
class EpochDomain {
public:
    using Reclaim = void (*)(void*);

    explicit EpochDomain(std::size_t capacity);
    ~EpochDomain();

    EpochDomain(const EpochDomain&) = delete;
    EpochDomain& operator=(const EpochDomain&) = delete;

    void pin(std::size_t slot) noexcept;
    void unpin(std::size_t slot) noexcept;
    bool pinned(std::size_t slot) const noexcept;

    void retire(std::size_t slot, void* p, Reclaim fn);

    // Advances the global epoch if possible and runs the slot's expired callbacks.
    void collect(std::size_t slot);

    // Runs every pending callback. Caller guarantees no slot is pinned.
    void drain();

    std::size_t pending() const noexcept;
    std::uint64_t epoch() const noexcept { return epoch_.load(std::memory_order_acquire); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    struct Retired {
        void* p;
        Reclaim fn;
        std::uint64_t epoch;
    };
    struct alignas(64) Record {
        std::atomic<std::uint64_t> announced{0};  // epoch << 1 | active
        std::uint32_t depth = 0;
        std::uint32_t since_collect = 0;
        std::vector<Retired> limbo;
        std::atomic<std::size_t> limbo_size{0};
    };

    bool try_advance() noexcept;

    std::size_t capacity_;
    std::unique_ptr<Record[]> records_;
    alignas(64) std::atomic<std::uint64_t> epoch_{2};
};

class EpochGuard {
public:
    EpochGuard(EpochDomain& d, std::size_t slot) noexcept : d_(d), slot_(slot) { d_.pin(slot_); }
    ~EpochGuard() { d_.unpin(slot_); }
    EpochGuard(const EpochGuard&) = delete;
    EpochGuard& operator=(const EpochGuard&) = delete;

private:
    EpochDomain& d_;
    std::size_t slot_;
};

// Destroys objects whose reference count reached zero. Nested releases issued by
// destructors are queued and drained iteratively, so long ownership chains never
// recurse.
void dispose(void* p, void (*destroy)(void*));

template <class T>
void destroy_object(void* p) {
    delete static_cast<T*>(p);
}

// Live-object accounting used by leak tests.
enum class Tracked : int { Vertex, Edge, Payload, Descriptor, BucketSet, Table, Count };
void track_created(Tracked t) noexcept;
void track_destroyed(Tracked t) noexcept;
std::int64_t live_objects(Tracked t) noexcept;

}  // namespace nbg
