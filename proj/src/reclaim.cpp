#include "nbg/reclaim.hpp"

#include <stdexcept>
#include <utility>

#include "nbg/common.hpp"

namespace nbg {

namespace {

constexpr std::uint32_t kCollectEvery = 64;

std::atomic<std::int64_t> g_live[static_cast<int>(Tracked::Count)];

struct DisposeQueue {
    std::vector<std::pair<void*, void (*)(void*)>> items;
    bool draining = false;
};

thread_local DisposeQueue t_dispose;

}  // namespace

void require_vertex_key(Key k) {
    if (is_sentinel(k)) throw std::invalid_argument("vertex key is reserved as a sentinel");
}

void require_weight(double w) {
    if (!(w == w)) throw std::invalid_argument("edge weight is NaN");
    if (w == kInfinity || w == -kInfinity) throw std::invalid_argument("edge weight is not finite");
}

void track_created(Tracked t) noexcept {
    g_live[static_cast<int>(t)].fetch_add(1, std::memory_order_relaxed);
}

void track_destroyed(Tracked t) noexcept {
    g_live[static_cast<int>(t)].fetch_sub(1, std::memory_order_relaxed);
}

std::int64_t live_objects(Tracked t) noexcept {
    return g_live[static_cast<int>(t)].load(std::memory_order_relaxed);
}

void dispose(void* p, void (*destroy)(void*)) {
    auto& q = t_dispose;
    q.items.emplace_back(p, destroy);
    if (q.draining) return;
    q.draining = true;
    while (!q.items.empty()) {
        auto [obj, fn] = q.items.back();
        q.items.pop_back();
        fn(obj);
    }
    q.draining = false;
}

EpochDomain::EpochDomain(std::size_t capacity)
    : capacity_(capacity), records_(std::make_unique<Record[]>(capacity)) {
    if (capacity == 0) throw std::invalid_argument("epoch domain needs at least one slot");
}

EpochDomain::~EpochDomain() { drain(); }

void EpochDomain::pin(std::size_t slot) noexcept {
    Record& r = records_[slot];
    if (r.depth++ != 0) return;
    std::uint64_t e = epoch_.load(std::memory_order_acquire);
    for (;;) {
        r.announced.store((e << 1) | 1, std::memory_order_seq_cst);
        std::uint64_t now = epoch_.load(std::memory_order_seq_cst);
        if (now == e) break;
        e = now;
    }
}

void EpochDomain::unpin(std::size_t slot) noexcept {
    Record& r = records_[slot];
    if (--r.depth != 0) return;
    r.announced.store(0, std::memory_order_release);
}

bool EpochDomain::pinned(std::size_t slot) const noexcept { return records_[slot].depth != 0; }

void EpochDomain::retire(std::size_t slot, void* p, Reclaim fn) {
    Record& r = records_[slot];
    r.limbo.push_back({p, fn, epoch_.load(std::memory_order_seq_cst)});
    r.limbo_size.store(r.limbo.size(), std::memory_order_relaxed);
    if (++r.since_collect >= kCollectEvery) {
        r.since_collect = 0;
        collect(slot);
    }
}

bool EpochDomain::try_advance() noexcept {
    std::uint64_t e = epoch_.load(std::memory_order_seq_cst);
    for (std::size_t i = 0; i < capacity_; ++i) {
        std::uint64_t a = records_[i].announced.load(std::memory_order_seq_cst);
        if ((a & 1) != 0 && (a >> 1) != e) return false;
    }
    return epoch_.compare_exchange_strong(e, e + 1, std::memory_order_seq_cst);
}

void EpochDomain::collect(std::size_t slot) {
    try_advance();
    Record& r = records_[slot];
    std::uint64_t g = epoch_.load(std::memory_order_seq_cst);
    std::vector<Retired> ready;
    std::size_t keep = 0;
    for (std::size_t i = 0; i < r.limbo.size(); ++i) {
        if (r.limbo[i].epoch + 2 <= g) {
            ready.push_back(r.limbo[i]);
        } else {
            r.limbo[keep++] = r.limbo[i];
        }
    }
    r.limbo.resize(keep);
    r.limbo_size.store(keep, std::memory_order_relaxed);
    for (auto& item : ready) item.fn(item.p);
}

void EpochDomain::drain() {
    bool any = true;
    while (any) {
        any = false;
        for (std::size_t i = 0; i < capacity_; ++i) {
            Record& r = records_[i];
            if (r.limbo.empty()) continue;
            any = true;
            std::vector<Retired> items;
            items.swap(r.limbo);
            r.limbo_size.store(0, std::memory_order_relaxed);
            for (auto& item : items) item.fn(item.p);
        }
    }
}

std::size_t EpochDomain::pending() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < capacity_; ++i) n += records_[i].limbo_size.load(std::memory_order_relaxed);
    return n;
}

}  // namespace nbg
