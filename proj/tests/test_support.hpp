#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "nbg/nodes.hpp"
#include "nbg/reclaim.hpp"

namespace nbg::testing {

// Snapshot of the live-object counters, for leak assertions.
struct LiveCounts {
    std::array<std::int64_t, static_cast<int>(Tracked::Count)> v{};
    static LiveCounts now() {
        LiveCounts c;
        for (int i = 0; i < static_cast<int>(Tracked::Count); ++i) c.v[i] = live_objects(static_cast<Tracked>(i));
        return c;
    }
    bool operator==(const LiveCounts&) const = default;
};

// An epoch domain plus one context per slot.
struct Slots {
    explicit Slots(std::size_t n) : epochs(n), ctx(n) {
        for (std::size_t i = 0; i < n; ++i) {
            ctx[i].tid = i;
            ctx[i].epochs = &epochs;
        }
    }
    EpochDomain epochs;
    std::vector<Context> ctx;
};

// Vertices owned by a test; released (after draining deferred work) on exit.
struct VertexPool {
    explicit VertexPool(Slots& s, std::size_t capacity = 8) : slots(s), capacity(capacity) {}
    ~VertexPool() {
        slots.epochs.drain();
        for (auto& [k, v] : made) release_edge_ref(v);
        slots.epochs.drain();
    }
    VertexNode* get(Key k) {
        auto it = made.find(k);
        if (it != made.end()) return it->second;
        auto* v = new VertexNode(k, capacity);
        made.emplace(k, v);
        return v;
    }
    Slots& slots;
    std::size_t capacity;
    std::map<Key, VertexNode*> made;
};

}  // namespace nbg::testing
