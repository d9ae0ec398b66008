#pragma once

#include <atomic>
#include <functional>
#include <thread>

#include "nbg/graph.hpp"

namespace nbg::testing {

// Parks the first update of a thread that reaches `at` until released.
struct Parking {
    Step at;
    std::atomic<bool> parked{false};
    std::atomic<bool> released{false};
    std::atomic<bool> fired{false};

    static void hook(Step s, void* arg) {
        auto* self = static_cast<Parking*>(arg);
        if (s != self->at || self->fired.exchange(true)) return;
        self->parked.store(true);
        while (!self->released.load()) std::this_thread::yield();
    }

    // Runs update on its own registered thread and waits until it parks.
    // Returns false if the update finished without reaching the step.
    bool start(Graph& g, std::function<void(Graph&, ThreadHandle&)> update) {
        worker = std::thread([this, &g, update = std::move(update)] {
            ThreadHandle h = g.register_thread();
            Context& ctx = g.state(h).ctx;
            ctx.on_step = &Parking::hook;
            ctx.step_arg = this;
            update(g, h);
            ctx.on_step = nullptr;
            done.store(true);
        });
        while (!parked.load() && !done.load()) std::this_thread::yield();
        return parked.load();
    }

    void finish() {
        released.store(true);
        if (worker.joinable()) worker.join();
    }

    ~Parking() { finish(); }

    std::thread worker;
    std::atomic<bool> done{false};
};

}  // namespace nbg::testing
