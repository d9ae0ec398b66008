#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "nbg/graph.hpp"
#include "nbg/oracle.hpp"
#include "test_support.hpp"

using namespace nbg;
using nbg::testing::LiveCounts;

namespace {

struct GraphFixture : ::testing::Test {
    LiveCounts before = LiveCounts::now();
    std::unique_ptr<Graph> g = std::make_unique<Graph>();
    std::optional<ThreadHandle> h{g->register_thread()};

    void TearDown() override {
        h.reset();
        g.reset();
        EXPECT_EQ(LiveCounts::now(), before) << "objects leaked";
    }
};

constexpr EdgeResult kAbsent{false, kInfinity};

}  // namespace

TEST_F(GraphFixture, VertexContract) {
    EXPECT_FALSE(g->get_vertex(*h, 5));
    EXPECT_TRUE(g->put_vertex(*h, 5));
    EXPECT_FALSE(g->put_vertex(*h, 5));
    EXPECT_TRUE(g->get_vertex(*h, 5));
    EXPECT_FALSE(g->remove_vertex(*h, 6));
    EXPECT_TRUE(g->remove_vertex(*h, 5));
    EXPECT_FALSE(g->get_vertex(*h, 5));
}

TEST_F(GraphFixture, PutEdgeFourWayContract) {
    g->put_vertex(*h, 1);
    g->put_vertex(*h, 2);
    EXPECT_EQ(g->put_edge(*h, 1, 2, 3.0), (EdgeResult{true, kInfinity}));
    EXPECT_EQ(g->put_edge(*h, 1, 2, 3.0), (EdgeResult{false, 3.0}));
    EXPECT_EQ(g->put_edge(*h, 1, 2, 4.5), (EdgeResult{true, 3.0}));
    EXPECT_EQ(g->put_edge(*h, 1, 9, 1.0), kAbsent);
    EXPECT_EQ(g->put_edge(*h, 9, 1, 1.0), kAbsent);
}

TEST_F(GraphFixture, RemoveAndGetEdge) {
    g->put_vertex(*h, 1);
    g->put_vertex(*h, 2);
    g->put_edge(*h, 1, 2, 2.5);
    EXPECT_EQ(g->get_edge(*h, 1, 2), (EdgeResult{true, 2.5}));
    EXPECT_EQ(g->get_edge(*h, 2, 1), kAbsent);
    EXPECT_EQ(g->remove_edge(*h, 1, 2), (EdgeResult{true, 2.5}));
    EXPECT_EQ(g->remove_edge(*h, 1, 2), kAbsent);
    EXPECT_EQ(g->get_edge(*h, 1, 2), kAbsent);
    EXPECT_EQ(g->remove_edge(*h, 1, 7), kAbsent);
}

TEST_F(GraphFixture, SelfLoopsRejected) {
    g->put_vertex(*h, 4);
    EXPECT_EQ(g->put_edge(*h, 4, 4, 1.0), kAbsent);
    EXPECT_EQ(g->get_edge(*h, 4, 4), kAbsent);
    EXPECT_FALSE(g->con_v_plus(*h, 4, 4).ok);
}

TEST_F(GraphFixture, NonFiniteWeightsRejected) {
    g->put_vertex(*h, 1);
    g->put_vertex(*h, 2);
    EXPECT_THROW(g->put_edge(*h, 1, 2, std::nan("")), std::invalid_argument);
    EXPECT_THROW(g->put_edge(*h, 1, 2, kInfinity), std::invalid_argument);
}

TEST_F(GraphFixture, RemovedDestinationHidesEdge) {
    g->put_vertex(*h, 5);
    g->put_vertex(*h, 6);
    g->put_edge(*h, 5, 6, 1.0);
    g->remove_vertex(*h, 6);
    EXPECT_EQ(g->get_edge(*h, 5, 6), kAbsent);
    g->put_vertex(*h, 6);
    EXPECT_EQ(g->get_edge(*h, 5, 6), kAbsent);
    EXPECT_EQ(g->remove_edge(*h, 5, 6), kAbsent);
    EXPECT_EQ(g->put_edge(*h, 5, 6, 2.0), (EdgeResult{true, kInfinity}));
    EXPECT_EQ(g->get_edge(*h, 5, 6), (EdgeResult{true, 2.0}));
    EXPECT_EQ(g->export_adjacency(*h), (Adjacency{{5, {{6, 2.0}}}, {6, {}}}));
}

TEST_F(GraphFixture, ReAddedVertexRestartsCounter) {
    g->put_vertex(*h, 1);
    g->put_vertex(*h, 2);
    g->put_edge(*h, 1, 2, 1.0);
    EXPECT_EQ(g->ecnt(*h, 1), 1u);
    g->remove_vertex(*h, 1);
    EXPECT_EQ(g->ecnt(*h, 1), std::nullopt);
    g->put_vertex(*h, 1);
    EXPECT_EQ(g->ecnt(*h, 1), 0u);
    EXPECT_EQ(g->get_edge(*h, 1, 2), kAbsent);
}

TEST_F(GraphFixture, ConVPlus) {
    EXPECT_FALSE(g->con_v_plus(*h, 1, 2).ok);
    g->put_vertex(*h, 1);
    EXPECT_FALSE(g->con_v_plus(*h, 1, 2).ok);
    g->put_vertex(*h, 2);
    EpochGuard guard(g->epochs(), h->tid());
    auto p = g->con_v_plus(*h, 1, 2);
    ASSERT_TRUE(p.ok);
    EXPECT_EQ(p.u->key, 1);
    EXPECT_EQ(p.v->key, 2);
}

TEST_F(GraphFixture, RandomTraceMatchesOracleAndCountsEcnt) {
    std::mt19937_64 rng(11);
    oracle::SeqGraph model;
    std::map<Key, std::uint64_t> outcomes;
    for (int i = 0; i < 4000; ++i) {
        Key a = static_cast<Key>(rng() % 12);
        Key b = static_cast<Key>(rng() % 12);
        double w = static_cast<double>(rng() % 3);
        oracle::Op op{};
        switch (rng() % 8) {
            case 0: op = {oracle::OpKind::PutVertex, a}; break;
            case 1: op = {oracle::OpKind::RemoveVertex, a}; break;
            case 2: op = {oracle::OpKind::GetVertex, a}; break;
            case 3:
            case 4: op = {oracle::OpKind::PutEdge, a, b, w}; break;
            case 5: op = {oracle::OpKind::RemoveEdge, a, b}; break;
            default: op = {oracle::OpKind::GetEdge, a, b}; break;
        }
        std::string want = oracle::seq_apply(model, op);
        std::string got = oracle::apply(*g, *h, op);
        ASSERT_EQ(got, want) << "step " << i << " " << oracle::op_name(op.kind) << "(" << oracle::op_args(op) << ")";
        if (op.kind == oracle::OpKind::RemoveVertex && got == "true") outcomes.erase(a);
        if ((op.kind == oracle::OpKind::PutEdge || op.kind == oracle::OpKind::RemoveEdge) && got.rfind("(true", 0) == 0) {
            ++outcomes[a];
        }
    }
    EXPECT_EQ(g->export_adjacency(*h), model.adjacency());
    for (const auto& [k, row] : model.adjacency()) {
        EXPECT_EQ(g->ecnt(*h, k), outcomes.contains(k) ? outcomes[k] : 0u) << "vertex " << k;
    }
    IntegrityReport rep = g->check_integrity(*h);
    EXPECT_TRUE(rep.ok());
}

TEST_F(GraphFixture, LoadAdjacency) {
    std::istringstream in("4 3\n0 1 2\n1 2 3\n3 0 1.5\n");
    EXPECT_EQ(load_adjacency(*g, *h, in), 4u);
    EXPECT_EQ(g->get_edge(*h, 3, 0), (EdgeResult{true, 1.5}));
    EXPECT_EQ(g->get_edge(*h, 1, 2), (EdgeResult{true, 3.0}));
    EXPECT_TRUE(g->get_vertex(*h, 3));
}

TEST_F(GraphFixture, RegistrationCapacity) {
    Graph small(GraphOptions{.thread_capacity = 2});
    ThreadHandle a = small.register_thread();
    {
        ThreadHandle b = small.register_thread();
        EXPECT_NE(a.tid(), b.tid());
        EXPECT_THROW(small.register_thread(), std::runtime_error);
    }
    ThreadHandle c = small.register_thread();
    EXPECT_NE(c.tid(), a.tid());
}

TEST_F(GraphFixture, ConcurrentMixedStressKeepsInvariants) {
    constexpr std::size_t kThreads = 6;
    for (Key k = 0; k < 16; ++k) g->put_vertex(*h, k);
    std::vector<std::thread> ts;
    for (std::size_t t = 0; t < kThreads; ++t) {
        ts.emplace_back([&, t] {
            ThreadHandle me = g->register_thread();
            std::mt19937_64 rng(t + 77);
            for (int i = 0; i < 4000; ++i) {
                Key a = static_cast<Key>(rng() % 24);
                Key b = static_cast<Key>(rng() % 24);
                switch (rng() % 10) {
                    case 0: g->put_vertex(me, a); break;
                    case 1: g->remove_vertex(me, a); break;
                    case 2: g->get_vertex(me, a); break;
                    case 3:
                    case 4:
                    case 5: g->put_edge(me, a, b, static_cast<double>(rng() % 5)); break;
                    case 6:
                    case 7: g->remove_edge(me, a, b); break;
                    default: g->get_edge(me, a, b); break;
                }
            }
        });
    }
    for (auto& t : ts) t.join();
    IntegrityReport rep = g->check_integrity(*h);
    EXPECT_TRUE(rep.ok());
    Adjacency adj = g->export_adjacency(*h);
    for (const auto& [u, row] : adj) {
        for (const auto& [v, w] : row) {
            EXPECT_TRUE(adj.contains(v));
            EXPECT_EQ(g->get_edge(*h, u, v), (EdgeResult{true, w}));
        }
    }
}
