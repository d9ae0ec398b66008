#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "nbg/oracle.hpp"
#include "nbg/queries.hpp"

using namespace nbg;

namespace {

struct QueryFixture : ::testing::Test {
    Graph g;
    ThreadHandle h = g.register_thread();
    oracle::SeqGraph seq;

    void vertex(Key k) {
        g.put_vertex(h, k);
        seq.put_vertex(k);
    }
    void edge(Key u, Key v, double w = 1.0) {
        g.put_edge(h, u, v, w);
        seq.put_edge(u, v, w);
    }
};

struct RandomGraph {
    std::vector<Key> vertices;
    std::vector<std::tuple<Key, Key, double>> edges;
};

RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_v, bool negative) {
    RandomGraph r;
    std::size_t n = 1 + rng() % max_v;
    for (std::size_t i = 0; i < n; ++i) r.vertices.push_back(static_cast<Key>(i * 3 + rng() % 3));
    std::size_t m = rng() % (n * 3 + 1);
    for (std::size_t i = 0; i < m; ++i) {
        Key u = r.vertices[rng() % n];
        Key v = r.vertices[rng() % n];
        if (u == v) continue;
        double w = static_cast<double>(1 + rng() % 9);
        if (negative && rng() % 6 == 0) w = -w;
        r.edges.emplace_back(u, v, w);
    }
    return r;
}

template <class F>
void each_random_graph(std::uint64_t seed, int count, std::size_t max_v, bool negative, F&& f) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        RandomGraph rg = random_graph(rng, max_v, negative);
        Graph g;
        ThreadHandle h = g.register_thread();
        oracle::SeqGraph seq;
        for (Key k : rg.vertices) {
            g.put_vertex(h, k);
            seq.put_vertex(k);
        }
        for (auto [u, v, w] : rg.edges) {
            g.put_edge(h, u, v, w);
            seq.put_edge(u, v, w);
        }
        f(g, h, seq, rg);
    }
}

}  // namespace

TEST_F(QueryFixture, BfsChainLevelsAndParents) {
    for (Key k = 1; k <= 4; ++k) vertex(k);
    edge(1, 2);
    edge(2, 3);
    edge(3, 4);
    BfsResult r = bfs(g, h, 1);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    ASSERT_EQ(r.tree.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(r.tree[i].vertex, static_cast<Key>(i + 1));
        EXPECT_EQ(r.tree[i].level, i);
    }
    EXPECT_FALSE(r.tree[0].parent);
    EXPECT_EQ(r.tree[3].parent, 3);
}

TEST_F(QueryFixture, BfsMissingSource) {
    EXPECT_EQ(bfs(g, h, 9).status, QueryStatus::VertexMissing);
    EXPECT_EQ(sssp(g, h, 9).status, QueryStatus::VertexMissing);
    EXPECT_EQ(bc(g, h, 9).status, QueryStatus::VertexMissing);
}

TEST_F(QueryFixture, BfsSkipsRemovedVertex) {
    for (Key k = 1; k <= 3; ++k) vertex(k);
    edge(1, 2);
    edge(2, 3);
    g.remove_vertex(h, 2);
    BfsResult r = bfs(g, h, 1);
    ASSERT_EQ(r.tree.size(), 1u);
}

TEST_F(QueryFixture, SsspSmallExample) {
    for (Key k = 1; k <= 3; ++k) vertex(k);
    edge(1, 2, 4);
    edge(1, 3, 1);
    edge(3, 2, 2);
    SsspResult r = sssp(g, h, 1);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    std::map<Key, SsspEntry> by;
    for (auto& e : r.tree) by.emplace(e.vertex, e);
    EXPECT_EQ(by.at(1).distance, 0);
    EXPECT_EQ(by.at(2).distance, 3);
    EXPECT_EQ(by.at(2).parent, 3);
    EXPECT_EQ(by.at(3).distance, 1);
    EXPECT_EQ(by.at(3).parent, 1);
}

TEST_F(QueryFixture, SsspNegativeCycle) {
    vertex(1);
    vertex(2);
    edge(1, 2, 1);
    edge(2, 1, -3);
    EXPECT_EQ(sssp(g, h, 1).status, QueryStatus::NegativeCycle);
}

TEST_F(QueryFixture, SsspZeroWeightCycleIsNotNegative) {
    vertex(1);
    vertex(2);
    edge(1, 2, 2);
    edge(2, 1, -2);
    SsspResult r = sssp(g, h, 1);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    EXPECT_EQ(r.tree.size(), 2u);
}

TEST_F(QueryFixture, SsspUnreachableCycleDoesNotPoison) {
    for (Key k = 1; k <= 4; ++k) vertex(k);
    edge(1, 2, 1);
    edge(3, 4, 1);
    edge(4, 3, -5);
    SsspResult r = sssp(g, h, 1);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    EXPECT_EQ(r.tree.size(), 2u);
}

TEST_F(QueryFixture, BcPathMiddle) {
    for (Key k = 1; k <= 3; ++k) vertex(k);
    edge(1, 2);
    edge(2, 3);
    BcResult r = bc(g, h, 2);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    EXPECT_DOUBLE_EQ(r.centrality, 1.0);
    EXPECT_DOUBLE_EQ(bc(g, h, 1).centrality, 0.0);
    EXPECT_DOUBLE_EQ(bc(g, h, 3).centrality, 0.0);
}

TEST_F(QueryFixture, BcDiamondSplitsEvenly) {
    for (Key k = 1; k <= 4; ++k) vertex(k);
    edge(1, 2);
    edge(1, 3);
    edge(2, 4);
    edge(3, 4);
    EXPECT_DOUBLE_EQ(bc(g, h, 2).centrality, 0.5);
    EXPECT_DOUBLE_EQ(bc(g, h, 3).centrality, 0.5);
    BcSourceResult s = bc_single_source(g, h, 1);
    ASSERT_EQ(s.status, QueryStatus::Ok);
    std::map<Key, double> dep;
    for (auto& d : s.dependencies) dep[d.vertex] = d.dependency;
    EXPECT_DOUBLE_EQ(dep[2], 0.5);
    EXPECT_DOUBLE_EQ(dep[3], 0.5);
    EXPECT_DOUBLE_EQ(dep[4], 0.0);
}

TEST_F(QueryFixture, BcIsolatedIsZero) {
    vertex(1);
    vertex(2);
    BcResult r = bc(g, h, 1);
    ASSERT_EQ(r.status, QueryStatus::Ok);
    EXPECT_EQ(r.centrality, 0.0);
}

TEST(QueryOracle, BfsMatchesSequential) {
    each_random_graph(11, 100, 64, false, [](Graph& g, ThreadHandle& h, oracle::SeqGraph& seq, RandomGraph& rg) {
        for (Key s : rg.vertices) {
            BfsResult r = bfs(g, h, s);
            ASSERT_EQ(r.status, QueryStatus::Ok);
            ASSERT_EQ(oracle::format_bfs(r.tree), oracle::format_bfs(oracle::bfs(seq, s)));
            ASSERT_EQ(r.stats.collects, 2u);
        }
    });
}

TEST(QueryOracle, SsspMatchesBellmanFord) {
    int cycles = 0;
    each_random_graph(12, 100, 64, true, [&](Graph& g, ThreadHandle& h, oracle::SeqGraph& seq, RandomGraph& rg) {
        for (Key s : rg.vertices) {
            SsspResult r = sssp(g, h, s);
            oracle::SsspOutcome o = oracle::bellman_ford(seq, s);
            ASSERT_EQ(oracle::format_sssp(r), oracle::format_sssp(o)) << "source " << s;
            if (o.neg_cycle) ++cycles;
        }
    });
    EXPECT_GT(cycles, 0);
}

TEST(QueryOracle, SsspTreeIsTight) {
    each_random_graph(13, 60, 48, false, [](Graph& g, ThreadHandle& h, oracle::SeqGraph& seq, RandomGraph& rg) {
        const Adjacency& adj = seq.adjacency();
        for (Key s : rg.vertices) {
            SsspResult r = sssp(g, h, s);
            ASSERT_EQ(r.status, QueryStatus::Ok);
            std::map<Key, SsspEntry> by;
            for (auto& e : r.tree) by.emplace(e.vertex, e);
            for (auto& [u, row] : adj) {
                if (!by.contains(u)) continue;
                for (auto& [v, w] : row) {
                    ASSERT_TRUE(by.contains(v));
                    EXPECT_LE(by.at(v).distance, by.at(u).distance + w);
                }
            }
            for (auto& [v, e] : by) {
                if (!e.parent) continue;
                EXPECT_EQ(e.distance, by.at(*e.parent).distance + adj.at(*e.parent).at(v));
            }
        }
    });
}

TEST(QueryOracle, BcMatchesBruteForce) {
    each_random_graph(14, 100, 32, false, [](Graph& g, ThreadHandle& h, oracle::SeqGraph& seq, RandomGraph& rg) {
        for (Key v : rg.vertices) {
            BcResult r = bc(g, h, v);
            ASSERT_EQ(r.status, QueryStatus::Ok);
            double expect = oracle::brute_bc(seq, v);
            ASSERT_NEAR(r.centrality, expect, 1e-9 * std::max(1.0, std::abs(expect)));
        }
    });
}

TEST(QueryOracle, ResultsAreWellFormedUnderUpdates) {
    Graph g;
    ThreadHandle h = g.register_thread();
    for (Key k = 0; k < 32; ++k) g.put_vertex(h, k);
    std::atomic<bool> stop{false};
    std::thread updater([&] {
        ThreadHandle me = g.register_thread();
        std::mt19937_64 rng(5);
        while (!stop.load()) {
            Key a = static_cast<Key>(rng() % 32);
            Key b = static_cast<Key>(rng() % 32);
            if (rng() % 3) {
                g.put_edge(me, a, b, static_cast<double>(1 + rng() % 5));
            } else {
                g.remove_edge(me, a, b);
            }
        }
    });
    for (int i = 0; i < 200; ++i) {
        Key s = static_cast<Key>(i % 32);
        QueryOptions qo;
        qo.deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
        BfsResult r = bfs(g, h, s, qo);
        if (r.status != QueryStatus::Ok) continue;
        ASSERT_EQ(r.tree[0].vertex, s);
        std::map<Key, std::uint32_t> level;
        for (auto& e : r.tree) {
            ASSERT_TRUE(level.emplace(e.vertex, e.level).second);
            if (e.parent) {
                ASSERT_TRUE(level.contains(*e.parent));
                EXPECT_EQ(level.at(*e.parent) + 1, e.level);
            }
        }
        SsspResult sr = sssp(g, h, s, qo);
        if (sr.status == QueryStatus::Ok) {
            for (auto& e : sr.tree) EXPECT_GE(e.distance, 0);
        }
    }
    stop = true;
    updater.join();
}

TEST_F(QueryFixture, WriteResultFormat) {
    vertex(1);
    vertex(2);
    edge(1, 2, 2.5);
    std::ostringstream b, s;
    write_result(bfs(g, h, 1), b);
    write_result(sssp(g, h, 1), s);
    EXPECT_EQ(b.str(), "# bfs ok collects=2\n1 - 0\n2 1 1\n");
    EXPECT_EQ(s.str(), "# sssp ok collects=2\n1 - 0\n2 1 2.5\n");
}
