#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "nbg/adjacency_io.hpp"
#include "nbg/rmat.hpp"

using namespace nbg;

TEST(Rmat, Defaults) {
    RmatParams p;
    EXPECT_EQ(p.vertices, 1024u);
    EXPECT_EQ(p.edges, 10000u);
    EXPECT_EQ(p.a, 0.5);
    EXPECT_EQ(p.b, 0.1);
    EXPECT_EQ(p.c, 0.1);
    EXPECT_EQ(p.d, 0.3);
    EXPECT_NO_THROW(validate(p));
}

TEST(Rmat, ValidationRejectsBadParameters) {
    RmatParams p;
    p.a = 0.6;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = {};
    p.vertices = 1000;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = {};
    p.vertices = 4;
    p.edges = 13;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.edges = 12;
    EXPECT_NO_THROW(validate(p));
    p = {};
    p.a = -0.1;
    p.d = 0.5;
    EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Rmat, SameSeedSameGraph) {
    RmatParams p;
    p.weighted = true;
    EdgeList a = generate(p);
    EdgeList b = generate(p);
    EXPECT_EQ(a, b);
    p.seed = 2;
    EXPECT_NE(generate(p), a);
}

TEST(Rmat, EdgesAreDistinctLoopFreeAndInRange) {
    RmatParams p;
    p.weighted = true;
    EdgeList l = generate(p);
    ASSERT_EQ(l.edges.size(), p.edges);
    std::set<std::pair<Key, Key>> seen;
    for (const EdgeRecord& e : l.edges) {
        EXPECT_NE(e.src, e.dst);
        EXPECT_GE(e.src, 0);
        EXPECT_LT(e.src, 1024);
        EXPECT_LT(e.dst, 1024);
        EXPECT_TRUE(seen.emplace(e.src, e.dst).second);
        EXPECT_GE(e.weight, 1.0);
        EXPECT_LE(e.weight, 10.0);
        EXPECT_EQ(e.weight, static_cast<double>(static_cast<int>(e.weight)));
    }
}

TEST(Rmat, CompleteGraphIsReachable) {
    RmatParams p;
    p.vertices = 4;
    p.edges = 12;
    p.a = p.b = p.c = p.d = 0.25;
    EXPECT_EQ(generate(p).edges.size(), 12u);
}

TEST(Rmat, UniformQuadrantsPassChiSquare) {
    RmatParams p;
    p.vertices = 4;
    p.a = p.b = p.c = p.d = 0.25;
    std::mt19937_64 rng(7);
    const int draws = 10000;
    std::array<int, 16> cells{};
    for (int i = 0; i < draws; ++i) {
        auto [s, t] = draw_edge(p, rng);
        ASSERT_LT(s, 4u);
        ASSERT_LT(t, 4u);
        ++cells[s * 4 + t];
    }
    const double expect = draws / 16.0;
    double chi = 0;
    for (int c : cells) chi += (c - expect) * (c - expect) / expect;
    EXPECT_LT(chi, 37.70);  // 15 degrees of freedom, p = 0.001
}

TEST(Rmat, TopQuadrantFrequenciesFollowParameters) {
    RmatParams p;
    p.vertices = 2;
    std::mt19937_64 rng(9);
    std::array<int, 4> q{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        auto [s, t] = draw_edge(p, rng);
        ++q[s * 2 + t];
    }
    const double probs[4] = {p.a, p.b, p.c, p.d};
    double chi = 0;
    for (int i = 0; i < 4; ++i) chi += (q[i] - draws * probs[i]) * (q[i] - draws * probs[i]) / (draws * probs[i]);
    EXPECT_LT(chi, 16.27);  // 3 degrees of freedom, p = 0.001
}

TEST(Rmat, DefaultParametersSkewDegrees) {
    RmatParams p;
    p.vertices = 4096;
    p.edges = 40960;
    EdgeList l = generate(p);
    std::vector<int> out(p.vertices);
    for (const EdgeRecord& e : l.edges) ++out[e.src];
    double mean = static_cast<double>(p.edges) / static_cast<double>(p.vertices);
    int mx = *std::max_element(out.begin(), out.end());
    EXPECT_GE(mx, 5 * mean);
}

TEST(Rmat, UniformIntStaysInRange) {
    std::mt19937_64 rng(1);
    std::array<int, 3> seen{};
    for (int i = 0; i < 3000; ++i) {
        auto x = uniform_int(rng, 4, 6);
        ASSERT_GE(x, 4u);
        ASSERT_LE(x, 6u);
        ++seen[x - 4];
    }
    for (int s : seen) EXPECT_GT(s, 800);
    for (int i = 0; i < 100; ++i) {
        double u = uniform_unit(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rmat, ParamsJsonRoundTrip) {
    RmatParams p;
    p.seed = 42;
    p.weighted = true;
    std::string text = params_json(p);
    RmatParams back = params_from_json(text);
    EXPECT_EQ(back.vertices, p.vertices);
    EXPECT_EQ(back.edges, p.edges);
    EXPECT_EQ(back.a, p.a);
    EXPECT_EQ(back.d, p.d);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_TRUE(back.weighted);
    EXPECT_NE(text.find("\"rng\": \"mt19937_64\""), std::string::npos);
}

TEST(Adjacency, EmptyRoundTrip) {
    EdgeList e;
    e.vertices = 5;
    std::stringstream ss;
    write_adjacency(e, ss);
    EXPECT_EQ(ss.str(), "5 0\n");
    EXPECT_EQ(read_adjacency(ss), e);
}

TEST(Adjacency, SmallWeightedIsByteIdentical) {
    const std::string text = "4 3\n0 1 2\n1 2 0.5\n3 0 -1\n";
    std::stringstream in(text);
    EdgeList l = read_adjacency(in);
    EXPECT_TRUE(l.weighted);
    ASSERT_EQ(l.edges.size(), 3u);
    EXPECT_EQ(l.edges[1], (EdgeRecord{1, 2, 0.5}));
    std::ostringstream out;
    write_adjacency(l, out);
    EXPECT_EQ(out.str(), text);
}

TEST(Adjacency, GeneratedGraphRoundTrips) {
    for (bool weighted : {false, true}) {
        RmatParams p;
        p.weighted = weighted;
        EdgeList l = generate(p);
        std::stringstream ss;
        write_adjacency(l, ss);
        std::string first = ss.str();
        EdgeList back = read_adjacency(ss);
        EXPECT_EQ(back, l);
        std::ostringstream again;
        write_adjacency(back, again);
        EXPECT_EQ(again.str(), first);
    }
}

TEST(Adjacency, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::stringstream ss(text);
        try {
            read_adjacency(ss);
        } catch (const AdjacencyParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("3 2\n0 1\n0 x\n"), 3u);
    EXPECT_EQ(line_of("3 2\n0 1\n0 1 2\n"), 3u);
    EXPECT_EQ(line_of("3 1\n0 5\n"), 2u);
    EXPECT_EQ(line_of("3 2\n0 1\n"), 2u);
    EXPECT_EQ(line_of("x\n"), 1u);
    EXPECT_EQ(line_of("3 1\n0 1 nan\n"), 2u);
    EXPECT_EQ(line_of("3 1\n0 1\n1 2\n"), 3u);
    EXPECT_EQ(line_of("3 1\n\n0 1\n"), 0u);
}
