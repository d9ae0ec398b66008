#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nbg/graph.hpp"
#include "nbg/snapshot.hpp"

namespace nbg {

enum class QueryStatus { Ok, VertexMissing, NegativeCycle, TimedOut };

const char* to_string(QueryStatus s) noexcept;

struct BfsEntry {
    Key vertex;
    std::optional<Key> parent;
    std::uint32_t level;
};

struct BfsResult {
    QueryStatus status = QueryStatus::VertexMissing;
    std::vector<BfsEntry> tree;  // visit order; levels never decrease
    QueryStats stats;
};

struct SsspEntry {
    Key vertex;
    std::optional<Key> parent;
    double distance;
};

struct SsspResult {
    QueryStatus status = QueryStatus::VertexMissing;
    std::vector<SsspEntry> tree;  // reachable vertices in visit order
    QueryStats stats;
};

struct DependencyEntry {
    Key vertex;
    double dependency;
};

struct BcSourceResult {
    QueryStatus status = QueryStatus::VertexMissing;
    std::vector<DependencyEntry> dependencies;  // every reached vertex except the source
    QueryStats stats;
};

struct BcResult {
    QueryStatus status = QueryStatus::VertexMissing;
    double centrality = 0.0;
    std::size_t sources = 0;
    QueryStats stats;
};

BfsResult bfs(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts = {});
SsspResult sssp(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts = {});

// Brandes dependencies of one validated unweighted scan from source.
BcSourceResult bc_single_source(Graph& g, ThreadHandle& h, Key source, const QueryOptions& opts = {});

// Sum of single-source dependencies on v over every alive source. Each pass is
// validated on its own; the sum is not one atomic snapshot.
BcResult bc(Graph& g, ThreadHandle& h, Key v, const QueryOptions& opts = {});

void write_result(const BfsResult& r, std::ostream& out);
void write_result(const SsspResult& r, std::ostream& out);
void write_result(const BcSourceResult& r, std::ostream& out);

}  // namespace nbg
