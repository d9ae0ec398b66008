#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbg/common.hpp"

namespace nbg {

struct EdgeRecord {
    Key src;
    Key dst;
    double weight = 1.0;
    friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

// Text layout: a header line "V E", then E lines "src dst" or "src dst weight".
// Vertices are 0..V-1. A file is either fully weighted or fully unweighted.
struct EdgeList {
    std::size_t vertices = 0;
    bool weighted = false;
    std::vector<EdgeRecord> edges;
    friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

class AdjacencyParseError : public std::runtime_error {
public:
    AdjacencyParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

EdgeList read_adjacency(std::istream& in);
void write_adjacency(const EdgeList& list, std::ostream& out);

}  // namespace nbg
