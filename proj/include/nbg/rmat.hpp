#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>

#include "nbg/adjacency_io.hpp"

namespace nbg {

inline constexpr const char* kRmatRngName = "mt19937_64";

struct RmatParams {
    std::uint64_t vertices = 1024;
    std::uint64_t edges = 10000;
    double a = 0.5;
    double b = 0.1;
    double c = 0.1;
    double d = 0.3;
    std::uint64_t seed = 1;
    bool weighted = false;
};

// Throws std::invalid_argument when the probabilities do not sum to one, the
// vertex count is not a power of two, or more edges are requested than a simple
// digraph on that many vertices holds.
void validate(const RmatParams& p);

// Uniform real in [0, 1) from the top 53 bits of one draw.
double uniform_unit(std::mt19937_64& rng);

// Uniform integer in [lo, hi] by rejection.
std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

// One recursive quadrant descent. May return a self-loop or a repeat.
std::pair<std::uint64_t, std::uint64_t> draw_edge(const RmatParams& p, std::mt19937_64& rng);

// Distinct, loop-free edges; weights are integers in [1, log2 V] when weighted.
EdgeList generate(const RmatParams& p);

std::string params_json(const RmatParams& p);
RmatParams params_from_json(const std::string& text);

}  // namespace nbg
