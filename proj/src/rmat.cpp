#include "nbg/rmat.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace nbg {

void validate(const RmatParams& p) {
    for (double x : {p.a, p.b, p.c, p.d}) {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("quadrant probabilities must lie in [0, 1]");
    }
    if (std::abs(p.a + p.b + p.c + p.d - 1.0) > 1e-12) throw std::invalid_argument("a + b + c + d must equal 1");
    if (!std::has_single_bit(p.vertices)) throw std::invalid_argument("vertex count must be a power of two");
    if (p.vertices > (std::uint64_t{1} << 31)) throw std::invalid_argument("vertex count too large");
    if (p.edges > p.vertices * (p.vertices - 1)) throw std::invalid_argument("more edges than V * (V - 1)");
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t range = hi - lo + 1;
    if (range == 0) return rng();
    const std::uint64_t reject_below = (0 - range) % range;
    for (;;) {
        std::uint64_t x = rng();
        if (x >= reject_below) return lo + x % range;
    }
}

std::pair<std::uint64_t, std::uint64_t> draw_edge(const RmatParams& p, std::mt19937_64& rng) {
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    for (std::uint64_t half = p.vertices >> 1; half > 0; half >>= 1) {
        double u = uniform_unit(rng);
        if (u < p.a) {
        } else if (u < p.a + p.b) {
            dst += half;
        } else if (u < p.a + p.b + p.c) {
            src += half;
        } else {
            src += half;
            dst += half;
        }
    }
    return {src, dst};
}

EdgeList generate(const RmatParams& p) {
    validate(p);
    std::mt19937_64 rng(p.seed);
    EdgeList list;
    list.vertices = p.vertices;
    list.weighted = p.weighted;
    list.edges.reserve(p.edges);
    const std::uint64_t max_weight = std::max<std::uint64_t>(1, std::bit_width(p.vertices) - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(p.edges * 2);
    while (list.edges.size() < p.edges) {
        auto [s, t] = draw_edge(p, rng);
        if (s == t) continue;
        if (!seen.insert(s * p.vertices + t).second) continue;
        EdgeRecord e{static_cast<Key>(s), static_cast<Key>(t), 1.0};
        if (p.weighted) e.weight = static_cast<double>(uniform_int(rng, 1, max_weight));
        list.edges.push_back(e);
    }
    return list;
}

std::string params_json(const RmatParams& p) {
    nlohmann::ordered_json j;
    j["vertices"] = p.vertices;
    j["edges"] = p.edges;
    j["a"] = p.a;
    j["b"] = p.b;
    j["c"] = p.c;
    j["d"] = p.d;
    j["seed"] = p.seed;
    j["weighted"] = p.weighted;
    j["rng"] = kRmatRngName;
    return j.dump(2) + "\n";
}

RmatParams params_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    RmatParams p;
    p.vertices = j.at("vertices").get<std::uint64_t>();
    p.edges = j.at("edges").get<std::uint64_t>();
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.c = j.at("c").get<double>();
    p.d = j.at("d").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.weighted = j.at("weighted").get<bool>();
    if (j.value("rng", std::string(kRmatRngName)) != kRmatRngName) throw std::invalid_argument("unknown rng");
    return p;
}

}  // namespace nbg
