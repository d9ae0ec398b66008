#include "nbg/adjacency_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

namespace nbg {

namespace {

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw AdjacencyParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    return v;
}

void put_number(std::ostream& out, double w) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, w);
    out.write(buf, p - buf);
}

}  // namespace

AdjacencyParseError::AdjacencyParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

EdgeList read_adjacency(std::istream& in) {
    EdgeList list;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = fields(line);
        if (f.empty()) continue;
        if (!have_header) {
            if (f.size() != 2) throw AdjacencyParseError(lineno, "header must be 'V E'");
            list.vertices = parse_number<std::size_t>(f[0], lineno, "vertex count");
            expected = parse_number<std::size_t>(f[1], lineno, "edge count");
            list.edges.reserve(expected);
            have_header = true;
            continue;
        }
        if (f.size() != 2 && f.size() != 3) throw AdjacencyParseError(lineno, "edge line must be 'src dst [weight]'");
        const bool weighted = f.size() == 3;
        if (list.edges.empty()) {
            list.weighted = weighted;
        } else if (weighted != list.weighted) {
            throw AdjacencyParseError(lineno, "mixed weighted and unweighted edge lines");
        }
        if (list.edges.size() == expected) throw AdjacencyParseError(lineno, "more edges than the header declares");
        EdgeRecord e;
        e.src = parse_number<Key>(f[0], lineno, "source");
        e.dst = parse_number<Key>(f[1], lineno, "destination");
        if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= list.vertices ||
            static_cast<std::size_t>(e.dst) >= list.vertices) {
            throw AdjacencyParseError(lineno, "vertex id out of range");
        }
        if (weighted) {
            e.weight = parse_number<double>(f[2], lineno, "weight");
            if (!(e.weight == e.weight) || e.weight == kInfinity || e.weight == -kInfinity) {
                throw AdjacencyParseError(lineno, "weight must be finite");
            }
        }
        list.edges.push_back(e);
    }
    if (!have_header) throw AdjacencyParseError(lineno, "missing header");
    if (list.edges.size() != expected) throw AdjacencyParseError(lineno, "fewer edges than the header declares");
    return list;
}

void write_adjacency(const EdgeList& list, std::ostream& out) {
    out << list.vertices << ' ' << list.edges.size() << '\n';
    for (const EdgeRecord& e : list.edges) {
        out << e.src << ' ' << e.dst;
        if (list.weighted) {
            out << ' ';
            put_number(out, e.weight);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed to write adjacency data");
}

}  // namespace nbg
