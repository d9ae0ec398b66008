#include "nbg/oracle.hpp"

#include <algorithm>
#include <barrier>
#include <bit>
#include <charconv>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace nbg::oracle {

namespace {

std::string num(double x) {
    if (x == kInfinity) return "inf";
    if (x == -kInfinity) return "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

}  // namespace

SeqGraph SeqGraph::from_edges(const EdgeList& list) {
    SeqGraph g;
    for (std::size_t v = 0; v < list.vertices; ++v) g.put_vertex(static_cast<Key>(v));
    for (const EdgeRecord& e : list.edges) g.put_edge(e.src, e.dst, list.weighted ? e.weight : 1.0);
    return g;
}

bool SeqGraph::put_vertex(Key v) { return adj_.try_emplace(v).second; }

bool SeqGraph::remove_vertex(Key v) {
    if (adj_.erase(v) == 0) return false;
    for (auto& [k, row] : adj_) row.erase(v);
    return true;
}

EdgeResult SeqGraph::put_edge(Key u, Key v, double w) {
    if (u == v) return {};
    auto it = adj_.find(u);
    if (it == adj_.end() || !adj_.contains(v)) return {};
    auto [pos, fresh] = it->second.try_emplace(v, w);
    if (fresh) return {true, kInfinity};
    if (pos->second == w) return {false, w};
    double old = pos->second;
    pos->second = w;
    return {true, old};
}

EdgeResult SeqGraph::remove_edge(Key u, Key v) {
    if (u == v) return {};
    auto it = adj_.find(u);
    if (it == adj_.end() || !adj_.contains(v)) return {};
    auto e = it->second.find(v);
    if (e == it->second.end()) return {};
    double w = e->second;
    it->second.erase(e);
    return {true, w};
}

EdgeResult SeqGraph::get_edge(Key u, Key v) const {
    if (u == v) return {};
    auto it = adj_.find(u);
    if (it == adj_.end() || !adj_.contains(v)) return {};
    auto e = it->second.find(v);
    if (e == it->second.end()) return {};
    return {true, e->second};
}

std::string SeqGraph::state_key() const {
    std::string s;
    for (const auto& [k, row] : adj_) {
        s += std::to_string(k);
        s += ':';
        for (const auto& [t, w] : row) {
            s += std::to_string(t);
            s += '=';
            s += num(w);
            s += ',';
        }
        s += ';';
    }
    return s;
}

std::vector<BfsEntry> bfs(const SeqGraph& g, Key source) {
    std::vector<BfsEntry> out;
    const Adjacency& adj = g.adjacency();
    if (!adj.contains(source)) return out;
    std::map<Key, std::uint32_t> level;
    std::deque<Key> queue{source};
    level[source] = 0;
    out.push_back({source, std::nullopt, 0});
    while (!queue.empty()) {
        Key u = queue.front();
        queue.pop_front();
        for (const auto& [t, w] : adj.at(u)) {
            if (level.contains(t)) continue;
            level[t] = level[u] + 1;
            out.push_back({t, u, level[t]});
            queue.push_back(t);
        }
    }
    return out;
}

SsspOutcome bellman_ford(const SeqGraph& g, Key source) {
    SsspOutcome r;
    const Adjacency& adj = g.adjacency();
    if (!adj.contains(source)) return r;
    r.present = true;
    std::map<Key, double> dist;
    for (const auto& [k, row] : adj) dist[k] = kInfinity;
    dist[source] = 0;
    auto relax_all = [&]() {
        bool changed = false;
        for (const auto& [u, row] : adj) {
            if (dist[u] == kInfinity) continue;
            for (const auto& [t, w] : row) {
                if (dist[u] + w < dist[t]) {
                    dist[t] = dist[u] + w;
                    changed = true;
                }
            }
        }
        return changed;
    };
    for (std::size_t i = 1; i < adj.size(); ++i) {
        if (!relax_all()) break;
    }
    if (relax_all()) {
        r.neg_cycle = true;
        return r;
    }
    for (const auto& [k, d] : dist) {
        if (d != kInfinity) r.dist[k] = d;
    }
    return r;
}

double brute_bc(const SeqGraph& g, Key v) {
    const Adjacency& adj = g.adjacency();
    if (!adj.contains(v)) return 0.0;
    std::vector<Key> keys;
    for (const auto& [k, row] : adj) keys.push_back(k);
    const std::size_t n = keys.size();
    auto index = [&](Key k) { return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin()); };
    std::vector<std::vector<long>> dist(n, std::vector<long>(n, -1));
    std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        std::deque<std::size_t> q{s};
        dist[s][s] = 0;
        sigma[s][s] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            for (const auto& [tk, w] : adj.at(keys[u])) {
                std::size_t t = index(tk);
                if (dist[s][t] < 0) {
                    dist[s][t] = dist[s][u] + 1;
                    q.push_back(t);
                }
                if (dist[s][t] == dist[s][u] + 1) sigma[s][t] += sigma[s][u];
            }
        }
    }
    const std::size_t vi = index(v);
    double total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || s == vi || t == vi || sigma[s][t] == 0) continue;
            if (dist[s][vi] < 0 || dist[vi][t] < 0) continue;
            if (dist[s][vi] + dist[vi][t] != dist[s][t]) continue;
            total += sigma[s][vi] * sigma[vi][t] / sigma[s][t];
        }
    }
    return total;
}

const char* op_name(OpKind k) noexcept {
    switch (k) {
        case OpKind::PutVertex: return "put_vertex";
        case OpKind::RemoveVertex: return "remove_vertex";
        case OpKind::GetVertex: return "get_vertex";
        case OpKind::PutEdge: return "put_edge";
        case OpKind::RemoveEdge: return "remove_edge";
        case OpKind::GetEdge: return "get_edge";
        case OpKind::Bfs: return "bfs";
        case OpKind::Sssp: return "sssp";
    }
    return "?";
}

std::string op_args(const Op& op) {
    switch (op.kind) {
        case OpKind::PutVertex:
        case OpKind::RemoveVertex:
        case OpKind::GetVertex:
        case OpKind::Bfs:
        case OpKind::Sssp: return std::to_string(op.a);
        case OpKind::RemoveEdge:
        case OpKind::GetEdge: return std::to_string(op.a) + "," + std::to_string(op.b);
        case OpKind::PutEdge: return std::to_string(op.a) + "," + std::to_string(op.b) + "," + num(op.w);
    }
    return {};
}

std::optional<Op> parse_op(const std::string& name, const std::string& args) {
    static const OpKind kinds[] = {OpKind::PutVertex, OpKind::RemoveVertex, OpKind::GetVertex, OpKind::PutEdge,
                                   OpKind::RemoveEdge, OpKind::GetEdge,     OpKind::Bfs,       OpKind::Sssp};
    for (OpKind k : kinds) {
        if (name != op_name(k)) continue;
        Op op{k};
        std::vector<std::string> parts;
        std::stringstream ss(args);
        for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
        try {
            std::size_t want = k == OpKind::PutEdge ? 3 : (k == OpKind::RemoveEdge || k == OpKind::GetEdge) ? 2 : 1;
            if (parts.size() != want) return std::nullopt;
            op.a = std::stoll(parts[0]);
            if (want >= 2) op.b = std::stoll(parts[1]);
            if (want == 3) op.w = std::stod(parts[2]);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return op;
    }
    return std::nullopt;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::string format_edge(const EdgeResult& r) { return "(" + format_bool(r.status) + "," + num(r.weight) + ")"; }

std::string format_bfs(const std::vector<BfsEntry>& tree) {
    if (tree.empty()) return "absent";
    std::string s;
    for (const BfsEntry& e : tree) {
        s += std::to_string(e.vertex);
        s += '<';
        s += e.parent ? std::to_string(*e.parent) : "-";
        s += '@';
        s += std::to_string(e.level);
        s += ';';
    }
    return s;
}

std::string format_sssp(const SsspOutcome& r) {
    if (!r.present) return "absent";
    if (r.neg_cycle) return "negcycle";
    std::string s;
    for (const auto& [k, d] : r.dist) {
        s += std::to_string(k);
        s += ':';
        s += num(d);
        s += ';';
    }
    return s;
}

std::string format_sssp(const SsspResult& r) {
    SsspOutcome o;
    o.present = r.status != QueryStatus::VertexMissing;
    o.neg_cycle = r.status == QueryStatus::NegativeCycle;
    if (r.status == QueryStatus::TimedOut) return "timeout";
    for (const SsspEntry& e : r.tree) o.dist[e.vertex] = e.distance;
    return format_sssp(o);
}

std::string seq_apply(SeqGraph& g, const Op& op) {
    switch (op.kind) {
        case OpKind::PutVertex: return format_bool(g.put_vertex(op.a));
        case OpKind::RemoveVertex: return format_bool(g.remove_vertex(op.a));
        case OpKind::GetVertex: return format_bool(g.get_vertex(op.a));
        case OpKind::PutEdge: return format_edge(g.put_edge(op.a, op.b, op.w));
        case OpKind::RemoveEdge: return format_edge(g.remove_edge(op.a, op.b));
        case OpKind::GetEdge: return format_edge(g.get_edge(op.a, op.b));
        case OpKind::Bfs: return format_bfs(bfs(g, op.a));
        case OpKind::Sssp: return format_sssp(bellman_ford(g, op.a));
    }
    return {};
}

std::string apply(Graph& g, ThreadHandle& h, const Op& op) {
    switch (op.kind) {
        case OpKind::PutVertex: return format_bool(g.put_vertex(h, op.a));
        case OpKind::RemoveVertex: return format_bool(g.remove_vertex(h, op.a));
        case OpKind::GetVertex: return format_bool(g.get_vertex(h, op.a));
        case OpKind::PutEdge: return format_edge(g.put_edge(h, op.a, op.b, op.w));
        case OpKind::RemoveEdge: return format_edge(g.remove_edge(h, op.a, op.b));
        case OpKind::GetEdge: return format_edge(g.get_edge(h, op.a, op.b));
        case OpKind::Bfs: {
            BfsResult r = nbg::bfs(g, h, op.a);
            if (r.status == QueryStatus::TimedOut) return "timeout";
            return r.status == QueryStatus::Ok ? format_bfs(r.tree) : "absent";
        }
        case OpKind::Sssp: return format_sssp(nbg::sssp(g, h, op.a));
    }
    return {};
}

void HistoryRecorder::invoke(std::size_t tid, const Op& op) {
    std::uint64_t s = seq_.fetch_add(1, std::memory_order_seq_cst);
    logs_[tid].push_back({s, tid, 'I', op_name(op.kind), op_args(op), ""});
}

void HistoryRecorder::respond(std::size_t tid, const std::string& ret) {
    std::uint64_t s = seq_.fetch_add(1, std::memory_order_seq_cst);
    const Event& inv = logs_[tid].back();
    logs_[tid].push_back({s, tid, 'R', inv.op, inv.args, ret});
}

std::vector<Event> HistoryRecorder::events() const {
    std::vector<Event> all;
    for (const auto& log : logs_) all.insert(all.end(), log.begin(), log.end());
    std::sort(all.begin(), all.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; });
    return all;
}

void write_history(const std::vector<Event>& events, std::ostream& out) {
    for (const Event& e : events) {
        out << e.seq << '\t' << e.tid << '\t' << e.phase << '\t' << e.op << '\t' << e.args << '\t' << e.ret << '\n';
    }
}

std::vector<Event> read_history(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string item; std::getline(ss, item, '\t');) f.push_back(item);
        if (f.size() == 5) f.emplace_back();
        if (f.size() != 6 || (f[2] != "I" && f[2] != "R")) {
            throw std::runtime_error("history line " + std::to_string(lineno) + ": malformed event");
        }
        try {
            events.push_back({std::stoull(f[0]), std::stoull(f[1]), f[2][0], f[3], f[4], f[5]});
        } catch (const std::exception&) {
            throw std::runtime_error("history line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return events;
}

namespace {

struct Call {
    Op op;
    std::uint64_t inv;
    std::uint64_t resp;
    bool answered;
    std::string ret;
    std::string text;
};

struct Search {
    const std::vector<Call>& calls;
    std::uint32_t required;
    std::unordered_set<std::string> failed;
    std::uint32_t best_mask = 0;
    int best_depth = -1;

    bool run(std::uint32_t mask, SeqGraph& g) {
        if ((mask & required) == required) return true;
        const int depth = std::popcount(mask);
        if (depth > best_depth) {
            best_depth = depth;
            best_mask = mask;
        }
        std::string memo = std::to_string(mask) + '|' + g.state_key();
        if (failed.contains(memo)) return false;
        std::uint64_t horizon = ~std::uint64_t{0};
        for (std::size_t j = 0; j < calls.size(); ++j) {
            if (!(mask >> j & 1) && calls[j].answered) horizon = std::min(horizon, calls[j].resp);
        }
        for (std::size_t i = 0; i < calls.size(); ++i) {
            if (mask >> i & 1) continue;
            if (calls[i].inv > horizon) continue;
            SeqGraph next = g;
            std::string r = seq_apply(next, calls[i].op);
            if (calls[i].answered && r != calls[i].ret) continue;
            if (run(mask | (1u << i), next)) return true;
        }
        failed.insert(std::move(memo));
        return false;
    }
};

}  // namespace

LinearizabilityResult check_linearizable(const std::vector<Event>& history, const SeqGraph& initial) {
    LinearizabilityResult res;
    std::vector<Call> calls;
    std::map<std::size_t, std::size_t> open;
    for (const Event& e : history) {
        if (e.phase == 'I') {
            if (open.contains(e.tid)) {
                res.detail = "thread " + std::to_string(e.tid) + " invoked twice without a response";
                return res;
            }
            auto op = parse_op(e.op, e.args);
            if (!op) {
                res.detail = "unknown operation " + e.op + "(" + e.args + ")";
                return res;
            }
            open[e.tid] = calls.size();
            calls.push_back({*op, e.seq, ~std::uint64_t{0}, false, "", e.op + "(" + e.args + ")"});
        } else {
            auto it = open.find(e.tid);
            if (it == open.end()) {
                res.detail = "response without invocation at seq " + std::to_string(e.seq);
                return res;
            }
            Call& c = calls[it->second];
            c.resp = e.seq;
            // A timed-out query returned nothing, so it constrains nothing.
            c.answered = e.ret != "timeout";
            c.ret = e.ret;
            open.erase(it);
        }
    }
    if (calls.size() > kMaxCheckedOps) {
        res.detail = "history has " + std::to_string(calls.size()) + " operations; limit is " +
                     std::to_string(kMaxCheckedOps);
        return res;
    }
    std::uint32_t required = 0;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (calls[i].answered) required |= 1u << i;
    }
    Search s{calls, required, {}, 0, -1};
    SeqGraph g = initial;
    if (s.run(0, g)) {
        res.ok = true;
        return res;
    }
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (!(s.best_mask >> i & 1) && calls[i].answered) {
            res.detail = "no witness order places " + calls[i].text + " -> " + calls[i].ret + " (seq " +
                         std::to_string(calls[i].inv) + ")";
            break;
        }
    }
    return res;
}

namespace {

Op random_op(std::mt19937_64& rng, const HistoryShape& shape) {
    Op op{};
    const std::uint64_t kinds = shape.queries ? 8 : 6;
    op.kind = static_cast<OpKind>(rng() % kinds);
    op.a = static_cast<Key>(rng() % static_cast<std::uint64_t>(shape.keys));
    op.b = static_cast<Key>(rng() % static_cast<std::uint64_t>(shape.keys));
    op.w = static_cast<double>(1 + rng() % 3);
    return op;
}

}  // namespace

std::size_t overlapping_pairs(const std::vector<Event>& history) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    std::map<std::size_t, std::uint64_t> open;
    for (const Event& e : history) {
        if (e.phase == 'I') {
            open[e.tid] = e.seq;
        } else if (auto it = open.find(e.tid); it != open.end()) {
            spans.emplace_back(it->second, e.seq);
            open.erase(it);
        }
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        for (std::size_t j = i + 1; j < spans.size(); ++j) {
            n += spans[i].first < spans[j].second && spans[j].first < spans[i].second;
        }
    }
    return n;
}

RecordedHistory record_history(std::uint64_t seed, const HistoryShape& shape) {
    if (shape.threads == 0 || shape.keys <= 0) throw std::invalid_argument("history needs threads and keys");
    RecordedHistory out;
    std::mt19937_64 rng(seed);
    out.initial.vertices = static_cast<std::size_t>(shape.keys);
    out.initial.weighted = true;
    for (Key u = 0; u < shape.keys; ++u) {
        for (Key v = 0; v < shape.keys; ++v) {
            if (u == v || rng() % 3 != 0) continue;
            out.initial.edges.push_back({u, v, static_cast<double>(1 + rng() % 3)});
        }
    }
    std::vector<std::vector<Op>> plans(shape.threads);
    for (auto& p : plans) {
        for (std::size_t i = 0; i < shape.ops_per_thread; ++i) p.push_back(random_op(rng, shape));
    }
    GraphOptions go;
    go.thread_capacity = shape.threads + 1;
    Graph g(go);
    {
        ThreadHandle h = g.register_thread();
        for (Key v = 0; v < shape.keys; ++v) g.put_vertex(h, v);
        for (const EdgeRecord& e : out.initial.edges) g.put_edge(h, e.src, e.dst, e.weight);
    }
    HistoryRecorder rec(shape.threads);
    std::barrier start(static_cast<std::ptrdiff_t>(shape.threads));
    std::vector<std::thread> ts;
    for (std::size_t t = 0; t < shape.threads; ++t) {
        ts.emplace_back([&, t] {
            ThreadHandle h = g.register_thread();
            // Yielding inside updates interleaves threads even on one core.
            g.state(h).ctx.on_step = [](Step, void*) { std::this_thread::yield(); };
            start.arrive_and_wait();
            for (const Op& op : plans[t]) {
                rec.invoke(t, op);
                std::string r = apply(g, h, op);
                rec.respond(t, r);
                std::this_thread::yield();
            }
        });
    }
    for (auto& t : ts) t.join();
    out.events = rec.events();
    return out;
}

}  // namespace nbg::oracle
