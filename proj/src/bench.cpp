#include "nbg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <bit>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "nbg/graph.hpp"
#include "nbg/oracle.hpp"
#include "nbg/queries.hpp"
#include "nbg/rmat.hpp"

namespace nbg::bench {

const char* to_string(QueryKind k) noexcept {
    switch (k) {
        case QueryKind::Bfs: return "bfs";
        case QueryKind::Sssp: return "sssp";
        case QueryKind::Bc: return "bc";
    }
    return "?";
}

QueryKind parse_query_kind(const std::string& s) {
    if (s == "bfs") return QueryKind::Bfs;
    if (s == "sssp") return QueryKind::Sssp;
    if (s == "bc") return QueryKind::Bc;
    throw ConfigError("unknown query kind '" + s + "' (expected bfs, sssp or bc)");
}

Consistency parse_mode(const std::string& s) {
    if (s == "lin") return Consistency::Linearizable;
    if (s == "icn") return Consistency::SingleCollect;
    throw ConfigError("unknown mode '" + s + "' (expected lin or icn)");
}

const char* mode_name(Consistency m) noexcept { return m == Consistency::Linearizable ? "lin" : "icn"; }

Distribution parse_dist(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, '/');) {
        try {
            std::size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size() || !(v >= 0)) throw ConfigError("");
            parts.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("bad distribution '" + s + "' (expected U/S/Q)");
        }
    }
    if (parts.size() != 3) throw ConfigError("bad distribution '" + s + "' (expected U/S/Q)");
    if (std::abs(parts[0] + parts[1] + parts[2] - 100.0) > 1e-9) {
        throw ConfigError("distribution '" + s + "' does not sum to 100");
    }
    return {parts[0], parts[1], parts[2]};
}

std::string format_dist(const Distribution& d) {
    std::ostringstream os;
    os << d.update << '/' << d.search << '/' << d.query;
    return os.str();
}

const char* to_string(OpClass c) noexcept {
    switch (c) {
        case OpClass::PutVertex: return "put_vertex";
        case OpClass::RemoveVertex: return "remove_vertex";
        case OpClass::PutEdge: return "put_edge";
        case OpClass::RemoveEdge: return "remove_edge";
        case OpClass::GetVertex: return "get_vertex";
        case OpClass::GetEdge: return "get_edge";
        case OpClass::Query: return "query";
        case OpClass::Count: break;
    }
    return "?";
}

std::array<double, kOpClasses> class_probabilities(const Distribution& d) {
    const double u = d.update / 400.0;
    const double s = d.search / 200.0;
    return {u, u, u, u, s, s, d.query / 100.0};
}

void validate(const WorkloadSpec& spec, std::size_t threads) {
    const Distribution& d = spec.dist;
    if (d.update < 0 || d.search < 0 || d.query < 0 || std::abs(d.update + d.search + d.query - 100.0) > 1e-9) {
        throw ConfigError("distribution must be three non-negative parts summing to 100");
    }
    if (threads == 0) throw ConfigError("thread count must be positive");
    if (threads > 4096) throw ConfigError("thread count exceeds 4096");
    if (spec.total_ops == 0) throw ConfigError("operation count must be positive");
    if (!(spec.warmup_fraction >= 0 && spec.warmup_fraction < 1)) throw ConfigError("warmup must be in [0, 1)");
    if (spec.iterations == 0) throw ConfigError("iteration count must be positive");
    if (spec.query_timeout.count() <= 0) throw ConfigError("query timeout must be positive");
    if (spec.window.count() <= 0) throw ConfigError("observation window must be positive");
}

std::vector<std::vector<PlannedOp>> plan_ops(const WorkloadSpec& spec, std::size_t threads, std::size_t ops,
                                             std::size_t vertices, std::uint64_t seed) {
    const auto probs = class_probabilities(spec.dist);
    const std::uint64_t key_space = std::max<std::uint64_t>(1, 2 * vertices);
    const std::uint64_t sources = std::max<std::uint64_t>(1, vertices);
    const std::uint64_t max_weight = std::max<std::uint64_t>(1, std::bit_width(std::max<std::size_t>(vertices, 1)) - 1);
    std::vector<std::vector<PlannedOp>> plan(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * (t + 1));
        const std::size_t n = ops / threads + (t < ops % threads ? 1 : 0);
        plan[t].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            double u = uniform_unit(rng);
            std::size_t c = 0;
            while (c + 1 < kOpClasses && u >= probs[c]) u -= probs[c++];
            PlannedOp op{static_cast<OpClass>(c), 0, 0, 0};
            if (op.cls == OpClass::Query) {
                op.a = static_cast<Key>(uniform_int(rng, 0, sources - 1));
            } else {
                op.a = static_cast<Key>(uniform_int(rng, 0, key_space - 1));
            }
            if (op.cls == OpClass::PutEdge || op.cls == OpClass::RemoveEdge || op.cls == OpClass::GetEdge) {
                op.b = static_cast<Key>(uniform_int(rng, 0, key_space - 1));
            }
            if (op.cls == OpClass::PutEdge) op.w = static_cast<double>(uniform_int(rng, 1, max_weight));
            plan[t].push_back(op);
        }
    }
    return plan;
}

namespace {

struct Shared {
    std::atomic<bool> abort{false};
    std::atomic<std::uint64_t> update_success{0};
    std::atomic<std::uint64_t> update_done{0};
    std::atomic<std::int64_t> update_active{0};
    std::atomic<std::size_t> finished{0};
};

struct WorkerStats {
    std::array<double, kOpClasses> latency_us{};
    std::array<std::uint64_t, kOpClasses> count{};
    std::uint64_t collects = 0;
    std::uint64_t answered = 0;
    std::uint64_t interrupts = 0;
    bool starved = false;
};

bool is_update(OpClass c) { return static_cast<int>(c) <= static_cast<int>(OpClass::RemoveEdge); }

// Collects of one query; zero unless the query produced an answer.
std::uint32_t run_query(Graph& g, ThreadHandle& h, const WorkloadSpec& spec, Key src, bool& timed_out) {
    QueryOptions qo;
    qo.mode = spec.mode;
    qo.deadline = std::chrono::steady_clock::now() + spec.query_timeout;
    QueryStatus st;
    std::uint32_t collects;
    switch (spec.query) {
        case QueryKind::Bfs: {
            auto r = bfs(g, h, src, qo);
            st = r.status;
            collects = r.stats.collects;
            break;
        }
        case QueryKind::Sssp: {
            auto r = sssp(g, h, src, qo);
            st = r.status;
            collects = r.stats.collects;
            break;
        }
        default: {
            auto r = bc_single_source(g, h, src, qo);
            st = r.status;
            collects = r.stats.collects;
            break;
        }
    }
    timed_out = st == QueryStatus::TimedOut;
    return st == QueryStatus::Ok || st == QueryStatus::NegativeCycle ? collects : 0;
}

void execute(Graph& g, ThreadHandle& h, const WorkloadSpec& spec, const PlannedOp& op, Shared& sh, WorkerStats* ws) {
    const auto t0 = std::chrono::steady_clock::now();
    if (is_update(op.cls)) {
        sh.update_active.fetch_add(1, std::memory_order_relaxed);
        bool ok = false;
        switch (op.cls) {
            case OpClass::PutVertex: ok = g.put_vertex(h, op.a); break;
            case OpClass::RemoveVertex: ok = g.remove_vertex(h, op.a); break;
            case OpClass::PutEdge: ok = g.put_edge(h, op.a, op.b, op.w).status; break;
            default: ok = g.remove_edge(h, op.a, op.b).status; break;
        }
        if (ok) sh.update_success.fetch_add(1, std::memory_order_relaxed);
        sh.update_done.fetch_add(1, std::memory_order_relaxed);
        sh.update_active.fetch_sub(1, std::memory_order_relaxed);
    } else if (op.cls == OpClass::GetVertex) {
        g.get_vertex(h, op.a);
    } else if (op.cls == OpClass::GetEdge) {
        g.get_edge(h, op.a, op.b);
    } else {
        const std::uint64_t before = sh.update_success.load(std::memory_order_relaxed);
        bool timed_out = false;
        std::uint32_t collects = run_query(g, h, spec, op.a, timed_out);
        if (timed_out) {
            sh.abort.store(true);
            if (ws) ws->starved = true;
            return;
        }
        if (ws) {
            ws->collects += collects;
            if (collects) ++ws->answered;
            ws->interrupts += sh.update_success.load(std::memory_order_relaxed) - before;
        }
    }
    if (ws) {
        const auto c = static_cast<std::size_t>(op.cls);
        ws->latency_us[c] += std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
        ++ws->count[c];
    }
}

std::string verify_graph(Graph& g, ThreadHandle& h) {
    IntegrityReport rep = g.check_integrity(h);
    if (!rep.ok()) return "structural invariants failed";
    oracle::SeqGraph seq(g.export_adjacency(h));
    std::size_t checked = 0;
    for (const auto& [k, row] : seq.adjacency()) {
        if (checked++ == 8) break;
        if (oracle::format_bfs(bfs(g, h, k).tree) != oracle::format_bfs(oracle::bfs(seq, k))) {
            return "bfs from " + std::to_string(k) + " differs from oracle";
        }
        if (oracle::format_sssp(sssp(g, h, k)) != oracle::format_sssp(oracle::bellman_ford(seq, k))) {
            return "sssp from " + std::to_string(k) + " differs from oracle";
        }
        QueryOptions qo;
        if (bfs(g, h, k, qo).stats.collects != 2) return "quiescent query needed more than two collects";
    }
    return {};
}

RunReport run_once(const WorkloadSpec& spec, const EdgeList& graph, std::size_t threads, bool verify) {
    GraphOptions go;
    go.thread_capacity = threads + 1;
    Graph g(go);
    ThreadHandle main_h = g.register_thread();
    for (std::size_t v = 0; v < graph.vertices; ++v) g.put_vertex(main_h, static_cast<Key>(v));
    for (const EdgeRecord& e : graph.edges) g.put_edge(main_h, e.src, e.dst, graph.weighted ? e.weight : 1.0);

    const auto warm_ops = static_cast<std::size_t>(spec.warmup_fraction * static_cast<double>(spec.total_ops));
    const auto warm = plan_ops(spec, threads, warm_ops, graph.vertices, spec.seed ^ 0xA5A5A5A5A5A5A5A5ull);
    const auto timed = plan_ops(spec, threads, spec.total_ops, graph.vertices, spec.seed);

    Shared sh;
    std::vector<WorkerStats> stats(threads);
    std::barrier start(static_cast<std::ptrdiff_t>(threads + 1));
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            ThreadHandle h = g.register_thread();
            for (const PlannedOp& op : warm[t]) {
                if (sh.abort.load(std::memory_order_relaxed)) break;
                execute(g, h, spec, op, sh, nullptr);
            }
            start.arrive_and_wait();
            for (const PlannedOp& op : timed[t]) {
                if (sh.abort.load(std::memory_order_relaxed)) break;
                execute(g, h, spec, op, sh, &stats[t]);
            }
            sh.finished.fetch_add(1);
        });
    }
    start.arrive_and_wait();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    auto window_end = t0 + spec.window;
    std::uint64_t done_mark = sh.update_done.load();
    while (sh.finished.load() < threads) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
        const auto now = std::chrono::steady_clock::now();
        if (now < window_end) continue;
        const std::uint64_t done = sh.update_done.load();
        ++rep.windows;
        if (done == done_mark && sh.update_active.load() > 0) ++rep.stalled_windows;
        done_mark = done;
        window_end = now + spec.window;
    }
    const auto t1 = std::chrono::steady_clock::now();
    for (auto& w : workers) w.join();

    rep.threads = threads;
    rep.ops = spec.total_ops;
    rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    std::uint64_t queries = 0;
    std::uint64_t answered = 0;
    std::uint64_t collects = 0;
    std::uint64_t interrupts = 0;
    std::uint64_t executed = 0;
    for (const WorkerStats& w : stats) {
        rep.starved = rep.starved || w.starved;
        for (std::size_t c = 0; c < kOpClasses; ++c) {
            rep.classes[c].count += w.count[c];
            rep.classes[c].mean_latency_us += w.latency_us[c];
            executed += w.count[c];
        }
        queries += w.count[static_cast<std::size_t>(OpClass::Query)];
        collects += w.collects;
        answered += w.answered;
        interrupts += w.interrupts;
    }
    for (auto& c : rep.classes) {
        if (c.count) c.mean_latency_us /= static_cast<double>(c.count);
    }
    rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(executed) / rep.wall_seconds : 0;
    if (answered) rep.mean_collects = static_cast<double>(collects) / static_cast<double>(answered);
    if (queries) {
        rep.mean_interrupts = static_cast<double>(interrupts) / static_cast<double>(queries);
    }
    if (verify && !rep.starved) {
        rep.verify_detail = verify_graph(g, main_h);
        rep.verified = rep.verify_detail.empty();
    }
    return rep;
}

}  // namespace

RunReport run(const WorkloadSpec& spec, const EdgeList& graph, std::size_t threads, const std::string& graph_name) {
    validate(spec, threads);
    std::vector<RunReport> runs;
    for (std::size_t i = 0; i < spec.iterations; ++i) {
        runs.push_back(run_once(spec, graph, threads, spec.verify && i + 1 == spec.iterations));
        if (runs.back().starved) break;
    }
    RunReport out;
    if (runs.back().starved) {
        out = runs.back();
    } else {
        std::vector<std::size_t> order(runs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return runs[a].wall_seconds < runs[b].wall_seconds; });
        out = runs[order[(order.size() - 1) / 2]];
        out.verified = runs.back().verified;
        out.verify_detail = runs.back().verify_detail;
    }
    out.iterations = runs.size();
    out.dist = format_dist(spec.dist);
    out.graph = graph_name;
    out.mode = mode_name(spec.mode);
    out.query = to_string(spec.query);
    return out;
}

void emit_csv(const std::vector<RunReport>& reports, std::ostream& out) {
    out << "threads,dist,graph,mode,query,ops,iterations,wall_s,throughput_ops_s";
    for (std::size_t c = 0; c < kOpClasses; ++c) out << ",n_" << to_string(static_cast<OpClass>(c));
    for (std::size_t c = 0; c < kOpClasses; ++c) out << ",lat_us_" << to_string(static_cast<OpClass>(c));
    out << ",mean_collects,mean_interrupts,windows,stalled_windows,starved\n";
    for (const RunReport& r : reports) {
        out << r.threads << ',' << r.dist << ',' << r.graph << ',' << r.mode << ',' << r.query << ',' << r.ops << ','
            << r.iterations << ',' << r.wall_seconds << ',' << r.throughput;
        for (const auto& c : r.classes) out << ',' << c.count;
        for (const auto& c : r.classes) out << ',' << c.mean_latency_us;
        out << ',' << r.mean_collects << ',' << r.mean_interrupts << ',' << r.windows << ',' << r.stalled_windows
            << ',' << (r.starved ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("failed to write csv");
}

}  // namespace nbg::bench
