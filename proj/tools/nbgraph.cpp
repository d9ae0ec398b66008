#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nbg/adjacency_io.hpp"
#include "nbg/bench.hpp"
#include "nbg/graph.hpp"
#include "nbg/oracle.hpp"
#include "nbg/queries.hpp"
#include "nbg/rmat.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStarved = 3;

struct ConfigFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nbg::EdgeList read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigFailure("cannot open graph file " + path);
    try {
        return nbg::read_adjacency(in);
    } catch (const nbg::AdjacencyParseError& e) {
        throw ConfigFailure(path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<std::size_t> parse_threads(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigFailure("bad thread list '" + list + "'");
        }
    }
    if (out.empty()) throw ConfigFailure("empty thread list");
    return out;
}

struct Loaded {
    std::unique_ptr<nbg::Graph> graph;
    std::unique_ptr<nbg::ThreadHandle> handle;
};

Loaded load(const nbg::EdgeList& list) {
    Loaded l;
    l.graph = std::make_unique<nbg::Graph>();
    l.handle = std::make_unique<nbg::ThreadHandle>(l.graph->register_thread());
    for (std::size_t v = 0; v < list.vertices; ++v) l.graph->put_vertex(*l.handle, static_cast<nbg::Key>(v));
    for (const nbg::EdgeRecord& e : list.edges) {
        l.graph->put_edge(*l.handle, e.src, e.dst, list.weighted ? e.weight : 1.0);
    }
    return l;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concurrent graph with linearizable queries: generator, benchmark and tools"};
    app.require_subcommand(1);

    nbg::RmatParams gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "Generate an R-MAT graph and its parameter file");
    gen_cmd->add_option("--vertices", gen.vertices, "Vertex count, a power of two")->capture_default_str();
    gen_cmd->add_option("--edges", gen.edges, "Distinct edge count")->capture_default_str();
    gen_cmd->add_option("--a", gen.a, "Top-left quadrant probability")->capture_default_str();
    gen_cmd->add_option("--b", gen.b, "Top-right quadrant probability")->capture_default_str();
    gen_cmd->add_option("--c", gen.c, "Bottom-left quadrant probability")->capture_default_str();
    gen_cmd->add_option("--d", gen.d, "Bottom-right quadrant probability")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_flag("--weighted", gen.weighted, "Integer weights in [1, log2 V]");
    gen_cmd->add_option("--out", gen_out, "Output graph path; parameters go to <out>.params.json")->required();

    std::string bench_graph = "";
    std::string bench_threads = "1";
    std::string bench_dist = "40/10/50";
    std::string bench_query = "bfs";
    std::string bench_mode = "lin";
    std::string bench_csv;
    nbg::bench::WorkloadSpec spec;
    long long timeout_ms = spec.query_timeout.count();
    long long window_ms = spec.window.count();
    auto* bench_cmd = app.add_subcommand("bench", "Run a mixed workload and report throughput as CSV");
    bench_cmd->add_option("--graph", bench_graph, "Adjacency file to load before every iteration")->required();
    bench_cmd->add_option("--threads", bench_threads, "Comma-separated worker counts")->capture_default_str();
    bench_cmd->add_option("--dist", bench_dist, "Update/search/query percentages")->capture_default_str();
    bench_cmd->add_option("--query", bench_query, "bfs, sssp or bc")->capture_default_str();
    bench_cmd->add_option("--ops", spec.total_ops, "Timed operations per iteration")->capture_default_str();
    bench_cmd->add_option("--warmup", spec.warmup_fraction, "Warmup operations as a fraction of --ops")
        ->capture_default_str();
    bench_cmd->add_option("--mode", bench_mode, "lin (validated) or icn (single collect)")->capture_default_str();
    bench_cmd->add_option("--iters", spec.iterations, "Iterations; the median is reported")->capture_default_str();
    bench_cmd->add_option("--seed", spec.seed, "Workload seed")->capture_default_str();
    bench_cmd->add_option("--csv", bench_csv, "CSV output path (stdout if omitted)");
    bench_cmd->add_option("--timeout", timeout_ms, "Per-query timeout in milliseconds")->capture_default_str();
    bench_cmd->add_option("--window", window_ms, "Progress observation window in milliseconds")
        ->capture_default_str();
    bench_cmd->add_flag("--verify", spec.verify, "Check invariants and oracle answers after the last iteration");

    std::string query_graph;
    std::string query_kind = "bfs";
    std::string query_mode = "lin";
    nbg::Key query_source = 0;
    auto* query_cmd = app.add_subcommand("query", "Run one query on a loaded graph");
    query_cmd->add_option("--graph", query_graph, "Adjacency file")->required();
    query_cmd->add_option("--kind", query_kind, "bfs, sssp or bc (single-source dependencies)")
        ->capture_default_str();
    query_cmd->add_option("--source", query_source, "Source vertex")->capture_default_str();
    query_cmd->add_option("--mode", query_mode, "lin or icn")->capture_default_str();

    std::string bc_graph;
    std::vector<nbg::Key> bc_vertices;
    auto* bc_cmd = app.add_subcommand("bc-full", "Betweenness centrality summed over every source");
    bc_cmd->add_option("--graph", bc_graph, "Adjacency file")->required();
    bc_cmd->add_option("--vertex", bc_vertices, "Vertices to report (all if omitted)");

    std::string lin_history;
    std::string lin_graph;
    auto* lin_cmd = app.add_subcommand("lincheck", "Check a recorded history for linearizability");
    lin_cmd->add_option("--history", lin_history, "History file")->required();
    lin_cmd->add_option("--graph", lin_graph, "Initial graph as an adjacency file (empty if omitted)");

    nbg::oracle::HistoryShape shape;
    std::uint64_t rec_seed = 1;
    std::string rec_out;
    bool rec_no_queries = false;
    auto* rec_cmd = app.add_subcommand("record", "Record a short concurrent history from the implementation");
    rec_cmd->add_option("--seed", rec_seed, "Workload seed")->capture_default_str();
    rec_cmd->add_option("--threads", shape.threads, "Threads")->capture_default_str();
    rec_cmd->add_option("--ops", shape.ops_per_thread, "Operations per thread")->capture_default_str();
    rec_cmd->add_option("--keys", shape.keys, "Vertex keys in [0, keys)")->capture_default_str();
    rec_cmd->add_flag("--no-queries", rec_no_queries, "Leave out bfs and sssp");
    rec_cmd->add_option("--out", rec_out, "History path; the initial graph goes to <out>.graph")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*gen_cmd) {
            try {
                nbg::validate(gen);
            } catch (const std::invalid_argument& e) {
                throw ConfigFailure(e.what());
            }
            std::ostringstream text;
            nbg::write_adjacency(nbg::generate(gen), text);
            write_file(gen_out, text.str());
            write_file(gen_out + ".params.json", nbg::params_json(gen));
            return 0;
        }

        if (*bench_cmd) {
            std::vector<std::size_t> threads;
            try {
                spec.dist = nbg::bench::parse_dist(bench_dist);
                spec.query = nbg::bench::parse_query_kind(bench_query);
                spec.mode = nbg::bench::parse_mode(bench_mode);
                spec.query_timeout = std::chrono::milliseconds(timeout_ms);
                spec.window = std::chrono::milliseconds(window_ms);
                threads = parse_threads(bench_threads);
                for (std::size_t t : threads) nbg::bench::validate(spec, t);
            } catch (const nbg::bench::ConfigError& e) {
                throw ConfigFailure(e.what());
            }
            nbg::EdgeList graph = read_graph_file(bench_graph);
            const std::string name = std::filesystem::path(bench_graph).filename().string();
            std::vector<nbg::bench::RunReport> reports;
            bool starved = false;
            bool unverified = false;
            for (std::size_t t : threads) {
                reports.push_back(nbg::bench::run(spec, graph, t, name));
                const auto& r = reports.back();
                std::cerr << "threads=" << t << " throughput=" << r.throughput << " ops/s mean_collects=" << r.mean_collects
                          << " stalled_windows=" << r.stalled_windows << '/' << r.windows << '\n';
                if (spec.verify && !r.starved && !r.verified) {
                    std::cerr << "verification failed: " << r.verify_detail << '\n';
                    unverified = true;
                }
                if (r.starved) {
                    std::cerr << "starvation: a query exceeded " << timeout_ms << " ms; run aborted\n";
                    starved = true;
                    break;
                }
            }
            if (bench_csv.empty()) {
                nbg::bench::emit_csv(reports, std::cout);
            } else {
                std::ofstream out(bench_csv, std::ios::trunc);
                if (!out) throw std::runtime_error("cannot write " + bench_csv);
                nbg::bench::emit_csv(reports, out);
            }
            if (starved) return kExitStarved;
            return unverified ? kExitFailure : 0;
        }

        if (*query_cmd) {
            nbg::QueryOptions qo;
            try {
                qo.mode = nbg::bench::parse_mode(query_mode);
                nbg::bench::parse_query_kind(query_kind);
            } catch (const nbg::bench::ConfigError& e) {
                throw ConfigFailure(e.what());
            }
            Loaded l = load(read_graph_file(query_graph));
            if (query_kind == "bfs") {
                nbg::write_result(nbg::bfs(*l.graph, *l.handle, query_source, qo), std::cout);
            } else if (query_kind == "sssp") {
                nbg::write_result(nbg::sssp(*l.graph, *l.handle, query_source, qo), std::cout);
            } else {
                nbg::write_result(nbg::bc_single_source(*l.graph, *l.handle, query_source, qo), std::cout);
            }
            return 0;
        }

        if (*bc_cmd) {
            nbg::EdgeList list = read_graph_file(bc_graph);
            Loaded l = load(list);
            if (bc_vertices.empty()) {
                for (std::size_t v = 0; v < list.vertices; ++v) bc_vertices.push_back(static_cast<nbg::Key>(v));
            }
            for (nbg::Key v : bc_vertices) {
                nbg::BcResult r = nbg::bc(*l.graph, *l.handle, v);
                if (r.status == nbg::QueryStatus::Ok) {
                    std::cout << v << ' ' << r.centrality << '\n';
                } else {
                    std::cout << v << ' ' << nbg::to_string(r.status) << '\n';
                }
            }
            return 0;
        }

        if (*lin_cmd) {
            std::ifstream in(lin_history);
            if (!in) throw ConfigFailure("cannot open history file " + lin_history);
            std::vector<nbg::oracle::Event> events = nbg::oracle::read_history(in);
            nbg::oracle::SeqGraph initial;
            if (!lin_graph.empty()) initial = nbg::oracle::SeqGraph::from_edges(read_graph_file(lin_graph));
            nbg::oracle::LinearizabilityResult r = nbg::oracle::check_linearizable(events, initial);
            if (r.ok) {
                std::cout << "linearizable\n";
                return 0;
            }
            std::cout << "not linearizable: " << r.detail << '\n';
            return kExitFailure;
        }

        if (*rec_cmd) {
            shape.queries = !rec_no_queries;
            if (shape.threads == 0 || shape.keys <= 0) throw ConfigFailure("threads and keys must be positive");
            if (shape.threads * shape.ops_per_thread > nbg::oracle::kMaxCheckedOps) {
                throw ConfigFailure("at most " + std::to_string(nbg::oracle::kMaxCheckedOps) +
                                    " operations per history can be checked");
            }
            nbg::oracle::RecordedHistory rec = nbg::oracle::record_history(rec_seed, shape);
            std::ostringstream hist;
            nbg::oracle::write_history(rec.events, hist);
            write_file(rec_out, hist.str());
            std::ostringstream graph;
            nbg::write_adjacency(rec.initial, graph);
            write_file(rec_out + ".graph", graph.str());
            return 0;
        }
    } catch (const ConfigFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
