// bnkit command-line tool: fit, learn, elicit, sample, compare, serve, bench.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bnkit/bench.hpp"
#include "bnkit/elicit.hpp"
#include "bnkit/error.hpp"
#include "bnkit/estimate.hpp"
#include "bnkit/learn.hpp"
#include "bnkit/network_io.hpp"
#include "bnkit/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bnkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNetwork = 3;

Dataset load_dataset(const fs::path& csv, const std::vector<Variable>& schema) {
    const std::string text = read_text_file(csv);
    try {
        return parse_survey_csv(text, schema);
    } catch (const DataError& e) {
        throw DataError(csv.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

Edge parse_edge_arg(const std::string& text) {
    for (const std::string sep : {"->", ","}) {
        if (auto pos = text.find(sep); pos != std::string::npos) {
            return Edge{text.substr(0, pos), text.substr(pos + sep.size())};
        }
    }
    throw Error("edge '" + text + "' must be written as FROM->TO");
}

std::set<Edge> edges_from_json(const json& arr) {
    std::set<Edge> out;
    for (const auto& e : arr) out.insert(Edge{e.at("from").get<std::string>(), e.at("to").get<std::string>()});
    return out;
}

json edges_to_json(const std::set<Edge>& edges) {
    json arr = json::array();
    for (const auto& e : edges) arr.push_back({{"from", e.from}, {"to", e.to}});
    return arr;
}

StructureConstraints load_constraints(const fs::path& path) {
    const json doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DataError(path.string() + ": not a JSON object");
    try {
        StructureConstraints c;
        if (doc.contains("required")) c.required = edges_from_json(doc.at("required"));
        if (doc.contains("forbidden")) c.forbidden = edges_from_json(doc.at("forbidden"));
        return c;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

ElicitationConfig load_elicitation_config(const fs::path& path) {
    const json doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DataError(path.string() + ": not a JSON object");
    ElicitationConfig cfg;
    try {
        if (doc.contains("weights")) {
            for (const auto& [name, w] : doc.at("weights").items()) {
                auto r = parse_rating(name);
                if (!r) throw DataError(path.string() + ": unknown rating '" + name + "'");
                cfg.weights[*r] = w.get<double>();
            }
        }
        cfg.threshold = doc.value("threshold", cfg.threshold);
        cfg.exclude_not_sure = doc.value("exclude_not_sure", cfg.exclude_not_sure);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    fs::path structure, data, out;
    double alpha = 1.0;
    std::string id, name;
};

int cmd_fit(const FitArgs& a) {
    Structure s = load_structure(a.structure);
    const Dataset ds = load_dataset(a.data, s.variables);
    NetworkMetadata md = s.metadata;
    if (!a.id.empty()) md.id = a.id;
    if (!a.name.empty()) md.name = a.name;
    if (md.source.empty()) md.source = "fitted from " + a.data.filename().string();
    const BayesianNetwork net = fit_network(s.dag, ds, EstimationConfig{a.alpha, 0}, md);
    save_network(net, a.out);

    std::printf("wrote %s (%zu nodes, %zu edges, %llu parameters, alpha %g)\n", a.out.c_str(), net.size(),
                net.dag().edges().size(), static_cast<unsigned long long>(parameter_count(net)), a.alpha);
    std::printf("%-32s %-8s %s\n", "node", "parents", "n_valid");
    for (std::size_t i = 0; i < net.size(); ++i) {
        std::vector<std::size_t> cols;
        for (const auto& p : net.cpt_for(i)->parents) cols.push_back(ds.require_index(p));
        cols.push_back(ds.require_index(net.variable(i).id));
        const auto n_valid = count_configurations(ds, cols).n_valid;
        std::printf("%-32s %-8zu %llu\n", net.variable(i).id.c_str(), cols.size() - 1,
                    static_cast<unsigned long long>(n_valid));
    }
    return kExitOk;
}

struct LearnArgs {
    fs::path data, schema, out, report, confidence, constraints;
    std::string method = "hc";
    double significance = 0.05;
    std::size_t max_parents = 4, tabu = 10, restarts = 0, bootstrap = 0, threads = 1;
    std::uint64_t seed = 0;
};

int cmd_learn(const LearnArgs& a) {
    const Structure schema = load_structure(a.schema);
    const Dataset ds = load_dataset(a.data, schema.variables);
    StructureConstraints constraints;
    if (!a.constraints.empty()) constraints = load_constraints(a.constraints);

    json config = {{"method", a.method}, {"seed", a.seed}};
    Learner learner;
    Provenance provenance;
    if (a.method == "hc") {
        const HillClimbConfig hc{a.max_parents, a.tabu, a.restarts, a.seed};
        config.update({{"max_parents", hc.max_parents}, {"tabu_length", hc.tabu_length}, {"restarts", hc.restarts}});
        learner = [constraints, hc](const Dataset& d) { return hill_climb(d, constraints, hc); };
        provenance = Provenance::Hc;
    } else {
        const double alpha = a.significance;
        config["significance"] = alpha;
        learner = [constraints, alpha](const Dataset& d) { return pc_algorithm(d, alpha, constraints); };
        provenance = Provenance::Pc;
    }
    if (!constraints.required.empty() || !constraints.forbidden.empty()) {
        config["constraints"] = {{"required", edges_to_json(constraints.required)},
                                 {"forbidden", edges_to_json(constraints.forbidden)}};
    }

    const Dag dag = learner(ds);
    Structure learned{schema.variables, dag, {}};
    learned.metadata.name = schema.metadata.name.empty() ? "learned structure" : schema.metadata.name;
    learned.metadata.source = "learned (" + a.method + ") from " + a.data.filename().string();
    write_text_file(a.out, serialize_structure(learned));

    ScoreReport report = bic_score(dag, ds, provenance);
    report.config = config;
    if (!a.report.empty()) write_json(a.report, report_to_json(report));
    std::printf("wrote %s: %zu edges, bic %.4f, log_likelihood %.4f, k %llu, n %llu\n", a.out.c_str(),
                dag.edges().size(), report.bic, report.log_likelihood,
                static_cast<unsigned long long>(report.parameter_count),
                static_cast<unsigned long long>(report.n));
    for (const auto& e : dag.edge_list()) std::printf("  %s -> %s\n", e.from.c_str(), e.to.c_str());

    if (a.bootstrap > 0) {
        const EdgeConfidence conf = bootstrap_edges(ds, learner, a.bootstrap, a.seed, a.threads);
        std::vector<std::string> nodes;
        for (const auto& v : schema.variables) nodes.push_back(v.id);
        const fs::path out = a.confidence.empty() ? fs::path(a.out.string() + ".confidence.json") : a.confidence;
        write_json(out, confidence_to_json(conf, nodes));
        std::printf("wrote %s (%zu replicates)\n", out.c_str(), conf.replicates);
    }
    return kExitOk;
}

struct ElicitArgs {
    fs::path base, responses, config, out, report;
    std::vector<std::string> additions;
};

int cmd_elicit(const ElicitArgs& a) {
    const Structure base = load_structure(a.base);
    const auto responses = parse_elicitation_csv(read_text_file(a.responses));
    const ElicitationConfig cfg = a.config.empty() ? ElicitationConfig{} : load_elicitation_config(a.config);
    cfg.validate();

    const auto scores = score_all(responses, cfg);
    const ThresholdResult decision = apply_threshold(scores, cfg);
    std::set<Edge> additions;
    for (const auto& text : a.additions) additions.insert(parse_edge_arg(text));
    const Dag refined = merge_structures(base.dag, decision.retained, decision.removed, additions);

    Structure out{base.variables, refined, base.metadata};
    write_text_file(a.out, serialize_structure(out));

    std::map<Edge, std::size_t> counts;
    for (const auto& r : responses) ++counts[r.edge];
    json edges = json::array();
    std::printf("%-56s %6s %5s  %s\n", "edge", "score", "n", "decision");
    for (const auto& [edge, score] : scores) {
        const bool kept = decision.retained.count(edge) > 0;
        edges.push_back({{"from", edge.from},
                         {"to", edge.to},
                         {"score", canonical_double(score)},
                         {"responses", counts[edge]},
                         {"in_base", base.dag.has_edge(edge)},
                         {"decision", kept ? "retained" : "removed"}});
        const std::string name = edge.from + " -> " + edge.to;
        std::printf("%-56s %6.3f %5zu  %s\n", name.c_str(), score, counts[edge], kept ? "retained" : "removed");
    }
    if (!a.report.empty()) {
        write_json(a.report, {{"threshold", cfg.threshold},
                              {"exclude_not_sure", cfg.exclude_not_sure},
                              {"edges", std::move(edges)},
                              {"additions", edges_to_json(additions)}});
    }
    std::printf("wrote %s (%zu edges)\n", a.out.c_str(), refined.edges().size());
    return kExitOk;
}

struct SampleArgs {
    fs::path network, out;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
    const BayesianNetwork net = load_network(a.network);
    const Dataset ds = forward_sample(net, a.n, a.seed);
    write_text_file(a.out, write_survey_csv(ds));
    std::printf("wrote %s (%zu records, seed %llu)\n", a.out.c_str(), ds.n_total(),
                static_cast<unsigned long long>(a.seed));
    return kExitOk;
}

struct CompareArgs {
    fs::path data, schema;
    std::vector<std::string> candidates;
    fs::path out;
};

int cmd_compare(const CompareArgs& a) {
    const Structure schema = load_structure(a.schema);
    const Dataset ds = load_dataset(a.data, schema.variables);
    std::vector<std::pair<Dag, Provenance>> candidates;
    std::vector<std::string> names;
    for (const auto& spec : a.candidates) {
        fs::path file = spec;
        Provenance prov = Provenance::Manual;
        if (auto pos = spec.rfind(':'); pos != std::string::npos) {
            if (auto p = parse_provenance(spec.substr(pos + 1))) {
                prov = *p;
                file = spec.substr(0, pos);
            }
        }
        candidates.emplace_back(load_structure(file).dag, prov);
        names.push_back(file.string());
    }
    const auto ranked = compare_structures(candidates, ds);
    json arr = json::array();
    std::printf("%-4s %-8s %14s %14s %6s\n", "rank", "source", "bic", "loglik", "k");
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = ranked[i];
        arr.push_back(report_to_json(r));
        std::printf("%-4zu %-8s %14.4f %14.4f %6llu\n", i + 1, std::string(to_string(r.provenance)).c_str(), r.bic,
                    r.log_likelihood, static_cast<unsigned long long>(r.parameter_count));
    }
    if (!a.out.empty()) write_json(a.out, arr);
    return kExitOk;
}

struct ServeArgs {
    fs::path models;
    fs::path static_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t threads = 64;
};

int cmd_serve(const ServeArgs& a) {
    const ModelRegistry registry = ModelRegistry::load_directory(a.models);
    ServerConfig cfg;
    cfg.host = a.host;
    cfg.port = a.port;
    cfg.threads = a.threads;
    if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Server server(registry, cfg);
    const int port = server.bind();
    std::printf("serving %zu model(s) from %s on http://%s:%d\n", registry.size(), a.models.c_str(),
                a.host.c_str(), port);
    std::fflush(stdout);
    std::thread worker([&] { server.run(); });
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    worker.join();
    std::printf("stopped\n");
    return kExitOk;
}

struct BenchArgs {
    BenchConfig cfg;
    std::string mode = "single";
    fs::path evidence, out;
};

int cmd_bench(BenchArgs a) {
    a.cfg.mode = a.mode == "load" ? BenchMode::Load : BenchMode::Single;
    if (!a.evidence.empty()) a.cfg.evidence = parse_evidence_list(read_text_file(a.evidence));
    const LatencyStats stats = run_bench(a.cfg);
    const json doc = stats_to_json(stats);
    std::printf("%s\n%s", doc.dump().c_str(), stats_table(stats).c_str());
    if (!a.out.empty()) write_json(a.out, doc);
    return kExitOk;
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Bayesian networks for survey data"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Estimate CPTs for a structure from survey data");
    fit_cmd->add_option("-s,--structure", fit.structure, "Structure or network JSON")->required();
    fit_cmd->add_option("-d,--data", fit.data, "Survey CSV")->required();
    fit_cmd->add_option("-a,--alpha", fit.alpha, "Smoothing pseudo-count per cell")->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("-o,--out", fit.out, "Output network JSON")->required();
    fit_cmd->add_option("--id", fit.id, "Model id stored in the output");
    fit_cmd->add_option("--name", fit.name, "Model name stored in the output");

    LearnArgs learn;
    auto* learn_cmd = app.add_subcommand("learn", "Learn a structure with hill climbing or PC");
    learn_cmd->add_option("-d,--data", learn.data, "Survey CSV")->required();
    learn_cmd->add_option("-s,--schema", learn.schema, "JSON whose nodes define the variables")->required();
    learn_cmd->add_option("-m,--method", learn.method, "hc or pc")->check(CLI::IsMember({"hc", "pc"}));
    learn_cmd->add_option("-c,--constraints", learn.constraints, "JSON with required/forbidden edge lists");
    learn_cmd->add_option("--significance", learn.significance, "PC test level")->check(CLI::Range(0.0, 1.0));
    learn_cmd->add_option("--max-parents", learn.max_parents, "HC parent limit")->check(CLI::PositiveNumber);
    learn_cmd->add_option("--tabu", learn.tabu, "HC tabu list length");
    learn_cmd->add_option("--restarts", learn.restarts, "HC random restarts");
    learn_cmd->add_option("--seed", learn.seed, "Seed for restarts and bootstrap");
    learn_cmd->add_option("-b,--bootstrap", learn.bootstrap, "Bootstrap replicates (0 = off)");
    learn_cmd->add_option("--threads", learn.threads, "Bootstrap worker threads")->check(CLI::PositiveNumber);
    learn_cmd->add_option("-o,--out", learn.out, "Output structure JSON")->required();
    learn_cmd->add_option("-r,--report", learn.report, "Output score report JSON");
    learn_cmd->add_option("--confidence", learn.confidence, "Output edge-confidence JSON");

    ElicitArgs elicit;
    auto* elicit_cmd = app.add_subcommand("elicit", "Score expert ratings and refine a structure");
    elicit_cmd->add_option("-b,--base", elicit.base, "Base structure JSON")->required();
    elicit_cmd->add_option("-r,--responses", elicit.responses, "CSV of cause,effect,rating")->required();
    elicit_cmd->add_option("-c,--config", elicit.config, "JSON with weights, threshold, exclude_not_sure");
    elicit_cmd->add_option("-a,--add", elicit.additions, "Expert-added edge FROM->TO (repeatable)");
    elicit_cmd->add_option("-o,--out", elicit.out, "Output structure JSON")->required();
    elicit_cmd->add_option("--report", elicit.report, "Output per-edge score JSON");

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Forward-sample synthetic survey data");
    sample_cmd->add_option("-N,--network", sample.network, "Network JSON")->required();
    sample_cmd->add_option("-n,--count", sample.n, "Number of records")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", sample.seed, "Sampling seed");
    sample_cmd->add_option("-o,--out", sample.out, "Output CSV")->required();

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Rank candidate structures by BIC");
    compare_cmd->add_option("-d,--data", compare.data, "Survey CSV")->required();
    compare_cmd->add_option("-s,--schema", compare.schema, "JSON whose nodes define the variables")->required();
    compare_cmd->add_option("candidates", compare.candidates, "FILE[:expert|hc|pc|manual]")->required();
    compare_cmd->add_option("-o,--out", compare.out, "Output ranking JSON");

    ServeArgs serve;
    serve.models = env_or("BN_MODEL_DIR", "models");
    serve.port = std::atoi(env_or("BN_PORT", "8080").c_str());
    auto* serve_cmd = app.add_subcommand("serve", "Serve models over HTTP");
    serve_cmd->add_option("-m,--models", serve.models, "Model directory (env BN_MODEL_DIR)");
    serve_cmd->add_option("-p,--port", serve.port, "Port (env BN_PORT; 0 = any free port)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", serve.host, "Bind address");
    serve_cmd->add_option("--threads", serve.threads, "Worker threads")->check(CLI::PositiveNumber);
    serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measure inference latency against a server");
    bench_cmd->add_option("-u,--url", bench.cfg.url, "Server base URL");
    bench_cmd->add_option("--mode", bench.mode, "single or load")->check(CLI::IsMember({"single", "load"}));
    bench_cmd->add_option("--users", bench.cfg.users, "Concurrent users in load mode")->check(CLI::PositiveNumber);
    bench_cmd->add_option("-n,--requests", bench.cfg.requests, "Total requests")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--model", bench.cfg.model, "Model id (default: first listed)");
    bench_cmd->add_option("-e,--evidence", bench.evidence, "JSON array of evidence objects");
    bench_cmd->add_option("--timeout", bench.cfg.timeout_seconds, "Per-request timeout in seconds");
    bench_cmd->add_option("-o,--out", bench.out, "Output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit);
        if (*learn_cmd) return cmd_learn(learn);
        if (*elicit_cmd) return cmd_elicit(elicit);
        if (*sample_cmd) return cmd_sample(sample);
        if (*compare_cmd) return cmd_compare(compare);
        if (*serve_cmd) return cmd_serve(serve);
        if (*bench_cmd) return cmd_bench(bench);
    } catch (const NetworkError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNetwork;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
