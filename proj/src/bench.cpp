#include "bnkit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <latch>
#include <thread>

#include "bnkit/error.hpp"
#include "httplib.h"

namespace bnkit {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::unique_ptr<httplib::Client> make_client(const BenchConfig& cfg) {
    auto cli = std::make_unique<httplib::Client>(cfg.url);
    if (!cli->is_valid()) throw NetworkError("invalid url '" + cfg.url + "'");
    const auto secs = static_cast<time_t>(cfg.timeout_seconds);
    const auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli->set_connection_timeout(secs, usecs);
    cli->set_read_timeout(secs, usecs);
    cli->set_write_timeout(secs, usecs);
    cli->set_keep_alive(true);
    cli->set_tcp_nodelay(true);
    return cli;
}

json get_json(httplib::Client& cli, const std::string& path, const std::string& url) {
    auto res = cli.Get(path);
    if (!res) {
        throw NetworkError("cannot reach " + url + path + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw NetworkError("GET " + path + " returned HTTP " + std::to_string(res->status));
    }
    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) throw NetworkError("GET " + path + " returned malformed JSON");
    return doc;
}

std::vector<std::string> default_bodies(const json& network_doc) {
    std::vector<std::string> bodies{R"({"evidence":{}})"};
    for (const auto& node : network_doc.at("network").at("nodes")) {
        const auto id = node.at("id").get<std::string>();
        for (std::size_t s = 0; s < node.at("states").size(); ++s) {
            bodies.push_back(json{{"evidence", {{id, s}}}}.dump());
        }
    }
    return bodies;
}

struct WorkerResult {
    std::vector<double> latencies;
    std::size_t failures = 0;
};

void run_requests(httplib::Client& cli, const std::string& path, const std::vector<std::string>& bodies,
                  std::size_t offset, std::size_t count, WorkerResult& out) {
    out.latencies.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string& body = bodies[(offset + i) % bodies.size()];
        const auto start = Clock::now();
        auto res = cli.Post(path, body, "application/json");
        const auto stop = Clock::now();
        if (!res || res->status != 200) {
            ++out.failures;
            continue;
        }
        out.latencies.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
}

}  // namespace

LatencyStats summarize_latencies(std::vector<double> v) {
    LatencyStats s;
    s.requests = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += x;
    s.mean_ms = total / static_cast<double>(v.size());
    const std::size_t n = v.size();
    s.median_ms = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95_ms = v[std::max<std::size_t>(rank, 1) - 1];
    s.min_ms = v.front();
    s.max_ms = v.back();
    return s;
}

LatencyStats run_bench(const BenchConfig& cfg) {
    if (cfg.requests == 0) throw Error("bench needs at least one request");
    if (cfg.mode == BenchMode::Load && cfg.users == 0) throw Error("load mode needs at least one user");

    auto probe = make_client(cfg);
    std::string model = cfg.model;
    if (model.empty()) {
        const json listing = get_json(*probe, "/api/networks", cfg.url);
        const auto& items = listing.at("networks");
        if (items.empty()) throw NetworkError("server at " + cfg.url + " lists no networks");
        model = items.front().at("id").get<std::string>();
    }
    const std::string base = "/api/networks/" + httplib::detail::encode_url(model);
    const json network_doc = get_json(*probe, base, cfg.url);

    std::vector<std::string> bodies;
    if (cfg.evidence.empty()) {
        bodies = default_bodies(network_doc);
    } else {
        for (const auto& ev : cfg.evidence) bodies.push_back(json{{"evidence", ev}}.dump());
    }
    const std::string path = base + "/infer";

    const std::size_t users = cfg.mode == BenchMode::Single ? 1 : cfg.users;
    std::vector<WorkerResult> results(users);
    const auto wall_start = Clock::now();
    if (users == 1) {
        run_requests(*probe, path, bodies, 0, cfg.requests, results[0]);
    } else {
        std::vector<std::unique_ptr<httplib::Client>> clients;
        for (std::size_t u = 0; u < users; ++u) clients.push_back(make_client(cfg));
        std::latch ready(static_cast<std::ptrdiff_t>(users));
        std::vector<std::thread> threads;
        std::size_t offset = 0;
        for (std::size_t u = 0; u < users; ++u) {
            const std::size_t count = cfg.requests / users + (u < cfg.requests % users ? 1 : 0);
            threads.emplace_back([&, u, offset, count] {
                ready.arrive_and_wait();
                run_requests(*clients[u], path, bodies, offset, count, results[u]);
            });
            offset += count;
        }
        for (auto& t : threads) t.join();
    }
    const double wall = std::chrono::duration<double>(Clock::now() - wall_start).count();

    std::vector<double> all;
    std::size_t failures = 0;
    for (auto& r : results) {
        all.insert(all.end(), r.latencies.begin(), r.latencies.end());
        failures += r.failures;
    }
    if (all.empty()) throw NetworkError("every request to " + cfg.url + path + " failed");

    LatencyStats s = summarize_latencies(std::move(all));
    s.mode = cfg.mode == BenchMode::Single ? "single" : "load";
    s.model = model;
    s.users = users;
    s.failures = failures;
    s.wall_seconds = wall;
    return s;
}

nlohmann::json stats_to_json(const LatencyStats& s) {
    return {{"mode", s.mode},         {"model", s.model},         {"users", s.users},
            {"requests", s.requests}, {"failures", s.failures},   {"mean_ms", s.mean_ms},
            {"median_ms", s.median_ms}, {"p95_ms", s.p95_ms},     {"min_ms", s.min_ms},
            {"max_ms", s.max_ms},     {"wall_seconds", s.wall_seconds}};
}

std::string stats_table(const LatencyStats& s) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "mode      %s\nmodel     %s\nusers     %zu\nrequests  %zu (failed %zu)\n"
                  "mean      %8.3f ms\nmedian    %8.3f ms\np95       %8.3f ms\n"
                  "min       %8.3f ms\nmax       %8.3f ms\nwall      %8.3f s\n",
                  s.mode.c_str(), s.model.c_str(), s.users, s.requests, s.failures, s.mean_ms,
                  s.median_ms, s.p95_ms, s.min_ms, s.max_ms, s.wall_seconds);
    return buf;
}

std::vector<std::map<std::string, std::size_t>> parse_evidence_list(const std::string& text) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw DataError("evidence file must hold a JSON array");
    std::vector<std::map<std::string, std::size_t>> out;
    for (const auto& item : doc) {
        const json& ev = item.is_object() && item.contains("evidence") ? item.at("evidence") : item;
        if (!ev.is_object()) throw DataError("each evidence entry must be an object");
        std::map<std::string, std::size_t> m;
        for (const auto& [k, v] : ev.items()) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                throw DataError("evidence state for '" + k + "' must be a non-negative integer");
            }
            m[k] = v.get<std::size_t>();
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace bnkit
