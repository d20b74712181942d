#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace bnkit {

enum class BenchMode { Single, Load };

struct BenchConfig {
    std::string url = "http://127.0.0.1:8080";
    /// Model id; the first id listed by the server when empty.
    std::string model;
    BenchMode mode = BenchMode::Single;
    std::size_t users = 50;  // load mode only
    /// Total requests; in load mode split evenly across users.
    std::size_t requests = 1000;
    /// Evidence bodies sent round-robin. When empty: no evidence, then every
    /// single (node, state) assignment of the model.
    std::vector<std::map<std::string, std::size_t>> evidence;
    double timeout_seconds = 10.0;
};

struct LatencyStats {
    std::string mode;
    std::string model;
    std::size_t users = 1;
    std::size_t requests = 0;
    std::size_t failures = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    double wall_seconds = 0.0;
};

/// Times POST /api/networks/{id}/infer calls. Throws NetworkError when the
/// server cannot be reached or every request fails.
LatencyStats run_bench(const BenchConfig& config);

/// Summary statistics over latencies in milliseconds; median is the mean of
/// the two middle values for even counts, p95 uses the nearest-rank method.
LatencyStats summarize_latencies(std::vector<double> latencies_ms);

nlohmann::json stats_to_json(const LatencyStats& s);
std::string stats_table(const LatencyStats& s);

/// Parses a JSON array of evidence objects, e.g. `[{}, {"a": 1}]`.
std::vector<std::map<std::string, std::size_t>> parse_evidence_list(const std::string& text);

}  // namespace bnkit
