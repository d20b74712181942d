#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "bnkit/error.hpp"
#include "bnkit/learn.hpp"
#include "bnkit/network_io.hpp"
#include "bnkit/rng.hpp"

namespace bnkit {

double EdgeConfidence::directed(const Edge& e) const {
    if (replicates == 0) return 0.0;
    auto it = directed_count.find(e);
    return it == directed_count.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(replicates);
}

double EdgeConfidence::adjacency(const Edge& e) const {
    if (replicates == 0) return 0.0;
    auto it = adjacency_count.find(e);
    return it == adjacency_count.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(replicates);
}

nlohmann::json confidence_to_json(const EdgeConfidence& c, const std::vector<std::string>& nodes) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& from : nodes) {
        for (const auto& to : nodes) {
            if (from == to) continue;
            const Edge e{from, to};
            auto it = c.adjacency_count.find(e);
            if (it == c.adjacency_count.end() || it->second == 0) continue;
            auto d = c.directed_count.find(e);
            const std::size_t dc = d == c.directed_count.end() ? 0 : d->second;
            edges.push_back({{"from", from},
                             {"to", to},
                             {"directed_count", dc},
                             {"adjacency_count", it->second},
                             {"directed", canonical_double(c.directed(e))},
                             {"adjacency", canonical_double(c.adjacency(e))}});
        }
    }
    return {{"replicates", c.replicates}, {"nodes", nodes}, {"edges", std::move(edges)}};
}

EdgeConfidence bootstrap_edges(const Dataset& ds, const Learner& learner, std::size_t replicates,
                               std::uint64_t seed, std::size_t threads) {
    if (replicates == 0) throw Error("bootstrap needs at least one replicate");
    if (ds.n_total() == 0) throw DataError("bootstrap needs a non-empty dataset");
    threads = std::clamp<std::size_t>(threads, 1, replicates);

    std::vector<std::vector<Edge>> learned(replicates);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_replicate = 0;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= replicates) return;
            try {
                Rng rng(seed + i);
                std::vector<std::size_t> rows(ds.n_total());
                for (auto& r : rows) r = rng.below(ds.n_total());
                learned[i] = learner(ds.select_rows(rows)).edge_list();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure || i < failed_replicate) {
                    failure = std::current_exception();
                    failed_replicate = i;
                }
                next.store(replicates);
                return;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw Error("bootstrap replicate " + std::to_string(failed_replicate) + ": " + e.what());
        }
    }

    EdgeConfidence c;
    c.replicates = replicates;
    for (const auto& edges : learned) {
        for (const auto& e : edges) {
            ++c.directed_count[e];
            ++c.adjacency_count[e];
            ++c.adjacency_count[Edge{e.to, e.from}];
        }
    }
    return c;
}

}  // namespace bnkit
