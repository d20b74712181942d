#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/infer.hpp"
#include "bnkit/network.hpp"

namespace bnkit {

struct NetworkSummary {
    std::string id;
    std::string name;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
};

/// Read-only set of served models, keyed by id.
class ModelRegistry {
public:
    /// Loads every *.json file in `dir` (non-recursive). The id is the
    /// document's `id` field, else the file stem. Throws ModelError on an
    /// invalid model or a duplicate id.
    static ModelRegistry load_directory(const std::filesystem::path& dir);

    /// Throws ModelError on a duplicate id.
    void add(std::string id, BayesianNetwork net);

    std::vector<NetworkSummary> list() const;  // id order
    const BayesianNetwork* find(std::string_view id) const;
    /// Cached get_network document; nullptr for an unknown id.
    const std::string* document(std::string_view id) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    struct Entry {
        std::shared_ptr<const BayesianNetwork> net;
        std::string document;
    };
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Status code plus JSON body.
struct ApiResponse {
    int status = 200;
    std::string body;
};

/// `{"marginals": {...}}` style object body with probabilities at 6 decimals.
std::string marginals_object_json(const MarginalsResult& result);

ApiResponse handle_list(const ModelRegistry& registry);
ApiResponse handle_get(const ModelRegistry& registry, std::string_view id);
/// Body: `{"evidence": {"<node_id>": <state_index>}}`; the key may be omitted.
ApiResponse handle_infer(const ModelRegistry& registry, std::string_view id, std::string_view body);

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::size_t threads = 64;
    std::optional<std::filesystem::path> static_dir;
};

class Server {
public:
    Server(const ModelRegistry& registry, ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket; returns the bound port. Throws NetworkError.
    int bind();
    /// Serves until stop(); call after bind().
    void run();
    void stop();
    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace bnkit
