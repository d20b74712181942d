#include "bnkit/service.hpp"

#include <algorithm>
#include <cstdio>

#include "bnkit/error.hpp"
#include "bnkit/network_io.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bnkit {

namespace {

using nlohmann::json;

std::string fixed6(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", p);
    return buf;
}

std::string error_body(std::string_view code, std::string_view message,
                       std::optional<std::string> field = std::nullopt) {
    json err = {{"code", code}, {"message", message}};
    if (field) err["field"] = *field;
    return json{{"error", std::move(err)}}.dump();
}

ApiResponse not_found(std::string_view id) {
    return {404, error_body("not_found", "no network with id '" + std::string(id) + "'")};
}

std::string network_document(const std::string& id, const BayesianNetwork& net) {
    const MarginalsResult priors = posterior_marginals(net, EvidenceQuery{});
    return "{\"id\":" + json(id).dump() + ",\"network\":" + network_to_json(net).dump() +
           ",\"priors\":" + marginals_object_json(priors) + "}";
}

}  // namespace

std::string marginals_object_json(const MarginalsResult& result) {
    std::string out = "{";
    bool first_node = true;
    for (const auto& [id, probs] : result.marginals) {
        if (!first_node) out += ',';
        first_node = false;
        out += json(id).dump();
        out += ":[";
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (i) out += ',';
            out += fixed6(probs[i]);
        }
        out += ']';
    }
    out += '}';
    return out;
}

// ---------------------------------------------------------------------------
// Registry

ModelRegistry ModelRegistry::load_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw ModelError("model directory " + dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    ModelRegistry registry;
    for (const auto& file : files) {
        BayesianNetwork net = load_network(file);
        std::string id = net.metadata().id.empty() ? file.stem().string() : net.metadata().id;
        if (registry.find(id)) {
            throw ModelError("duplicate model id '" + id + "' (" + file.string() + ")");
        }
        registry.add(std::move(id), std::move(net));
    }
    return registry;
}

void ModelRegistry::add(std::string id, BayesianNetwork net) {
    if (entries_.count(id)) throw ModelError("duplicate model id '" + id + "'");
    require_valid(net);
    auto shared = std::make_shared<const BayesianNetwork>(std::move(net));
    std::string doc = network_document(id, *shared);
    entries_.emplace(std::move(id), Entry{std::move(shared), std::move(doc)});
}

std::vector<NetworkSummary> ModelRegistry::list() const {
    std::vector<NetworkSummary> out;
    for (const auto& [id, entry] : entries_) {
        out.push_back({id, entry.net->metadata().name, entry.net->size(), entry.net->dag().edges().size()});
    }
    return out;
}

const BayesianNetwork* ModelRegistry::find(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : it->second.net.get();
}

const std::string* ModelRegistry::document(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second.document;
}

// ---------------------------------------------------------------------------
// Handlers

ApiResponse handle_list(const ModelRegistry& registry) {
    json items = json::array();
    for (const auto& s : registry.list()) {
        items.push_back({{"id", s.id}, {"name", s.name}, {"node_count", s.node_count}, {"edge_count", s.edge_count}});
    }
    return {200, json{{"networks", std::move(items)}}.dump()};
}

ApiResponse handle_get(const ModelRegistry& registry, std::string_view id) {
    const std::string* doc = registry.document(id);
    if (!doc) return not_found(id);
    return {200, *doc};
}

ApiResponse handle_infer(const ModelRegistry& registry, std::string_view id, std::string_view body) {
    const BayesianNetwork* net = registry.find(id);
    if (!net) return not_found(id);

    json doc;
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        doc = json::object();
    } else {
        doc = json::parse(body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            return {400, error_body("bad_request", "request body must be a JSON object")};
        }
    }

    EvidenceQuery ev;
    if (auto it = doc.find("evidence"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) {
            return {400, error_body("invalid_evidence", "evidence must be an object", "evidence")};
        }
        for (const auto& [node, state] : it->items()) {
            if (!state.is_number_integer() || state.get<std::int64_t>() < 0) {
                return {400, error_body("invalid_evidence",
                                        "state for '" + node + "' must be a non-negative integer index",
                                        node)};
            }
            ev.assignments[node] = state.get<std::size_t>();
        }
    }

    try {
        const MarginalsResult result = posterior_marginals(*net, ev);
        json echo = json::object();
        for (const auto& [node, state] : ev.assignments) echo[node] = state;
        return {200, "{\"evidence\":" + echo.dump() + ",\"marginals\":" + marginals_object_json(result) + "}"};
    } catch (const EvidenceError& e) {
        return {400, error_body("invalid_evidence", e.what(), e.field())};
    } catch (const ImpossibleEvidence& e) {
        return {422, error_body("impossible_evidence", e.what())};
    }
}

// ---------------------------------------------------------------------------
// Server

struct Server::Impl {
    Impl(const ModelRegistry& r, ServerConfig c) : registry(r), config(std::move(c)) {}
    const ModelRegistry& registry;
    ServerConfig config;
    httplib::Server http;
};

namespace {

constexpr const char* kJsonType = "application/json; charset=utf-8";

void reply(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, kJsonType);
}

}  // namespace

Server::Server(const ModelRegistry& registry, ServerConfig config)
    : impl_(std::make_unique<Impl>(registry, std::move(config))) {
    auto& http = impl_->http;
    const ModelRegistry& reg = impl_->registry;
    const std::size_t threads = std::max<std::size_t>(1, impl_->config.threads);
    http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    http.set_keep_alive_max_count(10000);
    http.set_tcp_nodelay(true);
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});

    http.Get("/api/networks", [&reg](const httplib::Request&, httplib::Response& res) {
        reply(res, handle_list(reg));
    });
    http.Get(R"(/api/networks/([^/]+))", [&reg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_get(reg, req.matches[1].str()));
    });
    http.Post(R"(/api/networks/([^/]+)/infer)", [&reg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_infer(reg, req.matches[1].str(), req.body));
    });
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_body("internal", message), kJsonType);
    });
    if (impl_->config.static_dir) {
        if (!http.set_mount_point("/", impl_->config.static_dir->string())) {
            throw Error("static directory " + impl_->config.static_dir->string() + " does not exist");
        }
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& cfg = impl_->config;
    if (cfg.port == 0) {
        port_ = impl_->http.bind_to_any_port(cfg.host);
        if (port_ <= 0) throw NetworkError("cannot bind " + cfg.host + " to a free port");
    } else {
        if (!impl_->http.bind_to_port(cfg.host, cfg.port)) {
            throw NetworkError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port) +
                               " (address in use or not permitted)");
        }
        port_ = cfg.port;
    }
    return port_;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_) impl_->http.stop();
}

}  // namespace bnkit
