#include "bnkit/network_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bnkit/error.hpp"

namespace bnkit {

using nlohmann::json;

double canonical_double(double value) {
    if (!std::isfinite(value)) return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return std::strtod(buf, nullptr);
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ModelError(where + ": missing key '" + key + "'");
    return *it;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("malformed JSON: ") + e.what());
    }
}

NetworkMetadata metadata_from_json(const json& doc) {
    NetworkMetadata m;
    m.id = doc.value("id", std::string{});
    m.name = doc.value("name", std::string{});
    m.description = doc.value("description", std::string{});
    m.source = doc.value("source", std::string{});
    return m;
}

void metadata_to_json(const NetworkMetadata& m, json& doc) {
    if (!m.id.empty()) doc["id"] = m.id;
    doc["name"] = m.name;
    if (!m.description.empty()) doc["description"] = m.description;
    if (!m.source.empty()) doc["source"] = m.source;
}

Dag dag_from_json(const std::vector<Variable>& variables, const json& doc) {
    Dag dag;
    for (const auto& v : variables) dag.add_node(v.id);
    if (!doc.contains("edges")) return dag;
    const json& edges = doc.at("edges");
    if (!edges.is_array()) throw ModelError("'edges' must be an array");
    for (const auto& e : edges) {
        std::string from = require(e, "from", "edge").get<std::string>();
        std::string to = require(e, "to", "edge").get<std::string>();
        std::optional<EdgeTag> tag;
        if (auto it = e.find("tag"); it != e.end() && !it->is_null()) {
            tag = parse_edge_tag(it->get<std::string>());
            if (!tag) {
                throw ModelError("edge " + from + "->" + to + ": unknown tag '" +
                                 it->get<std::string>() + "'");
            }
        }
        dag.add_edge(std::move(from), std::move(to), tag);
    }
    return dag;
}

json nodes_to_json(const std::vector<Variable>& variables) {
    json nodes = json::array();
    for (const auto& v : variables) {
        json n = {{"id", v.id}, {"label", v.label}, {"states", v.states}};
        if (v.position) {
            n["position"] = {{"x", canonical_double(v.position->x)},
                             {"y", canonical_double(v.position->y)}};
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

json edges_to_json(const Dag& dag) {
    json edges = json::array();
    for (const auto& r : dag.edges()) {
        json e = {{"from", r.edge.from}, {"to", r.edge.to}};
        if (r.tag) e["tag"] = std::string(to_string(*r.tag));
        edges.push_back(std::move(e));
    }
    return edges;
}

}  // namespace

std::vector<Variable> variables_from_json(const json& nodes) {
    if (!nodes.is_array()) throw ModelError("'nodes' must be an array");
    std::vector<Variable> out;
    for (const auto& n : nodes) {
        Variable v;
        v.id = require(n, "id", "node").get<std::string>();
        v.label = n.value("label", v.id);
        v.states = require(n, "states", "node " + v.id).get<std::vector<std::string>>();
        if (auto it = n.find("position"); it != n.end() && !it->is_null()) {
            v.position = Position{it->at("x").get<double>(), it->at("y").get<double>()};
        }
        out.push_back(std::move(v));
    }
    return out;
}

Structure structure_from_json(const json& doc) {
    try {
        Structure s;
        s.variables = variables_from_json(require(doc, "nodes", "network"));
        s.dag = dag_from_json(s.variables, doc);
        s.metadata = metadata_from_json(doc);
        return s;
    } catch (const json::exception& e) {
        throw ModelError(std::string("bad network document: ") + e.what());
    }
}

BayesianNetwork network_from_json(const json& doc) {
    Structure s = structure_from_json(doc);
    std::vector<Cpt> cpts;
    try {
        for (const auto& c : require(doc, "cpts", "network")) {
            Cpt cpt;
            cpt.child = require(c, "child", "cpt").get<std::string>();
            cpt.parents = c.value("parents", std::vector<std::string>{});
            cpt.rows = require(c, "rows", "cpt " + cpt.child).get<std::vector<std::vector<double>>>();
            for (auto& row : cpt.rows) {
                double sum = 0.0;
                for (double p : row) sum += p;
                const double drift = std::abs(sum - 1.0);
                if (sum > 0.0 && drift <= kRowSumTolerance && drift > kSerializationSlack) {
                    for (double& p : row) p /= sum;
                }
            }
            cpts.push_back(std::move(cpt));
        }
    } catch (const json::exception& e) {
        throw ModelError(std::string("bad network document: ") + e.what());
    }
    BayesianNetwork net(std::move(s.variables), std::move(s.dag), std::move(cpts),
                        std::move(s.metadata));
    require_valid(net);
    return net;
}

BayesianNetwork parse_network(std::string_view text) { return network_from_json(parse_json(text)); }

BayesianNetwork load_network(const std::filesystem::path& path) {
    try {
        return parse_network(read_text_file(path));
    } catch (const ModelError& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
}

json structure_to_json(const Structure& s) {
    json doc;
    metadata_to_json(s.metadata, doc);
    doc["nodes"] = nodes_to_json(s.variables);
    doc["edges"] = edges_to_json(s.dag);
    return doc;
}

json network_to_json(const BayesianNetwork& net) {
    json doc = structure_to_json(structure_of(net));
    json cpts = json::array();
    for (const auto& c : net.cpts()) {
        json rows = json::array();
        for (const auto& row : c.rows) {
            json r = json::array();
            for (double p : row) r.push_back(canonical_double(p));
            rows.push_back(std::move(r));
        }
        cpts.push_back({{"child", c.child}, {"parents", c.parents}, {"rows", std::move(rows)}});
    }
    doc["cpts"] = std::move(cpts);
    return doc;
}

std::string serialize_network(const BayesianNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

void save_network(const BayesianNetwork& net, const std::filesystem::path& path) {
    write_text_file(path, serialize_network(net));
}

Structure parse_structure(std::string_view text) { return structure_from_json(parse_json(text)); }

Structure load_structure(const std::filesystem::path& path) {
    try {
        return parse_structure(read_text_file(path));
    } catch (const ModelError& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
}

Structure structure_of(const BayesianNetwork& net) {
    return Structure{net.variables(), net.dag(), net.metadata()};
}

std::string serialize_structure(const Structure& s) { return structure_to_json(s).dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace bnkit
