#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bnkit/elicit.hpp"
#include "bnkit/error.hpp"
#include "bnkit/estimate.hpp"
#include "bnkit/infer.hpp"
#include "bnkit/learn.hpp"
#include "bnkit/network_io.hpp"
#include "bnkit/service.hpp"

namespace py = pybind11;
using namespace bnkit;

namespace {

using EdgePair = std::pair<std::string, std::string>;

py::object to_python(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

std::set<Edge> edge_set(const std::vector<EdgePair>& pairs) {
    std::set<Edge> out;
    for (const auto& [a, b] : pairs) out.insert({a, b});
    return out;
}

std::vector<EdgePair> edge_pairs(const Dag& dag) {
    std::vector<EdgePair> out;
    for (const auto& e : dag.edge_list()) out.emplace_back(e.from, e.to);
    return out;
}

StructureConstraints constraints(const std::vector<EdgePair>& required, const std::vector<EdgePair>& forbidden) {
    return {edge_set(required), edge_set(forbidden)};
}

py::dict marginals_dict(const MarginalsResult& r) {
    py::dict out;
    for (const auto& [id, dist] : r.marginals) out[py::str(id)] = dist;
    return out;
}

Rating rating_from(const std::string& text) {
    auto r = parse_rating(text);
    if (!r) throw DataError("unknown rating '" + text + "'");
    return *r;
}

ElicitationConfig elicitation_config(double threshold, bool exclude_not_sure) {
    ElicitationConfig cfg;
    cfg.threshold = threshold;
    cfg.exclude_not_sure = exclude_not_sure;
    cfg.validate();
    return cfg;
}

std::vector<ElicitationResponse> responses_from(const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
    std::vector<ElicitationResponse> out;
    for (const auto& [cause, effect, rating] : rows) out.push_back({{cause, effect}, rating_from(rating)});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete Bayesian networks for survey data";

    auto base = py::register_exception<Error>(m, "BnkitError", PyExc_RuntimeError);
    auto model = py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<CycleError>(m, "CycleError", model.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<EvidenceError>(m, "EvidenceError", base.ptr());
    py::register_exception<ImpossibleEvidence>(m, "ImpossibleEvidence", base.ptr());
    py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<LimitError>(m, "LimitError", base.ptr());
    py::register_exception<NetworkError>(m, "NetworkError", base.ptr());

    py::class_<Variable>(m, "Variable")
        .def(py::init([](std::string id, std::vector<std::string> states, std::string label) {
                 return Variable{id, label.empty() ? id : label, std::move(states), std::nullopt};
             }),
             py::arg("id"), py::arg("states"), py::arg("label") = "")
        .def_readonly("id", &Variable::id)
        .def_readonly("label", &Variable::label)
        .def_readonly("states", &Variable::states)
        .def("__repr__", [](const Variable& v) { return "<Variable " + v.id + ">"; });

    py::class_<Dag>(m, "Dag")
        .def(py::init<std::vector<std::string>>(), py::arg("nodes"))
        .def("add_edge", [](Dag& d, const std::string& a, const std::string& b) { d.add_edge(a, b); })
        .def("has_edge", [](const Dag& d, const std::string& a, const std::string& b) { return d.has_edge({a, b}); })
        .def("parents", &Dag::parents)
        .def_property_readonly("nodes", &Dag::nodes)
        .def_property_readonly("edges", &edge_pairs)
        .def("__eq__", [](const Dag& a, const Dag& b) { return a == b; });

    py::class_<BayesianNetwork>(m, "Network")
        .def_property_readonly("id", [](const BayesianNetwork& n) { return n.metadata().id; })
        .def_property_readonly("name", [](const BayesianNetwork& n) { return n.metadata().name; })
        .def_property_readonly("variables", &BayesianNetwork::variables)
        .def_property_readonly("dag", &BayesianNetwork::dag)
        .def("cpt", [](const BayesianNetwork& n, const std::string& id) {
            const auto idx = n.index_of(id);
            if (!idx) throw ModelError("unknown node '" + id + "'");
            const Cpt* c = n.cpt_for(*idx);
            return std::make_pair(c->parents, c->rows);
        }, py::arg("node"))
        .def("__len__", &BayesianNetwork::size)
        .def("to_json", &serialize_network);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("variables", &Dataset::variables)
        .def_property_readonly("n_total", &Dataset::n_total)
        .def("rows", [](const Dataset& ds) {
            std::vector<std::vector<std::optional<std::size_t>>> out(ds.n_total());
            for (std::size_t r = 0; r < ds.n_total(); ++r) {
                for (std::size_t c = 0; c < ds.n_vars(); ++c) out[r].push_back(ds.value(r, c));
            }
            return out;
        })
        .def("to_csv", &write_survey_csv)
        .def("__len__", &Dataset::n_total);

    // bn-core
    m.def("load_network", [](const std::filesystem::path& p) { return load_network(p); }, py::arg("path"));
    m.def("parse_network", [](const std::string& text) { return parse_network(text); }, py::arg("text"));
    m.def("save_network", [](const BayesianNetwork& n, const std::filesystem::path& p) { save_network(n, p); },
          py::arg("network"), py::arg("path"));
    m.def("validate", [](const BayesianNetwork& n) {
        std::vector<std::string> out;
        for (const auto& v : validate_network(n).violations) {
            out.push_back(std::string(to_string(v.kind)) + " [" + v.subject + "]: " + v.message);
        }
        return out;
    }, py::arg("network"), "Violations as text; empty when the network is valid.");
    m.def("topological_order", &topological_order, py::arg("dag"));
    m.def("parameter_count", &parameter_count, py::arg("network"));
    m.def("load_structure", [](const std::filesystem::path& p) {
        auto s = load_structure(p);
        return std::make_pair(std::move(s.variables), std::move(s.dag));
    }, py::arg("path"), "Returns (variables, dag).");

    // ingest
    m.def("read_survey_csv", [](const std::string& text, const std::vector<Variable>& schema) {
        return parse_survey_csv(text, schema);
    }, py::arg("text"), py::arg("variables"));
    m.def("state_counts", [](const Dataset& ds, const std::string& var) {
        const auto t = state_counts(ds, var);
        return std::make_pair(t.counts, t.n_valid);
    }, py::arg("dataset"), py::arg("variable"), "Returns (counts, n_valid).");

    // estimate
    m.def("fit_network", [](const Dag& dag, const Dataset& ds, double alpha, const std::string& id,
                            const std::string& name) {
        py::gil_scoped_release release;
        return fit_network(dag, ds, EstimationConfig{alpha, 0}, NetworkMetadata{id, name, "", ""});
    }, py::arg("dag"), py::arg("dataset"), py::arg("alpha") = 1.0, py::arg("id") = "", py::arg("name") = "");
    m.def("forward_sample", [](const BayesianNetwork& n, std::size_t count, std::uint64_t seed) {
        py::gil_scoped_release release;
        return forward_sample(n, count, seed);
    }, py::arg("network"), py::arg("n"), py::arg("seed") = 0);

    // infer
    m.def("posterior_marginals", [](const BayesianNetwork& n, const std::map<std::string, std::size_t>& evidence) {
        MarginalsResult r;
        {
            py::gil_scoped_release release;
            r = posterior_marginals(n, EvidenceQuery{evidence});
        }
        return marginals_dict(r);
    }, py::arg("network"), py::arg("evidence") = std::map<std::string, std::size_t>{});
    m.def("brute_force_marginals", [](const BayesianNetwork& n, const std::map<std::string, std::size_t>& evidence) {
        return marginals_dict(brute_force_marginals(n, EvidenceQuery{evidence}));
    }, py::arg("network"), py::arg("evidence") = std::map<std::string, std::size_t>{});
    m.def("joint_probability", &joint_probability, py::arg("network"), py::arg("assignment"));

    // learn
    m.def("bic_score", [](const Dag& dag, const Dataset& ds) { return to_python(report_to_json(bic_score(dag, ds))); },
          py::arg("dag"), py::arg("dataset"));
    m.def("hill_climb", [](const Dataset& ds, const std::vector<EdgePair>& required,
                           const std::vector<EdgePair>& forbidden, std::size_t max_parents, std::size_t tabu_length,
                           std::size_t restarts, std::uint64_t seed) {
        const auto c = constraints(required, forbidden);
        py::gil_scoped_release release;
        return hill_climb(ds, c, HillClimbConfig{max_parents, tabu_length, restarts, seed});
    }, py::arg("dataset"), py::arg("required") = std::vector<EdgePair>{},
          py::arg("forbidden") = std::vector<EdgePair>{}, py::arg("max_parents") = 4, py::arg("tabu_length") = 10,
          py::arg("restarts") = 0, py::arg("seed") = 0);
    m.def("pc_algorithm", [](const Dataset& ds, double significance, const std::vector<EdgePair>& required,
                             const std::vector<EdgePair>& forbidden) {
        const auto c = constraints(required, forbidden);
        py::gil_scoped_release release;
        return pc_algorithm(ds, significance, c);
    }, py::arg("dataset"), py::arg("significance") = 0.05, py::arg("required") = std::vector<EdgePair>{},
          py::arg("forbidden") = std::vector<EdgePair>{});
    m.def("bootstrap_edges", [](const Dataset& ds, const std::string& method, std::size_t replicates,
                                std::uint64_t seed, std::size_t threads, double significance) {
        Learner learner;
        if (method == "hc") {
            learner = [](const Dataset& d) { return hill_climb(d, {}, {}); };
        } else if (method == "pc") {
            learner = [significance](const Dataset& d) { return pc_algorithm(d, significance, {}); };
        } else {
            throw Error("method must be 'hc' or 'pc'");
        }
        std::vector<std::string> nodes;
        for (const auto& v : ds.variables()) nodes.push_back(v.id);
        EdgeConfidence conf;
        {
            py::gil_scoped_release release;
            conf = bootstrap_edges(ds, learner, replicates, seed, threads);
        }
        return to_python(confidence_to_json(conf, nodes));
    }, py::arg("dataset"), py::arg("method") = "hc", py::arg("replicates") = 100, py::arg("seed") = 0,
          py::arg("threads") = 1, py::arg("significance") = 0.05);
    m.def("markov_equivalent", &markov_equivalent, py::arg("a"), py::arg("b"));

    // elicit
    m.def("score_relationship", [](const std::vector<std::string>& ratings, bool exclude_not_sure) {
        std::vector<ElicitationResponse> rs;
        for (const auto& r : ratings) rs.push_back({{"cause", "effect"}, rating_from(r)});
        return score_relationship(rs, elicitation_config(0.70, exclude_not_sure));
    }, py::arg("ratings"), py::arg("exclude_not_sure") = false);
    m.def("refine_structure", [](const Dag& base, const std::vector<std::tuple<std::string, std::string, std::string>>& rows,
                                 double threshold, bool exclude_not_sure, const std::vector<EdgePair>& additions) {
        const auto cfg = elicitation_config(threshold, exclude_not_sure);
        const auto scores = score_all(responses_from(rows), cfg);
        const auto t = apply_threshold(scores, cfg);
        std::set<Edge> removed;
        for (const auto& e : t.removed) {
            if (base.has_edge(e)) removed.insert(e);
        }
        py::dict by_edge;
        for (const auto& [e, s] : scores) by_edge[py::make_tuple(e.from, e.to)] = s;
        return py::make_tuple(merge_structures(base, t.retained, removed, edge_set(additions)), by_edge);
    }, py::arg("base"), py::arg("responses"), py::arg("threshold") = 0.70, py::arg("exclude_not_sure") = false,
          py::arg("additions") = std::vector<EdgePair>{},
          "Responses are (cause, effect, rating) rows. Returns (dag, scores).");

    // service
    py::class_<ModelRegistry>(m, "ModelRegistry")
        .def(py::init<>())
        .def_static("load_directory", [](const std::filesystem::path& p) { return ModelRegistry::load_directory(p); })
        .def("add", &ModelRegistry::add, py::arg("id"), py::arg("network"))
        .def("ids", [](const ModelRegistry& r) {
            std::vector<std::string> ids;
            for (const auto& s : r.list()) ids.push_back(s.id);
            return ids;
        })
        .def("__len__", &ModelRegistry::size)
        .def("list", [](const ModelRegistry& r) {
            const auto res = handle_list(r);
            return py::make_tuple(res.status, res.body);
        })
        .def("get", [](const ModelRegistry& r, const std::string& id) {
            const auto res = handle_get(r, id);
            return py::make_tuple(res.status, res.body);
        }, py::arg("id"))
        .def("infer", [](const ModelRegistry& r, const std::string& id, const std::string& body) {
            const auto res = handle_infer(r, id, body);
            return py::make_tuple(res.status, res.body);
        }, py::arg("id"), py::arg("body") = "", "Same (status, body) as the HTTP endpoint.");
}
