#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bnkit/estimate.hpp"
#include "bnkit/synth.hpp"

namespace bnkit::testing {

std::vector<std::string> node_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
    return ids;
}

Dag random_dag(Rng& rng, const std::vector<std::string>& ids, double edge_probability,
               std::size_t max_parents) {
    std::vector<std::size_t> perm(ids.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    Dag dag(ids);
    for (std::size_t j = 0; j < perm.size(); ++j) {
        std::size_t parents = 0;
        for (std::size_t i = 0; i < j && parents < max_parents; ++i) {
            if (rng.uniform() < edge_probability) {
                dag.add_edge(ids[perm[i]], ids[perm[j]]);
                ++parents;
            }
        }
    }
    return dag;
}

BayesianNetwork random_network(Rng& rng, const RandomNetworkSpec& spec) {
    const std::size_t n = spec.min_nodes + rng.below(spec.max_nodes - spec.min_nodes + 1);
    const auto ids = node_ids(n);
    std::vector<Variable> vars;
    for (const auto& id : ids) {
        const std::size_t k = spec.min_states + rng.below(spec.max_states - spec.min_states + 1);
        Variable v{id, "label " + id, {}, std::nullopt};
        for (std::size_t s = 0; s < k; ++s) v.states.push_back("s" + std::to_string(s));
        vars.push_back(std::move(v));
    }
    Dag dag = random_dag(rng, ids, spec.edge_probability, spec.max_parents);

    std::vector<Cpt> cpts;
    for (std::size_t i = 0; i < n; ++i) {
        Cpt cpt{ids[i], dag.parents(ids[i]), {}};
        std::size_t rows = 1;
        for (const auto& p : cpt.parents) {
            rows *= vars[static_cast<std::size_t>(std::stoi(p.substr(1)))].cardinality();
        }
        const std::size_t k = vars[i].cardinality();
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> counts(k);
            double total = 0.0;
            for (auto& c : counts) total += c = static_cast<double>(rng.below(spec.max_count + 1));
            if (spec.alpha == 0.0 && total == 0.0) {
                counts[rng.below(k)] = 1.0;
                total = 1.0;
            }
            std::vector<double> row(k);
            for (std::size_t x = 0; x < k; ++x) {
                row[x] = (counts[x] + spec.alpha) / (total + spec.alpha * static_cast<double>(k));
            }
            cpt.rows.push_back(std::move(row));
        }
        cpts.push_back(std::move(cpt));
    }
    BayesianNetwork net(std::move(vars), std::move(dag), std::move(cpts));
    require_valid(net);
    return net;
}

EvidenceQuery random_evidence(Rng& rng, const BayesianNetwork& net) {
    const Dataset one = forward_sample(net, 1, rng.next());
    EvidenceQuery ev;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (rng.uniform() < 0.4) ev.assignments[net.variable(i).id] = *one.value(0, i);
    }
    return ev;
}

EvidenceQuery arbitrary_evidence(Rng& rng, const BayesianNetwork& net) {
    EvidenceQuery ev;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (rng.uniform() < 0.4) ev.assignments[net.variable(i).id] = rng.below(net.variable(i).cardinality());
    }
    return ev;
}

namespace {

std::vector<Variable> ordinal_vars(const std::vector<std::string>& ids, std::size_t states) {
    std::vector<Variable> vars;
    for (const auto& id : ids) {
        Variable v{id, id, {}, std::nullopt};
        for (std::size_t s = 0; s < states; ++s) v.states.push_back("s" + std::to_string(s));
        vars.push_back(std::move(v));
    }
    return vars;
}

}  // namespace

BayesianNetwork chain_network(std::size_t states) {
    Dag dag({"A", "B", "C"});
    dag.add_edge("A", "B");
    dag.add_edge("B", "C");
    return ordinal_network(ordinal_vars({"A", "B", "C"}, states), std::move(dag), 2.0);
}

BayesianNetwork collider_network(std::size_t states) {
    Dag dag({"A", "B", "C"});
    dag.add_edge("A", "C");
    dag.add_edge("B", "C");
    return ordinal_network(ordinal_vars({"A", "B", "C"}, states), std::move(dag), 2.0);
}

BayesianNetwork independent_network(std::size_t nodes, std::size_t states) {
    const auto ids = node_ids(nodes);
    return ordinal_network(ordinal_vars(ids, states), Dag(ids), 2.0);
}

BayesianNetwork devex_generator(double strength) {
    const std::vector<std::string> ids = {"code_understanding",     "environment_performance",
                                          "focus_without_distraction", "meaningful_work",
                                          "time_lost_to_obstacles", "developer_happiness"};
    Dag dag(ids);
    dag.add_edge("focus_without_distraction", "time_lost_to_obstacles");
    dag.add_edge("environment_performance", "time_lost_to_obstacles");
    dag.add_edge("code_understanding", "time_lost_to_obstacles");
    dag.add_edge("time_lost_to_obstacles", "developer_happiness");
    dag.add_edge("meaningful_work", "developer_happiness");
    return ordinal_network(ordinal_vars(ids, 3), std::move(dag), strength);
}

Dataset random_dataset(Rng& rng, const std::vector<Variable>& vars, std::size_t rows, double missing_rate) {
    std::vector<std::int32_t> cells;
    cells.reserve(rows * vars.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (const auto& v : vars) {
            if (rng.uniform() < missing_rate) {
                cells.push_back(kMissing);
            } else {
                cells.push_back(static_cast<std::int32_t>(rng.below(v.cardinality())));
            }
        }
    }
    return Dataset(vars, std::move(cells));
}

double max_abs_diff(const MarginalsResult& a, const MarginalsResult& b) {
    if (a.marginals.size() != b.marginals.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& [id, pa] : a.marginals) {
        auto it = b.marginals.find(id);
        if (it == b.marginals.end() || it->second.size() != pa.size()) {
            return std::numeric_limits<double>::infinity();
        }
        for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - it->second[i]));
    }
    return worst;
}

std::string repo_path(const std::string& relative) { return std::string(BNKIT_SOURCE_DIR) + "/" + relative; }

}  // namespace bnkit::testing
