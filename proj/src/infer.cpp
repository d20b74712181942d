#include "bnkit/infer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "bnkit/error.hpp"
#include "factor.hpp"

namespace bnkit {

using detail::Factor;

void validate_evidence(const BayesianNetwork& net, const EvidenceQuery& ev) {
    for (const auto& [id, state] : ev.assignments) {
        auto idx = net.index_of(id);
        if (!idx) throw EvidenceError("evidence names unknown node '" + id + "'", id);
        const auto k = net.variable(*idx).cardinality();
        if (state >= k) {
            throw EvidenceError("evidence state " + std::to_string(state) + " for node '" + id +
                                    "' is out of range [0, " + std::to_string(k - 1) + "]",
                                id);
        }
    }
}

namespace {

void require_cpts(const BayesianNetwork& net) {
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (!net.cpt_for(i)) throw ModelError("node '" + net.variable(i).id + "' has no CPT");
    }
}

std::vector<Factor> evidence_factors(const BayesianNetwork& net,
                                     const std::vector<std::optional<std::size_t>>& observed) {
    std::vector<Factor> factors;
    factors.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        Factor f = detail::factor_from_cpt(net, i);
        for (std::size_t v = 0; v < observed.size(); ++v) {
            if (observed[v] && f.contains(v)) f = detail::reduce(f, v, *observed[v]);
        }
        factors.push_back(std::move(f));
    }
    return factors;
}

// Greedy min-degree over the interaction graph of `factors`, restricted to
// the variables flagged in `eliminate`.
std::vector<std::size_t> min_degree_order(const std::vector<Factor>& factors,
                                          const std::vector<bool>& eliminate) {
    const std::size_t n = eliminate.size();
    std::vector<std::set<std::size_t>> adj(n);
    for (const auto& f : factors) {
        for (auto a : f.vars) {
            for (auto b : f.vars) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    std::vector<bool> pending = eliminate;
    std::vector<std::size_t> order;
    for (;;) {
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (pending[v] && (best == n || adj[v].size() < adj[best].size())) best = v;
        }
        if (best == n) break;
        pending[best] = false;
        order.push_back(best);
        const std::vector<std::size_t> nbrs(adj[best].begin(), adj[best].end());
        for (auto a : nbrs) {
            adj[a].erase(best);
            for (auto b : nbrs) {
                if (a != b) adj[a].insert(b);
            }
        }
        adj[best].clear();
    }
    return order;
}

Factor eliminate(std::vector<Factor> factors, std::span<const std::size_t> order) {
    for (auto var : order) {
        Factor product{{}, {}, {1.0}};
        std::vector<Factor> rest;
        bool touched = false;
        for (auto& f : factors) {
            if (f.contains(var)) {
                product = detail::multiply(product, f);
                touched = true;
            } else {
                rest.push_back(std::move(f));
            }
        }
        if (touched) rest.push_back(detail::sum_out(product, var));
        factors = std::move(rest);
    }
    Factor result{{}, {}, {1.0}};
    for (const auto& f : factors) result = detail::multiply(result, f);
    return result;
}

MarginalsResult run_elimination(const BayesianNetwork& net, const EvidenceQuery& ev,
                                std::span<const std::size_t> fixed_order) {
    require_cpts(net);
    validate_evidence(net, ev);
    const std::size_t n = net.size();
    std::vector<std::optional<std::size_t>> observed(n);
    for (const auto& [id, state] : ev.assignments) observed[*net.index_of(id)] = state;

    const std::vector<Factor> factors = evidence_factors(net, observed);

    auto order_for = [&](const std::vector<bool>& mask) {
        if (fixed_order.empty()) return min_degree_order(factors, mask);
        std::vector<std::size_t> order;
        for (auto v : fixed_order) {
            if (v < n && mask[v]) order.push_back(v);
        }
        return order;
    };

    std::vector<bool> hidden(n);
    for (std::size_t v = 0; v < n; ++v) hidden[v] = !observed[v];

    const double evidence_mass = eliminate(factors, order_for(hidden)).values.at(0);
    if (!(evidence_mass > 0.0)) {
        throw ImpossibleEvidence("evidence has probability zero under the model");
    }

    MarginalsResult result;
    result.evidence = ev;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& var = net.variable(t);
        std::vector<double> dist(var.cardinality(), 0.0);
        if (observed[t]) {
            dist[*observed[t]] = 1.0;
        } else {
            std::vector<bool> mask = hidden;
            mask[t] = false;
            const Factor f = eliminate(factors, order_for(mask));
            const double z = std::accumulate(f.values.begin(), f.values.end(), 0.0);
            if (!(z > 0.0)) throw ImpossibleEvidence("evidence has probability zero under the model");
            for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = f.values[s] / z;
        }
        result.marginals.emplace(var.id, std::move(dist));
    }
    return result;
}

}  // namespace

MarginalsResult posterior_marginals(const BayesianNetwork& net, const EvidenceQuery& ev) {
    return run_elimination(net, ev, {});
}

MarginalsResult posterior_marginals(const BayesianNetwork& net, const EvidenceQuery& ev,
                                    std::span<const std::size_t> elimination_order) {
    std::vector<std::size_t> sorted(elimination_order.begin(), elimination_order.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(net.size());
    std::iota(expected.begin(), expected.end(), 0);
    if (sorted != expected) throw ModelError("elimination order must be a permutation of all nodes");
    if (elimination_order.empty()) return run_elimination(net, ev, {});
    return run_elimination(net, ev, elimination_order);
}

MarginalsResult brute_force_marginals(const BayesianNetwork& net, const EvidenceQuery& ev,
                                      std::uint64_t max_states) {
    require_cpts(net);
    validate_evidence(net, ev);
    const std::size_t n = net.size();
    std::uint64_t space = 1;
    for (const auto& v : net.variables()) {
        if (space > max_states / v.cardinality()) {
            throw LimitError("joint state space exceeds " + std::to_string(max_states) +
                             " configurations");
        }
        space *= v.cardinality();
    }

    std::vector<std::optional<std::size_t>> observed(n);
    for (const auto& [id, state] : ev.assignments) observed[*net.index_of(id)] = state;

    std::vector<std::vector<double>> acc(n);
    for (std::size_t v = 0; v < n; ++v) acc[v].assign(net.variable(v).cardinality(), 0.0);

    std::vector<std::size_t> assignment(n, 0);
    double total = 0.0;
    for (std::uint64_t idx = 0; idx < space; ++idx) {
        bool consistent = true;
        for (std::size_t v = 0; v < n && consistent; ++v) {
            if (observed[v] && assignment[v] != *observed[v]) consistent = false;
        }
        if (consistent) {
            double p = 1.0;
            for (std::size_t v = 0; v < n; ++v) {
                std::size_t config = 0;
                for (auto parent : net.parent_indices(v)) {
                    config = config * net.variable(parent).cardinality() + assignment[parent];
                }
                p *= net.cpt_for(v)->rows[config][assignment[v]];
            }
            total += p;
            for (std::size_t v = 0; v < n; ++v) acc[v][assignment[v]] += p;
        }
        for (std::size_t v = n; v-- > 0;) {
            if (++assignment[v] < net.variable(v).cardinality()) break;
            assignment[v] = 0;
        }
    }
    if (!(total > 0.0)) throw ImpossibleEvidence("evidence has probability zero under the model");

    MarginalsResult result;
    result.evidence = ev;
    for (std::size_t v = 0; v < n; ++v) {
        for (double& p : acc[v]) p /= total;
        result.marginals.emplace(net.variable(v).id, std::move(acc[v]));
    }
    return result;
}

double joint_probability(const BayesianNetwork& net,
                         const std::map<std::string, std::size_t>& assignment) {
    require_cpts(net);
    EvidenceQuery ev{assignment};
    validate_evidence(net, ev);
    std::vector<std::size_t> states(net.size());
    for (std::size_t v = 0; v < net.size(); ++v) {
        auto it = assignment.find(net.variable(v).id);
        if (it == assignment.end()) {
            throw EvidenceError("assignment is missing node '" + net.variable(v).id + "'",
                                net.variable(v).id);
        }
        states[v] = it->second;
    }
    double p = 1.0;
    for (std::size_t v = 0; v < net.size(); ++v) {
        std::size_t config = 0;
        for (auto parent : net.parent_indices(v)) {
            config = config * net.variable(parent).cardinality() + states[parent];
        }
        p *= net.cpt_for(v)->rows[config][states[v]];
    }
    return p;
}

}  // namespace bnkit
