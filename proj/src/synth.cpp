#include "bnkit/synth.hpp"

#include <cmath>

#include "bnkit/error.hpp"

namespace bnkit {

Cpt ordinal_cpt(const Variable& child, const std::vector<Variable>& parents, double strength,
                std::vector<double> weights) {
    const std::size_t k = child.cardinality();
    Cpt cpt{child.id, {}, {}};
    for (const auto& p : parents) cpt.parents.push_back(p.id);

    if (parents.empty()) {
        std::vector<double> row(k);
        double total = 0.0;
        for (std::size_t x = 0; x < k; ++x) total += row[x] = 2.0 + static_cast<double>(x);
        for (auto& v : row) v /= total;
        cpt.rows.push_back(std::move(row));
        return cpt;
    }

    if (weights.empty()) weights.assign(parents.size(), 1.0);
    if (weights.size() != parents.size()) throw ModelError("one weight per parent is required");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (!(wsum > 0.0)) throw ModelError("parent weights must have a positive sum");

    std::vector<std::size_t> cards;
    for (const auto& p : parents) cards.push_back(p.cardinality());
    const std::size_t rows = configuration_count(cards);
    std::vector<std::size_t> state(parents.size(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
        double t = 0.0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
            t += weights[i] / wsum * static_cast<double>(state[i]) / static_cast<double>(cards[i] - 1);
        }
        const double centre = t * static_cast<double>(k - 1);
        std::vector<double> row(k);
        double total = 0.0;
        for (std::size_t x = 0; x < k; ++x) {
            const double d = static_cast<double>(x) - centre;
            total += row[x] = std::exp(-strength * d * d);
        }
        for (auto& v : row) v /= total;
        cpt.rows.push_back(std::move(row));
        // last parent fastest
        for (std::size_t i = parents.size(); i-- > 0;) {
            if (++state[i] < cards[i]) break;
            state[i] = 0;
        }
    }
    return cpt;
}

BayesianNetwork ordinal_network(std::vector<Variable> variables, Dag dag, double strength,
                                NetworkMetadata metadata) {
    std::vector<Cpt> cpts;
    auto find = [&](const std::string& id) -> const Variable& {
        for (const auto& v : variables) {
            if (v.id == id) return v;
        }
        throw ModelError("unknown node '" + id + "'");
    };
    for (const auto& v : variables) {
        std::vector<Variable> parents;
        for (const auto& p : dag.parents(v.id)) parents.push_back(find(p));
        cpts.push_back(ordinal_cpt(v, parents, strength));
    }
    BayesianNetwork net(std::move(variables), std::move(dag), std::move(cpts), std::move(metadata));
    require_valid(net);
    return net;
}

}  // namespace bnkit
