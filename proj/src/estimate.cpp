#include "bnkit/estimate.hpp"

#include <cmath>

#include "bnkit/error.hpp"
#include "bnkit/rng.hpp"

namespace bnkit {

namespace {

std::string describe_configuration(const Dataset& ds, std::span<const std::string> parents,
                                   std::size_t config) {
    std::vector<std::size_t> states(parents.size());
    for (std::size_t i = parents.size(); i-- > 0;) {
        const auto& var = ds.variables()[ds.require_index(parents[i])];
        states[i] = config % var.cardinality();
        config /= var.cardinality();
    }
    std::string out;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        const auto& var = ds.variables()[ds.require_index(parents[i])];
        if (i) out += ", ";
        out += var.id + "=" + var.states[states[i]];
    }
    return out;
}

}  // namespace

Cpt estimate_root_cpt(const Dataset& ds, std::string_view var) {
    const CountTable counts = state_counts(ds, var);
    if (counts.n_valid == 0) throw DataError("no valid observations for '" + std::string(var) + "'");
    std::vector<double> row(counts.counts.size());
    const double n = static_cast<double>(counts.n_valid);
    for (std::size_t x = 0; x < row.size(); ++x) row[x] = static_cast<double>(counts.counts[x]) / n;
    return Cpt{std::string(var), {}, {std::move(row)}};
}

Cpt estimate_child_cpt(const Dataset& ds, std::string_view child,
                       std::span<const std::string> parents, const EstimationConfig& cfg) {
    if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
        throw DataError("alpha must be a finite non-negative number");
    }
    const CountTable joint = joint_counts(ds, child, parents);
    const std::size_t k = joint.cardinalities.back();
    const std::size_t configs = joint.counts.size() / k;
    const double alpha = cfg.alpha;
    const double alpha_k = alpha * static_cast<double>(k);

    Cpt cpt{std::string(child), {parents.begin(), parents.end()}, {}};
    cpt.rows.reserve(configs);
    for (std::size_t p = 0; p < configs; ++p) {
        std::uint64_t parent_total = 0;
        for (std::size_t x = 0; x < k; ++x) parent_total += joint.counts[p * k + x];
        if (parent_total == 0 && alpha == 0.0) {
            throw DataError("unobserved parent configuration (" +
                            describe_configuration(ds, parents, p) + ") with alpha = 0");
        }
        const double denom = static_cast<double>(parent_total) + alpha_k;
        std::vector<double> row(k);
        for (std::size_t x = 0; x < k; ++x) {
            row[x] = (static_cast<double>(joint.counts[p * k + x]) + alpha) / denom;
        }
        cpt.rows.push_back(std::move(row));
    }
    return cpt;
}

BayesianNetwork fit_network(const Dag& dag, const Dataset& ds, const EstimationConfig& cfg,
                            NetworkMetadata metadata) {
    std::vector<Variable> variables;
    std::vector<Cpt> cpts;
    for (const auto& node : dag.nodes()) {
        auto idx = ds.index_of(node);
        if (!idx) throw DataError("graph node '" + node + "' is not a dataset column");
        variables.push_back(ds.variables()[*idx]);
    }
    for (const auto& node : dag.nodes()) {
        const auto parents = dag.parents(node);
        try {
            cpts.push_back(parents.empty() ? estimate_root_cpt(ds, node)
                                           : estimate_child_cpt(ds, node, parents, cfg));
        } catch (const DataError& e) {
            throw DataError("node '" + node + "': " + e.what());
        }
    }
    BayesianNetwork net(std::move(variables), dag, std::move(cpts), std::move(metadata));
    require_valid(net);
    return net;
}

Dataset forward_sample(const BayesianNetwork& net, std::size_t n, std::uint64_t seed) {
    require_valid(net);
    std::vector<std::size_t> order;
    for (const auto& id : topological_order(net.dag())) order.push_back(*net.index_of(id));

    const std::size_t width = net.size();
    std::vector<std::int32_t> cells(n * width, kMissing);
    Rng rng(seed);
    for (std::size_t r = 0; r < n; ++r) {
        std::int32_t* rec = cells.data() + r * width;
        for (auto v : order) {
            std::size_t config = 0;
            for (auto p : net.parent_indices(v)) {
                config = config * net.variable(p).cardinality() + static_cast<std::size_t>(rec[p]);
            }
            const auto& row = net.cpt_for(v)->rows[config];
            rec[v] = static_cast<std::int32_t>(rng.categorical(row));
        }
    }
    return Dataset(net.variables(), std::move(cells));
}

}  // namespace bnkit
