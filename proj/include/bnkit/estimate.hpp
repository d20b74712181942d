#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "bnkit/dataset.hpp"
#include "bnkit/network.hpp"
#include "bnkit/network_io.hpp"

namespace bnkit {

struct EstimationConfig {
    /// Equivalent sample size added per (configuration, child state) cell.
    double alpha = 1.0;
    std::uint64_t seed = 0;
};

/// P(X = x) = count(x) / N over records where X is present.
Cpt estimate_root_cpt(const Dataset& ds, std::string_view var);

/// Smoothed conditional estimate, one row per parent configuration:
///
///     P(X = x | parents = p) = (count(x, p) + alpha) / (count(p) + alpha * K)
///
/// with K the child's cardinality and counts taken listwise over
/// (parents, child). alpha = 0 gives maximum likelihood and requires every
/// parent configuration to be observed.
Cpt estimate_child_cpt(const Dataset& ds, std::string_view child,
                       std::span<const std::string> parents, const EstimationConfig& cfg);

/// Fits one CPT per DAG node. Variables (labels, states, positions) come from
/// the dataset. Errors are re-thrown annotated with the node id.
BayesianNetwork fit_network(const Dag& dag, const Dataset& ds, const EstimationConfig& cfg,
                            NetworkMetadata metadata = {});

/// Ancestral sampling in topological order; complete records only.
Dataset forward_sample(const BayesianNetwork& net, std::size_t n, std::uint64_t seed);

}  // namespace bnkit
