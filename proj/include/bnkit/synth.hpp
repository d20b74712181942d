#pragma once

#include <string>
#include <vector>

#include "bnkit/network.hpp"

namespace bnkit {

/// Ordinal CPT for synthetic models. For each parent configuration the
/// child's centre is c = (K - 1) * sum_i w_i * s_i / (K_i - 1) and
/// P(x) is proportional to exp(-strength * (x - c)^2). Weights default to
/// equal and are normalized. Without parents the row is proportional to
/// (2 + x).
Cpt ordinal_cpt(const Variable& child, const std::vector<Variable>& parents, double strength,
                std::vector<double> weights = {});

/// Builds a network over `dag` with ordinal_cpt for every node, parents in
/// DAG edge order. Throws ModelError if the result is invalid.
BayesianNetwork ordinal_network(std::vector<Variable> variables, Dag dag, double strength,
                                NetworkMetadata metadata = {});

}  // namespace bnkit
