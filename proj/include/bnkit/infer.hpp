#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bnkit/network.hpp"

namespace bnkit {

/// States fixed by the user: variable id -> state index.
struct EvidenceQuery {
    std::map<std::string, std::size_t> assignments;
    bool operator==(const EvidenceQuery&) const = default;
};

/// Posterior distribution of every node, keyed by id.
struct MarginalsResult {
    std::map<std::string, std::vector<double>> marginals;
    EvidenceQuery evidence;
};

/// Throws EvidenceError naming the offending node if an id is unknown or a
/// state index is out of range.
void validate_evidence(const BayesianNetwork& net, const EvidenceQuery& ev);

/// Exact P(node | evidence) for every node by variable elimination with a
/// min-degree ordering (ties to the lowest variable index). Throws
/// ImpossibleEvidence when P(evidence) = 0.
MarginalsResult posterior_marginals(const BayesianNetwork& net, const EvidenceQuery& ev);

/// Same computation with a caller-supplied elimination order: a permutation
/// of all variable indices. Evidence and query variables are skipped where
/// they occur.
MarginalsResult posterior_marginals(const BayesianNetwork& net, const EvidenceQuery& ev,
                                    std::span<const std::size_t> elimination_order);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Reference implementation: enumerates the full joint. Throws LimitError
/// when the joint state space exceeds `max_states`.
MarginalsResult brute_force_marginals(const BayesianNetwork& net, const EvidenceQuery& ev,
                                      std::uint64_t max_states = kBruteForceLimit);

/// Chain-rule product of CPT entries for a complete assignment.
double joint_probability(const BayesianNetwork& net,
                         const std::map<std::string, std::size_t>& assignment);

}  // namespace bnkit
