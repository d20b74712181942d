#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/network.hpp"
#include "json.hpp"

namespace bnkit {

enum class Provenance { Expert, Hc, Pc, Manual };

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;

/// Whitelist / blacklist of directed edges for the learners.
struct StructureConstraints {
    std::set<Edge> required;
    std::set<Edge> forbidden;
};

/// Throws ConstraintError if required and forbidden overlap, if an edge
/// names a variable outside `nodes`, or if the required edges contain a
/// cycle.
void check_constraints(const StructureConstraints& c, const std::vector<std::string>& nodes);

struct ScoreReport {
    Dag candidate;
    Provenance provenance = Provenance::Manual;
    double bic = 0.0;  // -2 * log_likelihood + k * ln(n); lower is better
    double log_likelihood = 0.0;
    std::uint64_t parameter_count = 0;
    std::uint64_t n = 0;
    nlohmann::json config = nlohmann::json::object();
};

nlohmann::json report_to_json(const ScoreReport& r);

// ---------------------------------------------------------------------------
// Scores

/// Maximized log-likelihood under maximum-likelihood CPTs (0 ln 0 = 0),
/// evaluated on the records complete for every DAG node. Decomposes into a
/// sum of per-family terms.
double log_likelihood(const Dag& dag, const Dataset& ds);

/// Throws DataError when no record is complete for the DAG's nodes.
ScoreReport bic_score(const Dag& dag, const Dataset& ds, Provenance provenance = Provenance::Manual);

/// Sorted ascending by bic; ties by parameter count, then provenance order
/// expert, hc, pc, manual.
std::vector<ScoreReport> compare_structures(const std::vector<std::pair<Dag, Provenance>>& candidates,
                                            const Dataset& ds);

// ---------------------------------------------------------------------------
// Conditional independence

struct CiTestResult {
    double p_value = 1.0;
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    std::size_t strata_used = 0;
    /// False when every stratum fell below the minimum expected count; the
    /// caller then treats the pair as independent (p_value is 1).
    bool testable = false;
};

inline constexpr double kMinExpectedCount = 5.0;

/// Pearson chi-squared test of X independent of Y given Z on complete cases.
/// The statistic and degrees of freedom are summed over the observed
/// Z-strata; a stratum is used when its mean expected cell count
/// n_z / (Kx * Ky) is at least kMinExpectedCount. Degrees of freedom per
/// stratum are (rows - 1) * (cols - 1) over the non-empty rows and columns.
CiTestResult chi_square_ci_test(const Dataset& ds, std::string_view x, std::string_view y,
                                const std::vector<std::string>& z);

// ---------------------------------------------------------------------------
// PC

struct PcConfig {
    double significance = 0.05;
    /// Largest conditioning set tried; unbounded when empty.
    std::optional<std::size_t> max_conditioning;
};

/// One adjacency removal and the test that justified it.
struct CiRecord {
    std::string x;
    std::string y;
    std::vector<std::string> separating_set;
    CiTestResult test;
};

struct PcResult {
    Dag dag;
    std::vector<CiRecord> removals;
};

/// PC-stable skeleton search, v-structure orientation, Meek rules R1-R3, then
/// remaining undirected edges oriented from the lexically smaller id to the
/// larger (reversed if that would close a cycle).
PcResult pc_search(const Dataset& ds, const PcConfig& cfg, const StructureConstraints& constraints);
Dag pc_algorithm(const Dataset& ds, double significance, const StructureConstraints& constraints);

// ---------------------------------------------------------------------------
// Hill climbing

struct HillClimbConfig {
    std::size_t max_parents = 4;
    /// Number of recently visited structures that may not be revisited, and
    /// the number of consecutive non-improving moves allowed before stopping.
    std::size_t tabu_length = 10;
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
};

/// Greedy search over single-edge additions, deletions and reversals that
/// minimizes BIC, starting from the required edges.
Dag hill_climb(const Dataset& ds, const StructureConstraints& constraints,
               const HillClimbConfig& config);

/// Local-score cache over the complete cases of a dataset. Exposed so that
/// move deltas can be compared against full rescoring.
class FamilyScorer {
public:
    explicit FamilyScorer(const Dataset& ds);

    std::uint64_t n() const noexcept { return data_.n_total(); }
    const Dataset& data() const noexcept { return data_; }

    /// -2 * LL_family + k_family * ln(n) for child with the given parent
    /// column indices (order-insensitive).
    double local_bic(std::size_t child, std::vector<std::size_t> parents);
    double family_log_likelihood(std::size_t child, const std::vector<std::size_t>& parents) const;

private:
    Dataset data_;
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
};

// ---------------------------------------------------------------------------
// Bootstrap

struct EdgeConfidence {
    std::size_t replicates = 0;
    /// Per ordered pair: replicates containing the directed edge.
    std::map<Edge, std::size_t> directed_count;
    /// Per ordered pair: replicates containing the edge in either direction.
    std::map<Edge, std::size_t> adjacency_count;

    double directed(const Edge& e) const;
    double adjacency(const Edge& e) const;
};

nlohmann::json confidence_to_json(const EdgeConfidence& c, const std::vector<std::string>& nodes);

using Learner = std::function<Dag(const Dataset&)>;

/// Resamples n_total rows with replacement `replicates` times (replicate i is
/// seeded with seed + i) and runs the learner on each. Replicates run on up
/// to `threads` worker threads; results do not depend on the thread count.
EdgeConfidence bootstrap_edges(const Dataset& ds, const Learner& learner, std::size_t replicates,
                               std::uint64_t seed, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Structure comparison helpers

/// Same skeleton and same v-structures.
bool markov_equivalent(const Dag& a, const Dag& b);

}  // namespace bnkit
