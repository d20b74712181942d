#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bnkit {

struct Position {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Position&) const = default;
};

/// A discrete variable (one survey question). States are ordered.
struct Variable {
    std::string id;
    std::string label;
    std::vector<std::string> states;
    std::optional<Position> position;  // layout hint only

    std::size_t cardinality() const noexcept { return states.size(); }
    std::optional<std::size_t> state_index(std::string_view state) const;

    bool operator==(const Variable&) const = default;
};

/// Ordered pair (parent, child).
struct Edge {
    std::string from;
    std::string to;

    auto operator<=>(const Edge&) const = default;
    bool operator==(const Edge&) const = default;
};

enum class EdgeTag { CauseConsequence, DefinitionSynthesis, Learned, ExpertAdded };

std::string_view to_string(EdgeTag tag) noexcept;
std::optional<EdgeTag> parse_edge_tag(std::string_view text) noexcept;

struct EdgeRecord {
    Edge edge;
    std::optional<EdgeTag> tag;
    bool operator==(const EdgeRecord&) const = default;
};

/// Directed graph over variable ids.
///
/// Dag is a plain container: it can hold cycles, self-loops, duplicate or
/// dangling edges so that loaded models can be diagnosed by
/// validate_network(). Node order and edge order are preserved as given;
/// `parents(child)` follows edge insertion order.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<std::string> nodes);

    void add_node(std::string id);
    void add_edge(std::string from, std::string to, std::optional<EdgeTag> tag = std::nullopt);
    /// Removes every copy of the edge; returns whether anything was removed.
    bool remove_edge(const Edge& edge);

    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }

    bool has_node(std::string_view id) const;
    bool has_edge(const Edge& edge) const;
    std::optional<EdgeTag> tag(const Edge& edge) const;
    std::vector<std::string> parents(std::string_view child) const;
    std::vector<std::string> children(std::string_view parent) const;

    /// Edge pairs only, sorted.
    std::vector<Edge> edge_list() const;

    bool operator==(const Dag&) const = default;

private:
    std::vector<std::string> nodes_;
    std::vector<EdgeRecord> edges_;
};

/// Conditional probability table.
///
/// Rows are indexed by parent configuration in mixed-radix order with the
/// LAST parent varying fastest; each row is a distribution over the child's
/// states.
struct Cpt {
    std::string child;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;

    bool operator==(const Cpt&) const = default;
};

struct NetworkMetadata {
    std::string id;  // optional registry id; file stem is used when empty
    std::string name;
    std::string description;
    std::string source;
    bool operator==(const NetworkMetadata&) const = default;
};

/// Immutable discrete Bayesian network. Construction never throws on
/// invariant violations; call validate_network() (or require_valid()) before
/// relying on them.
class BayesianNetwork {
public:
    BayesianNetwork(std::vector<Variable> variables, Dag dag, std::vector<Cpt> cpts,
                    NetworkMetadata metadata = {});

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Dag& dag() const noexcept { return dag_; }
    const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
    const NetworkMetadata& metadata() const noexcept { return metadata_; }

    std::size_t size() const noexcept { return variables_.size(); }
    std::optional<std::size_t> index_of(std::string_view id) const;
    const Variable& variable(std::size_t index) const { return variables_.at(index); }

    /// CPT for the variable at `index`, or nullptr when none was supplied.
    const Cpt* cpt_for(std::size_t index) const;
    /// Parent variable indices in CPT order (empty when the CPT is missing
    /// or names unknown parents).
    const std::vector<std::size_t>& parent_indices(std::size_t index) const {
        return parent_index_.at(index);
    }

    bool operator==(const BayesianNetwork& other) const {
        return variables_ == other.variables_ && dag_ == other.dag_ && cpts_ == other.cpts_ &&
               metadata_ == other.metadata_;
    }

private:
    std::vector<Variable> variables_;
    Dag dag_;
    std::vector<Cpt> cpts_;
    NetworkMetadata metadata_;

    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::optional<std::size_t>> cpt_index_;
    std::vector<std::vector<std::size_t>> parent_index_;
};

enum class ViolationKind {
    InvalidVariable,
    DuplicateNode,
    UnknownNode,
    SelfLoop,
    DuplicateEdge,
    DanglingEdge,
    Cycle,
    MissingCpt,
    DuplicateCpt,
    ParentMismatch,
    ShapeMismatch,
    EntryOutOfRange,
    RowNotNormalized,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::string subject;  // node id, "from->to", or cycle listing
    std::string message;
    std::vector<std::string> nodes;  // every node involved
    std::optional<double> row_sum;   // set for RowNotNormalized
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::string summary() const;
};

inline constexpr double kRowSumTolerance = 1e-9;

ValidationReport validate_network(const BayesianNetwork& net);

/// Throws ModelError carrying the report summary if the network is invalid.
void require_valid(const BayesianNetwork& net);

/// Returns one directed cycle (first node repeated at the end is omitted),
/// or nullopt if the graph restricted to declared nodes is acyclic.
std::optional<std::vector<std::string>> find_cycle(const Dag& dag);

/// Kahn's algorithm with lexical tie-breaking. Throws CycleError.
std::vector<std::string> topological_order(const Dag& dag);

/// Number of independent parameters: sum of (K_child - 1) * prod(K_parent).
std::uint64_t parameter_count(const BayesianNetwork& net);

/// Number of parent configurations for a list of cardinalities.
std::size_t configuration_count(const std::vector<std::size_t>& cardinalities);

}  // namespace bnkit
