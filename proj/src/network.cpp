#include "bnkit/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bnkit/error.hpp"

namespace bnkit {

std::optional<std::size_t> Variable::state_index(std::string_view state) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == state) return i;
    }
    return std::nullopt;
}

std::string_view to_string(EdgeTag tag) noexcept {
    switch (tag) {
        case EdgeTag::CauseConsequence: return "cause-consequence";
        case EdgeTag::DefinitionSynthesis: return "definition-synthesis";
        case EdgeTag::Learned: return "learned";
        case EdgeTag::ExpertAdded: return "expert-added";
    }
    return "unknown";
}

std::optional<EdgeTag> parse_edge_tag(std::string_view text) noexcept {
    for (auto tag : {EdgeTag::CauseConsequence, EdgeTag::DefinitionSynthesis, EdgeTag::Learned,
                     EdgeTag::ExpertAdded}) {
        if (to_string(tag) == text) return tag;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {}

void Dag::add_node(std::string id) { nodes_.push_back(std::move(id)); }

void Dag::add_edge(std::string from, std::string to, std::optional<EdgeTag> tag) {
    edges_.push_back(EdgeRecord{Edge{std::move(from), std::move(to)}, tag});
}

bool Dag::remove_edge(const Edge& edge) {
    auto it = std::remove_if(edges_.begin(), edges_.end(),
                             [&](const EdgeRecord& r) { return r.edge == edge; });
    const bool removed = it != edges_.end();
    edges_.erase(it, edges_.end());
    return removed;
}

bool Dag::has_node(std::string_view id) const {
    return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
}

bool Dag::has_edge(const Edge& edge) const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const EdgeRecord& r) { return r.edge == edge; });
}

std::optional<EdgeTag> Dag::tag(const Edge& edge) const {
    for (const auto& r : edges_) {
        if (r.edge == edge) return r.tag;
    }
    return std::nullopt;
}

std::vector<std::string> Dag::parents(std::string_view child) const {
    std::vector<std::string> out;
    for (const auto& r : edges_) {
        if (r.edge.to == child && std::find(out.begin(), out.end(), r.edge.from) == out.end()) {
            out.push_back(r.edge.from);
        }
    }
    return out;
}

std::vector<std::string> Dag::children(std::string_view parent) const {
    std::vector<std::string> out;
    for (const auto& r : edges_) {
        if (r.edge.from == parent && std::find(out.begin(), out.end(), r.edge.to) == out.end()) {
            out.push_back(r.edge.to);
        }
    }
    return out;
}

std::vector<Edge> Dag::edge_list() const {
    std::set<Edge> unique;
    for (const auto& r : edges_) unique.insert(r.edge);
    return {unique.begin(), unique.end()};
}

// ---------------------------------------------------------------------------
// BayesianNetwork

BayesianNetwork::BayesianNetwork(std::vector<Variable> variables, Dag dag, std::vector<Cpt> cpts,
                                 NetworkMetadata metadata)
    : variables_(std::move(variables)),
      dag_(std::move(dag)),
      cpts_(std::move(cpts)),
      metadata_(std::move(metadata)) {
    for (std::size_t i = 0; i < variables_.size(); ++i) index_.emplace(variables_[i].id, i);
    cpt_index_.assign(variables_.size(), std::nullopt);
    parent_index_.assign(variables_.size(), {});
    for (std::size_t c = 0; c < cpts_.size(); ++c) {
        auto child = index_.find(cpts_[c].child);
        if (child == index_.end() || cpt_index_[child->second]) continue;
        cpt_index_[child->second] = c;
        std::vector<std::size_t> parents;
        bool resolved = true;
        for (const auto& p : cpts_[c].parents) {
            auto it = index_.find(p);
            if (it == index_.end()) {
                resolved = false;
                break;
            }
            parents.push_back(it->second);
        }
        if (resolved) parent_index_[child->second] = std::move(parents);
    }
}

std::optional<std::size_t> BayesianNetwork::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Cpt* BayesianNetwork::cpt_for(std::size_t index) const {
    const auto& slot = cpt_index_.at(index);
    return slot ? &cpts_[*slot] : nullptr;
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::InvalidVariable: return "invalid-variable";
        case ViolationKind::DuplicateNode: return "duplicate-node";
        case ViolationKind::UnknownNode: return "unknown-node";
        case ViolationKind::SelfLoop: return "self-loop";
        case ViolationKind::DuplicateEdge: return "duplicate-edge";
        case ViolationKind::DanglingEdge: return "dangling-edge";
        case ViolationKind::Cycle: return "cycle";
        case ViolationKind::MissingCpt: return "missing-cpt";
        case ViolationKind::DuplicateCpt: return "duplicate-cpt";
        case ViolationKind::ParentMismatch: return "parent-mismatch";
        case ViolationKind::ShapeMismatch: return "shape-mismatch";
        case ViolationKind::EntryOutOfRange: return "entry-out-of-range";
        case ViolationKind::RowNotNormalized: return "row-not-normalized";
    }
    return "unknown";
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << to_string(violations[i].kind) << " [" << violations[i].subject
           << "]: " << violations[i].message;
    }
    return os.str();
}

namespace {

std::string edge_name(const Edge& e) { return e.from + "->" + e.to; }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

void check_variables(const BayesianNetwork& net, ValidationReport& report) {
    std::set<std::string> seen;
    for (const auto& v : net.variables()) {
        if (!seen.insert(v.id).second) {
            report.violations.push_back(
                {ViolationKind::DuplicateNode, v.id, "variable declared more than once", {v.id}, {}});
        }
        if (v.id.empty()) {
            report.violations.push_back(
                {ViolationKind::InvalidVariable, v.id, "empty variable id", {v.id}, {}});
        }
        if (v.cardinality() < 2) {
            report.violations.push_back({ViolationKind::InvalidVariable, v.id,
                                         "variable needs at least 2 states", {v.id}, {}});
        }
        std::set<std::string> states(v.states.begin(), v.states.end());
        if (states.size() != v.states.size()) {
            report.violations.push_back({ViolationKind::InvalidVariable, v.id,
                                         "state labels are not unique", {v.id}, {}});
        }
    }
}

void check_graph(const BayesianNetwork& net, ValidationReport& report) {
    const Dag& dag = net.dag();
    std::set<std::string> dag_nodes;
    for (const auto& n : dag.nodes()) {
        if (!dag_nodes.insert(n).second) {
            report.violations.push_back(
                {ViolationKind::DuplicateNode, n, "node listed twice in graph", {n}, {}});
        }
        if (!net.index_of(n)) {
            report.violations.push_back(
                {ViolationKind::UnknownNode, n, "graph node has no variable definition", {n}, {}});
        }
    }
    for (const auto& v : net.variables()) {
        if (!dag_nodes.count(v.id)) {
            report.violations.push_back(
                {ViolationKind::UnknownNode, v.id, "variable missing from graph", {v.id}, {}});
        }
    }
    std::set<Edge> seen;
    for (const auto& r : dag.edges()) {
        const Edge& e = r.edge;
        if (e.from == e.to) {
            report.violations.push_back(
                {ViolationKind::SelfLoop, edge_name(e), "self-loop", {e.from}, {}});
        }
        if (!seen.insert(e).second) {
            report.violations.push_back(
                {ViolationKind::DuplicateEdge, edge_name(e), "edge listed twice", {e.from, e.to}, {}});
        }
        for (const auto* end : {&e.from, &e.to}) {
            if (!dag_nodes.count(*end)) {
                report.violations.push_back({ViolationKind::DanglingEdge, edge_name(e),
                                             "edge endpoint '" + *end + "' is not a declared node",
                                             {e.from, e.to}, {}});
            }
        }
    }
    Dag loop_free(dag.nodes());
    for (const auto& r : dag.edges()) {
        if (r.edge.from != r.edge.to) loop_free.add_edge(r.edge.from, r.edge.to);
    }
    if (auto cycle = find_cycle(loop_free)) {
        report.violations.push_back({ViolationKind::Cycle, join(*cycle, "->"),
                                     "directed cycle through {" + join(*cycle, ", ") + "}", *cycle,
                                     {}});
    }
}

void check_cpts(const BayesianNetwork& net, ValidationReport& report) {
    std::map<std::string, int> cpt_seen;
    for (const auto& cpt : net.cpts()) {
        if (++cpt_seen[cpt.child] == 2) {
            report.violations.push_back({ViolationKind::DuplicateCpt, cpt.child,
                                         "more than one CPT for node", {cpt.child}, {}});
        }
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        const Variable& var = net.variable(i);
        const Cpt* cpt = net.cpt_for(i);
        if (!cpt) {
            report.violations.push_back(
                {ViolationKind::MissingCpt, var.id, "no CPT for node", {var.id}, {}});
            continue;
        }
        auto dag_parents = net.dag().parents(var.id);
        std::set<std::string> expected(dag_parents.begin(), dag_parents.end());
        std::set<std::string> actual(cpt->parents.begin(), cpt->parents.end());
        if (expected != actual || actual.size() != cpt->parents.size()) {
            report.violations.push_back({ViolationKind::ParentMismatch, var.id,
                                         "CPT parents {" + join(cpt->parents, ", ") +
                                             "} differ from graph parents {" +
                                             join(dag_parents, ", ") + "}",
                                         {var.id}, {}});
        }
        std::vector<std::size_t> cards;
        bool parents_known = true;
        for (const auto& p : cpt->parents) {
            auto idx = net.index_of(p);
            if (!idx) {
                parents_known = false;
                break;
            }
            cards.push_back(net.variable(*idx).cardinality());
        }
        if (!parents_known) continue;  // reported as ParentMismatch / UnknownNode
        const std::size_t rows = configuration_count(cards);
        if (cpt->rows.size() != rows) {
            report.violations.push_back({ViolationKind::ShapeMismatch, var.id,
                                         "expected " + std::to_string(rows) + " rows, found " +
                                             std::to_string(cpt->rows.size()),
                                         {var.id}, {}});
        }
        for (std::size_t r = 0; r < cpt->rows.size(); ++r) {
            const auto& row = cpt->rows[r];
            const std::string where = var.id + "[row " + std::to_string(r) + "]";
            if (row.size() != var.cardinality()) {
                report.violations.push_back({ViolationKind::ShapeMismatch, where,
                                             "row has " + std::to_string(row.size()) +
                                                 " entries, node has " +
                                                 std::to_string(var.cardinality()) + " states",
                                             {var.id}, {}});
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range) {
                report.violations.push_back({ViolationKind::EntryOutOfRange, where,
                                             "entry outside [0, 1]", {var.id}, {}});
            }
            if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
                std::ostringstream msg;
                msg.precision(12);
                msg << "row sums to " << sum;
                report.violations.push_back(
                    {ViolationKind::RowNotNormalized, where, msg.str(), {var.id}, sum});
            }
        }
    }
}

}  // namespace

ValidationReport validate_network(const BayesianNetwork& net) {
    ValidationReport report;
    check_variables(net, report);
    check_graph(net, report);
    check_cpts(net, report);
    return report;
}

void require_valid(const BayesianNetwork& net) {
    auto report = validate_network(net);
    if (!report.ok()) throw ModelError("invalid network: " + report.summary());
}

std::size_t configuration_count(const std::vector<std::size_t>& cardinalities) {
    std::size_t n = 1;
    for (auto k : cardinalities) n *= k;
    return n;
}

// ---------------------------------------------------------------------------
// Graph algorithms

std::optional<std::vector<std::string>> find_cycle(const Dag& dag) {
    std::map<std::string, std::vector<std::string>> out;
    std::set<std::string> declared(dag.nodes().begin(), dag.nodes().end());
    for (const auto& n : declared) out[n];
    for (const auto& r : dag.edges()) {
        if (declared.count(r.edge.from) && declared.count(r.edge.to)) {
            out[r.edge.from].push_back(r.edge.to);
        }
    }
    for (auto& [_, next] : out) {
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
    }

    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::optional<std::vector<std::string>> found;

    std::function<bool(const std::string&)> visit = [&](const std::string& node) {
        mark[node] = Mark::Grey;
        stack.push_back(node);
        for (const auto& next : out[node]) {
            if (mark[next] == Mark::Grey) {
                auto start = std::find(stack.begin(), stack.end(), next);
                found = std::vector<std::string>(start, stack.end());
                return true;
            }
            if (mark[next] == Mark::White && visit(next)) return true;
        }
        stack.pop_back();
        mark[node] = Mark::Black;
        return false;
    };
    for (const auto& [node, _] : out) {
        if (mark[node] == Mark::White && visit(node)) return found;
    }
    return std::nullopt;
}

std::vector<std::string> topological_order(const Dag& dag) {
    std::map<std::string, std::size_t> indegree;
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& n : dag.nodes()) indegree[n];
    for (const auto& e : dag.edge_list()) {
        if (!indegree.count(e.from) || !indegree.count(e.to)) {
            throw ModelError("edge " + e.from + "->" + e.to + " references an undeclared node");
        }
        out[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::set<std::string> ready;
    for (const auto& [n, d] : indegree) {
        if (d == 0) ready.insert(n);
    }
    std::vector<std::string> order;
    order.reserve(indegree.size());
    while (!ready.empty()) {
        std::string n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (const auto& c : out[n]) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (order.size() != indegree.size()) {
        auto cycle = find_cycle(dag).value_or(std::vector<std::string>{});
        throw CycleError("graph contains a cycle through {" + join(cycle, ", ") + "}",
                         std::move(cycle));
    }
    return order;
}

std::uint64_t parameter_count(const BayesianNetwork& net) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        std::uint64_t rows = 1;
        for (auto p : net.parent_indices(i)) rows *= net.variable(p).cardinality();
        k += (net.variable(i).cardinality() - 1) * rows;
    }
    return k;
}

}  // namespace bnkit
