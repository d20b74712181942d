#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "bnkit/error.hpp"
#include "bnkit/learn.hpp"

namespace bnkit {

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Expert: return "expert";
        case Provenance::Hc: return "hc";
        case Provenance::Pc: return "pc";
        case Provenance::Manual: return "manual";
    }
    return "manual";
}

std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
    for (auto p : {Provenance::Expert, Provenance::Hc, Provenance::Pc, Provenance::Manual}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

void check_constraints(const StructureConstraints& c, const std::vector<std::string>& nodes) {
    const std::set<std::string> known(nodes.begin(), nodes.end());
    for (const auto* set : {&c.required, &c.forbidden}) {
        for (const auto& e : *set) {
            if (!known.count(e.from) || !known.count(e.to)) {
                throw ConstraintError("constraint edge " + e.from + "->" + e.to +
                                      " names an unknown variable");
            }
            if (e.from == e.to) throw ConstraintError("constraint edge " + e.from + "->" + e.to + " is a self-loop");
        }
    }
    for (const auto& e : c.required) {
        if (c.forbidden.count(e)) {
            throw ConstraintError("edge " + e.from + "->" + e.to + " is both required and forbidden");
        }
    }
    Dag required(nodes);
    for (const auto& e : c.required) required.add_edge(e.from, e.to);
    if (auto cycle = find_cycle(required)) {
        std::string listing;
        for (const auto& n : *cycle) listing += (listing.empty() ? "" : "->") + n;
        throw ConstraintError("required edges form a cycle: " + listing);
    }
}

nlohmann::json report_to_json(const ScoreReport& r) {
    return {{"provenance", std::string(to_string(r.provenance))},
            {"bic", r.bic},
            {"log_likelihood", r.log_likelihood},
            {"k", r.parameter_count},
            {"n", r.n},
            {"config", r.config}};
}

// ---------------------------------------------------------------------------

namespace {

double family_ll(const Dataset& ds, std::size_t child, const std::vector<std::size_t>& parents) {
    std::vector<std::size_t> cols = parents;
    cols.push_back(child);
    const CountTable t = count_configurations(ds, cols);
    const std::size_t k = t.cardinalities.back();
    double ll = 0.0;
    for (std::size_t p = 0; p < t.counts.size() / k; ++p) {
        std::uint64_t total = 0;
        for (std::size_t x = 0; x < k; ++x) total += t.counts[p * k + x];
        if (total == 0) continue;
        const double log_total = std::log(static_cast<double>(total));
        for (std::size_t x = 0; x < k; ++x) {
            const auto c = t.counts[p * k + x];
            if (c > 0) ll += static_cast<double>(c) * (std::log(static_cast<double>(c)) - log_total);
        }
    }
    return ll;
}

std::uint64_t family_parameters(const Dataset& ds, std::size_t child,
                                const std::vector<std::size_t>& parents) {
    std::uint64_t rows = 1;
    for (auto p : parents) rows *= ds.variables()[p].cardinality();
    return (ds.variables()[child].cardinality() - 1) * rows;
}

struct Families {
    std::vector<std::size_t> columns;  // dataset column of each dag node
    std::vector<std::vector<std::size_t>> parents;
};

Families resolve(const Dag& dag, const Dataset& ds) {
    Families f;
    for (const auto& node : dag.nodes()) f.columns.push_back(ds.require_index(node));
    for (const auto& node : dag.nodes()) {
        std::vector<std::size_t> ps;
        for (const auto& p : dag.parents(node)) ps.push_back(ds.require_index(p));
        f.parents.push_back(std::move(ps));
    }
    return f;
}

}  // namespace

FamilyScorer::FamilyScorer(const Dataset& ds) {
    std::vector<std::size_t> all(ds.n_vars());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    data_ = ds.complete_cases(all);
}

double FamilyScorer::family_log_likelihood(std::size_t child,
                                           const std::vector<std::size_t>& parents) const {
    return family_ll(data_, child, parents);
}

double FamilyScorer::local_bic(std::size_t child, std::vector<std::size_t> parents) {
    std::sort(parents.begin(), parents.end());
    auto key = std::make_pair(child, parents);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double n = static_cast<double>(data_.n_total());
    const double penalty =
        n > 0 ? static_cast<double>(family_parameters(data_, child, parents)) * std::log(n) : 0.0;
    const double score = -2.0 * family_ll(data_, child, parents) + penalty;
    cache_.emplace(std::move(key), score);
    return score;
}

double log_likelihood(const Dag& dag, const Dataset& ds) {
    const Families fam = resolve(dag, ds);
    const Dataset cc = ds.complete_cases(fam.columns);
    double ll = 0.0;
    for (std::size_t i = 0; i < fam.columns.size(); ++i) {
        ll += family_ll(cc, fam.columns[i], fam.parents[i]);
    }
    return ll;
}

ScoreReport bic_score(const Dag& dag, const Dataset& ds, Provenance provenance) {
    const Families fam = resolve(dag, ds);
    const Dataset cc = ds.complete_cases(fam.columns);
    if (cc.n_total() == 0) throw DataError("no complete records for the structure's variables");
    ScoreReport r;
    r.candidate = dag;
    r.provenance = provenance;
    r.n = cc.n_total();
    for (std::size_t i = 0; i < fam.columns.size(); ++i) {
        r.log_likelihood += family_ll(cc, fam.columns[i], fam.parents[i]);
        r.parameter_count += family_parameters(cc, fam.columns[i], fam.parents[i]);
    }
    r.bic = -2.0 * r.log_likelihood +
            static_cast<double>(r.parameter_count) * std::log(static_cast<double>(r.n));
    return r;
}

std::vector<ScoreReport> compare_structures(const std::vector<std::pair<Dag, Provenance>>& candidates,
                                            const Dataset& ds) {
    std::vector<ScoreReport> reports;
    for (const auto& [dag, prov] : candidates) reports.push_back(bic_score(dag, ds, prov));
    std::stable_sort(reports.begin(), reports.end(), [](const ScoreReport& a, const ScoreReport& b) {
        return std::tie(a.bic, a.parameter_count, a.provenance) <
               std::tie(b.bic, b.parameter_count, b.provenance);
    });
    return reports;
}

bool markov_equivalent(const Dag& a, const Dag& b) {
    using Pair = std::pair<std::string, std::string>;
    using VStruct = std::tuple<std::string, std::string, std::string>;
    auto skeleton = [](const Dag& d) {
        std::set<Pair> s;
        for (const auto& e : d.edge_list()) s.insert(std::minmax(e.from, e.to));
        return s;
    };
    auto vstructs = [](const Dag& d, const std::set<Pair>& skel) {
        std::set<VStruct> out;
        for (const auto& child : d.nodes()) {
            auto ps = d.parents(child);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                for (std::size_t j = i + 1; j < ps.size(); ++j) {
                    auto [lo, hi] = std::minmax(ps[i], ps[j]);
                    if (!skel.count({lo, hi})) out.emplace(lo, child, hi);
                }
            }
        }
        return out;
    };
    const auto sa = skeleton(a);
    const auto sb = skeleton(b);
    return sa == sb && vstructs(a, sa) == vstructs(b, sb);
}

}  // namespace bnkit
