#include <algorithm>
#include <map>
#include <set>

#include "bnkit/error.hpp"
#include "bnkit/learn.hpp"

namespace bnkit {

namespace {

// Partially directed graph over column indices.
class Pdag {
public:
    explicit Pdag(std::size_t n) : n_(n), adj_(n * n, false), dir_(n * n, false) {}

    std::size_t size() const { return n_; }
    bool adjacent(std::size_t a, std::size_t b) const { return adj_[a * n_ + b]; }
    bool directed(std::size_t a, std::size_t b) const { return dir_[a * n_ + b]; }
    bool undirected(std::size_t a, std::size_t b) const {
        return adjacent(a, b) && !directed(a, b) && !directed(b, a);
    }
    void connect(std::size_t a, std::size_t b) { adj_[a * n_ + b] = adj_[b * n_ + a] = true; }
    void disconnect(std::size_t a, std::size_t b) {
        adj_[a * n_ + b] = adj_[b * n_ + a] = false;
        dir_[a * n_ + b] = dir_[b * n_ + a] = false;
    }
    void orient(std::size_t a, std::size_t b) { dir_[a * n_ + b] = true; }

    std::vector<std::size_t> neighbours(std::size_t a) const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < n_; ++b) {
            if (adjacent(a, b)) out.push_back(b);
        }
        return out;
    }

    // Directed path from `from` to `to` using oriented edges only.
    bool reaches(std::size_t from, std::size_t to) const {
        std::vector<bool> seen(n_, false);
        std::vector<std::size_t> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            if (v == to) return true;
            for (std::size_t w = 0; w < n_; ++w) {
                if (directed(v, w) && !seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        return false;
    }

private:
    std::size_t n_;
    std::vector<bool> adj_;
    std::vector<bool> dir_;
};

struct Orienter {
    Pdag& g;
    const std::vector<std::string>& ids;
    const StructureConstraints& constraints;

    bool forbidden(std::size_t a, std::size_t b) const {
        return constraints.forbidden.count(Edge{ids[a], ids[b]}) > 0;
    }

    // Orients an undirected edge a-b as a->b when allowed.
    bool try_orient(std::size_t a, std::size_t b) {
        if (!g.undirected(a, b) || forbidden(a, b) || g.reaches(b, a)) return false;
        g.orient(a, b);
        return true;
    }
};

// Calls fn(subset) for every size-k subset of `items` in lexicographic
// order; stops early when fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, Fn&& fn) {
    if (k > items.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::size_t> subset(k);
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (fn(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + (i - 1)) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

bool apply_meek_rules(Orienter& o) {
    Pdag& g = o.g;
    const std::size_t n = g.size();
    bool changed = false;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
            if (!g.undirected(b, c)) continue;
            // R1: a->b, b-c, a and c non-adjacent  =>  b->c
            for (std::size_t a = 0; a < n; ++a) {
                if (a != c && g.directed(a, b) && !g.adjacent(a, c) && o.try_orient(b, c)) {
                    changed = true;
                    break;
                }
            }
            if (!g.undirected(b, c)) continue;
            // R2: b->a->c and b-c  =>  b->c
            for (std::size_t a = 0; a < n; ++a) {
                if (g.directed(b, a) && g.directed(a, c) && o.try_orient(b, c)) {
                    changed = true;
                    break;
                }
            }
            if (!g.undirected(b, c)) continue;
            // R3: b-d1, b-d2, d1->c, d2->c, d1 and d2 non-adjacent  =>  b->c
            bool done = false;
            for (std::size_t d1 = 0; d1 < n && !done; ++d1) {
                if (!g.undirected(b, d1) || !g.directed(d1, c)) continue;
                for (std::size_t d2 = d1 + 1; d2 < n && !done; ++d2) {
                    if (g.undirected(b, d2) && g.directed(d2, c) && !g.adjacent(d1, d2) &&
                        o.try_orient(b, c)) {
                        changed = true;
                        done = true;
                    }
                }
            }
        }
    }
    return changed;
}

}  // namespace

PcResult pc_search(const Dataset& ds, const PcConfig& cfg, const StructureConstraints& constraints) {
    if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) {
        throw Error("PC significance must lie in (0, 1)");
    }
    std::vector<std::string> ids;
    for (const auto& v : ds.variables()) ids.push_back(v.id);
    check_constraints(constraints, ids);
    const std::size_t n = ids.size();

    auto col = [&](const std::string& id) { return *ds.index_of(id); };
    std::vector<bool> required_pair(n * n, false);
    for (const auto& e : constraints.required) {
        required_pair[col(e.from) * n + col(e.to)] = required_pair[col(e.to) * n + col(e.from)] = true;
    }

    Pdag g(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const bool both_forbidden = constraints.forbidden.count(Edge{ids[a], ids[b]}) &&
                                        constraints.forbidden.count(Edge{ids[b], ids[a]});
            if (!both_forbidden) g.connect(a, b);
        }
    }

    PcResult result;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> sepset;

    // Skeleton (PC-stable: neighbourhoods frozen per level).
    for (std::size_t level = 0;; ++level) {
        if (cfg.max_conditioning && level > *cfg.max_conditioning) break;
        std::vector<std::vector<std::size_t>> frozen(n);
        for (std::size_t a = 0; a < n; ++a) frozen[a] = g.neighbours(a);

        bool any_candidate = false;
        for (std::size_t a = 0; a < n; ++a) {
            for (auto b : frozen[a]) {
                if (!g.adjacent(a, b) || required_pair[a * n + b]) continue;
                std::vector<std::size_t> pool;
                for (auto c : frozen[a]) {
                    if (c != b) pool.push_back(c);
                }
                if (pool.size() < level) continue;
                any_candidate = true;
                for_each_subset(pool, level, [&](const std::vector<std::size_t>& s) {
                    std::vector<std::string> z;
                    for (auto c : s) z.push_back(ids[c]);
                    const CiTestResult t = chi_square_ci_test(ds, ids[a], ids[b], z);
                    if (!t.testable || t.p_value > cfg.significance) {
                        g.disconnect(a, b);
                        sepset[std::minmax(a, b)] = s;
                        result.removals.push_back(CiRecord{ids[a], ids[b], z, t});
                        return true;
                    }
                    return false;
                });
            }
        }
        if (!any_candidate) break;
    }

    Orienter o{g, ids, constraints};
    for (const auto& e : constraints.required) g.orient(col(e.from), col(e.to));
    for (const auto& e : constraints.forbidden) {
        const auto a = col(e.from), b = col(e.to);
        if (g.undirected(a, b) && !o.try_orient(b, a)) {
            throw ConstraintError("cannot orient " + e.to + "->" + e.from +
                                  " to honour forbidden edge " + e.from + "->" + e.to);
        }
    }

    // V-structures a->c<-b for non-adjacent a, b with c outside sepset(a, b).
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t a = 0; a < n; ++a) {
            if (a == c || !g.adjacent(a, c)) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (b == c || !g.adjacent(b, c) || g.adjacent(a, b)) continue;
                auto it = sepset.find({a, b});
                const bool separated_by_c =
                    it != sepset.end() &&
                    std::find(it->second.begin(), it->second.end(), c) != it->second.end();
                if (separated_by_c) continue;
                // Skip if either arm already points away from c.
                if (g.directed(c, a) || g.directed(c, b)) continue;
                if (g.undirected(a, c)) o.try_orient(a, c);
                if (g.undirected(b, c)) o.try_orient(b, c);
            }
        }
    }

    while (apply_meek_rules(o)) {
    }

    // Remaining undirected edges: lexically smaller id -> larger id.
    std::vector<std::pair<std::size_t, std::size_t>> pending;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (g.undirected(a, b)) pending.push_back(ids[a] < ids[b] ? std::pair{a, b} : std::pair{b, a});
        }
    }
    std::sort(pending.begin(), pending.end(), [&](const auto& x, const auto& y) {
        return std::tie(ids[x.first], ids[x.second]) < std::tie(ids[y.first], ids[y.second]);
    });
    for (auto [a, b] : pending) {
        if (!g.undirected(a, b)) continue;
        if (o.try_orient(a, b) || o.try_orient(b, a)) continue;
        throw ConstraintError("edge " + ids[a] + "-" + ids[b] +
                              " cannot be oriented without a cycle or a forbidden direction");
    }

    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (g.directed(a, b)) edges.push_back(Edge{ids[a], ids[b]});
        }
    }
    std::sort(edges.begin(), edges.end());
    result.dag = Dag(ids);
    for (auto& e : edges) result.dag.add_edge(std::move(e.from), std::move(e.to), EdgeTag::Learned);
    for (const auto& e : constraints.required) {
        if (!result.dag.has_edge(e)) {
            throw ConstraintError("required edge " + e.from + "->" + e.to + " was lost during orientation");
        }
    }
    return result;
}

Dag pc_algorithm(const Dataset& ds, double significance, const StructureConstraints& constraints) {
    return pc_search(ds, PcConfig{significance, std::nullopt}, constraints).dag;
}

}  // namespace bnkit
