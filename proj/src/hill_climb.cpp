#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <string>

#include "bnkit/error.hpp"
#include "bnkit/learn.hpp"
#include "bnkit/rng.hpp"

namespace bnkit {

namespace {

// Score differences below this fraction of the current score are ties;
// ties go to the first move in enumeration order, which makes score
// equivalent orientations deterministic instead of rounding-dependent.
constexpr double kRelativeTolerance = 1e-10;
constexpr std::size_t kMaxSteps = 100000;

enum class MoveKind { Add, Remove, Reverse };

struct Move {
    MoveKind kind;
    std::size_t from;
    std::size_t to;
    double delta = 0.0;
};

class SearchState {
public:
    SearchState(std::size_t n, FamilyScorer& scorer) : n_(n), edge_(n * n, false), parents_(n), scorer_(&scorer) {
        local_.resize(n);
        for (std::size_t v = 0; v < n; ++v) local_[v] = scorer_->local_bic(v, {});
    }

    bool has(std::size_t a, std::size_t b) const { return edge_[a * n_ + b]; }
    const std::vector<std::size_t>& parents(std::size_t v) const { return parents_[v]; }
    double score() const {
        double s = 0.0;
        for (double l : local_) s += l;
        return s;
    }

    // Directed path a ~> b, optionally ignoring the single edge skip_from->skip_to.
    bool reaches(std::size_t a, std::size_t b, std::size_t skip_from = SIZE_MAX,
                 std::size_t skip_to = SIZE_MAX) const {
        std::vector<bool> seen(n_, false);
        std::vector<std::size_t> stack{a};
        seen[a] = true;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            if (v == b) return true;
            for (std::size_t w = 0; w < n_; ++w) {
                if (!has(v, w) || seen[w] || (v == skip_from && w == skip_to)) continue;
                seen[w] = true;
                stack.push_back(w);
            }
        }
        return false;
    }

    double delta(const Move& m) {
        auto with = [](std::vector<std::size_t> ps, std::size_t p) {
            ps.push_back(p);
            return ps;
        };
        auto without = [](std::vector<std::size_t> ps, std::size_t p) {
            ps.erase(std::remove(ps.begin(), ps.end(), p), ps.end());
            return ps;
        };
        switch (m.kind) {
            case MoveKind::Add:
                return scorer_->local_bic(m.to, with(parents_[m.to], m.from)) - local_[m.to];
            case MoveKind::Remove:
                return scorer_->local_bic(m.to, without(parents_[m.to], m.from)) - local_[m.to];
            case MoveKind::Reverse:
                return scorer_->local_bic(m.to, without(parents_[m.to], m.from)) - local_[m.to] +
                       scorer_->local_bic(m.from, with(parents_[m.from], m.to)) - local_[m.from];
        }
        return 0.0;
    }

    void apply(const Move& m) {
        switch (m.kind) {
            case MoveKind::Add: add(m.from, m.to); break;
            case MoveKind::Remove: remove(m.from, m.to); break;
            case MoveKind::Reverse:
                remove(m.from, m.to);
                add(m.to, m.from);
                break;
        }
    }

    void add(std::size_t a, std::size_t b) {
        edge_[a * n_ + b] = true;
        parents_[b].push_back(a);
        std::sort(parents_[b].begin(), parents_[b].end());
        local_[b] = scorer_->local_bic(b, parents_[b]);
    }

    void remove(std::size_t a, std::size_t b) {
        edge_[a * n_ + b] = false;
        auto& ps = parents_[b];
        ps.erase(std::remove(ps.begin(), ps.end(), a), ps.end());
        local_[b] = scorer_->local_bic(b, ps);
    }

    std::string fingerprint() const {
        std::string s(edge_.size(), '0');
        for (std::size_t i = 0; i < edge_.size(); ++i) s[i] = edge_[i] ? '1' : '0';
        return s;
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::vector<bool> edge_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<double> local_;
    FamilyScorer* scorer_;
};

struct MoveRules {
    std::vector<bool> required;   // n*n
    std::vector<bool> forbidden;  // n*n
    std::size_t max_parents;
    std::size_t n;

    bool is_required(std::size_t a, std::size_t b) const { return required[a * n + b]; }
    bool is_forbidden(std::size_t a, std::size_t b) const { return forbidden[a * n + b]; }

    std::vector<Move> legal_moves(const SearchState& s) const {
        std::vector<Move> moves;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                if (s.has(a, b)) {
                    if (is_required(a, b)) continue;
                    moves.push_back({MoveKind::Remove, a, b});
                    if (!is_forbidden(b, a) && s.parents(a).size() < max_parents &&
                        !s.reaches(a, b, a, b)) {
                        moves.push_back({MoveKind::Reverse, a, b});
                    }
                } else if (!s.has(b, a)) {
                    if (!is_forbidden(a, b) && s.parents(b).size() < max_parents && !s.reaches(b, a)) {
                        moves.push_back({MoveKind::Add, a, b});
                    }
                }
            }
        }
        return moves;
    }
};

Dag to_dag(const SearchState& s, const std::vector<std::string>& ids) {
    Dag dag(ids);
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (s.has(a, b)) edges.push_back(Edge{ids[a], ids[b]});
        }
    }
    std::sort(edges.begin(), edges.end());
    for (auto& e : edges) dag.add_edge(std::move(e.from), std::move(e.to), EdgeTag::Learned);
    return dag;
}

// Tabu-augmented descent from `state`; leaves the best structure seen in
// `best` and returns its score.
double climb(SearchState state, const MoveRules& rules, std::size_t tabu_length, SearchState& best) {
    std::deque<std::string> tabu_order;
    std::set<std::string> tabu;
    auto remember = [&](std::string fp) {
        if (tabu_length == 0) return;
        tabu.insert(fp);
        tabu_order.push_back(std::move(fp));
        while (tabu_order.size() > tabu_length) {
            tabu.erase(tabu_order.front());
            tabu_order.pop_front();
        }
    };

    double current = state.score();
    double best_score = current;
    auto tolerance = [](double score) { return kRelativeTolerance * (1.0 + std::abs(score)); };
    best = state;
    remember(state.fingerprint());
    std::size_t since_best = 0;

    for (std::size_t step = 0; step < kMaxSteps; ++step) {
        const double tol = tolerance(current);
        std::optional<Move> chosen;
        for (auto& m : rules.legal_moves(state)) {
            m.delta = state.delta(m);
            if (chosen && !(m.delta < chosen->delta - tol)) continue;
            if (!tabu.empty()) {
                SearchState probe = state;
                probe.apply(m);
                if (tabu.count(probe.fingerprint())) continue;
            }
            chosen = m;
        }
        if (!chosen) break;
        const bool improving = chosen->delta < -tol;
        if (!improving && since_best >= tabu_length) break;
        state.apply(*chosen);
        current = state.score();
        remember(state.fingerprint());
        if (current < best_score - tolerance(best_score)) {
            best_score = current;
            best = state;
            since_best = 0;
        } else {
            ++since_best;
        }
    }
    return best_score;
}

}  // namespace

Dag hill_climb(const Dataset& ds, const StructureConstraints& constraints,
               const HillClimbConfig& config) {
    std::vector<std::string> ids;
    for (const auto& v : ds.variables()) ids.push_back(v.id);
    check_constraints(constraints, ids);
    const std::size_t n = ids.size();

    MoveRules rules{std::vector<bool>(n * n, false), std::vector<bool>(n * n, false),
                    config.max_parents, n};
    for (const auto& e : constraints.required) rules.required[*ds.index_of(e.from) * n + *ds.index_of(e.to)] = true;
    for (const auto& e : constraints.forbidden) rules.forbidden[*ds.index_of(e.from) * n + *ds.index_of(e.to)] = true;

    FamilyScorer scorer(ds);
    SearchState start(n, scorer);
    for (const auto& e : constraints.required) {
        const auto a = *ds.index_of(e.from), b = *ds.index_of(e.to);
        if (start.parents(b).size() >= config.max_parents) {
            throw ConstraintError("required edges into '" + e.to + "' exceed max_parents");
        }
        start.add(a, b);
    }

    SearchState best = start;
    double best_score = climb(start, rules, config.tabu_length, best);

    Rng rng(config.seed);
    const std::size_t perturbation = std::max<std::size_t>(1, n / 2);
    for (std::size_t r = 0; r < config.restarts; ++r) {
        SearchState state = best;
        for (std::size_t i = 0; i < perturbation; ++i) {
            auto moves = rules.legal_moves(state);
            if (moves.empty()) break;
            state.apply(moves[rng.below(moves.size())]);
        }
        SearchState candidate = state;
        const double score = climb(state, rules, config.tabu_length, candidate);
        if (score < best_score - kRelativeTolerance * (1.0 + std::abs(best_score))) {
            best_score = score;
            best = candidate;
        }
    }
    return to_dag(best, ids);
}

}  // namespace bnkit
