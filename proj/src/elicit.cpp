#include "bnkit/elicit.hpp"

#include <algorithm>
#include <cctype>

#include "bnkit/error.hpp"
#include "csv.hpp"

namespace bnkit {

namespace {

std::string lower_trimmed(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    std::string out(text);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

std::string trimmed(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return std::string(text);
}

std::string edge_name(const Edge& e) { return e.from + "->" + e.to; }

}  // namespace

std::string_view to_string(Rating r) noexcept {
    switch (r) {
        case Rating::Strong: return "Strong";
        case Rating::Moderate: return "Moderate";
        case Rating::Weak: return "Weak";
        case Rating::None: return "None";
        case Rating::NotSure: return "NotSure";
    }
    return "NotSure";
}

std::optional<Rating> parse_rating(std::string_view text) {
    const std::string t = lower_trimmed(text);
    if (t == "strong") return Rating::Strong;
    if (t == "moderate") return Rating::Moderate;
    if (t == "weak") return Rating::Weak;
    if (t == "none") return Rating::None;
    if (t == "notsure" || t == "not sure" || t == "not_sure" || t == "no opinion" ||
        t == "not sure/no opinion") {
        return Rating::NotSure;
    }
    return std::nullopt;
}

double ElicitationConfig::weight(Rating r) const {
    auto it = weights.find(r);
    if (it == weights.end()) throw Error("no weight configured for rating " + std::string(to_string(r)));
    return it->second;
}

void ElicitationConfig::validate() const {
    for (auto r : {Rating::Strong, Rating::Moderate, Rating::Weak, Rating::None, Rating::NotSure}) {
        const double w = weight(r);
        if (!(w >= 0.0 && w <= 1.0)) {
            throw Error("weight for " + std::string(to_string(r)) + " must lie in [0, 1]");
        }
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("threshold must lie in [0, 1]");
}

double score_relationship(std::span<const ElicitationResponse> responses, const ElicitationConfig& cfg) {
    if (responses.empty()) throw Error("no responses to score");
    const Edge& edge = responses.front().edge;
    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& r : responses) {
        if (r.edge != edge) {
            throw Error("responses mix edges " + edge_name(edge) + " and " + edge_name(r.edge));
        }
        if (cfg.exclude_not_sure && r.rating == Rating::NotSure) continue;
        total += cfg.weight(r.rating);
        ++counted;
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

std::map<Edge, double> score_all(std::span<const ElicitationResponse> responses, const ElicitationConfig& cfg) {
    std::map<Edge, std::vector<ElicitationResponse>> groups;
    for (const auto& r : responses) groups[r.edge].push_back(r);
    std::map<Edge, double> scores;
    for (const auto& [edge, group] : groups) scores[edge] = score_relationship(group, cfg);
    return scores;
}

ThresholdResult apply_threshold(const std::map<Edge, double>& scores, const ElicitationConfig& cfg) {
    ThresholdResult out;
    for (const auto& [edge, score] : scores) {
        if (score >= cfg.threshold - kThresholdSlack) {
            out.retained.insert(edge);
        } else {
            out.removed.insert(edge);
        }
    }
    return out;
}

Dag merge_structures(const Dag& base, const std::set<Edge>& retained, const std::set<Edge>& removed,
                     const std::set<Edge>& additions) {
    for (const auto& e : retained) {
        if (removed.count(e)) throw ConstraintError("edge " + edge_name(e) + " is both retained and removed");
    }
    for (const auto* set : {&retained, &removed, &additions}) {
        for (const auto& e : *set) {
            if (!base.has_node(e.from) || !base.has_node(e.to)) {
                throw ModelError("edge " + edge_name(e) + " names a node outside the base structure");
            }
            if (e.from == e.to) throw ModelError("edge " + edge_name(e) + " is a self-loop");
        }
    }

    Dag out(base.nodes());
    for (const auto& rec : base.edges()) {
        if (removed.count(rec.edge) || out.has_edge(rec.edge)) continue;
        out.add_edge(rec.edge.from, rec.edge.to, rec.tag);
    }
    for (const auto* set : {&retained, &additions}) {
        for (const auto& e : *set) {
            if (!out.has_edge(e)) out.add_edge(e.from, e.to, EdgeTag::ExpertAdded);
        }
    }
    if (auto cycle = find_cycle(out)) {
        std::string listing;
        for (const auto& n : *cycle) listing += n + "->";
        listing += cycle->front();
        throw CycleError("merged structure has a cycle: " + listing, *cycle);
    }
    return out;
}

std::vector<ElicitationResponse> parse_elicitation_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<ElicitationResponse> out;
    bool first = true;
    for (const auto& rec : detail::split_csv(text)) {
        const std::string where = "line " + std::to_string(rec.line);
        if (rec.fields.size() != 3) throw DataError(where + ": expected cause,effect,rating");
        if (first) {
            first = false;
            if (lower_trimmed(rec.fields[0]) == "cause" && lower_trimmed(rec.fields[1]) == "effect") continue;
        }
        ElicitationResponse r;
        r.edge = Edge{trimmed(rec.fields[0]), trimmed(rec.fields[1])};
        if (r.edge.from.empty() || r.edge.to.empty()) throw DataError(where + ": empty cause or effect");
        auto rating = parse_rating(rec.fields[2]);
        if (!rating) throw DataError(where + ": unknown rating '" + rec.fields[2] + "'");
        r.rating = *rating;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace bnkit
