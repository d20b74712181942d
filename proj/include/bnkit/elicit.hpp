#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "bnkit/network.hpp"

namespace bnkit {

enum class Rating { Strong, Moderate, Weak, None, NotSure };

std::string_view to_string(Rating r) noexcept;
/// Case-insensitive; accepts "not sure", "not_sure", "notsure", "no opinion"
/// and "not sure/no opinion" for NotSure.
std::optional<Rating> parse_rating(std::string_view text);

/// One expert's rating of one candidate edge (cause -> effect).
struct ElicitationResponse {
    Edge edge;
    Rating rating = Rating::NotSure;
    bool operator==(const ElicitationResponse&) const = default;
};

struct ElicitationConfig {
    std::map<Rating, double> weights{{Rating::Strong, 1.0},
                                     {Rating::Moderate, 0.8},
                                     {Rating::Weak, 0.2},
                                     {Rating::None, 0.0},
                                     {Rating::NotSure, 0.0}};
    double threshold = 0.70;
    /// Drop NotSure answers from the denominator as well as the numerator.
    bool exclude_not_sure = false;

    double weight(Rating r) const;
    /// Throws Error if a weight or the threshold lies outside [0, 1].
    void validate() const;
};

/// Scores within this distance below the threshold still count as meeting it,
/// so that e.g. a mean that should be 0.7 but rounds to 0.69999999999999996
/// is retained.
inline constexpr double kThresholdSlack = 1e-12;

/// Mean response weight. Throws Error on an empty list or mixed edges.
/// Returns 0 when exclude_not_sure leaves no responses.
double score_relationship(std::span<const ElicitationResponse> responses,
                          const ElicitationConfig& cfg = {});

/// Groups responses by edge and scores each group.
std::map<Edge, double> score_all(std::span<const ElicitationResponse> responses,
                                 const ElicitationConfig& cfg = {});

struct ThresholdResult {
    std::set<Edge> retained;
    std::set<Edge> removed;
};

ThresholdResult apply_threshold(const std::map<Edge, double>& scores, const ElicitationConfig& cfg = {});

/// base - removed + retained + additions. Edges not already in base are tagged
/// expert-added. Throws ConstraintError when an edge is both retained and
/// removed, ModelError for unknown nodes, and CycleError if the result is
/// cyclic.
Dag merge_structures(const Dag& base, const std::set<Edge>& retained, const std::set<Edge>& removed,
                     const std::set<Edge>& additions);

/// `cause,effect,rating` rows; a leading header row naming those columns is
/// optional. Throws DataError naming the line on malformed rows.
std::vector<ElicitationResponse> parse_elicitation_csv(std::string_view text);

}  // namespace bnkit
