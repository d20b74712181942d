#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/network.hpp"
#include "json.hpp"

namespace bnkit {

/// Nodes and edges without parameters: the "structure" documents consumed
/// by fit/elicit and produced by the learners. Same JSON layout as a network
/// with the `cpts` key absent.
struct Structure {
    std::vector<Variable> variables;
    Dag dag;
    NetworkMetadata metadata;
};

/// Rounds to 12 significant digits; the canonical float form on disk.
double canonical_double(double value);

/// Row sums this close to 1 are what 12-digit rounding leaves behind; such
/// rows are kept as written so that canonical files reload bit-identically.
inline constexpr double kSerializationSlack = 1e-11;

/// Parses a network document. Rows whose sum is off by more than
/// kSerializationSlack but within kRowSumTolerance are re-normalized; the
/// result must pass validate_network or ModelError is thrown.
BayesianNetwork network_from_json(const nlohmann::json& doc);
BayesianNetwork parse_network(std::string_view text);
BayesianNetwork load_network(const std::filesystem::path& path);

/// Canonical document: sorted keys, floats at 12 significant digits.
nlohmann::json network_to_json(const BayesianNetwork& net);
std::string serialize_network(const BayesianNetwork& net);
void save_network(const BayesianNetwork& net, const std::filesystem::path& path);

Structure structure_from_json(const nlohmann::json& doc);
Structure parse_structure(std::string_view text);
Structure load_structure(const std::filesystem::path& path);
Structure structure_of(const BayesianNetwork& net);
nlohmann::json structure_to_json(const Structure& s);
std::string serialize_structure(const Structure& s);

std::vector<Variable> variables_from_json(const nlohmann::json& nodes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bnkit
