#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/network.hpp"

namespace bnkit {

inline constexpr std::int32_t kMissing = -1;

/// Categorical observations, one record per survey response. Cells hold a
/// state index or kMissing. Immutable after construction.
class Dataset {
public:
    Dataset() = default;
    /// `cells` is row-major with variables.size() columns. Throws DataError
    /// if a present code is out of range.
    Dataset(std::vector<Variable> variables, std::vector<std::int32_t> cells);

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    std::size_t n_vars() const noexcept { return variables_.size(); }
    std::size_t n_total() const noexcept { return n_total_; }

    std::optional<std::size_t> index_of(std::string_view id) const;
    /// Like index_of but throws DataError("unknown variable ...").
    std::size_t require_index(std::string_view id) const;

    std::int32_t code(std::size_t row, std::size_t col) const {
        return cells_[row * variables_.size() + col];
    }
    std::optional<std::size_t> value(std::size_t row, std::size_t col) const {
        const auto c = code(row, col);
        if (c == kMissing) return std::nullopt;
        return static_cast<std::size_t>(c);
    }
    std::span<const std::int32_t> row(std::size_t r) const {
        return {cells_.data() + r * variables_.size(), variables_.size()};
    }
    const std::vector<std::int32_t>& cells() const noexcept { return cells_; }

    /// New dataset holding the given rows (repeats allowed), same columns.
    Dataset select_rows(std::span<const std::size_t> rows) const;
    /// Rows with every listed column present.
    Dataset complete_cases(std::span<const std::size_t> columns) const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<Variable> variables_;
    std::vector<std::int32_t> cells_;
    std::size_t n_total_ = 0;
};

/// Counts over the joint configurations of `scope`, indexed mixed-radix with
/// the last scope variable varying fastest.
struct CountTable {
    std::vector<std::string> scope;
    std::vector<std::size_t> cardinalities;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_valid = 0;

    std::uint64_t at(std::span<const std::size_t> states) const;
};

/// Listwise counting: a record contributes only if every scope column is
/// present.
CountTable count_configurations(const Dataset& ds, std::span<const std::size_t> columns);

CountTable state_counts(const Dataset& ds, std::string_view var);

/// Counts over (parents..., child). Parents must be non-empty and must not
/// contain the child.
CountTable joint_counts(const Dataset& ds, std::string_view child,
                        std::span<const std::string> parents);

/// Sums out the last scope variable.
CountTable marginalize_last(const CountTable& table);

/// Reads comma-separated survey responses. The header names variable ids
/// from `schema`; cells are state labels (matched case-sensitively), 0-based
/// integer codes, or empty for a missing response. Label lookup takes
/// precedence over integer codes.
Dataset parse_survey_csv(std::string_view text, std::span<const Variable> schema);

/// Writes state labels; the output parses back to an identical Dataset.
std::string write_survey_csv(const Dataset& ds);

}  // namespace bnkit
