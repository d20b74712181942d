#include "bnkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "bnkit/error.hpp"
#include "csv.hpp"

namespace bnkit {

Dataset::Dataset(std::vector<Variable> variables, std::vector<std::int32_t> cells)
    : variables_(std::move(variables)), cells_(std::move(cells)) {
    const std::size_t width = variables_.size();
    if (width == 0) {
        if (!cells_.empty()) throw DataError("dataset without variables cannot hold cells");
        return;
    }
    if (cells_.size() % width != 0) throw DataError("cell count is not a multiple of the column count");
    n_total_ = cells_.size() / width;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto c = cells_[i];
        const auto& var = variables_[i % width];
        if (c != kMissing && (c < 0 || static_cast<std::size_t>(c) >= var.cardinality())) {
            throw DataError("row " + std::to_string(i / width + 1) + ", column " + var.id +
                            ": state index " + std::to_string(c) + " out of range");
        }
    }
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t Dataset::require_index(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx) throw DataError("unknown variable '" + std::string(id) + "'");
    return *idx;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::int32_t> cells;
    cells.reserve(rows.size() * variables_.size());
    for (auto r : rows) {
        auto src = row(r);
        cells.insert(cells.end(), src.begin(), src.end());
    }
    return Dataset(variables_, std::move(cells));
}

Dataset Dataset::complete_cases(std::span<const std::size_t> columns) const {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < n_total_; ++r) {
        if (std::all_of(columns.begin(), columns.end(),
                        [&](std::size_t c) { return code(r, c) != kMissing; })) {
            keep.push_back(r);
        }
    }
    return select_rows(keep);
}

std::uint64_t CountTable::at(std::span<const std::size_t> states) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < cardinalities.size(); ++i) idx = idx * cardinalities[i] + states[i];
    return counts.at(idx);
}

CountTable count_configurations(const Dataset& ds, std::span<const std::size_t> columns) {
    CountTable t;
    for (auto c : columns) {
        t.scope.push_back(ds.variables().at(c).id);
        t.cardinalities.push_back(ds.variables()[c].cardinality());
    }
    t.counts.assign(configuration_count(t.cardinalities), 0);
    for (std::size_t r = 0; r < ds.n_total(); ++r) {
        std::size_t idx = 0;
        bool complete = true;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto code = ds.code(r, columns[i]);
            if (code == kMissing) {
                complete = false;
                break;
            }
            idx = idx * t.cardinalities[i] + static_cast<std::size_t>(code);
        }
        if (!complete) continue;
        ++t.counts[idx];
        ++t.n_valid;
    }
    return t;
}

CountTable state_counts(const Dataset& ds, std::string_view var) {
    const std::size_t col = ds.require_index(var);
    return count_configurations(ds, std::span<const std::size_t>(&col, 1));
}

CountTable joint_counts(const Dataset& ds, std::string_view child,
                        std::span<const std::string> parents) {
    if (parents.empty()) throw DataError("joint_counts needs at least one parent");
    std::vector<std::size_t> cols;
    for (const auto& p : parents) {
        if (p == child) throw DataError("child '" + std::string(child) + "' listed among its parents");
        cols.push_back(ds.require_index(p));
    }
    cols.push_back(ds.require_index(child));
    return count_configurations(ds, cols);
}

CountTable marginalize_last(const CountTable& table) {
    if (table.scope.empty()) throw DataError("cannot marginalize an empty scope");
    CountTable out;
    out.scope.assign(table.scope.begin(), table.scope.end() - 1);
    out.cardinalities.assign(table.cardinalities.begin(), table.cardinalities.end() - 1);
    const std::size_t k = table.cardinalities.back();
    out.counts.assign(table.counts.size() / k, 0);
    for (std::size_t i = 0; i < table.counts.size(); ++i) out.counts[i / k] += table.counts[i];
    out.n_valid = table.n_valid;
    return out;
}

// ---------------------------------------------------------------------------
// CSV

using detail::CsvRecord;
using detail::append_field;
using detail::split_csv;

Dataset parse_survey_csv(std::string_view text, std::span<const Variable> schema) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    auto records = split_csv(text);
    if (records.empty()) throw DataError("missing header row");

    std::vector<Variable> columns;
    std::set<std::string> seen;
    for (const auto& id : records.front().fields) {
        auto it = std::find_if(schema.begin(), schema.end(),
                               [&](const Variable& v) { return v.id == id; });
        if (it == schema.end()) throw DataError("header: unknown column id '" + id + "'");
        if (!seen.insert(id).second) throw DataError("header: duplicate column id '" + id + "'");
        columns.push_back(*it);
    }

    const std::size_t width = columns.size();
    std::vector<std::int32_t> cells;
    cells.reserve((records.size() - 1) * width);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where = "row " + std::to_string(r);
        if (rec.fields.size() != width) {
            throw DataError(where + ": expected " + std::to_string(width) + " fields, found " +
                            std::to_string(rec.fields.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& cell = rec.fields[c];
            const Variable& var = columns[c];
            if (cell.empty()) {
                cells.push_back(kMissing);
                continue;
            }
            if (auto idx = var.state_index(cell)) {
                cells.push_back(static_cast<std::int32_t>(*idx));
                continue;
            }
            long code = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), code);
            if (ec == std::errc{} && ptr == cell.data() + cell.size()) {
                if (code < 0 || static_cast<std::size_t>(code) >= var.cardinality()) {
                    throw DataError(where + ", column " + var.id + ": state code " + cell +
                                    " out of range [0, " + std::to_string(var.cardinality() - 1) +
                                    "]");
                }
                cells.push_back(static_cast<std::int32_t>(code));
                continue;
            }
            throw DataError(where + ", column " + var.id + ": unknown state '" + cell + "'");
        }
    }
    return Dataset(std::move(columns), std::move(cells));
}

std::string write_survey_csv(const Dataset& ds) {
    std::string out;
    for (std::size_t c = 0; c < ds.n_vars(); ++c) {
        if (c) out += ',';
        append_field(out, ds.variables()[c].id);
    }
    out += '\n';
    for (std::size_t r = 0; r < ds.n_total(); ++r) {
        for (std::size_t c = 0; c < ds.n_vars(); ++c) {
            if (c) out += ',';
            if (auto v = ds.value(r, c)) {
                append_field(out, ds.variables()[c].states[*v]);
            } else if (ds.n_vars() == 1) {
                out += "\"\"";  // a bare empty line would read as a blank record
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace bnkit
