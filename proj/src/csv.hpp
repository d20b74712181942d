#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bnkit::detail {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC 4180 subset: comma separator, double-quote quoting with "" escapes,
// LF or CRLF record ends. Blank lines are skipped.
std::vector<CsvRecord> split_csv(std::string_view text);

bool needs_quoting(std::string_view s);
void append_field(std::string& out, std::string_view s);

}  // namespace bnkit::detail
