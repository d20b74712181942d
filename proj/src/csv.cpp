#include "csv.hpp"

#include "bnkit/error.hpp"

namespace bnkit::detail {

std::vector<CsvRecord> split_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = line;

    auto end_record = [&] {
        const bool blank = current.fields.empty() && field.empty() && !field_started;
        if (!blank) {
            current.fields.push_back(std::move(field));
            records.push_back(std::move(current));
        }
        current = CsvRecord{};
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                current.fields.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                current.line = ++line;
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field at line " + std::to_string(line));
    end_record();
    return records;
}

bool needs_quoting(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos || s.empty();
}

void append_field(std::string& out, std::string_view s) {
    if (!needs_quoting(s)) {
        out += s;
        return;
    }
    out += '"';
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

}  // namespace bnkit::detail
