#include "latentwire/data/records.hpp"

#include <fstream>
#include <sstream>

#include "latentwire/errors.hpp"

namespace latentwire::data {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                break;
            case '\n':
                end_row();
                break;
            default:
                field.push_back(c);
                row_has_content = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field at end of input", rows.size());
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

std::vector<RawRecord> parse_records(std::string_view text, const DatasetSchema& schema) {
    auto rows = parse_csv(text);
    std::size_t first = 0;
    if (schema.has_header) {
        if (rows.empty()) throw ParseError("missing header row", 0);
        const auto& header = rows.front();
        bool matches = header.size() == schema.columns.size();
        for (std::size_t i = 0; matches && i < header.size(); ++i) matches = header[i] == schema.columns[i].name;
        if (!matches) throw ParseError("header row does not match schema '" + schema.name + "'", 0);
        first = 1;
    }

    const std::size_t label_col = schema.label_index();
    std::vector<RawRecord> out;
    out.reserve(rows.size() - first);
    for (std::size_t r = first; r < rows.size(); ++r) {
        std::size_t row_index = r - first;
        if (rows[r].size() != schema.columns.size()) {
            throw ParseError("row " + std::to_string(row_index) + " has " + std::to_string(rows[r].size()) +
                                 " fields, schema '" + schema.name + "' expects " + std::to_string(schema.columns.size()),
                             row_index);
        }
        schema.label_of(rows[r][label_col], row_index);
        out.push_back({std::move(rows[r])});
    }
    return out;
}

std::vector<RawRecord> load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadFailure::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_records(buf.str(), schema);
}

}  // namespace latentwire::data
