#include "latentwire/data/schema.hpp"

#include <fstream>
#include <unordered_set>

#include "latentwire/errors.hpp"

namespace latentwire::data {

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "label") return ColumnKind::label;
    if (s == "drop") return ColumnKind::drop;
    throw ConfigError("columns.kind", "unknown column kind '" + s + "'");
}

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::label: return "label";
        case ColumnKind::drop: return "drop";
    }
    return "drop";
}

void DatasetSchema::validate() const {
    std::size_t labels = 0;
    std::unordered_set<std::string> names;
    for (const auto& c : columns) {
        if (c.kind == ColumnKind::label) ++labels;
        if (!names.insert(c.name).second) throw ConfigError("columns", "duplicate column name '" + c.name + "'");
    }
    if (labels != 1) throw ConfigError("columns", "exactly one label column required, found " + std::to_string(labels));
    for (const auto& v : attack_label_values) {
        if (normal_label_values.contains(v)) {
            throw ConfigError("attack_labels", "value '" + v + "' is listed as both attack and normal");
        }
    }
}

std::size_t DatasetSchema::label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::label) return i;
    }
    throw ConfigError("columns", "schema has no label column");
}

int DatasetSchema::label_of(const std::string& value, std::size_t row) const {
    if (attack_label_values.contains(value)) return 1;
    if (normal_label_values.contains(value)) return 0;
    throw ParseError("unknown label value '" + value + "' at row " + std::to_string(row), row, label_index());
}

DatasetSchema schema_from_json(const nlohmann::json& j) {
    DatasetSchema s;
    try {
        s.name = j.at("name").get<std::string>();
        for (const auto& c : j.at("columns")) {
            s.columns.push_back({c.at("name").get<std::string>(), column_kind_from_string(c.at("kind").get<std::string>())});
        }
        for (const auto& v : j.at("attack_labels")) s.attack_label_values.insert(v.get<std::string>());
        for (const auto& v : j.at("normal_labels")) s.normal_label_values.insert(v.get<std::string>());
        s.has_header = j.value("has_header", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema", e.what());
    }
    s.validate();
    return s;
}

nlohmann::json schema_to_json(const DatasetSchema& schema) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : schema.columns) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    return {{"name", schema.name},
            {"columns", cols},
            {"attack_labels", schema.attack_label_values},
            {"normal_labels", schema.normal_label_values},
            {"has_header", schema.has_header}};
}

DatasetSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("schema", "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema", path.string() + ": " + e.what());
    }
    return schema_from_json(j);
}

}  // namespace latentwire::data
