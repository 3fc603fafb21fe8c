#include "aqbound/relation.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "aqbound/candidate.hpp"
#include "aqbound/errors.hpp"

namespace aqb {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string format_number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string join_tuple(const std::vector<std::string>& tuple) {
    std::string out;
    for (size_t i = 0; i < tuple.size(); ++i) {
        if (i) out.push_back('|');
        out += tuple[i];
    }
    return out;
}

static std::vector<std::string> split_tuple(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find('|', start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schema

static ColumnKind parse_kind(const std::string& kind, const std::string& column,
                             const std::string& source) {
    if (kind == "text") return ColumnKind::Text;
    if (kind == "number") return ColumnKind::Number;
    fail(ErrorCode::SchemaViolation,
         source + ": column '" + column + "' has unknown kind '" + kind + "' (text|number)");
}

RelationSchema RelationSchema::from_json_text(const std::string& text, const std::string& source) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorCode::SchemaViolation, source + ": schema is not valid JSON");
    if (!doc.is_object()) fail(ErrorCode::SchemaViolation, source + ": schema must be an object");

    RelationSchema schema;
    schema.name = doc.value("name", "");
    std::string role = doc.value("role", "");
    if (role == "base") schema.role = RelationRole::Base;
    else if (role == "augmenting") schema.role = RelationRole::Augmenting;
    else fail(ErrorCode::SchemaViolation, source + ": role must be 'base' or 'augmenting'");

    if (!doc.contains("id_attrs") || !doc["id_attrs"].is_array())
        fail(ErrorCode::SchemaViolation, source + ": id_attrs must be an array");
    for (const auto& a : doc["id_attrs"]) schema.id_attrs.push_back(a.get<std::string>());

    if (doc.contains("measure_attrs")) {
        if (!doc["measure_attrs"].is_array())
            fail(ErrorCode::SchemaViolation, source + ": measure_attrs must be an array");
        for (const auto& a : doc["measure_attrs"]) schema.measure_attrs.push_back(a.get<std::string>());
    }

    if (!doc.contains("columns") || !doc["columns"].is_object())
        fail(ErrorCode::SchemaViolation, source + ": columns must be an object of name -> kind");
    for (const auto& [name, kind] : doc["columns"].items())
        schema.columns[name] = parse_kind(kind.get<std::string>(), name, source);

    schema.validate();
    return schema;
}

RelationSchema RelationSchema::from_json_file(const std::string& path) {
    return from_json_text(read_file(path), path);
}

std::string RelationSchema::to_json_text() const {
    json cols = json::object();
    for (const auto& [name, kind] : columns)
        cols[name] = (kind == ColumnKind::Text) ? "text" : "number";
    json doc = {
        {"name", name},
        {"role", role == RelationRole::Base ? "base" : "augmenting"},
        {"id_attrs", id_attrs},
        {"measure_attrs", measure_attrs},
        {"columns", cols},
    };
    return doc.dump(2) + "\n";
}

void RelationSchema::validate() const {
    if (id_attrs.empty())
        fail(ErrorCode::SchemaViolation, "schema '" + name + "': id_attrs must not be empty");
    for (const auto& a : id_attrs) {
        if (!columns.count(a))
            fail(ErrorCode::SchemaViolation,
                 "schema '" + name + "': id attr '" + a + "' is not a declared column");
        for (const auto& m : measure_attrs)
            if (m == a)
                fail(ErrorCode::SchemaViolation,
                     "schema '" + name + "': '" + a + "' is both id and measure attr");
    }
    for (const auto& m : measure_attrs)
        if (!columns.count(m))
            fail(ErrorCode::SchemaViolation,
                 "schema '" + name + "': measure attr '" + m + "' is not a declared column");
}

// ---------------------------------------------------------------------------
// Relation

int Relation::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

const Column& Relation::column(const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0)
        fail(ErrorCode::MissingColumn, "relation '" + schema.name + "' has no column '" + name + "'");
    return columns[idx];
}

const std::string& Relation::text_at(size_t row, int col) const {
    return columns[col].text[row];
}

double Relation::num_at(size_t row, int col) const {
    return columns[col].num[row];
}

std::string Relation::cell_text(size_t row, int col) const {
    const Column& c = columns[col];
    return c.kind == ColumnKind::Text ? c.text[row] : format_number(c.num[row]);
}

std::vector<std::string> Relation::id_tuple(size_t row) const {
    std::vector<std::string> tuple;
    tuple.reserve(schema.id_attrs.size());
    for (const auto& attr : schema.id_attrs)
        tuple.push_back(trim(cell_text(row, column_index(attr))));
    return tuple;
}

static double parse_number(const std::string& raw, const std::string& source, size_t row,
                           const std::string& column) {
    std::string t = trim(raw);
    if (t.empty())
        fail(ErrorCode::UnparseableNumber, source + ": row " + std::to_string(row + 1) +
                                               ", column '" + column + "': empty numeric cell");
    const char* begin = t.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + t.size() || !std::isfinite(value))
        fail(ErrorCode::UnparseableNumber, source + ": row " + std::to_string(row + 1) +
                                               ", column '" + column + "': '" + raw +
                                               "' is not a finite number");
    return value;
}

Relation relation_from_csv(const CsvTable& table, const RelationSchema& schema,
                           const std::string& source) {
    schema.validate();
    Relation rel;
    rel.schema = schema;
    rel.row_count = table.rows.size();

    for (const auto& [name, kind] : schema.columns) {
        bool found = false;
        for (const auto& h : table.header)
            if (h == name) found = true;
        if (!found)
            fail(ErrorCode::MissingColumn,
                 source + ": schema column '" + name + "' missing from CSV header");
        (void)kind;
    }

    for (size_t c = 0; c < table.header.size(); ++c) {
        const std::string& name = table.header[c];
        auto it = schema.columns.find(name);
        if (it == schema.columns.end())
            fail(ErrorCode::SchemaViolation,
                 source + ": CSV column '" + name + "' is not declared in the schema");
        Column col;
        col.name = name;
        col.kind = it->second;
        if (col.kind == ColumnKind::Text) {
            col.text.reserve(rel.row_count);
            for (size_t r = 0; r < rel.row_count; ++r) col.text.push_back(table.rows[r][c]);
        } else {
            col.num.reserve(rel.row_count);
            for (size_t r = 0; r < rel.row_count; ++r)
                col.num.push_back(parse_number(table.rows[r][c], source, r, name));
        }
        rel.columns.push_back(std::move(col));
    }

    if (schema.role == RelationRole::Base) {
        std::map<std::vector<std::string>, size_t> seen;
        for (size_t r = 0; r < rel.row_count; ++r) {
            auto tuple = rel.id_tuple(r);
            auto [it, inserted] = seen.emplace(tuple, r);
            if (!inserted)
                fail(ErrorCode::DuplicateBaseId,
                     source + ": duplicate base id tuple '" + join_tuple(tuple) + "' at rows " +
                         std::to_string(it->second + 1) + " and " + std::to_string(r + 1));
        }
    }
    return rel;
}

Relation load_relation(const std::string& csv_path, const RelationSchema& schema) {
    return relation_from_csv(read_csv_file(csv_path), schema, csv_path);
}

CsvTable relation_to_csv(const Relation& rel) {
    CsvTable table;
    for (const auto& col : rel.columns) table.header.push_back(col.name);
    table.rows.resize(rel.row_count);
    for (size_t r = 0; r < rel.row_count; ++r) {
        table.rows[r].reserve(rel.columns.size());
        for (size_t c = 0; c < rel.columns.size(); ++c)
            table.rows[r].push_back(rel.cell_text(r, static_cast<int>(c)));
    }
    return table;
}

void write_relation(const Relation& rel, const std::string& csv_path) {
    write_csv_file(relation_to_csv(rel), csv_path);
}

// ---------------------------------------------------------------------------
// Entity groups

std::vector<EntityGroup> group_augmenting(const Relation& augmenting) {
    if (augmenting.schema.role != RelationRole::Augmenting)
        fail(ErrorCode::InvalidArgument, "group_augmenting expects an augmenting-role relation");
    std::vector<EntityGroup> groups;
    std::map<std::vector<std::string>, int> index;
    for (size_t r = 0; r < augmenting.row_count; ++r) {
        auto tuple = augmenting.id_tuple(r);
        auto it = index.find(tuple);
        if (it == index.end()) {
            int id = static_cast<int>(groups.size());
            index.emplace(tuple, id);
            groups.push_back(EntityGroup{id, tuple, {static_cast<int>(r)}});
        } else {
            groups[it->second].row_indices.push_back(static_cast<int>(r));
        }
    }
    return groups;
}

// ---------------------------------------------------------------------------
// Matchings

bool Matching::has_group(int group) const {
    for (const auto& p : pairs)
        if (p.group == group) return true;
    return false;
}

ValidityReport validate_augmentation(const Matching& matching, const Relation& base,
                                     const std::vector<EntityGroup>& groups,
                                     const CandidateSet* candidates) {
    ValidityReport report;
    std::vector<int> group_uses(groups.size(), 0);
    for (const auto& p : matching.pairs) {
        if (p.base_row < 0 || p.base_row >= static_cast<int>(base.row_count)) {
            report.inclusion_ok = false;
            report.problems.push_back("base row " + std::to_string(p.base_row) + " out of range");
            continue;
        }
        if (p.group < 0 || p.group >= static_cast<int>(groups.size())) {
            report.inclusion_ok = false;
            report.problems.push_back("group " + std::to_string(p.group) + " out of range");
            continue;
        }
        if (++group_uses[p.group] == 2) {
            report.functional_dependency_ok = false;
            report.problems.push_back("group '" + join_tuple(groups[p.group].id_tuple) +
                                      "' matched to more than one base row");
        }
        if (candidates && !candidates->has_edge(p.base_row, p.group)) {
            report.within_candidates_ok = false;
            report.problems.push_back("pair (row " + std::to_string(p.base_row) + ", group '" +
                                      join_tuple(groups[p.group].id_tuple) +
                                      "') is not a candidate edge");
        }
    }
    return report;
}

void write_matching_csv(const Matching& matching, const Relation& base,
                        const std::vector<EntityGroup>& groups, const std::string& path) {
    CsvTable table;
    table.header = {"base_id_tuple", "augmenting_id_tuple"};
    for (const auto& p : matching.pairs) {
        if (p.base_row < 0 || p.base_row >= static_cast<int>(base.row_count) || p.group < 0 ||
            p.group >= static_cast<int>(groups.size()))
            fail(ErrorCode::InvalidArgument, "write_matching_csv: pair indices out of range");
        table.rows.push_back(
            {join_tuple(base.id_tuple(p.base_row)), join_tuple(groups[p.group].id_tuple)});
    }
    write_csv_file(table, path);
}

Matching read_matching_csv(const std::string& path, const Relation& base,
                           const std::vector<EntityGroup>& groups) {
    CsvTable table = read_csv_file(path);
    if (table.header.size() != 2 || table.header[0] != "base_id_tuple" ||
        table.header[1] != "augmenting_id_tuple")
        fail(ErrorCode::CsvParse, path + ": expected header base_id_tuple,augmenting_id_tuple");

    std::map<std::vector<std::string>, int> base_index;
    for (size_t r = 0; r < base.row_count; ++r) base_index[base.id_tuple(r)] = static_cast<int>(r);
    std::map<std::vector<std::string>, int> group_index;
    for (const auto& g : groups) group_index[g.id_tuple] = g.group_id;

    Matching matching;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        auto base_tuple = split_tuple(table.rows[r][0]);
        auto group_tuple = split_tuple(table.rows[r][1]);
        for (auto& part : base_tuple) part = trim(part);
        for (auto& part : group_tuple) part = trim(part);
        auto bi = base_index.find(base_tuple);
        if (bi == base_index.end())
            fail(ErrorCode::InvalidArgument, path + ": row " + std::to_string(r + 1) +
                                                 ": unknown base id tuple '" + table.rows[r][0] + "'");
        auto gi = group_index.find(group_tuple);
        if (gi == group_index.end())
            fail(ErrorCode::InvalidArgument, path + ": row " + std::to_string(r + 1) +
                                                 ": unknown augmenting id tuple '" +
                                                 table.rows[r][1] + "'");
        matching.pairs.push_back({bi->second, gi->second});
    }
    return matching;
}

}  // namespace aqb
