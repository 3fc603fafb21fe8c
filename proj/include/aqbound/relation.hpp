#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqbound/csv.hpp"

namespace aqb {

enum class ColumnKind { Text, Number };
enum class RelationRole { Base, Augmenting };

// Declarative description of one relation: which columns exist, how cells are
// typed, which columns identify an entity and which ones carry measurements.
struct RelationSchema {
    std::string name;
    RelationRole role = RelationRole::Base;
    std::vector<std::string> id_attrs;
    std::vector<std::string> measure_attrs;
    std::map<std::string, ColumnKind> columns;

    static RelationSchema from_json_text(const std::string& text, const std::string& source);
    static RelationSchema from_json_file(const std::string& path);
    std::string to_json_text() const;

    // Throws SchemaViolation unless id/measure attrs are disjoint, nonempty id
    // set, and every named attr appears in `columns`.
    void validate() const;
};

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Text;
    std::vector<std::string> text;  // populated for Text columns
    std::vector<double> num;        // populated for Number columns
};

class Relation {
  public:
    RelationSchema schema;
    std::vector<Column> columns;  // CSV header order
    size_t row_count = 0;

    int column_index(const std::string& name) const;  // -1 when absent
    const Column& column(const std::string& name) const;

    const std::string& text_at(size_t row, int col) const;
    double num_at(size_t row, int col) const;

    // Cell rendered as text; numbers use the canonical shortest round-trip form.
    std::string cell_text(size_t row, int col) const;

    // Trimmed identity values for `row`, in schema id_attrs order.
    std::vector<std::string> id_tuple(size_t row) const;
};

// Loads and validates a relation: header must cover the schema columns, numeric
// cells must parse to finite values, and a base relation must have unique id
// tuples (the augmenting side may repeat them; repeats form one entity).
Relation load_relation(const std::string& csv_path, const RelationSchema& schema);
Relation relation_from_csv(const CsvTable& table, const RelationSchema& schema,
                           const std::string& source);

void write_relation(const Relation& rel, const std::string& csv_path);
CsvTable relation_to_csv(const Relation& rel);

// One augmenting-side entity: the rows whose trimmed id tuples are equal.
struct EntityGroup {
    int group_id = 0;                   // dense, ordered by first occurrence
    std::vector<std::string> id_tuple;  // trimmed identity values
    std::vector<int> row_indices;       // rows of the augmenting relation
};

// Groups an augmenting relation's rows by exact id-tuple equality after
// trimming surrounding whitespace.  Group ids follow first occurrence.
std::vector<EntityGroup> group_augmenting(const Relation& augmenting);

// A (base row -> entity group) correspondence; either ground truth or a
// nominal/heuristic matching.  Each group appears at most once (it is matched
// to one base row); a base row may appear many times.
struct Matching {
    struct Pair {
        int base_row;
        int group;
    };
    std::vector<Pair> pairs;

    bool has_group(int group) const;
};

struct ValidityReport {
    bool functional_dependency_ok = true;  // each group matched at most once
    bool inclusion_ok = true;              // indices exist in R / groups
    bool within_candidates_ok = true;      // every pair is a candidate edge (when checked)
    std::vector<std::string> problems;

    bool ok() const { return functional_dependency_ok && inclusion_ok && within_candidates_ok; }
};

struct CandidateSet;  // defined in candidate.hpp

// Checks a matching against the relations and, when `candidates` is non-null,
// against the candidate edge set.
ValidityReport validate_augmentation(const Matching& matching, const Relation& base,
                                     const std::vector<EntityGroup>& groups,
                                     const CandidateSet* candidates);

// Matching CSV exchange format: one row per pair, id tuples joined with '|'.
void write_matching_csv(const Matching& matching, const Relation& base,
                        const std::vector<EntityGroup>& groups, const std::string& path);
Matching read_matching_csv(const std::string& path, const Relation& base,
                           const std::vector<EntityGroup>& groups);

// Canonical text form of a double (shortest round-trip representation).
std::string format_number(double value);

// Trims ASCII whitespace from both ends.
std::string trim(const std::string& s);

// Joins id tuple components with '|' for the exchange formats.
std::string join_tuple(const std::vector<std::string>& tuple);

}  // namespace aqb
