#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aqbound/assignment.hpp"
#include "aqbound/candidate.hpp"
#include "aqbound/relation.hpp"

namespace aqb {

enum class TableSide { Base, Augmenting };

// A column reference resolved against the two relations.
struct ColumnRef {
    TableSide side = TableSide::Base;
    int index = -1;
    std::string name;
    ColumnKind kind = ColumnKind::Text;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

// Predicate AST.  CONTAINS tests case-insensitive token membership: every
// token of the keyword must appear among the cell's tokens.
struct Predicate {
    enum class Kind { Const, Compare, Contains, And, Or, Not };

    Kind kind = Kind::Const;
    bool const_value = false;                  // Const
    ColumnRef column;                          // Compare / Contains
    CompareOp op = CompareOp::Eq;              // Compare
    bool text_compare = false;                 // Compare: literal was a string
    double number_literal = 0.0;               // Compare vs number
    std::string text_literal;                  // Compare vs text / Contains keyword
    std::shared_ptr<const Predicate> lhs, rhs; // And/Or children, Not child in lhs
};

using PredicatePtr = std::shared_ptr<const Predicate>;

enum class AggregateKind { Sum, Count, Avg };

// Parsed and bound aggregate query:
//   SELECT (SUM|COUNT|AVG)(<column>|1) [FROM <name>] WHERE <predicate>
struct AggregateQuery {
    AggregateKind agg = AggregateKind::Count;
    std::optional<ColumnRef> target;  // absent for COUNT(1)
    PredicatePtr predicate;
    std::string text;  // original query text
};

// Parses `text` and binds every column reference against the two relations.
// Unqualified names must be unique across both; `base.X` / `aug.X` (or the
// relation's schema name) qualify explicitly.  Throws QuerySyntax with a
// character position on bad syntax, UnknownColumn on unresolvable names.
AggregateQuery parse_query(const std::string& text, const Relation& base,
                           const Relation& augmenting);

bool eval_predicate(const Predicate& predicate, const Relation& base, int base_row,
                    const Relation& augmenting, int aug_row);

// Aggregate contribution of the hypothetical sub-table pairing `base_row` with
// every member row of `group`: the qualifying-pair count and the sum of the
// target attribute over qualifying pairs.
struct PairStats {
    double sum = 0.0;
    int64_t count = 0;
};

PairStats pair_stats(const AggregateQuery& query, const Relation& base, int base_row,
                     const Relation& augmenting, const EntityGroup& group);

// The edge weight fed to the assignment solver: qualifying-pair count for
// COUNT, target sum for SUM/AVG.  Throws NegativeValue when a qualifying sum
// is negative (the solver requires nonnegative weights).
double pair_weight(const AggregateQuery& query, const Relation& base, int base_row,
                   const Relation& augmenting, const EntityGroup& group);

// The candidate edges of `candidates` re-weighted for `query`, ready to solve.
AssignmentProblem build_query_problem(const AggregateQuery& query, const Relation& base,
                                      const Relation& augmenting,
                                      const std::vector<EntityGroup>& groups,
                                      const CandidateSet& candidates, int cap);

struct IntervalDiagnostics {
    int uncovered_groups = 0;        // groups with no candidate edge at all
    int cap_used = 0;                // the in-degree cap N that produced the bounds
    bool feasible_min = true;        // false when full coverage is impossible
    int base_rows = 0;
    int group_count = 0;
    int64_t candidate_edges = 0;
    int positive_weight_groups = 0;  // d: groups with a strictly positive edge
};

struct ResultInterval {
    std::optional<double> lower;  // empty iff the minimum side is infeasible
    std::optional<double> upper;
    IntervalDiagnostics diagnostics;
};

// Bounds for the query over every valid augmentation within the candidate set
// under in-degree cap `cap`.  SUM/COUNT solve the weighted assignment both
// ways; AVG divides the SUM bounds per the quotient rules below.
ResultInterval result_interval(const AggregateQuery& query, const Relation& base,
                               const Relation& augmenting, const std::vector<EntityGroup>& groups,
                               const CandidateSet& candidates, int cap);

// AVG quotient bounds from SUM bounds: lower = l_sum / min(base_rows * cap,
// group_count); upper = u_sum / d where d counts groups with a strictly
// positive-weight edge.  Throws UndefinedAverage when d == 0.
std::pair<double, double> avg_bounds(double l_sum, double u_sum, int base_rows, int group_count,
                                     int cap, int d);

// (upper - lower) / nominal.  Throws ZeroNominal when nominal == 0.
double relative_error(double lower, double upper, double nominal);

// Point estimate of the query over the integrated table induced by `matching`.
// SUM/COUNT of an empty matching are 0; AVG without qualifying pairs throws
// UndefinedAverage.
double nominal_result(const AggregateQuery& query, const Relation& base,
                      const Relation& augmenting, const std::vector<EntityGroup>& groups,
                      const Matching& matching);

// Default nominal matching: candidates in best-score-first order (ties by base
// then group index), each accepted when its group is unmatched and its base
// row is under the cap.
Matching greedy_matching(const CandidateSet& candidates, int cap);

}  // namespace aqb
