#pragma once

// Workload runner: evaluates every estimator on a prepared dataset and
// reports interval tightness, failure-to-bound rates, and constraint sweeps
// in plot-ready CSV/JSON form.

#include <optional>
#include <string>
#include <vector>

#include "aqbound/candidate.hpp"
#include "aqbound/query.hpp"
#include "aqbound/relation.hpp"

namespace aqb {

enum class Method {
    MaxSum,   // per-row degree * max (no cap)
    MaxSumC,  // per-row min(degree, N) * max
    Ga,       // assignment bounds, cap permissive (no effective constraint)
    GaC,      // assignment bounds at the percentile cap
    GaStar,   // assignment bounds at the best truth-bounding cap (needs truth)
};

std::string method_name(Method method);
Method method_from_name(const std::string& name);

// Everything an estimator needs, prepared once: relations, entity groups,
// candidate edges, and the ground-truth matching the metrics are scored
// against.
struct EvalDataset {
    Relation base;
    Relation augmenting;
    std::vector<EntityGroup> groups;
    CandidateSet candidates;
    Matching truth;
};

// Groups the augmenting rows and builds the candidate set in one step.
EvalDataset assemble_dataset(Relation base, Relation augmenting, Matching truth,
                             const SimilarityConfig& similarity,
                             const BlockingConfig& blocking = {});

struct EvalRecord {
    int query_id = 0;
    std::string query_text;
    Method method = Method::Ga;
    int cap = 0;                      // N the estimator actually used
    std::optional<double> lower;      // empty when no full-coverage matching exists
    double upper = 0.0;
    double truth_value = 0.0;         // aggregate under the ground-truth matching
    std::optional<double> tightness;  // (u - l) / truth, when both are defined
    bool bounded = false;             // lower <= truth <= upper
    double wall_ms = 0.0;
    std::string error;                // per-record failure, captured not thrown
};

struct WorkloadOptions {
    double percentile = 0.75;        // degree percentile for the capped methods
    std::optional<int> explicit_cap; // overrides the percentile when set
};

// One record per (query, method), in that order.  Per-record errors land in
// EvalRecord::error; only dataset-level problems throw.
std::vector<EvalRecord> run_workload(const EvalDataset& dataset,
                                     const std::vector<std::string>& queries,
                                     const std::vector<Method>& methods,
                                     const WorkloadOptions& options = {});

enum class QueryKind {
    KeywordSum,  // SUM(measure) WHERE text-attr CONTAINS 'token'
    YearCount,   // COUNT(1) WHERE numeric-attr >= literal
};

// Deterministic random queries over the augmenting columns.  Keyword queries
// draw tokens from the compare column weighted by document frequency.
std::vector<std::string> random_queries(const EvalDataset& dataset, int count, QueryKind kind,
                                        uint64_t seed);

struct GaStarResult {
    int cap = 0;
    double lower = 0.0;
    double upper = 0.0;
};

// Sweeps the cap from 1 to the maximum candidate degree and returns the
// shortest interval that still contains the truth (smallest cap on ties).
// Throws NoBoundingCap when no cap bounds the truth.
GaStarResult ga_star(const EvalDataset& dataset, const AggregateQuery& query,
                     double truth_value);

struct SweepPoint {
    int cap = 0;
    std::optional<double> lower;
    double upper = 0.0;
    bool bounded = false;

    std::optional<double> length() const {
        if (!lower) return std::nullopt;
        return upper - *lower;
    }
};

// Interval per cap value over [cap_lo, cap_hi], ascending.
std::vector<SweepPoint> sweep_constraint(const EvalDataset& dataset, const AggregateQuery& query,
                                         int cap_lo, int cap_hi, double truth_value);

// Plot-ready outputs.
void write_records_csv(const std::vector<EvalRecord>& records, const std::string& path);
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

// Per-method mean tightness and failure rate, as a JSON object keyed by
// method name.
std::string summarize_records_json(const std::vector<EvalRecord>& records);

// Spearman rank correlation (average ranks on ties); NaN when undefined.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace aqb
