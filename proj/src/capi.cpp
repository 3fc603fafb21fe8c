#include "aqbound.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "aqbound/baselines.hpp"
#include "aqbound/errors.hpp"
#include "aqbound/pipeline.hpp"

using namespace aqb;

namespace {

thread_local std::string g_last_error;

aqb_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return AQB_ERR_INVALID_ARGUMENT;
        case ErrorCode::Io: return AQB_ERR_IO;
        case ErrorCode::CsvParse: return AQB_ERR_CSV_PARSE;
        case ErrorCode::MissingColumn: return AQB_ERR_MISSING_COLUMN;
        case ErrorCode::DuplicateBaseId: return AQB_ERR_DUPLICATE_BASE_ID;
        case ErrorCode::UnparseableNumber: return AQB_ERR_UNPARSEABLE_NUMBER;
        case ErrorCode::SchemaViolation: return AQB_ERR_SCHEMA_VIOLATION;
        case ErrorCode::QuerySyntax: return AQB_ERR_QUERY_SYNTAX;
        case ErrorCode::UnknownColumn: return AQB_ERR_UNKNOWN_COLUMN;
        case ErrorCode::NegativeValue: return AQB_ERR_NEGATIVE_VALUE;
        case ErrorCode::Infeasible: return AQB_ERR_INFEASIBLE;
        case ErrorCode::TooLarge: return AQB_ERR_TOO_LARGE;
        case ErrorCode::ZeroNominal: return AQB_ERR_ZERO_NOMINAL;
        case ErrorCode::UndefinedAverage: return AQB_ERR_UNDEFINED_AVERAGE;
        case ErrorCode::NoBoundingCap: return AQB_ERR_NO_BOUNDING_CAP;
        case ErrorCode::Internal: return AQB_ERR_INTERNAL;
    }
    return AQB_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs `body`, translating exceptions into statuses + the thread-local
// message.  Every exported function funnels through here.
template <typename Fn>
aqb_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return AQB_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return AQB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return AQB_ERR_INTERNAL;
    }
}

aqb_status require(bool ok, const char* message) {
    if (ok) return AQB_OK;
    g_last_error = message;
    return AQB_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct aqb_dataset {
    PipelineConfig config;
    Relation base;
    Relation augmenting;
    std::vector<EntityGroup> groups;
    CandidateSet candidates;
};

struct aqb_interval {
    BoundReport report;
};

namespace {

int effective_cap(const aqb_dataset* ds, int requested) {
    if (requested > 0) return requested;
    switch (ds->config.cap.mode) {
        case CapMode::Explicit: return ds->config.cap.value;
        case CapMode::Percentile:
            return percentile_cap(ds->candidates, ds->config.cap.percentile);
        case CapMode::Unconstrained: return std::max(1, ds->candidates.group_count);
    }
    return 1;
}

}  // namespace

extern "C" {

const char* aqb_status_name(aqb_status status) {
    switch (status) {
        case AQB_OK: return "ok";
        case AQB_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case AQB_ERR_IO: return "io";
        case AQB_ERR_CSV_PARSE: return "csv_parse";
        case AQB_ERR_MISSING_COLUMN: return "missing_column";
        case AQB_ERR_DUPLICATE_BASE_ID: return "duplicate_base_id";
        case AQB_ERR_UNPARSEABLE_NUMBER: return "unparseable_number";
        case AQB_ERR_SCHEMA_VIOLATION: return "schema_violation";
        case AQB_ERR_QUERY_SYNTAX: return "query_syntax";
        case AQB_ERR_UNKNOWN_COLUMN: return "unknown_column";
        case AQB_ERR_NEGATIVE_VALUE: return "negative_value";
        case AQB_ERR_INFEASIBLE: return "infeasible";
        case AQB_ERR_TOO_LARGE: return "too_large";
        case AQB_ERR_ZERO_NOMINAL: return "zero_nominal";
        case AQB_ERR_UNDEFINED_AVERAGE: return "undefined_average";
        case AQB_ERR_NO_BOUNDING_CAP: return "no_bounding_cap";
        case AQB_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* aqb_last_error(void) { return g_last_error.c_str(); }

const char* aqb_version(void) { return "0.1.0"; }

void aqb_string_free(char* s) { std::free(s); }

aqb_status aqb_cmd_bound(const char* config_json, char** out_json) {
    aqb_status pre = require(config_json && out_json, "aqb_cmd_bound: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        BoundReport report =
            run_bound(PipelineConfig::from_json_text(config_json, "config"));
        *out_json = dup_string(report.to_json());
    });
}

aqb_status aqb_cmd_oracle(const char* config_json, char** out_json) {
    aqb_status pre = require(config_json && out_json, "aqb_cmd_oracle: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        BoundReport report =
            run_oracle(PipelineConfig::from_json_text(config_json, "config"));
        *out_json = dup_string(report.to_json());
    });
}

aqb_status aqb_cmd_synth(const char* config_json, char** out_json) {
    aqb_status pre = require(config_json && out_json, "aqb_cmd_synth: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        SynthOutput out = run_synth(PipelineConfig::from_json_text(config_json, "config"));
        *out_json = dup_string(std::string("{\n  \"csv\": \"") + out.csv_path +
                               "\",\n  \"schema\": \"" + out.schema_path +
                               "\",\n  \"truth\": \"" + out.truth_path + "\"\n}\n");
    });
}

aqb_status aqb_cmd_eval(const char* config_json, char** out_json) {
    aqb_status pre = require(config_json && out_json, "aqb_cmd_eval: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        EvalOutput out = run_eval(PipelineConfig::from_json_text(config_json, "config"));
        *out_json = dup_string(out.summary_json);
    });
}

aqb_status aqb_dataset_open(const char* config_json, aqb_dataset** out) {
    aqb_status pre = require(config_json && out, "aqb_dataset_open: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        auto ds = std::make_unique<aqb_dataset>();
        ds->config = PipelineConfig::from_json_text(config_json, "config");
        ds->base = load_relation(ds->config.base_csv,
                                 RelationSchema::from_json_file(ds->config.base_schema));
        ds->augmenting =
            load_relation(ds->config.augmenting_csv,
                          RelationSchema::from_json_file(ds->config.augmenting_schema));
        ds->groups = group_augmenting(ds->augmenting);
        if (!ds->config.candidates_csv.empty()) {
            ScoreKind kind = ds->config.similarity &&
                                     ds->config.similarity->metric == SimilarityMetric::EditDistance
                                 ? ScoreKind::Distance
                                 : ScoreKind::Similarity;
            ds->candidates =
                read_candidates_csv(ds->config.candidates_csv, ds->base, ds->groups, kind);
        } else {
            if (!ds->config.similarity)
                fail(ErrorCode::InvalidArgument,
                     "config: 'similarity' is required unless candidates_csv is given");
            ds->candidates = build_candidate_set(ds->base, ds->augmenting, ds->groups,
                                                 *ds->config.similarity, ds->config.blocking);
        }
        *out = ds.release();
    });
}

void aqb_dataset_free(aqb_dataset* dataset) { delete dataset; }

aqb_status aqb_dataset_rows(const aqb_dataset* dataset, int* base_rows, int* groups,
                            long long* candidate_edges) {
    aqb_status pre = require(dataset != nullptr, "aqb_dataset_rows: null dataset");
    if (pre != AQB_OK) return pre;
    if (base_rows) *base_rows = dataset->candidates.base_count;
    if (groups) *groups = dataset->candidates.group_count;
    if (candidate_edges) *candidate_edges = static_cast<long long>(dataset->candidates.edges.size());
    return AQB_OK;
}

aqb_status aqb_dataset_skew(const aqb_dataset* dataset, double* out) {
    aqb_status pre = require(dataset && out, "aqb_dataset_skew: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] { *out = skew(dataset->candidates); });
}

aqb_status aqb_dataset_percentile_cap(const aqb_dataset* dataset, double percentile, int* out) {
    aqb_status pre = require(dataset && out, "aqb_dataset_percentile_cap: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] { *out = percentile_cap(dataset->candidates, percentile); });
}

aqb_status aqb_dataset_export_candidates(const aqb_dataset* dataset, const char* csv_path) {
    aqb_status pre = require(dataset && csv_path, "aqb_dataset_export_candidates: null argument");
    if (pre != AQB_OK) return pre;
    return guarded(
        [&] { write_candidates_csv(dataset->candidates, dataset->base, dataset->groups, csv_path); });
}

aqb_status aqb_bound(const aqb_dataset* dataset, const char* query, const char* method, int cap,
                     aqb_interval** out) {
    aqb_status pre = require(dataset && query && method && out, "aqb_bound: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        AggregateQuery parsed = parse_query(query, dataset->base, dataset->augmenting);
        int n = effective_cap(dataset, cap);
        auto iv = std::make_unique<aqb_interval>();
        iv->report.query_text = query;
        iv->report.method = method;
        iv->report.cap = n;
        std::string name = method;
        if (name == "ga" || name == "ga_c") {
            ResultInterval r = result_interval(parsed, dataset->base, dataset->augmenting,
                                               dataset->groups, dataset->candidates, n);
            iv->report.lower = r.lower;
            iv->report.upper = r.upper;
            iv->report.diagnostics = r.diagnostics;
        } else if (name == "max_sum" || name == "max_sum_c") {
            if (parsed.agg == AggregateKind::Avg)
                fail(ErrorCode::InvalidArgument,
                     "the max-sum estimators define SUM and COUNT bounds only");
            AssignmentProblem problem = build_query_problem(
                parsed, dataset->base, dataset->augmenting, dataset->groups, dataset->candidates, n);
            auto [lo, up] =
                name == "max_sum" ? max_sum_bounds(problem) : max_sum_constrained_bounds(problem);
            iv->report.lower = lo;
            iv->report.upper = up;
        } else {
            fail(ErrorCode::InvalidArgument, "aqb_bound: unknown method '" + name + "'");
        }
        *out = iv.release();
    });
}

aqb_status aqb_oracle(const aqb_dataset* dataset, const char* query, int cap, aqb_interval** out) {
    aqb_status pre = require(dataset && query && out, "aqb_oracle: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] {
        AggregateQuery parsed = parse_query(query, dataset->base, dataset->augmenting);
        AggregateQuery solve_query = parsed;
        if (parsed.agg == AggregateKind::Avg) solve_query.agg = AggregateKind::Sum;
        int n = effective_cap(dataset, cap);
        AssignmentProblem problem = build_query_problem(
            solve_query, dataset->base, dataset->augmenting, dataset->groups, dataset->candidates, n);
        BruteForceBounds bf = brute_force_bounds(problem);

        auto iv = std::make_unique<aqb_interval>();
        iv->report.query_text = query;
        iv->report.method = "oracle";
        iv->report.cap = n;
        iv->report.upper = bf.upper;
        iv->report.lower = bf.lower;
        iv->report.diagnostics.cap_used = n;
        iv->report.diagnostics.feasible_min = bf.lower.has_value();
        if (parsed.agg == AggregateKind::Avg) {
            int d = 0;
            std::vector<char> positive(dataset->groups.size(), 0);
            for (const auto& e : problem.edges)
                if (e.weight > 0) positive[e.group] = 1;
            for (char p : positive) d += p;
            auto [l_avg, u_avg] =
                avg_bounds(iv->report.lower.value_or(0.0), *iv->report.upper,
                           dataset->candidates.base_count, dataset->candidates.group_count, n, d);
            iv->report.upper = u_avg;
            if (iv->report.lower) iv->report.lower = l_avg;
        }
        *out = iv.release();
    });
}

int aqb_interval_has_lower(const aqb_interval* interval) {
    return interval && interval->report.lower ? 1 : 0;
}

double aqb_interval_lower(const aqb_interval* interval) {
    return interval && interval->report.lower ? *interval->report.lower : 0.0;
}

double aqb_interval_upper(const aqb_interval* interval) {
    return interval && interval->report.upper ? *interval->report.upper : 0.0;
}

int aqb_interval_cap(const aqb_interval* interval) { return interval ? interval->report.cap : 0; }

aqb_status aqb_interval_json(const aqb_interval* interval, char** out_json) {
    aqb_status pre = require(interval && out_json, "aqb_interval_json: null argument");
    if (pre != AQB_OK) return pre;
    return guarded([&] { *out_json = dup_string(interval->report.to_json()); });
}

void aqb_interval_free(aqb_interval* interval) { delete interval; }

}  // extern "C"
