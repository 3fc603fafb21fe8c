#pragma once

// Config-driven orchestration: load relations, build or import the candidate
// set, and run the bound / oracle / synth / eval commands.  This is the layer
// the C API and the CLI sit on.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqbound/eval.hpp"
#include "aqbound/query.hpp"
#include "aqbound/synth.hpp"

namespace aqb {

enum class CapMode { Explicit, Percentile, Unconstrained };

struct CapConfig {
    CapMode mode = CapMode::Percentile;
    int value = 0;             // Explicit
    double percentile = 0.75;  // Percentile
};

struct SynthSection {
    bool present = false;
    SynthConfig config;  // config.seed falls back to the pipeline seed
};

struct EvalSection {
    bool present = false;
    std::vector<std::string> queries;  // explicit texts win over random ones
    int query_count = 0;
    QueryKind query_kind = QueryKind::KeywordSum;
    std::vector<Method> methods;  // default: max_sum, max_sum_c, ga, ga_c
};

struct PipelineConfig {
    std::string base_csv, base_schema;
    std::string augmenting_csv, augmenting_schema;
    std::optional<SimilarityConfig> similarity;
    BlockingConfig blocking;
    CapConfig cap;
    std::string query;
    std::string method = "ga";
    std::string candidates_csv;  // import the candidate set instead of building it
    std::string truth_csv;       // ground-truth matching (eval, ga_star)
    std::string out_dir;
    uint64_t seed = 0;
    SynthSection synth;
    EvalSection eval;

    static PipelineConfig from_json_text(const std::string& text, const std::string& source);
    static PipelineConfig from_json_file(const std::string& path);
};

struct BoundReport {
    std::string query_text;
    std::string method;
    int cap = 0;
    std::optional<double> lower;  // empty: no full-coverage matching exists
    std::optional<double> upper;
    std::optional<double> nominal;    // aggregate under the greedy best-score matching
    std::optional<double> rel_error;  // (u - l) / nominal
    IntervalDiagnostics diagnostics;
    double wall_ms = 0.0;

    std::string to_json() const;
};

// Bounds via the configured method; writes <out_dir>/bound.json when out_dir
// is set.  An infeasible minimum is reported with a missing lower bound, not
// thrown.
BoundReport run_bound(const PipelineConfig& cfg);

// Same contract, but the interval comes from exhaustive enumeration.  Only
// viable for small fixtures (guarded); the reference the solver is checked
// against.
BoundReport run_oracle(const PipelineConfig& cfg);

struct SynthOutput {
    std::string csv_path, schema_path, truth_path;
};

// Generates the augmenting table for the configured base and writes
// synthetic.csv / synthetic.schema.json / truth.csv under out_dir.
SynthOutput run_synth(const PipelineConfig& cfg);

struct EvalOutput {
    std::string records_path, summary_path;
    std::string summary_json;
};

// Runs the configured workload and writes records.csv / summary.json under
// out_dir.
EvalOutput run_eval(const PipelineConfig& cfg);

}  // namespace aqb
