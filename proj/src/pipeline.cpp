#include "aqbound/pipeline.hpp"

#include <chrono>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "aqbound/assignment.hpp"
#include "aqbound/baselines.hpp"
#include "aqbound/csv.hpp"
#include "aqbound/errors.hpp"

namespace aqb {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& source, const std::string& message) {
    fail(ErrorCode::InvalidArgument, source + ": " + message);
}

std::string require_string(const json& j, const char* key, const std::string& source) {
    if (!j.contains(key) || !j[key].is_string())
        config_error(source, std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

SimilarityConfig parse_similarity(const json& j, const std::string& source) {
    SimilarityConfig sim;
    sim.metric = similarity_metric_from_name(require_string(j, "metric", source));
    if (!j.contains("threshold") || !j["threshold"].is_number())
        config_error(source, "similarity needs a numeric 'threshold'");
    sim.threshold = j["threshold"].get<double>();
    sim.base_attr = require_string(j, "base_attr", source);
    sim.aug_attr = require_string(j, "aug_attr", source);
    return sim;
}

CapConfig parse_cap(const json& j, const std::string& source) {
    CapConfig cap;
    std::string mode = require_string(j, "mode", source);
    if (mode == "explicit") {
        cap.mode = CapMode::Explicit;
        if (!j.contains("value") || !j["value"].is_number_integer())
            config_error(source, "cap mode 'explicit' needs an integer 'value'");
        cap.value = j["value"].get<int>();
        if (cap.value < 1) config_error(source, "cap value must be >= 1");
    } else if (mode == "percentile") {
        cap.mode = CapMode::Percentile;
        if (j.contains("percentile")) {
            if (!j["percentile"].is_number())
                config_error(source, "cap 'percentile' must be a number");
            cap.percentile = j["percentile"].get<double>();
        }
        if (!(cap.percentile > 0 && cap.percentile <= 1))
            config_error(source, "cap percentile must be in (0, 1]");
    } else if (mode == "unconstrained") {
        cap.mode = CapMode::Unconstrained;
    } else {
        config_error(source, "cap mode must be explicit, percentile or unconstrained");
    }
    return cap;
}

SynthConfig parse_synth(const json& j, uint64_t default_seed, const std::string& source) {
    SynthConfig s;
    s.seed = default_seed;
    if (j.contains("n_max")) s.n_max = j["n_max"].get<int>();
    if (j.contains("mode")) {
        std::string mode = j["mode"].get<std::string>();
        if (mode == "balanced") s.mode = SynthMode::Balanced;
        else if (mode == "skewed") s.mode = SynthMode::Skewed;
        else config_error(source, "synth mode must be balanced or skewed");
    }
    if (j.contains("typo_min")) s.typo_min = j["typo_min"].get<int>();
    if (j.contains("typo_max")) s.typo_max = j["typo_max"].get<int>();
    if (j.contains("value_min")) s.value_min = j["value_min"].get<double>();
    if (j.contains("value_max")) s.value_max = j["value_max"].get<double>();
    if (j.contains("integer_values")) s.integer_values = j["integer_values"].get<bool>();
    if (j.contains("seed")) s.seed = j["seed"].get<uint64_t>();
    if (j.contains("id_column")) s.id_column = j["id_column"].get<std::string>();
    if (j.contains("aug_name")) s.aug_name = j["aug_name"].get<std::string>();
    if (j.contains("value_column")) s.value_column = j["value_column"].get<std::string>();
    s.validate();
    return s;
}

EvalSection parse_eval(const json& j, const std::string& source) {
    EvalSection e;
    e.present = true;
    if (j.contains("queries")) {
        if (!j["queries"].is_array()) config_error(source, "eval 'queries' must be an array");
        for (const auto& q : j["queries"]) e.queries.push_back(q.get<std::string>());
    }
    if (j.contains("query_count")) e.query_count = j["query_count"].get<int>();
    if (j.contains("query_kind")) {
        std::string kind = j["query_kind"].get<std::string>();
        if (kind == "keyword_sum") e.query_kind = QueryKind::KeywordSum;
        else if (kind == "year_count") e.query_kind = QueryKind::YearCount;
        else config_error(source, "eval query_kind must be keyword_sum or year_count");
    }
    if (j.contains("methods")) {
        if (!j["methods"].is_array()) config_error(source, "eval 'methods' must be an array");
        for (const auto& m : j["methods"]) e.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (e.methods.empty())
        e.methods = {Method::MaxSum, Method::MaxSumC, Method::Ga, Method::GaC};
    return e;
}

struct LoadedData {
    Relation base;
    Relation augmenting;
    std::vector<EntityGroup> groups;
    CandidateSet candidates;
};

Relation load_side(const std::string& csv, const std::string& schema_path,
                   const std::string& what) {
    if (csv.empty() || schema_path.empty())
        fail(ErrorCode::InvalidArgument, "config: " + what + " csv/schema paths are required");
    return load_relation(csv, RelationSchema::from_json_file(schema_path));
}

LoadedData load_data(const PipelineConfig& cfg) {
    LoadedData data;
    data.base = load_side(cfg.base_csv, cfg.base_schema, "base");
    data.augmenting = load_side(cfg.augmenting_csv, cfg.augmenting_schema, "augmenting");
    data.groups = group_augmenting(data.augmenting);
    if (!cfg.candidates_csv.empty()) {
        ScoreKind kind = cfg.similarity && cfg.similarity->metric == SimilarityMetric::EditDistance
                             ? ScoreKind::Distance
                             : ScoreKind::Similarity;
        data.candidates =
            read_candidates_csv(cfg.candidates_csv, data.base, data.groups, kind);
    } else {
        if (!cfg.similarity)
            fail(ErrorCode::InvalidArgument,
                 "config: 'similarity' is required unless candidates_csv is given");
        data.candidates = build_candidate_set(data.base, data.augmenting, data.groups,
                                              *cfg.similarity, cfg.blocking);
    }
    return data;
}

int resolve_cap(const CapConfig& cap, const CandidateSet& candidates) {
    switch (cap.mode) {
        case CapMode::Explicit: return cap.value;
        case CapMode::Percentile: return percentile_cap(candidates, cap.percentile);
        case CapMode::Unconstrained: return std::max(1, candidates.group_count);
    }
    fail(ErrorCode::Internal, "resolve_cap: bad mode");
}

// Greedy nominal + relative error, both best-effort: a dataset can lack a
// usable nominal (zero result, undefined average) without poisoning the
// bounds.
void attach_nominal(BoundReport& report, const AggregateQuery& query, const LoadedData& data,
                    int cap) {
    try {
        Matching nominal = greedy_matching(data.candidates, cap);
        report.nominal =
            nominal_result(query, data.base, data.augmenting, data.groups, nominal);
        if (report.lower && report.upper)
            report.rel_error = relative_error(*report.lower, *report.upper, *report.nominal);
    } catch (const Error&) {
        // leave the optional fields empty
    }
}

void write_report(const BoundReport& report, const PipelineConfig& cfg, const char* filename) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    write_file_atomic(cfg.out_dir + "/" + filename, report.to_json());
}

json diagnostics_json(const IntervalDiagnostics& d) {
    return json{{"uncovered_groups", d.uncovered_groups},
                {"cap", d.cap_used},
                {"feasible_min", d.feasible_min},
                {"base_rows", d.base_rows},
                {"groups", d.group_count},
                {"candidate_edges", d.candidate_edges},
                {"positive_weight_groups", d.positive_weight_groups}};
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, source + ": bad JSON: " + e.what());
    }
    if (!j.is_object()) config_error(source, "config root must be an object");

    PipelineConfig cfg;
    if (j.contains("base")) {
        cfg.base_csv = require_string(j["base"], "csv", source);
        cfg.base_schema = require_string(j["base"], "schema", source);
    }
    if (j.contains("augmenting")) {
        cfg.augmenting_csv = require_string(j["augmenting"], "csv", source);
        cfg.augmenting_schema = require_string(j["augmenting"], "schema", source);
    }
    if (j.contains("similarity")) cfg.similarity = parse_similarity(j["similarity"], source);
    if (j.contains("blocking")) {
        cfg.blocking.enabled = true;
        cfg.blocking.base_attr = require_string(j["blocking"], "base_attr", source);
        cfg.blocking.aug_attr = require_string(j["blocking"], "aug_attr", source);
    }
    if (j.contains("cap")) cfg.cap = parse_cap(j["cap"], source);
    if (j.contains("query")) cfg.query = j["query"].get<std::string>();
    if (j.contains("method")) cfg.method = j["method"].get<std::string>();
    if (j.contains("candidates_csv")) cfg.candidates_csv = j["candidates_csv"].get<std::string>();
    if (j.contains("truth_csv")) cfg.truth_csv = j["truth_csv"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("synth")) {
        cfg.synth.present = true;
        cfg.synth.config = parse_synth(j["synth"], cfg.seed, source);
    }
    if (j.contains("eval")) cfg.eval = parse_eval(j["eval"], source);
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    return from_json_text(read_file(path), path);
}

std::string BoundReport::to_json() const {
    json j;
    j["query"] = query_text;
    j["method"] = method;
    j["cap"] = cap;
    j["l"] = lower ? json(*lower) : json(nullptr);
    j["u"] = upper ? json(*upper) : json(nullptr);
    j["nominal"] = nominal ? json(*nominal) : json(nullptr);
    j["relative_error"] = rel_error ? json(*rel_error) : json(nullptr);
    j["diagnostics"] = diagnostics_json(diagnostics);
    j["wall_ms"] = wall_ms;
    return j.dump(2) + "\n";
}

BoundReport run_bound(const PipelineConfig& cfg) {
    if (cfg.query.empty()) fail(ErrorCode::InvalidArgument, "config: no query given");
    LoadedData data = load_data(cfg);
    AggregateQuery query = parse_query(cfg.query, data.base, data.augmenting);
    int cap = resolve_cap(cfg.cap, data.candidates);

    BoundReport report;
    report.query_text = cfg.query;
    report.method = cfg.method;
    report.cap = cap;

    auto start = std::chrono::steady_clock::now();
    if (cfg.method == "ga" || cfg.method == "ga_c") {
        ResultInterval r =
            result_interval(query, data.base, data.augmenting, data.groups, data.candidates, cap);
        report.lower = r.lower;
        report.upper = r.upper;
        report.diagnostics = r.diagnostics;
    } else if (cfg.method == "ga_star") {
        if (cfg.truth_csv.empty())
            fail(ErrorCode::InvalidArgument, "config: ga_star needs truth_csv");
        Matching truth = read_matching_csv(cfg.truth_csv, data.base, data.groups);
        double truth_value =
            nominal_result(query, data.base, data.augmenting, data.groups, truth);
        EvalDataset ds{data.base, data.augmenting, data.groups, data.candidates, truth};
        GaStarResult r = ga_star(ds, query, truth_value);
        report.cap = r.cap;
        report.lower = r.lower;
        report.upper = r.upper;
        report.diagnostics.cap_used = r.cap;
    } else if (cfg.method == "max_sum" || cfg.method == "max_sum_c") {
        if (query.agg == AggregateKind::Avg)
            fail(ErrorCode::InvalidArgument,
                 "the max-sum estimators define SUM and COUNT bounds only");
        AssignmentProblem problem =
            build_query_problem(query, data.base, data.augmenting, data.groups, data.candidates,
                                cap);
        auto [lo, up] = cfg.method == "max_sum" ? max_sum_bounds(problem)
                                                : max_sum_constrained_bounds(problem);
        report.lower = lo;
        report.upper = up;
    } else {
        fail(ErrorCode::InvalidArgument, "config: unknown method '" + cfg.method + "'");
    }
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    attach_nominal(report, query, data, cap);
    write_report(report, cfg, "bound.json");
    return report;
}

BoundReport run_oracle(const PipelineConfig& cfg) {
    if (cfg.query.empty()) fail(ErrorCode::InvalidArgument, "config: no query given");
    LoadedData data = load_data(cfg);
    AggregateQuery query = parse_query(cfg.query, data.base, data.augmenting);
    int cap = resolve_cap(cfg.cap, data.candidates);

    AggregateQuery solve_query = query;
    if (query.agg == AggregateKind::Avg) solve_query.agg = AggregateKind::Sum;
    AssignmentProblem problem = build_query_problem(solve_query, data.base, data.augmenting,
                                                    data.groups, data.candidates, cap);

    BoundReport report;
    report.query_text = cfg.query;
    report.method = "oracle";
    report.cap = cap;
    report.diagnostics.cap_used = cap;
    report.diagnostics.base_rows = data.candidates.base_count;
    report.diagnostics.group_count = data.candidates.group_count;
    report.diagnostics.candidate_edges = static_cast<int64_t>(data.candidates.edges.size());

    std::vector<char> has_edge(data.groups.size(), 0), positive(data.groups.size(), 0);
    for (const auto& e : problem.edges) {
        has_edge[e.group] = 1;
        if (e.weight > 0) positive[e.group] = 1;
    }
    for (size_t g = 0; g < data.groups.size(); ++g) {
        if (!has_edge[g]) ++report.diagnostics.uncovered_groups;
        if (positive[g]) ++report.diagnostics.positive_weight_groups;
    }

    auto start = std::chrono::steady_clock::now();
    BruteForceBounds bf = brute_force_bounds(problem);
    report.upper = bf.upper;
    report.lower = bf.lower;
    report.diagnostics.feasible_min = bf.lower.has_value();
    if (query.agg == AggregateKind::Avg) {
        auto [l_avg, u_avg] =
            avg_bounds(report.lower.value_or(0.0), *report.upper, data.candidates.base_count,
                       data.candidates.group_count, cap, report.diagnostics.positive_weight_groups);
        report.upper = u_avg;
        if (report.lower) report.lower = l_avg;
    }
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    attach_nominal(report, query, data, cap);
    write_report(report, cfg, "oracle.json");
    return report;
}

SynthOutput run_synth(const PipelineConfig& cfg) {
    if (!cfg.synth.present) fail(ErrorCode::InvalidArgument, "config: no 'synth' section");
    if (cfg.out_dir.empty()) fail(ErrorCode::InvalidArgument, "config: synth needs out_dir");
    Relation base = load_side(cfg.base_csv, cfg.base_schema, "base");

    auto [augmenting, truth] = generate(base, cfg.synth.config);
    std::vector<EntityGroup> groups = group_augmenting(augmenting);

    std::filesystem::create_directories(cfg.out_dir);
    SynthOutput out;
    out.csv_path = cfg.out_dir + "/synthetic.csv";
    out.schema_path = cfg.out_dir + "/synthetic.schema.json";
    out.truth_path = cfg.out_dir + "/truth.csv";
    write_relation(augmenting, out.csv_path);
    write_file_atomic(out.schema_path, augmenting.schema.to_json_text());
    write_matching_csv(truth.matching, base, groups, out.truth_path);
    return out;
}

EvalOutput run_eval(const PipelineConfig& cfg) {
    if (!cfg.eval.present) fail(ErrorCode::InvalidArgument, "config: no 'eval' section");
    if (cfg.out_dir.empty()) fail(ErrorCode::InvalidArgument, "config: eval needs out_dir");
    if (cfg.truth_csv.empty()) fail(ErrorCode::InvalidArgument, "config: eval needs truth_csv");

    LoadedData data = load_data(cfg);
    Matching truth = read_matching_csv(cfg.truth_csv, data.base, data.groups);
    EvalDataset ds{std::move(data.base), std::move(data.augmenting), std::move(data.groups),
                   std::move(data.candidates), std::move(truth)};

    std::vector<std::string> queries = cfg.eval.queries;
    if (queries.empty() && cfg.eval.query_count > 0)
        queries = random_queries(ds, cfg.eval.query_count, cfg.eval.query_kind, cfg.seed);
    if (queries.empty()) fail(ErrorCode::InvalidArgument, "config: eval has no queries");

    WorkloadOptions options;
    if (cfg.cap.mode == CapMode::Explicit) options.explicit_cap = cfg.cap.value;
    else if (cfg.cap.mode == CapMode::Percentile) options.percentile = cfg.cap.percentile;

    std::vector<EvalRecord> records = run_workload(ds, queries, cfg.eval.methods, options);

    std::filesystem::create_directories(cfg.out_dir);
    EvalOutput out;
    out.records_path = cfg.out_dir + "/records.csv";
    out.summary_path = cfg.out_dir + "/summary.json";
    out.summary_json = summarize_records_json(records);
    write_records_csv(records, out.records_path);
    write_file_atomic(out.summary_path, out.summary_json);
    return out;
}

}  // namespace aqb
