#include "aqbound/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "aqbound/baselines.hpp"
#include "aqbound/csv.hpp"
#include "aqbound/errors.hpp"
#include "aqbound/rng.hpp"
#include "aqbound/similarity.hpp"

namespace aqb {

std::string method_name(Method method) {
    switch (method) {
        case Method::MaxSum: return "max_sum";
        case Method::MaxSumC: return "max_sum_c";
        case Method::Ga: return "ga";
        case Method::GaC: return "ga_c";
        case Method::GaStar: return "ga_star";
    }
    fail(ErrorCode::Internal, "method_name: bad enum value");
}

Method method_from_name(const std::string& name) {
    if (name == "max_sum") return Method::MaxSum;
    if (name == "max_sum_c") return Method::MaxSumC;
    if (name == "ga") return Method::Ga;
    if (name == "ga_c") return Method::GaC;
    if (name == "ga_star") return Method::GaStar;
    fail(ErrorCode::InvalidArgument,
         "unknown method '" + name + "' (expected max_sum, max_sum_c, ga, ga_c or ga_star)");
}

EvalDataset assemble_dataset(Relation base, Relation augmenting, Matching truth,
                             const SimilarityConfig& similarity, const BlockingConfig& blocking) {
    EvalDataset ds;
    ds.base = std::move(base);
    ds.augmenting = std::move(augmenting);
    ds.truth = std::move(truth);
    ds.groups = group_augmenting(ds.augmenting);
    ds.candidates = build_candidate_set(ds.base, ds.augmenting, ds.groups, similarity, blocking);
    return ds;
}

namespace {

// A cap this large never binds: no base row can receive more groups than exist.
int permissive_cap(const CandidateSet& candidates) {
    return std::max(1, candidates.group_count);
}

int max_candidate_degree(const CandidateSet& candidates) {
    int best = 1;
    for (int d : match_degrees(candidates)) best = std::max(best, d);
    return best;
}

struct Interval {
    std::optional<double> lower;
    double upper = 0.0;
    int cap = 0;
};

Interval interval_for(const EvalDataset& ds, const AggregateQuery& query, Method method, int cap,
                      double truth_value) {
    Interval out;
    out.cap = cap;
    switch (method) {
        case Method::Ga:
        case Method::GaC: {
            ResultInterval r =
                result_interval(query, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
            out.lower = r.lower;
            out.upper = *r.upper;
            return out;
        }
        case Method::GaStar: {
            GaStarResult r = ga_star(ds, query, truth_value);
            out.cap = r.cap;
            out.lower = r.lower;
            out.upper = r.upper;
            return out;
        }
        case Method::MaxSum:
        case Method::MaxSumC: {
            if (query.agg == AggregateKind::Avg)
                fail(ErrorCode::InvalidArgument,
                     "the max-sum estimators define SUM and COUNT bounds only");
            AssignmentProblem problem = build_query_problem(query, ds.base, ds.augmenting,
                                                            ds.groups, ds.candidates, cap);
            auto [lo, up] = method == Method::MaxSum ? max_sum_bounds(problem)
                                                     : max_sum_constrained_bounds(problem);
            out.lower = lo;
            out.upper = up;
            return out;
        }
    }
    fail(ErrorCode::Internal, "interval_for: bad method enum");
}

}  // namespace

std::vector<EvalRecord> run_workload(const EvalDataset& dataset,
                                     const std::vector<std::string>& queries,
                                     const std::vector<Method>& methods,
                                     const WorkloadOptions& options) {
    int capped_n = options.explicit_cap
                       ? *options.explicit_cap
                       : percentile_cap(dataset.candidates, options.percentile);
    int open_n = permissive_cap(dataset.candidates);

    std::vector<EvalRecord> records;
    records.reserve(queries.size() * methods.size());
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        AggregateQuery query;
        double truth_value = 0.0;
        std::string query_error;
        try {
            query = parse_query(queries[qi], dataset.base, dataset.augmenting);
            truth_value = nominal_result(query, dataset.base, dataset.augmenting, dataset.groups,
                                         dataset.truth);
        } catch (const Error& e) {
            query_error = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        if (!query_error.empty()) {
            // The query itself is unusable: one errored record per method.
            for (Method method : methods) {
                EvalRecord rec;
                rec.query_id = static_cast<int>(qi);
                rec.query_text = queries[qi];
                rec.method = method;
                rec.error = query_error;
                records.push_back(std::move(rec));
            }
            continue;
        }
        for (Method method : methods) {
            EvalRecord rec;
            rec.query_id = static_cast<int>(qi);
            rec.query_text = queries[qi];
            rec.method = method;
            rec.truth_value = truth_value;
            int cap = (method == Method::MaxSumC || method == Method::GaC) ? capped_n : open_n;
            auto start = std::chrono::steady_clock::now();
            try {
                Interval iv = interval_for(dataset, query, method, cap, truth_value);
                rec.cap = iv.cap;
                rec.lower = iv.lower;
                rec.upper = iv.upper;
                rec.bounded = iv.lower && *iv.lower <= truth_value && truth_value <= iv.upper;
                if (iv.lower && truth_value != 0)
                    rec.tightness = (iv.upper - *iv.lower) / truth_value;
            } catch (const Error& e) {
                rec.cap = cap;
                rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
            }
            rec.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<std::string> random_queries(const EvalDataset& dataset, int count, QueryKind kind,
                                        uint64_t seed) {
    if (count < 0) fail(ErrorCode::InvalidArgument, "random_queries: negative count");
    std::vector<std::string> queries;
    if (count == 0) return queries;

    const Relation& aug = dataset.augmenting;
    Rng rng(seed);

    if (kind == QueryKind::KeywordSum) {
        if (aug.schema.id_attrs.empty() || aug.schema.measure_attrs.empty())
            fail(ErrorCode::InvalidArgument,
                 "random_queries: augmenting relation needs id and measure attrs");
        const std::string& text_attr = aug.schema.id_attrs.front();
        const std::string& measure = aug.schema.measure_attrs.front();
        int col = aug.column_index(text_attr);

        // Tokens weighted by document frequency, in first-appearance order so
        // the draw stream is stable.
        std::vector<std::string> tokens;
        std::vector<double> weights;
        std::map<std::string, size_t> token_slot;
        for (size_t r = 0; r < aug.row_count; ++r) {
            for (const std::string& t : token_set(aug.text_at(r, col))) {
                auto [it, fresh] = token_slot.try_emplace(t, tokens.size());
                if (fresh) {
                    tokens.push_back(t);
                    weights.push_back(0.0);
                }
                weights[it->second] += 1.0;
            }
        }
        if (tokens.empty())
            fail(ErrorCode::InvalidArgument, "random_queries: no tokens in '" + text_attr + "'");
        for (int i = 0; i < count; ++i) {
            const std::string& tok = tokens[rng.weighted_index(weights)];
            queries.push_back("SELECT SUM(aug." + measure + ") WHERE aug." + text_attr +
                              " CONTAINS '" + tok + "'");
        }
        return queries;
    }

    // YearCount: threshold counts over the first augmenting numeric column.
    std::string num_attr;
    for (const Column& c : aug.columns)
        if (c.kind == ColumnKind::Number) {
            num_attr = c.name;
            break;
        }
    if (num_attr.empty())
        fail(ErrorCode::InvalidArgument, "random_queries: augmenting relation has no numeric column");
    int col = aug.column_index(num_attr);
    double lo = 0, hi = 0;
    if (aug.row_count > 0) {
        lo = hi = aug.num_at(0, col);
        for (size_t r = 1; r < aug.row_count; ++r) {
            lo = std::min(lo, aug.num_at(r, col));
            hi = std::max(hi, aug.num_at(r, col));
        }
    }
    for (int i = 0; i < count; ++i) {
        int64_t threshold = rng.uniform_int(static_cast<int64_t>(std::floor(lo)),
                                            static_cast<int64_t>(std::ceil(hi)));
        queries.push_back("SELECT COUNT(1) WHERE aug." + num_attr +
                          " >= " + std::to_string(threshold));
    }
    return queries;
}

GaStarResult ga_star(const EvalDataset& dataset, const AggregateQuery& query, double truth_value) {
    int top = max_candidate_degree(dataset.candidates);
    std::optional<GaStarResult> best;
    for (int cap = 1; cap <= top; ++cap) {
        ResultInterval r = result_interval(query, dataset.base, dataset.augmenting, dataset.groups,
                                           dataset.candidates, cap);
        if (!r.lower) continue;
        if (!(*r.lower <= truth_value && truth_value <= *r.upper)) continue;
        double len = *r.upper - *r.lower;
        if (!best || len < best->upper - best->lower)
            best = GaStarResult{cap, *r.lower, *r.upper};
    }
    if (!best)
        fail(ErrorCode::NoBoundingCap,
             "no cap in [1, " + std::to_string(top) + "] yields an interval containing " +
                 format_number(truth_value));
    return *best;
}

std::vector<SweepPoint> sweep_constraint(const EvalDataset& dataset, const AggregateQuery& query,
                                         int cap_lo, int cap_hi, double truth_value) {
    if (cap_lo < 1 || cap_lo > cap_hi)
        fail(ErrorCode::InvalidArgument, "sweep_constraint: bad cap range");
    std::vector<SweepPoint> points;
    for (int cap = cap_lo; cap <= cap_hi; ++cap) {
        ResultInterval r = result_interval(query, dataset.base, dataset.augmenting, dataset.groups,
                                           dataset.candidates, cap);
        SweepPoint p;
        p.cap = cap;
        p.lower = r.lower;
        p.upper = *r.upper;
        p.bounded = r.lower && *r.lower <= truth_value && truth_value <= *r.upper;
        points.push_back(p);
    }
    return points;
}

void write_records_csv(const std::vector<EvalRecord>& records, const std::string& path) {
    CsvTable table;
    table.header = {"query_id", "method",    "N",       "l",     "u",
                    "truth",    "tightness", "bounded", "wall_time_ms", "error"};
    for (const EvalRecord& r : records) {
        CsvRow row;
        row.push_back(std::to_string(r.query_id));
        row.push_back(method_name(r.method));
        row.push_back(std::to_string(r.cap));
        row.push_back(r.lower ? format_number(*r.lower) : "");
        row.push_back(r.error.empty() ? format_number(r.upper) : "");
        row.push_back(format_number(r.truth_value));
        row.push_back(r.tightness ? format_number(*r.tightness) : "");
        row.push_back(r.bounded ? "true" : "false");
        row.push_back(format_number(r.wall_ms));
        row.push_back(r.error);
        table.rows.push_back(std::move(row));
    }
    write_csv_file(table, path);
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
    CsvTable table;
    table.header = {"N", "l", "u", "length", "bounded"};
    for (const SweepPoint& p : points) {
        CsvRow row;
        row.push_back(std::to_string(p.cap));
        row.push_back(p.lower ? format_number(*p.lower) : "");
        row.push_back(format_number(p.upper));
        row.push_back(p.length() ? format_number(*p.length()) : "");
        row.push_back(p.bounded ? "true" : "false");
        table.rows.push_back(std::move(row));
    }
    write_csv_file(table, path);
}

std::string summarize_records_json(const std::vector<EvalRecord>& records) {
    struct Tally {
        int total = 0;
        int failed_to_bound = 0;
        int errors = 0;
        double tightness_sum = 0;
        int tightness_n = 0;
        double wall_ms_sum = 0;
    };
    std::map<std::string, Tally> by_method;
    for (const EvalRecord& r : records) {
        Tally& t = by_method[method_name(r.method)];
        ++t.total;
        if (!r.error.empty()) ++t.errors;
        else if (!r.bounded) ++t.failed_to_bound;
        if (r.tightness) {
            t.tightness_sum += *r.tightness;
            ++t.tightness_n;
        }
        t.wall_ms_sum += r.wall_ms;
    }

    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, t] : by_method) {
        nlohmann::json m;
        m["records"] = t.total;
        m["errors"] = t.errors;
        m["failure_to_bound_rate"] =
            t.total > 0 ? static_cast<double>(t.failed_to_bound + t.errors) / t.total : 0.0;
        if (t.tightness_n > 0) m["mean_tightness"] = t.tightness_sum / t.tightness_n;
        m["total_wall_ms"] = t.wall_ms_sum;
        out[name] = std::move(m);
    }
    return out.dump(2) + "\n";
}

namespace {

std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> rank(xs.size(), 0.0);
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = shared;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        fail(ErrorCode::InvalidArgument, "spearman: length mismatch");
    size_t n = xs.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rx = ranks(xs), ry = ranks(ys);
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double cov = 0, vx = 0, vy = 0;
    for (size_t i = 0; i < n; ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0 || vy == 0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(vx * vy);
}

}  // namespace aqb
