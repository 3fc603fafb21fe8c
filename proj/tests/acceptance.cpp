// End-to-end acceptance checks.  Each numbered check prints one [PASS]/[FAIL]
// line; the process exits nonzero if any check fails.  Everything here runs
// against public entry points (library, C API via the CLI binary) with fixed
// seeds, so a failure is reproducible by running the same binary again.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqbound/assignment.hpp"
#include "aqbound/baselines.hpp"
#include "aqbound/csv.hpp"
#include "aqbound/errors.hpp"
#include "aqbound/eval.hpp"
#include "aqbound/query.hpp"
#include "aqbound/relation.hpp"
#include "aqbound/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aqb;

// ---------------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------------

#define EXPECT(cond, msg)                                                             \
    do {                                                                              \
        if (!(cond))                                                                  \
            throw std::runtime_error(std::string(msg) + " (line " +                   \
                                     std::to_string(__LINE__) + ")");                 \
    } while (0)

namespace {

std::string fixture(const std::string& name) {
    return std::string(AQB_FIXTURE_DIR) + "/" + name;
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "aqb_acceptance";
    fs::create_directories(dir);
    return dir;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string("'") + AQB_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliResult result;
    char buf[8192];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_config(const std::string& name, const json& cfg) {
    fs::path path = scratch_dir() / name;
    write_file_atomic(path.string(), cfg.dump(2));
    return path.string();
}

json catalog_config() {
    json cfg;
    cfg["base"] = {{"csv", fixture("stargazer_base.csv")},
                   {"schema", fixture("stargazer_base.schema.json")}};
    cfg["augmenting"] = {{"csv", fixture("stargazer_aug.csv")},
                         {"schema", fixture("stargazer_aug.schema.json")}};
    cfg["similarity"] = {{"metric", "jaccard"},
                         {"threshold", 0.3},
                         {"base_attr", "Product_Name"},
                         {"aug_attr", "Product_Tag"}};
    cfg["cap"] = {{"mode", "explicit"}, {"value", 2}};
    cfg["query"] = "SELECT SUM(N_Complaints) WHERE Product_Name = 'StarGazer Premier Pro'";
    cfg["method"] = "ga";
    return cfg;
}

// Base rows whose ids are pairwise far apart in edit distance (a long random
// suffix), so distance-3 candidate generation links typo copies only to their
// source rows and candidate degrees equal true degrees.
Relation distinct_base(int rows, uint64_t seed) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 35);
    RelationSchema s;
    s.name = "items";
    s.role = RelationRole::Base;
    s.id_attrs = {"name"};
    s.columns = {{"name", ColumnKind::Text}};
    CsvTable t;
    t.header = {"name"};
    for (int i = 0; i < rows; ++i) {
        std::string suffix;
        for (int k = 0; k < 12; ++k) suffix.push_back(alphabet[pick(rng)]);
        char head[32];
        std::snprintf(head, sizeof head, "item %04d ", i);
        t.rows.push_back({std::string(head) + suffix});
    }
    return relation_from_csv(t, s, "acceptance");
}

EvalDataset synth_dataset(const Relation& base, const SynthConfig& cfg) {
    auto [aug, truth] = generate(base, cfg);
    SimilarityConfig sim;
    sim.metric = SimilarityMetric::EditDistance;
    sim.threshold = 3;
    sim.base_attr = "name";
    sim.aug_attr = "name";
    return assemble_dataset(base, std::move(aug), std::move(truth.matching), sim);
}

int permissive(const EvalDataset& ds) { return std::max(1, ds.candidates.group_count); }

double truth_of(const EvalDataset& ds, const AggregateQuery& q) {
    return nominal_result(q, ds.base, ds.augmenting, ds.groups, ds.truth);
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------------------
// the nine checks
// ---------------------------------------------------------------------------

// 1. The catalog example: Jaccard 0.3, cap 2, SUM of complaints for the
//    premium product -> exactly [33, 84], in under a second, through both the
//    library and the CLI.
void check_catalog_golden() {
    auto start = std::chrono::steady_clock::now();

    Relation base = load_relation(
        fixture("stargazer_base.csv"),
        RelationSchema::from_json_file(fixture("stargazer_base.schema.json")));
    Relation aug = load_relation(
        fixture("stargazer_aug.csv"),
        RelationSchema::from_json_file(fixture("stargazer_aug.schema.json")));
    std::vector<EntityGroup> groups = group_augmenting(aug);
    SimilarityConfig sim;
    sim.metric = SimilarityMetric::Jaccard;
    sim.threshold = 0.3;
    sim.base_attr = "Product_Name";
    sim.aug_attr = "Product_Tag";
    CandidateSet cs = build_candidate_set(base, aug, groups, sim);
    AggregateQuery q = parse_query(
        "SELECT SUM(N_Complaints) WHERE Product_Name = 'StarGazer Premier Pro'", base, aug);
    ResultInterval iv = result_interval(q, base, aug, groups, cs, 2);
    EXPECT(iv.lower.has_value(), "library: lower bound missing");
    EXPECT(*iv.lower == 33.0, "library: lower != 33");
    EXPECT(*iv.upper == 84.0, "library: upper != 84");

    CliResult r = run_cli("bound --config '" + write_config("golden.json", catalog_config()) + "'");
    EXPECT(r.exit_code == 0, "cli exit code != 0: " + r.output);
    json report = json::parse(r.output);
    EXPECT(report["l"] == 33.0, "cli: l != 33");
    EXPECT(report["u"] == 84.0, "cli: u != 84");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(secs < 1.0, "took " + std::to_string(secs) + " s (budget 1 s)");
}

// 2. The range-propagation baseline on the unfiltered total-complaints query:
//    per-row with the in-degree cap at 1 -> exactly [55, 119]; the
//    uncapped variant double-counts shared tags up to 221.
void check_baseline_golden() {
    auto start = std::chrono::steady_clock::now();

    Relation base = load_relation(
        fixture("stargazer_base.csv"),
        RelationSchema::from_json_file(fixture("stargazer_base.schema.json")));
    Relation aug = load_relation(
        fixture("stargazer_aug.csv"),
        RelationSchema::from_json_file(fixture("stargazer_aug.schema.json")));
    std::vector<EntityGroup> groups = group_augmenting(aug);
    SimilarityConfig sim;
    sim.metric = SimilarityMetric::Jaccard;
    sim.threshold = 0.3;
    sim.base_attr = "Product_Name";
    sim.aug_attr = "Product_Tag";
    CandidateSet cs = build_candidate_set(base, aug, groups, sim);
    AggregateQuery q = parse_query("SELECT SUM(N_Complaints) WHERE TRUE", base, aug);

    AssignmentProblem problem = build_query_problem(q, base, aug, groups, cs, 1);
    auto [l_c, u_c] = max_sum_constrained_bounds(problem);
    EXPECT(l_c == 55.0, "capped baseline: lower != 55");
    EXPECT(u_c == 119.0, "capped baseline: upper != 119");
    auto [l_u, u_u] = max_sum_bounds(problem);
    EXPECT(l_u == 55.0, "uncapped baseline: lower != 55");
    EXPECT(u_u == 221.0, "uncapped baseline: upper != 221");

    CliResult r = run_cli("bound --config '" + write_config("golden.json", catalog_config()) +
                          "' --method max_sum_c --cap 1 --query "
                          "\"SELECT SUM(N_Complaints) WHERE TRUE\"");
    EXPECT(r.exit_code == 0, "cli exit code != 0: " + r.output);
    json report = json::parse(r.output);
    EXPECT(report["l"] == 55.0, "cli: l != 55");
    EXPECT(report["u"] == 119.0, "cli: u != 119");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(secs < 1.0, "took " + std::to_string(secs) + " s (budget 1 s)");
}

// 3. Solver vs exhaustive enumeration on 200 seeded random instances
//    (|R| <= 5, groups <= 7, cap <= 3, integer weights 0-9): totals and
//    assignment vectors must agree exactly on every instance, within 60 s.
void check_oracle_equivalence() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> bases(1, 5);
    std::uniform_int_distribution<int> groups(1, 7);
    std::uniform_int_distribution<int> caps(1, 3);
    std::uniform_real_distribution<double> density(0.15, 0.9);
    std::uniform_int_distribution<int> weight(0, 9);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    int agreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
        AssignmentProblem p;
        p.base_count = bases(rng);
        p.group_count = groups(rng);
        p.cap = caps(rng);
        double d = density(rng);
        for (int b = 0; b < p.base_count; ++b)
            for (int g = 0; g < p.group_count; ++g)
                if (coin(rng) < d) p.edges.push_back({b, g, static_cast<double>(weight(rng))});

        BruteForceBounds oracle = brute_force_bounds(p);
        Assignment max = solve_max(p);
        bool ok = max.total_weight == oracle.upper &&
                  max.assigned_base == oracle.max_assignment.assigned_base;
        if (oracle.lower.has_value()) {
            Assignment min = solve_min(p);
            ok = ok && min.total_weight == *oracle.lower &&
                 min.assigned_base == oracle.min_assignment->assigned_base;
        } else {
            try {
                solve_min(p);
                ok = false;
            } catch (const Error& e) {
                ok = ok && e.code() == ErrorCode::Infeasible;
            }
        }
        if (ok) ++agreements;
        else EXPECT(false, "instance " + std::to_string(trial) + " disagrees with the oracle");
    }
    EXPECT(agreements == 200, "only " + std::to_string(agreements) + "/200 agreed");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(secs < 60.0, "took " + std::to_string(secs) + " s (budget 60 s)");
}

// Shared by checks 4 and 5: 100 synthetic datasets, half balanced and half
// skewed, degrees up to 4, candidates from the generator's own typo budget so
// the true matching is always inside the candidate set.
std::vector<EvalDataset> containment_family() {
    std::vector<EvalDataset> family;
    family.reserve(100);
    for (int i = 0; i < 100; ++i) {
        Relation base = distinct_base(10 + i % 16, 9100 + i);
        SynthConfig cfg;
        cfg.n_max = 1 + i % 4;
        cfg.mode = i < 50 ? SynthMode::Balanced : SynthMode::Skewed;
        cfg.seed = 9000 + i;
        EvalDataset ds = synth_dataset(base, cfg);
        for (const auto& p : ds.truth.pairs)
            EXPECT(ds.candidates.has_edge(p.base_row, p.group),
                   "dataset " + std::to_string(i) + ": true pair missing from candidates");
        family.push_back(std::move(ds));
    }
    return family;
}

// 4. Soundness under containment: with the true matching inside the candidate
//    set and a permissive cap, the interval must contain the true aggregate
//    for every SUM and COUNT query: 100/100 each, exact comparisons.
void check_containment(const std::vector<EvalDataset>& family) {
    int sum_ok = 0, count_ok = 0;
    for (size_t i = 0; i < family.size(); ++i) {
        const EvalDataset& ds = family[i];
        int cap = permissive(ds);

        std::string sum_text =
            i % 2 == 0 ? "SELECT SUM(value) WHERE TRUE"
                       : random_queries(ds, 1, QueryKind::KeywordSum, 9300 + i)[0];
        AggregateQuery sum_q = parse_query(sum_text, ds.base, ds.augmenting);
        double sum_truth = truth_of(ds, sum_q);
        ResultInterval sum_iv =
            result_interval(sum_q, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
        EXPECT(sum_iv.lower.has_value(),
               "dataset " + std::to_string(i) + ": SUM lower infeasible at permissive cap");
        if (*sum_iv.lower <= sum_truth && sum_truth <= *sum_iv.upper) ++sum_ok;

        std::string count_text =
            i % 2 == 0 ? "SELECT COUNT(1) WHERE TRUE"
                       : random_queries(ds, 1, QueryKind::YearCount, 9400 + i)[0];
        AggregateQuery count_q = parse_query(count_text, ds.base, ds.augmenting);
        double count_truth = truth_of(ds, count_q);
        ResultInterval count_iv =
            result_interval(count_q, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
        EXPECT(count_iv.lower.has_value(),
               "dataset " + std::to_string(i) + ": COUNT lower infeasible at permissive cap");
        if (*count_iv.lower <= count_truth && count_truth <= *count_iv.upper) ++count_ok;
    }
    EXPECT(sum_ok == 100, "SUM contained in only " + std::to_string(sum_ok) + "/100");
    EXPECT(count_ok == 100, "COUNT contained in only " + std::to_string(count_ok) + "/100");
}

// 5. The AVG quotient bounds sandwich the true average on the same hundred
//    datasets, 100/100, exact.
void check_avg_sandwich(const std::vector<EvalDataset>& family) {
    int ok = 0;
    for (size_t i = 0; i < family.size(); ++i) {
        const EvalDataset& ds = family[i];
        int cap = permissive(ds);

        std::string text = "SELECT AVG(value) WHERE TRUE";
        if (i % 2 == 1) {
            // Threshold drawn from the data so at least one group qualifies.
            double v0 = ds.augmenting.num_at(0, ds.augmenting.column_index("value"));
            text = "SELECT AVG(value) WHERE value >= " + format_number(v0);
        }
        AggregateQuery q = parse_query(text, ds.base, ds.augmenting);
        double truth = truth_of(ds, q);
        ResultInterval iv =
            result_interval(q, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
        EXPECT(iv.lower.has_value(),
               "dataset " + std::to_string(i) + ": AVG lower infeasible at permissive cap");
        if (*iv.lower <= truth && truth <= *iv.upper) ++ok;
    }
    EXPECT(ok == 100, "AVG sandwiched in only " + std::to_string(ok) + "/100");
}

// 6. Tightening the in-degree cap never lengthens the interval on any
//    instance, and the mean failure-to-bound rate only grows as the cap
//    shrinks (Spearman between cap and failure rate <= 0).
void check_cap_monotonicity() {
    const int kInstances = 50, kMaxCap = 6;
    std::vector<double> failures(kMaxCap, 0.0);

    for (int i = 0; i < kInstances; ++i) {
        Relation base = distinct_base(16 + i % 10, 6100 + i);
        SynthConfig cfg;
        cfg.n_max = 4;
        cfg.mode = SynthMode::Skewed;
        cfg.seed = 6000 + i;
        EvalDataset ds = synth_dataset(base, cfg);
        // Extra false-positive edges give small caps room to stay feasible,
        // which makes the sweep informative below the max true degree.
        ds.candidates = corrupt_candidates(ds.candidates, ds.truth, 0.6, 0.0, 6200 + i);

        AggregateQuery q = parse_query("SELECT SUM(value) WHERE TRUE", ds.base, ds.augmenting);
        double truth = truth_of(ds, q);
        std::vector<SweepPoint> sweep = sweep_constraint(ds, q, 1, kMaxCap, truth);
        EXPECT(sweep.size() == static_cast<size_t>(kMaxCap), "sweep size mismatch");

        bool was_feasible = false;
        for (int n = 0; n < kMaxCap; ++n) {
            if (!sweep[n].bounded) failures[n] += 1.0;
            if (n > 0) {
                EXPECT(sweep[n].upper >= sweep[n - 1].upper,
                       "instance " + std::to_string(i) + ": upper shrank with a larger cap");
                if (sweep[n].lower && sweep[n - 1].lower) {
                    EXPECT(*sweep[n].lower <= *sweep[n - 1].lower,
                           "instance " + std::to_string(i) + ": lower grew with a larger cap");
                    EXPECT(*sweep[n].length() >= *sweep[n - 1].length(),
                           "instance " + std::to_string(i) + ": length shrank with a larger cap");
                }
            }
            if (was_feasible)
                EXPECT(sweep[n].lower.has_value(),
                       "instance " + std::to_string(i) + ": feasibility lost at a larger cap");
            was_feasible = sweep[n].lower.has_value();
        }
        EXPECT(sweep.back().bounded,
               "instance " + std::to_string(i) + ": unbounded at cap " + std::to_string(kMaxCap));
    }

    std::vector<double> caps;
    for (int n = 1; n <= kMaxCap; ++n) caps.push_back(n);
    for (double& f : failures) f /= kInstances;
    for (int n = 1; n < kMaxCap; ++n)
        EXPECT(failures[n] <= failures[n - 1], "mean failure rate rose with a larger cap");
    EXPECT(failures.front() > failures.back(), "sweep produced no failures to rank");
    double rho = spearman(caps, failures);
    EXPECT(rho <= 0.0, "Spearman(cap, failure rate) = " + std::to_string(rho) + " > 0");
}

// 7. Degree skew: concentrating false positives on one hub row sweeps the
//    skew ratio across {1, 2, 5, 10, 25}.  At every level the capped
//    assignment interval stays no longer than the baseline interval on
//    average, and the assignment upper never exceeds the baseline upper on
//    any single instance.
void check_skew_robustness() {
    const int kTrials = 50, kRows = 30;
    const int kHubExtra[] = {0, 1, 4, 9, 24};  // skew = 1 + extra

    for (int extra : kHubExtra) {
        std::vector<double> ga_c_lengths, baseline_lengths;
        for (int t = 0; t < kTrials; ++t) {
            Relation base = distinct_base(kRows, 7100 + t);
            SynthConfig cfg;
            cfg.n_max = 1;
            cfg.mode = SynthMode::Balanced;
            cfg.seed = 7000 + t;
            EvalDataset ds = synth_dataset(base, cfg);
            EXPECT(ds.candidates.edges.size() == static_cast<size_t>(kRows),
                   "trial " + std::to_string(t) + ": unexpected cross-row candidates");

            ds.candidates = corrupt_candidates(ds.candidates, ds.truth,
                                               static_cast<double>(extra) / kRows, 0.0,
                                               7900 + t, /*hub_rows=*/1);
            EXPECT(skew(ds.candidates) == 1.0 + extra, "skew level not hit exactly");

            AggregateQuery q = parse_query("SELECT SUM(value) WHERE TRUE", ds.base, ds.augmenting);
            int cap = percentile_cap(ds.candidates, 0.75);
            EXPECT(cap == 1, "percentile cap != 1 on a near-1-regular instance");

            ResultInterval capped =
                result_interval(q, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
            EXPECT(capped.lower.has_value(), "capped interval lost its lower bound");
            ga_c_lengths.push_back(*capped.upper - *capped.lower);

            AssignmentProblem problem =
                build_query_problem(q, ds.base, ds.augmenting, ds.groups, ds.candidates, cap);
            auto [bl, bu] = max_sum_bounds(problem);
            baseline_lengths.push_back(bu - bl);

            // Instance-level domination of the baseline upper.
            ResultInterval open = result_interval(q, ds.base, ds.augmenting, ds.groups,
                                                  ds.candidates, permissive(ds));
            EXPECT(*open.upper <= bu, "assignment upper exceeded the baseline upper");
        }
        EXPECT(mean(ga_c_lengths) <= mean(baseline_lengths),
               "capped intervals longer than baseline at skew " + std::to_string(1 + extra));
    }
}

// 8. Candidate-set noise: interval length is non-decreasing in the
//    false-positive rate (exactly, per instance, thanks to nested corruption
//    prefixes), and the failure-to-bound rate is non-decreasing in the
//    false-negative rate.
void check_noise_sensitivity() {
    const int kTrials = 40;
    const double kFpLevels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double kFnLevels[] = {0.0, 0.034, 0.067, 0.2, 0.5};

    // False positives: lengths grow.
    std::vector<std::vector<double>> lengths(5);
    for (int t = 0; t < kTrials; ++t) {
        Relation base = distinct_base(15, 8100 + t);
        SynthConfig cfg;
        cfg.n_max = 2;
        cfg.mode = SynthMode::Balanced;
        cfg.seed = 8000 + t;
        EvalDataset ds = synth_dataset(base, cfg);
        AggregateQuery q = parse_query("SELECT SUM(value) WHERE TRUE", ds.base, ds.augmenting);

        double prev = -1.0;
        for (int level = 0; level < 5; ++level) {
            EvalDataset noisy = ds;
            noisy.candidates =
                corrupt_candidates(ds.candidates, ds.truth, kFpLevels[level], 0.0, 8500 + t);
            ResultInterval iv = result_interval(q, noisy.base, noisy.augmenting, noisy.groups,
                                                noisy.candidates, permissive(noisy));
            EXPECT(iv.lower.has_value(), "false positives broke the lower bound");
            double len = *iv.upper - *iv.lower;
            EXPECT(len >= prev,
                   "trial " + std::to_string(t) + ": length shrank as false positives grew");
            prev = len;
            lengths[level].push_back(len);
        }
    }
    for (int level = 1; level < 5; ++level)
        EXPECT(mean(lengths[level]) >= mean(lengths[level - 1]),
               "mean interval length shrank as false positives grew");

    // False negatives: failures grow.  Values include zeros so that dropping
    // an edge only sometimes moves the aggregate, giving a graded curve.
    std::vector<double> failure(5, 0.0);
    for (int t = 0; t < kTrials; ++t) {
        Relation base = distinct_base(15, 8300 + t);
        SynthConfig cfg;
        cfg.n_max = 2;
        cfg.mode = SynthMode::Balanced;
        cfg.seed = 8200 + t;
        cfg.value_min = 0.0;
        cfg.value_max = 9.0;
        EvalDataset ds = synth_dataset(base, cfg);
        AggregateQuery q = parse_query("SELECT SUM(value) WHERE TRUE", ds.base, ds.augmenting);
        double truth = truth_of(ds, q);

        bool prev_failed = false;
        for (int level = 0; level < 5; ++level) {
            EvalDataset noisy = ds;
            noisy.candidates =
                corrupt_candidates(ds.candidates, ds.truth, 0.0, kFnLevels[level], 8600 + t);
            ResultInterval iv = result_interval(q, noisy.base, noisy.augmenting, noisy.groups,
                                                noisy.candidates, permissive(noisy));
            bool failed = !(iv.lower.has_value() && *iv.lower <= truth && truth <= *iv.upper);
            EXPECT(!prev_failed || failed,
                   "trial " + std::to_string(t) + ": failure vanished as more edges dropped");
            prev_failed = failed;
            if (failed) failure[level] += 1.0;
        }
    }
    for (double& f : failure) f /= kTrials;
    for (int level = 1; level < 5; ++level)
        EXPECT(failure[level] >= failure[level - 1],
               "failure rate fell as false negatives grew");
    EXPECT(failure.back() > failure.front(), "false-negative sweep never caused a failure");
}

// 9. Scale: 2,000 base rows, 10,000 augmenting rows, candidate degree 5 per
//    row, cap 3, through the CLI in under five minutes.  Total capacity
//    (2,000 x 3) cannot cover 10,000 single-candidate groups, so the honest
//    report is an exact upper bound with a null lower bound (exit code 2);
//    a second run at cap 5 is fully feasible and must pin both bounds to the
//    exact totals.
void check_scale() {
    fs::path dir = scratch_dir() / "scale";
    fs::create_directories(dir);

    Relation base = distinct_base(2000, 424242);
    {
        write_relation(base, (dir / "base.csv").string());
        write_file_atomic((dir / "base.schema.json").string(), base.schema.to_json_text());
    }

    SynthConfig cfg;
    cfg.n_max = 5;
    cfg.mode = SynthMode::Balanced;
    cfg.seed = 515151;
    auto [aug, truth] = generate(base, cfg);
    EXPECT(aug.row_count == 10000, "generator did not produce 10,000 rows");
    write_relation(aug, (dir / "aug.csv").string());
    write_file_atomic((dir / "aug.schema.json").string(), aug.schema.to_json_text());

    // Independent expectations straight from the ground truth: at cap 3 the
    // maximizer keeps each row's three largest copies; at cap 5 everything
    // must be matched on both sides.
    int value_col = aug.column_index("value");
    std::vector<std::vector<double>> per_row(base.row_count);
    double total = 0.0;
    for (const auto& p : truth.matching.pairs) {
        double v = aug.num_at(p.group, value_col);
        per_row[p.base_row].push_back(v);
        total += v;
    }
    double expected_top3 = 0.0;
    for (auto& vs : per_row) {
        std::sort(vs.begin(), vs.end(), std::greater<double>());
        for (size_t k = 0; k < std::min<size_t>(3, vs.size()); ++k) expected_top3 += vs[k];
    }

    json run_cfg;
    run_cfg["base"] = {{"csv", (dir / "base.csv").string()},
                       {"schema", (dir / "base.schema.json").string()}};
    run_cfg["augmenting"] = {{"csv", (dir / "aug.csv").string()},
                             {"schema", (dir / "aug.schema.json").string()}};
    run_cfg["similarity"] = {{"metric", "edit_distance"},
                             {"threshold", 3},
                             {"base_attr", "name"},
                             {"aug_attr", "name"}};
    run_cfg["cap"] = {{"mode", "explicit"}, {"value", 3}};
    run_cfg["query"] = "SELECT SUM(value) WHERE TRUE";
    run_cfg["method"] = "ga";
    std::string cfg_path = write_config("scale.json", run_cfg);

    auto start = std::chrono::steady_clock::now();
    CliResult r = run_cli("bound --config '" + cfg_path + "'");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    EXPECT(r.exit_code == 2, "expected exit 2 (null lower bound), got " +
                                 std::to_string(r.exit_code) + ": " + r.output.substr(0, 400));
    json report = json::parse(r.output);
    EXPECT(report["l"].is_null(), "lower bound should be null at cap 3");
    EXPECT(report["u"] == expected_top3, "upper bound != sum of per-row top-3 values");
    EXPECT(report["diagnostics"]["candidate_edges"] == 10000,
           "candidate set is not 1-regular per copy (mean degree != 5)");
    EXPECT(secs < 300.0, "took " + std::to_string(secs) + " s (budget 300 s)");

    // Cap 5: fully feasible, and forced to take every edge on both sides.
    run_cfg["cap"] = {{"mode", "explicit"}, {"value", 5}};
    CliResult r5 = run_cli("bound --config '" + write_config("scale5.json", run_cfg) + "'");
    EXPECT(r5.exit_code == 0, "cap-5 run failed: " + r5.output.substr(0, 400));
    json report5 = json::parse(r5.output);
    EXPECT(report5["l"] == total, "cap-5 lower != total");
    EXPECT(report5["u"] == total, "cap-5 upper != total");
}

struct Check {
    int id;
    const char* title;
    std::function<void()> body;
};

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);

    // Built once on first use, shared by checks 4 and 5.
    std::vector<EvalDataset> family;
    auto ensure_family = [&family]() -> const std::vector<EvalDataset>& {
        if (family.empty()) family = containment_family();
        return family;
    };
    int failed = 0;

    std::vector<Check> checks = {
        {1, "catalog golden interval [33, 84] via library and CLI, < 1 s",
         check_catalog_golden},
        {2, "baseline golden interval [55, 119] (capped) and 221 (uncapped), < 1 s",
         check_baseline_golden},
        {3, "solver equals the exhaustive oracle on 200 seeded instances, < 60 s",
         check_oracle_equivalence},
        {4, "intervals contain the true SUM and COUNT on 100 synthetic datasets",
         [&] { check_containment(ensure_family()); }},
        {5, "AVG quotient bounds sandwich the true average on the same 100 datasets",
         [&] { check_avg_sandwich(ensure_family()); }},
        {6, "interval length and failure rate are monotone in the in-degree cap",
         check_cap_monotonicity},
        {7, "capped assignment beats the baseline across skew levels 1-25",
         check_skew_robustness},
        {8, "length grows with false positives; failures grow with false negatives",
         check_noise_sensitivity},
        {9, "2,000 x 10,000 instance completes through the CLI within 5 minutes",
         check_scale},
    };

    for (const Check& check : checks) {
        auto start = std::chrono::steady_clock::now();
        try {
            check.body();
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::printf("[PASS] %d) %s  (%.2f s)\n", check.id, check.title, secs);
        } catch (const std::exception& e) {
            std::printf("[FAIL] %d) %s: %s\n", check.id, check.title, e.what());
            ++failed;
        }
    }

    if (failed > 0) {
        std::printf("%d of 9 checks failed\n", failed);
        return 1;
    }
    std::printf("all 9 checks passed\n");
    return 0;
}
