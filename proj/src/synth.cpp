#include "aqbound/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "aqbound/errors.hpp"
#include "aqbound/rng.hpp"
#include "aqbound/similarity.hpp"

namespace aqb {

void SynthConfig::validate() const {
    if (n_max < 1) fail(ErrorCode::InvalidArgument, "synth: n_max must be >= 1");
    if (typo_min < 1 || typo_max > 3 || typo_min > typo_max)
        fail(ErrorCode::InvalidArgument, "synth: typo distance range must sit within [1, 3]");
    if (!(value_min <= value_max))
        fail(ErrorCode::InvalidArgument, "synth: value_min must be <= value_max");
    if (integer_values && std::ceil(value_min) > std::floor(value_max))
        fail(ErrorCode::InvalidArgument,
             "synth: [value_min, value_max] contains no integer but integer_values is set");
    if (value_column.empty()) fail(ErrorCode::InvalidArgument, "synth: value_column is empty");
}

namespace {

constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr int kAlphabetSize = 36;

char random_char(Rng& rng) { return kAlphabet[rng.uniform_int(0, kAlphabetSize - 1)]; }

// `distance` insertions always land exactly `distance` away: the length gap
// alone forces at least that many edits.
std::string insert_only_typo(const std::string& id, int distance, Rng& rng) {
    std::string out = id;
    for (int k = 0; k < distance; ++k) {
        size_t pos = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(out.size())));
        out.insert(out.begin() + pos, random_char(rng));
    }
    return out;
}

// One perturbed copy at exactly `distance` edits: random substitute / insert /
// delete operations, re-rolled when edits cancel out.
std::string make_typo(const std::string& id, int distance, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::string out = id;
        for (int k = 0; k < distance; ++k) {
            int op = static_cast<int>(rng.uniform_int(0, 2));
            if (out.empty()) op = 1;  // only insertion applies
            size_t pos;
            switch (op) {
                case 0:  // substitute
                    pos = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(out.size()) - 1));
                    out[pos] = random_char(rng);
                    break;
                case 1:  // insert
                    pos = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(out.size())));
                    out.insert(out.begin() + pos, random_char(rng));
                    break;
                default:  // delete
                    pos = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(out.size()) - 1));
                    out.erase(out.begin() + pos);
                    break;
            }
        }
        size_t want = static_cast<size_t>(distance);
        if (edit_distance_bounded(id, out, want) == want) return out;
    }
    return insert_only_typo(id, distance, rng);
}

}  // namespace

std::pair<Relation, TruthRecord> generate(const Relation& base, const SynthConfig& cfg) {
    cfg.validate();
    if (base.schema.role != RelationRole::Base)
        fail(ErrorCode::InvalidArgument, "synth: source relation must have the base role");

    std::string id_name = cfg.id_column.empty() ? base.schema.id_attrs.front() : cfg.id_column;
    int id_col = base.column_index(id_name);
    if (id_col < 0)
        fail(ErrorCode::MissingColumn, "synth: base has no column '" + id_name + "'");
    if (base.columns[id_col].kind != ColumnKind::Text)
        fail(ErrorCode::InvalidArgument, "synth: id column '" + id_name + "' must be text");

    Relation aug;
    aug.schema.name = cfg.aug_name.empty() ? base.schema.name + "_synth" : cfg.aug_name;
    aug.schema.role = RelationRole::Augmenting;
    aug.schema.id_attrs = {id_name};
    aug.schema.measure_attrs = {cfg.value_column};
    aug.schema.columns = {{id_name, ColumnKind::Text}, {cfg.value_column, ColumnKind::Number}};
    aug.columns.resize(2);
    aug.columns[0].name = id_name;
    aug.columns[0].kind = ColumnKind::Text;
    aug.columns[1].name = cfg.value_column;
    aug.columns[1].kind = ColumnKind::Number;

    TruthRecord truth;
    truth.true_degree.assign(base.row_count, 0);
    truth.value_sum.assign(base.row_count, 0.0);

    Rng rng(cfg.seed);
    std::unordered_set<std::string> used_ids;  // global uniqueness => singleton groups

    for (size_t r = 0; r < base.row_count; ++r) {
        const std::string source_id = trim(base.text_at(r, id_col));
        int copies = cfg.mode == SynthMode::Balanced
                         ? cfg.n_max
                         : static_cast<int>(rng.uniform_int(1, cfg.n_max));
        for (int c = 0; c < copies; ++c) {
            int distance = static_cast<int>(rng.uniform_int(cfg.typo_min, cfg.typo_max));
            std::string typo;
            bool unique = false;
            for (int attempt = 0; attempt < 256 && !unique; ++attempt) {
                typo = make_typo(source_id, distance, rng);
                unique = used_ids.insert(trim(typo)).second;
            }
            if (!unique)
                fail(ErrorCode::Internal,
                     "synth: could not generate a unique id for '" + source_id + "'");

            double value = cfg.integer_values
                               ? static_cast<double>(rng.uniform_int(
                                     static_cast<int64_t>(std::ceil(cfg.value_min)),
                                     static_cast<int64_t>(std::floor(cfg.value_max))))
                               : rng.uniform_real(cfg.value_min, cfg.value_max);

            int group = static_cast<int>(aug.row_count);
            aug.columns[0].text.push_back(typo);
            aug.columns[1].num.push_back(value);
            ++aug.row_count;

            truth.matching.pairs.push_back({static_cast<int>(r), group});
            ++truth.true_degree[r];
            truth.value_sum[r] += value;
        }
    }
    return {std::move(aug), std::move(truth)};
}

CandidateSet corrupt_candidates(const CandidateSet& candidates, const Matching& truth,
                                double add_fp, double drop_fn, uint64_t seed, int hub_rows) {
    if (!(add_fp >= 0 && add_fp <= 1) || !(drop_fn >= 0 && drop_fn <= 1))
        fail(ErrorCode::InvalidArgument, "corrupt_candidates: fractions must be in [0, 1]");
    if (hub_rows < 0 || hub_rows > candidates.base_count)
        fail(ErrorCode::InvalidArgument, "corrupt_candidates: hub_rows out of range");

    Rng rng(seed);

    // False negatives: remove a prefix of the (shuffled once per seed) true
    // edges, so a larger drop_fn removes a superset.
    std::vector<size_t> true_edge_idx;
    std::set<std::pair<int, int>> truth_pairs;
    for (const auto& p : truth.pairs) truth_pairs.insert({p.base_row, p.group});
    for (size_t i = 0; i < candidates.edges.size(); ++i) {
        const auto& e = candidates.edges[i];
        if (truth_pairs.count({e.base_row, e.group})) true_edge_idx.push_back(i);
    }
    rng.shuffle(true_edge_idx);
    size_t drop_count = static_cast<size_t>(
        std::llround(drop_fn * static_cast<double>(true_edge_idx.size())));
    std::unordered_set<size_t> dropped(true_edge_idx.begin(), true_edge_idx.begin() + drop_count);

    CandidateSet out;
    out.base_count = candidates.base_count;
    out.group_count = candidates.group_count;
    out.score_kind = candidates.score_kind;
    std::set<std::pair<int, int>> present;
    for (size_t i = 0; i < candidates.edges.size(); ++i) {
        if (dropped.count(i)) continue;
        out.edges.push_back(candidates.edges[i]);
        present.insert({candidates.edges[i].base_row, candidates.edges[i].group});
    }

    // False positives: seeded stream of random non-edges; scores drawn from
    // the observed score range so either score kind stays plausible.
    double score_lo = 0.0, score_hi = 1.0;
    if (!candidates.edges.empty()) {
        score_lo = score_hi = candidates.edges.front().score;
        for (const auto& e : candidates.edges) {
            score_lo = std::min(score_lo, e.score);
            score_hi = std::max(score_hi, e.score);
        }
    }
    size_t add_count = static_cast<size_t>(
        std::llround(add_fp * static_cast<double>(candidates.edges.size())));
    if (add_count > 0 && (candidates.base_count == 0 || candidates.group_count == 0))
        fail(ErrorCode::InvalidArgument, "corrupt_candidates: no vertices to add edges to");

    size_t added = 0;
    size_t attempts = 0, attempt_limit = 1000 + 64 * add_count;
    int fp_row_limit = hub_rows > 0 ? hub_rows : candidates.base_count;
    while (added < add_count && attempts < attempt_limit) {
        ++attempts;
        int b = static_cast<int>(rng.uniform_int(0, fp_row_limit - 1));
        int g = static_cast<int>(rng.uniform_int(0, candidates.group_count - 1));
        if (!present.insert({b, g}).second) continue;
        out.edges.push_back({b, g, rng.uniform_real(score_lo, score_hi)});
        ++added;
    }
    if (added < add_count)
        fail(ErrorCode::TooLarge,
             "corrupt_candidates: could not place " + std::to_string(add_count) +
                 " false positives (graph too dense near the hubs)");

    out.sort_edges();
    return out;
}

}  // namespace aqb
