#include "aqbound/candidate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "aqbound/errors.hpp"

namespace aqb {

bool CandidateSet::has_edge(int base_row, int group) const {
    return find_edge(base_row, group) != nullptr;
}

const CandidateSet::Edge* CandidateSet::find_edge(int base_row, int group) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(base_row, group),
                               [](const Edge& e, const std::pair<int, int>& key) {
                                   return std::make_pair(e.base_row, e.group) < key;
                               });
    if (it == edges.end() || it->base_row != base_row || it->group != group) return nullptr;
    return &*it;
}

void CandidateSet::sort_edges() {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::make_pair(a.base_row, a.group) < std::make_pair(b.base_row, b.group);
    });
    for (size_t i = 1; i < edges.size(); ++i)
        if (edges[i].base_row == edges[i - 1].base_row && edges[i].group == edges[i - 1].group)
            fail(ErrorCode::InvalidArgument, "candidate set contains a duplicate (row, group) edge");
}

namespace {

struct BlockKey {
    bool numeric;
    double num;
    std::string text;

    bool operator==(const BlockKey& other) const {
        if (numeric != other.numeric) return false;
        return numeric ? num == other.num : text == other.text;
    }
};

BlockKey block_key(const Relation& rel, size_t row, const std::string& attr) {
    int idx = rel.column_index(attr);
    if (idx < 0)
        fail(ErrorCode::MissingColumn,
             "blocking attr '" + attr + "' missing from relation '" + rel.schema.name + "'");
    const Column& col = rel.columns[idx];
    if (col.kind == ColumnKind::Number) return BlockKey{true, col.num[row], ""};
    return BlockKey{false, 0.0, trim(col.text[row])};
}

}  // namespace

CandidateSet build_candidate_set(const Relation& base, const Relation& augmenting,
                                 const std::vector<EntityGroup>& groups,
                                 const SimilarityConfig& similarity,
                                 const BlockingConfig& blocking) {
    int base_attr = base.column_index(similarity.base_attr);
    if (base_attr < 0)
        fail(ErrorCode::MissingColumn,
             "similarity base attr '" + similarity.base_attr + "' missing from base relation");
    int aug_attr = augmenting.column_index(similarity.aug_attr);
    if (aug_attr < 0)
        fail(ErrorCode::MissingColumn,
             "similarity aug attr '" + similarity.aug_attr + "' missing from augmenting relation");

    const bool is_distance = similarity.metric == SimilarityMetric::EditDistance;
    if (is_distance && similarity.threshold < 0)
        fail(ErrorCode::InvalidArgument, "edit distance threshold must be >= 0");

    CandidateSet cs;
    cs.base_count = static_cast<int>(base.row_count);
    cs.group_count = static_cast<int>(groups.size());
    cs.score_kind = is_distance ? ScoreKind::Distance : ScoreKind::Similarity;

    // Precompute per-cell comparison inputs once.
    std::vector<std::string> base_raw(base.row_count), aug_raw(augmenting.row_count);
    for (size_t r = 0; r < base.row_count; ++r) base_raw[r] = base.cell_text(r, base_attr);
    for (size_t s = 0; s < augmenting.row_count; ++s)
        aug_raw[s] = augmenting.cell_text(s, aug_attr);

    std::vector<std::vector<std::string>> base_tokens, aug_tokens;
    IdfWeights idf;
    if (!is_distance) {
        base_tokens.resize(base.row_count);
        aug_tokens.resize(augmenting.row_count);
        for (size_t r = 0; r < base.row_count; ++r) base_tokens[r] = token_set(base_raw[r]);
        for (size_t s = 0; s < augmenting.row_count; ++s) aug_tokens[s] = token_set(aug_raw[s]);
        if (similarity.metric == SimilarityMetric::WeightedJaccard) {
            // The IDF corpus is every compared cell from both relations.
            std::vector<std::vector<std::string>> corpus;
            corpus.reserve(base.row_count + augmenting.row_count);
            for (const auto& t : base_tokens) corpus.push_back(t);
            for (const auto& t : aug_tokens) corpus.push_back(t);
            idf = idf_weights(corpus);
        }
    }

    std::vector<BlockKey> base_keys, aug_keys;
    if (blocking.enabled) {
        base_keys.reserve(base.row_count);
        for (size_t r = 0; r < base.row_count; ++r)
            base_keys.push_back(block_key(base, r, blocking.base_attr));
        aug_keys.reserve(augmenting.row_count);
        for (size_t s = 0; s < augmenting.row_count; ++s)
            aug_keys.push_back(block_key(augmenting, s, blocking.aug_attr));
    }

    const size_t dist_limit =
        is_distance ? static_cast<size_t>(std::floor(similarity.threshold)) : 0;

    for (size_t r = 0; r < base.row_count; ++r) {
        for (const EntityGroup& g : groups) {
            bool pass = false;
            double best = 0;
            for (int srow : g.row_indices) {
                if (blocking.enabled && !(base_keys[r] == aug_keys[srow])) continue;
                if (is_distance) {
                    size_t d = edit_distance_bounded(base_raw[r], aug_raw[srow], dist_limit);
                    if (d <= dist_limit) {
                        double score = static_cast<double>(d);
                        if (!pass || score < best) best = score;
                        pass = true;
                    }
                } else {
                    double score =
                        similarity.metric == SimilarityMetric::Jaccard
                            ? jaccard(base_tokens[r], aug_tokens[srow])
                            : weighted_jaccard(base_tokens[r], aug_tokens[srow], idf);
                    if (score >= similarity.threshold) {
                        if (!pass || score > best) best = score;
                        pass = true;
                    }
                }
            }
            if (pass)
                cs.edges.push_back({static_cast<int>(r), g.group_id, best});
        }
    }
    // Construction order is already (row, group) sorted; keep the invariant explicit.
    cs.sort_edges();
    return cs;
}

std::vector<int> match_degrees(const CandidateSet& candidates) {
    std::vector<int> degrees(candidates.base_count, 0);
    for (const auto& e : candidates.edges) ++degrees[e.base_row];
    return degrees;
}

double skew(const CandidateSet& candidates) {
    std::vector<int> positive;
    for (int d : match_degrees(candidates))
        if (d >= 1) positive.push_back(d);
    if (positive.empty())
        fail(ErrorCode::InvalidArgument, "skew: candidate set has no edges");
    std::sort(positive.begin(), positive.end());
    int max_degree = positive.back();
    size_t n = positive.size();
    double median = (n % 2 == 1)
                        ? positive[n / 2]
                        : (positive[n / 2 - 1] + positive[n / 2]) / 2.0;
    return static_cast<double>(max_degree) / median;
}

int percentile_cap(const CandidateSet& candidates, double percentile) {
    if (!(percentile > 0.0 && percentile <= 1.0))
        fail(ErrorCode::InvalidArgument, "percentile_cap: percentile must be in (0, 1]");
    std::vector<int> positive;
    for (int d : match_degrees(candidates))
        if (d >= 1) positive.push_back(d);
    if (positive.empty()) return 1;
    std::sort(positive.begin(), positive.end());
    size_t rank = static_cast<size_t>(std::ceil(percentile * static_cast<double>(positive.size())));
    if (rank == 0) rank = 1;
    return std::max(1, positive[rank - 1]);
}

void write_candidates_csv(const CandidateSet& candidates, const Relation& base,
                          const std::vector<EntityGroup>& groups, const std::string& path) {
    CsvTable table;
    table.header = {"r_id_tuple", "g_id_tuple", "score"};
    for (const auto& e : candidates.edges) {
        table.rows.push_back({join_tuple(base.id_tuple(e.base_row)),
                              join_tuple(groups[e.group].id_tuple), format_number(e.score)});
    }
    write_csv_file(table, path);
}

CandidateSet read_candidates_csv(const std::string& path, const Relation& base,
                                 const std::vector<EntityGroup>& groups, ScoreKind score_kind) {
    CsvTable table = read_csv_file(path);
    if (table.header.size() != 3 || table.header[0] != "r_id_tuple" ||
        table.header[1] != "g_id_tuple" || table.header[2] != "score")
        fail(ErrorCode::CsvParse, path + ": expected header r_id_tuple,g_id_tuple,score");

    std::map<std::vector<std::string>, int> base_index;
    for (size_t r = 0; r < base.row_count; ++r) base_index[base.id_tuple(r)] = static_cast<int>(r);
    std::map<std::vector<std::string>, int> group_index;
    for (const auto& g : groups) group_index[g.id_tuple] = g.group_id;

    auto split_trim = [](const std::string& s) {
        std::vector<std::string> parts;
        size_t start = 0;
        while (true) {
            size_t pos = s.find('|', start);
            if (pos == std::string::npos) {
                parts.push_back(trim(s.substr(start)));
                break;
            }
            parts.push_back(trim(s.substr(start, pos - start)));
            start = pos + 1;
        }
        return parts;
    };

    CandidateSet cs;
    cs.base_count = static_cast<int>(base.row_count);
    cs.group_count = static_cast<int>(groups.size());
    cs.score_kind = score_kind;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        auto bi = base_index.find(split_trim(table.rows[r][0]));
        if (bi == base_index.end())
            fail(ErrorCode::InvalidArgument, path + ": row " + std::to_string(r + 1) +
                                                 ": unknown base id tuple '" + table.rows[r][0] + "'");
        auto gi = group_index.find(split_trim(table.rows[r][1]));
        if (gi == group_index.end())
            fail(ErrorCode::InvalidArgument, path + ": row " + std::to_string(r + 1) +
                                                 ": unknown group id tuple '" + table.rows[r][1] + "'");
        const std::string& raw = table.rows[r][2];
        char* end = nullptr;
        double score = std::strtod(raw.c_str(), &end);
        if (end != raw.c_str() + raw.size() || !std::isfinite(score))
            fail(ErrorCode::UnparseableNumber,
                 path + ": row " + std::to_string(r + 1) + ": bad score '" + raw + "'");
        cs.edges.push_back({bi->second, gi->second, score});
    }
    cs.sort_edges();
    return cs;
}

}  // namespace aqb
