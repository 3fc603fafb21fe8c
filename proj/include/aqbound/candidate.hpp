#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqbound/relation.hpp"
#include "aqbound/similarity.hpp"

namespace aqb {

// Optional equality blocking: only (base row, group) pairs whose blocking key
// cells agree are compared at all.  Numeric keys compare by value.
struct BlockingConfig {
    bool enabled = false;
    std::string base_attr;
    std::string aug_attr;
};

enum class ScoreKind { Similarity, Distance };

// The heuristic candidate edge set Psi between base rows and augmenting entity
// groups.  A group passes when any of its member rows passes the metric; the
// stored score is the best one (max similarity / min distance).
struct CandidateSet {
    struct Edge {
        int base_row;
        int group;
        double score;
    };

    int base_count = 0;
    int group_count = 0;
    ScoreKind score_kind = ScoreKind::Similarity;
    std::vector<Edge> edges;  // sorted by (base_row, group), no duplicates

    bool has_edge(int base_row, int group) const;
    const Edge* find_edge(int base_row, int group) const;
    void sort_edges();
};

CandidateSet build_candidate_set(const Relation& base, const Relation& augmenting,
                                 const std::vector<EntityGroup>& groups,
                                 const SimilarityConfig& similarity,
                                 const BlockingConfig& blocking = {});

// Candidate degree of every base row (number of incident groups).
std::vector<int> match_degrees(const CandidateSet& candidates);

// max degree / median degree over base rows with degree >= 1.
// A set with no edges has no skew to speak of; that is an error.
double skew(const CandidateSet& candidates);

// Nearest-rank percentile of the positive degrees, never below 1.  This is the
// default in-degree cap for the constrained estimators (percentile 0.75).
int percentile_cap(const CandidateSet& candidates, double percentile);

// Exchange format: header r_id_tuple,g_id_tuple,score; tuples joined with '|'.
void write_candidates_csv(const CandidateSet& candidates, const Relation& base,
                          const std::vector<EntityGroup>& groups, const std::string& path);
CandidateSet read_candidates_csv(const std::string& path, const Relation& base,
                                 const std::vector<EntityGroup>& groups,
                                 ScoreKind score_kind = ScoreKind::Similarity);

}  // namespace aqb
