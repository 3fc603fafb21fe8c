#pragma once

#include <map>
#include <string>
#include <vector>

namespace aqb {

// Lowercases, splits on non-alphanumeric characters, drops empty pieces.
std::vector<std::string> tokenize(const std::string& text);

// Sorted distinct tokens of `text` — set view used by the Jaccard metrics.
std::vector<std::string> token_set(const std::string& text);

// |a n b| / |a u b| over sorted distinct token vectors; both empty -> 0.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// ln(D / df(t)) per token over a corpus of documents (token lists).  Tokens
// absent from the corpus score ln(D / 1) at lookup time.
struct IdfWeights {
    size_t document_count = 0;
    std::map<std::string, double> weights;

    double weight(const std::string& token) const;
};

IdfWeights idf_weights(const std::vector<std::vector<std::string>>& documents);

// Jaccard with token weights: sum of weights over the intersection divided by
// the sum over the union; both empty -> 0.
double weighted_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const IdfWeights& idf);

// Levenshtein distance (unit insert/delete/substitute costs).
size_t edit_distance(const std::string& a, const std::string& b);

// Banded variant: exact while the distance is <= limit, otherwise returns
// limit + 1.  Used by candidate generation, where only "<= threshold" matters.
size_t edit_distance_bounded(const std::string& a, const std::string& b, size_t limit);

enum class SimilarityMetric { Jaccard, WeightedJaccard, EditDistance };

// How candidate edges are scored and admitted.  For the set metrics an edge
// needs score >= threshold; for edit distance it needs distance <= threshold.
struct SimilarityConfig {
    SimilarityMetric metric = SimilarityMetric::Jaccard;
    double threshold = 0.3;
    std::string base_attr;  // compare column on the base relation
    std::string aug_attr;   // compare column on the augmenting relation
};

const char* similarity_metric_name(SimilarityMetric metric);
SimilarityMetric similarity_metric_from_name(const std::string& name);

}  // namespace aqb
