#include "aqbound/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "aqbound/errors.hpp"

namespace aqb {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> token_set(const std::string& text) {
    std::vector<std::string> tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

// Walks two sorted distinct vectors once, reporting intersection/union sizes to
// the callback as (in_both, token).
template <typename F>
static void merge_sets(const std::vector<std::string>& a, const std::vector<std::string>& b, F&& f) {
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i] < b[j])) {
            f(false, a[i++]);
        } else if (i == a.size() || b[j] < a[i]) {
            f(false, b[j++]);
        } else {
            f(true, a[i]);
            ++i;
            ++j;
        }
    }
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    size_t both = 0, either = 0;
    merge_sets(a, b, [&](bool in_both, const std::string&) {
        ++either;
        if (in_both) ++both;
    });
    if (either == 0) return 0.0;
    return static_cast<double>(both) / static_cast<double>(either);
}

double IdfWeights::weight(const std::string& token) const {
    auto it = weights.find(token);
    if (it != weights.end()) return it->second;
    // Unseen token: df of 1 keeps the weight finite and maximal for this corpus.
    return std::log(static_cast<double>(std::max<size_t>(document_count, 1)));
}

IdfWeights idf_weights(const std::vector<std::vector<std::string>>& documents) {
    IdfWeights idf;
    idf.document_count = documents.size();
    std::map<std::string, size_t> df;
    for (const auto& doc : documents) {
        std::vector<std::string> distinct(doc);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (const auto& t : distinct) ++df[t];
    }
    double d = static_cast<double>(std::max<size_t>(idf.document_count, 1));
    for (const auto& [token, count] : df)
        idf.weights[token] = std::log(d / static_cast<double>(count));
    return idf;
}

double weighted_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const IdfWeights& idf) {
    double both = 0, either = 0;
    merge_sets(a, b, [&](bool in_both, const std::string& token) {
        double w = idf.weight(token);
        either += w;
        if (in_both) both += w;
    });
    if (either <= 0) return 0.0;
    return both / either;
}

size_t edit_distance(const std::string& a, const std::string& b) {
    const size_t n = a.size(), m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

size_t edit_distance_bounded(const std::string& a, const std::string& b, size_t limit) {
    const size_t n = a.size(), m = b.size();
    size_t diff = n > m ? n - m : m - n;
    if (diff > limit) return limit + 1;
    if (n == 0 || m == 0) return std::max(n, m);

    // Only cells with |i - j| <= limit can hold values <= limit.
    const size_t big = limit + 1;
    std::vector<size_t> prev(m + 1, big), cur(m + 1, big);
    for (size_t j = 0; j <= std::min(m, limit); ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        size_t lo = i > limit ? i - limit : 0;
        size_t hi = std::min(m, i + limit);
        std::fill(cur.begin(), cur.end(), big);
        if (lo == 0) cur[0] = i <= limit ? i : big;
        size_t row_min = big;
        for (size_t j = std::max<size_t>(lo, 1); j <= hi; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            cur[j] = std::min(best, big);
            row_min = std::min(row_min, cur[j]);
        }
        if (lo == 0) row_min = std::min(row_min, cur[0]);
        if (row_min >= big) return big;  // the whole band exceeded the limit
        std::swap(prev, cur);
    }
    return std::min(prev[m], big);
}

const char* similarity_metric_name(SimilarityMetric metric) {
    switch (metric) {
        case SimilarityMetric::Jaccard: return "jaccard";
        case SimilarityMetric::WeightedJaccard: return "weighted_jaccard";
        case SimilarityMetric::EditDistance: return "edit_distance";
    }
    return "unknown";
}

SimilarityMetric similarity_metric_from_name(const std::string& name) {
    if (name == "jaccard") return SimilarityMetric::Jaccard;
    if (name == "weighted_jaccard") return SimilarityMetric::WeightedJaccard;
    if (name == "edit_distance") return SimilarityMetric::EditDistance;
    fail(ErrorCode::InvalidArgument,
         "unknown similarity metric '" + name + "' (jaccard|weighted_jaccard|edit_distance)");
}

}  // namespace aqb
