#pragma once

// Synthetic augmenting tables with known ground truth.  Every base row spawns
// a configurable number of copies whose identifying text is perturbed by a
// controlled number of edits, so the true matching is known by construction
// and the candidate heuristics can be stress-tested against it.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aqbound/candidate.hpp"
#include "aqbound/relation.hpp"

namespace aqb {

enum class SynthMode {
    Balanced,  // every base row gets exactly n_max true matches
    Skewed,    // each base row gets Uniform{1..n_max} true matches
};

struct SynthConfig {
    int n_max = 1;
    SynthMode mode = SynthMode::Balanced;

    // Each generated id sits at an edit distance drawn uniformly from
    // [typo_min, typo_max] away from its source id.
    int typo_min = 1;
    int typo_max = 3;

    // Measurement values are drawn uniformly from [value_min, value_max];
    // with integer_values they are integers (exact in doubles), which keeps
    // aggregate comparisons free of rounding questions.
    double value_min = 1.0;
    double value_max = 100.0;
    bool integer_values = true;

    uint64_t seed = 0;

    std::string id_column;             // base id attr to perturb; default: first id attr
    std::string aug_name;              // schema name; default: "<base>_synth"
    std::string value_column = "value";

    void validate() const;
};

// Ground truth for a generated table.  Generated ids are globally unique, so
// entity groups are singletons and group g is exactly augmenting row g.
struct TruthRecord {
    Matching matching;               // (source base row, group) per generated row
    std::vector<int> true_degree;    // true matches per base row
    std::vector<double> value_sum;   // per base row, sum of its copies' values
};

std::pair<Relation, TruthRecord> generate(const Relation& base, const SynthConfig& cfg);

// Noise operators for candidate-set robustness sweeps.  Removes a fraction of
// the true-match edges (false negatives) and adds random non-edges (false
// positives, add_fp * |edges| of them).  For a fixed seed the dropped and
// added edges at a smaller fraction are a prefix of those at a larger one, so
// sweeping a fraction upward degrades each instance monotonically.
//
// hub_rows > 0 restricts false-positive base endpoints to the first hub_rows
// base rows, concentrating extra degree there to manufacture skew; 0 spreads
// them uniformly.
CandidateSet corrupt_candidates(const CandidateSet& candidates, const Matching& truth,
                                double add_fp, double drop_fn, uint64_t seed,
                                int hub_rows = 0);

}  // namespace aqb
