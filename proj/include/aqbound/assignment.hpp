#pragma once

#include <optional>
#include <string>
#include <vector>

namespace aqb {

// Capacity-constrained bipartite assignment: base vertices on the left, entity
// groups on the right.  Every group is matched at most once; a base vertex may
// absorb up to `cap` groups (capacity cap == the vertex duplicated cap times);
// only listed edges are usable.  Weights must be finite and nonnegative.
struct AssignmentProblem {
    struct Edge {
        int base;
        int group;
        double weight;
    };

    int base_count = 0;
    int group_count = 0;
    int cap = 1;
    std::vector<Edge> edges;

    void validate() const;
};

constexpr int kUnmatched = -1;

struct Assignment {
    std::vector<int> assigned_base;  // per group: base vertex index or kUnmatched
    double total_weight = 0.0;
    int coverage = 0;  // number of matched groups

    bool is_matched(int group) const { return assigned_base[group] != kUnmatched; }
};

// Maximum total weight over valid assignments.  Groups may stay unmatched.
// Ties are broken toward higher coverage, then toward the lexicographically
// smallest (group -> base) vector, so equal-weight instances solve identically
// everywhere.
Assignment solve_max(const AssignmentProblem& problem);

// Minimum total weight over assignments that match every group having at least
// one edge ("coverable") exactly once.  Realized by rerunning the maximizer on
// (maxWeight - w) transformed weights restricted to full coverage; throws
// Infeasible when the cap makes full coverage impossible.  Zero-degree groups
// are not coverable and stay unmatched; callers report them separately.
Assignment solve_min(const AssignmentProblem& problem);

// Dense convenience entry: weights[i][j] is the weight of (base i, group j),
// every pair is an edge, capacity 1.  Same tie-break rules as solve_max.
Assignment solve_dense_max(const std::vector<std::vector<double>>& weights);

// Exhaustive enumeration oracle.  `lower` is empty when full coverage is
// impossible.  Guard: the option-count product over coverable groups
// (degree + 1 each) must not exceed `kBruteForceGuard`, else TooLarge.
struct BruteForceBounds {
    double upper = 0.0;
    std::optional<double> lower;
    Assignment max_assignment;
    std::optional<Assignment> min_assignment;
};

constexpr double kBruteForceGuard = 1e7;

BruteForceBounds brute_force_bounds(const AssignmentProblem& problem);

// Instance dump for offline debugging: a `meta` row with the counts and cap,
// then one `edge` row per edge.
void write_problem_csv(const AssignmentProblem& problem, const std::string& path);
AssignmentProblem read_problem_csv(const std::string& path);

}  // namespace aqb
