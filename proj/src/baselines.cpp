#include "aqbound/baselines.hpp"

#include <algorithm>
#include <limits>

namespace aqb {

namespace {

struct RowExtremes {
    int degree = 0;
    double max_weight = 0.0;
    double min_weight = std::numeric_limits<double>::infinity();
};

std::vector<RowExtremes> per_row_extremes(const AssignmentProblem& problem) {
    problem.validate();
    std::vector<RowExtremes> rows(problem.base_count);
    for (const auto& e : problem.edges) {
        RowExtremes& r = rows[e.base];
        ++r.degree;
        r.max_weight = std::max(r.max_weight, e.weight);
        r.min_weight = std::min(r.min_weight, e.weight);
    }
    return rows;
}

}  // namespace

std::pair<double, double> max_sum_bounds(const AssignmentProblem& problem) {
    double lower = 0.0, upper = 0.0;
    for (const RowExtremes& r : per_row_extremes(problem)) {
        if (r.degree == 0) continue;
        upper += r.degree * r.max_weight;
        lower += r.min_weight;
    }
    return {lower, upper};
}

std::pair<double, double> max_sum_constrained_bounds(const AssignmentProblem& problem) {
    double lower = 0.0, upper = 0.0;
    for (const RowExtremes& r : per_row_extremes(problem)) {
        if (r.degree == 0) continue;
        upper += std::min(r.degree, problem.cap) * r.max_weight;
        lower += r.min_weight;
    }
    return {lower, upper};
}

}  // namespace aqb
