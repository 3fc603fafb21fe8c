#pragma once

// Cheap closed-form bounds that ignore the assignment structure of the
// candidate set.  They serve as a reference point for the optimizing bounds:
// always sound, usually much looser.

#include <utility>
#include <vector>

#include "aqbound/assignment.hpp"

namespace aqb {

// Bounds from per-row candidate extremes alone.
//
// Upper: every base row contributes (its candidate degree) * (its maximum
// candidate weight) -- as if each of its candidate groups matched it at the
// best weight.  Lower: every base row contributes its minimum candidate
// weight; rows without candidates contribute 0.  Neither side enforces that
// a group is used at most once.
std::pair<double, double> max_sum_bounds(const AssignmentProblem& problem);

// Same family, but the upper side respects the per-row in-degree cap: a row
// with k candidate edges contributes min(k, cap) * (its maximum weight).
// The lower side is unchanged.
std::pair<double, double> max_sum_constrained_bounds(const AssignmentProblem& problem);

}  // namespace aqb
