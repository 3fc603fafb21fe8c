#include "aqbound/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>

#include "aqbound/csv.hpp"
#include "aqbound/errors.hpp"
#include "aqbound/relation.hpp"

namespace aqb {

void AssignmentProblem::validate() const {
    if (base_count < 1)
        fail(ErrorCode::InvalidArgument, "assignment: at least one base vertex required");
    if (group_count < 0)
        fail(ErrorCode::InvalidArgument, "assignment: negative group count");
    if (cap < 1) fail(ErrorCode::InvalidArgument, "assignment: cap must be >= 1");
    for (const Edge& e : edges) {
        if (e.base < 0 || e.base >= base_count || e.group < 0 || e.group >= group_count)
            fail(ErrorCode::InvalidArgument, "assignment: edge endpoint out of range");
        if (!std::isfinite(e.weight) || e.weight < 0)
            fail(ErrorCode::InvalidArgument, "assignment: edge weights must be finite and >= 0");
    }
    std::vector<std::pair<int, int>> keys;
    keys.reserve(edges.size());
    for (const Edge& e : edges) keys.emplace_back(e.base, e.group);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        fail(ErrorCode::InvalidArgument, "assignment: duplicate (base, group) edge");
}

namespace {

// Two-level cost: transformed edge weight first, dummy usage second, compared
// lexicographically.  Running the shortest-path machinery over this ordered
// group makes "maximum weight, then maximum coverage" a single objective.
struct Cost2 {
    double w = 0.0;
    int64_t aux = 0;

    Cost2 operator+(const Cost2& o) const { return {w + o.w, aux + o.aux}; }
    Cost2 operator-(const Cost2& o) const { return {w - o.w, aux - o.aux}; }
    Cost2& operator+=(const Cost2& o) {
        w += o.w;
        aux += o.aux;
        return *this;
    }
    Cost2& operator-=(const Cost2& o) {
        w -= o.w;
        aux -= o.aux;
        return *this;
    }
    bool operator<(const Cost2& o) const { return w != o.w ? w < o.w : aux < o.aux; }
    bool operator==(const Cost2& o) const { return w == o.w && aux == o.aux; }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sparse maximum-weight matcher (shortest augmenting paths with potentials).
// Columns 0..base_count-1 are base vertices with capacity `cap`; in free mode
// column base_count + g is group g's private dummy, so "unmatched" is just
// another assignment and coverage ties live inside the cost.  After the solve,
// a refinement pass rewires equal-cost choices toward the lexicographically
// smallest (group -> base) vector without leaving the optimal face.
class MaxMatcher {
  public:
    MaxMatcher(const AssignmentProblem& problem, bool full_coverage)
        : problem_(problem), full_coverage_(full_coverage) {
        base_count_ = problem.base_count;
        group_count_ = problem.group_count;
        col_count_ = base_count_ + (full_coverage_ ? 0 : group_count_);

        adj_.resize(group_count_);
        for (const auto& e : problem.edges) {
            max_weight_ = std::max(max_weight_, e.weight);
            adj_[e.group].push_back({e.base, e.weight});
        }
        for (auto& edges : adj_)
            std::sort(edges.begin(), edges.end());

        tolerance_ = 1e-9 * std::max(1.0, max_weight_);

        match_col_.assign(group_count_, -1);
        col_groups_.resize(col_count_);
        pot_group_.assign(group_count_, Cost2{});
        pot_col_.assign(col_count_, Cost2{});

        dist_.assign(col_count_, Cost2{kInf, 0});
        parent_group_.assign(col_count_, -1);
        settled_.assign(col_count_, false);
        reached_.assign(group_count_, false);
        reached_from_.assign(group_count_, -1);
        locked_.assign(group_count_, false);
        bfs_seen_.assign(col_count_ + 1, false);  // +1: the capacity hub node
        bfs_pred_.assign(col_count_ + 1, {-1, -1, -1});
    }

    Assignment run() {
        for (int g = 0; g < group_count_; ++g) {
            if (adj_[g].empty()) continue;  // zero-degree: never matchable
            augment(g);
        }
        refine();
        return extract();
    }

  private:
    struct Arc {
        int base;
        double weight;
        bool operator<(const Arc& o) const { return base < o.base; }
    };

    int dummy_col(int g) const { return base_count_ + g; }
    bool is_dummy(int col) const { return col >= base_count_; }

    int capacity(int col) const { return is_dummy(col) ? 1 : problem_.cap; }

    bool has_spare(int col) const {
        return static_cast<int>(col_groups_[col].size()) < capacity(col);
    }

    // Transformed cost of assigning g to col.  Real edges map w -> (max_w - w)
    // so all primary costs are nonnegative; a dummy costs as much as a zero
    // weight edge plus one unit of coverage loss.
    Cost2 edge_cost(int g, int col, double weight) const {
        if (is_dummy(col)) {
            (void)g;
            return Cost2{max_weight_, 1};
        }
        return Cost2{max_weight_ - weight, 0};
    }

    Cost2 reduced_cost(int g, int col, double weight) const {
        return edge_cost(g, col, weight) - pot_group_[g] - pot_col_[col];
    }

    void augment(int start) {
        std::priority_queue<std::pair<Cost2, int>, std::vector<std::pair<Cost2, int>>,
                            std::greater<>>
            heap;
        std::vector<int> touched_cols, touched_groups, settle_order;

        auto relax = [&](int g, int col, double weight, Cost2 base_dist) {
            Cost2 nd = base_dist + reduced_cost(g, col, weight);
            if (!(nd < dist_[col])) return;
            if (dist_[col].w == kInf) touched_cols.push_back(col);
            dist_[col] = nd;
            parent_group_[col] = g;
            heap.emplace(nd, col);
        };

        auto relax_edges_of = [&](int g, Cost2 base_dist) {
            for (const Arc& arc : adj_[g])
                if (!settled_[arc.base]) relax(g, arc.base, arc.weight, base_dist);
            if (!full_coverage_) {
                int d = dummy_col(g);
                if (!settled_[d]) relax(g, d, 0.0, base_dist);
            }
        };

        relax_edges_of(start, Cost2{});

        int terminal = -1;
        Cost2 terminal_dist{};
        while (!heap.empty()) {
            auto [d, col] = heap.top();
            heap.pop();
            if (settled_[col] || !(d == dist_[col])) continue;
            settled_[col] = true;
            settle_order.push_back(col);
            if (has_spare(col)) {
                terminal = col;
                terminal_dist = d;
                break;
            }
            for (int g : col_groups_[col]) {
                if (reached_[g]) continue;
                reached_[g] = true;
                reached_from_[g] = col;
                touched_groups.push_back(g);
                relax_edges_of(g, d);
            }
        }

        if (terminal < 0) {
            reset_search(touched_cols, touched_groups, settle_order);
            fail(ErrorCode::Infeasible,
                 "no assignment covers every matchable group under cap " +
                     std::to_string(problem_.cap) + " (stuck at group " + std::to_string(start) +
                     ")");
        }

        pot_group_[start] += terminal_dist;
        for (int g : touched_groups) pot_group_[g] += terminal_dist - dist_[reached_from_[g]];
        for (int col : settle_order) pot_col_[col] -= terminal_dist - dist_[col];

        // Flip matches along the alternating path back to `start`.
        int col = terminal;
        while (true) {
            int g = parent_group_[col];
            int prev = (g == start) ? -1 : reached_from_[g];
            if (prev >= 0) {
                auto& occupants = col_groups_[prev];
                occupants.erase(std::find(occupants.begin(), occupants.end(), g));
            }
            match_col_[g] = col;
            col_groups_[col].push_back(g);
            if (prev < 0) break;
            col = prev;
        }

        reset_search(touched_cols, touched_groups, settle_order);
    }

    void reset_search(const std::vector<int>& touched_cols, const std::vector<int>& touched_groups,
                      const std::vector<int>& settle_order) {
        for (int col : touched_cols) {
            dist_[col] = Cost2{kInf, 0};
            parent_group_[col] = -1;
        }
        for (int col : settle_order) settled_[col] = false;
        for (int g : touched_groups) {
            reached_[g] = false;
            reached_from_[g] = -1;
        }
    }

    // Lexicographic sign of a Cost2 within floating tolerance on the primary.
    int lex_sign(const Cost2& c) const {
        if (c.w > tolerance_) return 1;
        if (c.w < -tolerance_) return -1;
        if (c.aux > 0) return 1;
        if (c.aux < 0) return -1;
        return 0;
    }

    bool tight(int g, int col, double weight) const {
        return lex_sign(reduced_cost(g, col, weight)) == 0;
    }

    // Every optimal matching uses only tight edges and keeps every column with
    // a strictly negative potential saturated.  The greedy pass below walks
    // groups in index order and, for each, tries every tight strictly-smaller
    // base vertex; a move is kept iff a repair inside the tight subgraph
    // restores capacity and saturation without touching already-fixed groups.
    void refine() {
        for (int g = 0; g < group_count_; ++g) {
            if (adj_[g].empty()) continue;
            int current = match_col_[g];
            bool on_dummy = is_dummy(current);
            if (on_dummy && lex_sign(pot_col_[current]) < 0) {
                // Every optimum leaves g unmatched; nothing to improve.
                locked_[g] = true;
                continue;
            }
            for (const Arc& arc : adj_[g]) {
                if (!on_dummy && arc.base >= current) break;  // ascending order
                if (arc.base == current) continue;
                if (!tight(g, arc.base, arc.weight)) continue;
                if (try_rewire(g, arc.base)) break;
            }
            locked_[g] = true;
        }
    }

    // Moving g onto `target` stays optimal iff the zero-reduced-cost residual
    // graph contains a simple path from `target` back to g's current column.
    // Nodes are columns plus one hub standing for the shared capacity sink.
    // Column-to-column steps displace an occupant along a tight edge; a column
    // with spare capacity can absorb the surplus into the hub; the hub can pull
    // a unit back out of any zero-potential occupied column (a donor), which
    // is what lets a displacement chain and a refill chain pair up even when
    // they touch disjoint columns.  Reaching the origin refills it; reaching
    // the hub while the origin has zero potential means the origin may simply
    // shrink.  Columns with strictly negative potential must stay saturated,
    // so they can never donate.
    bool try_rewire(int g, int target) {
        int origin = match_col_[g];
        auto& origin_groups = col_groups_[origin];
        origin_groups.erase(std::find(origin_groups.begin(), origin_groups.end(), g));
        match_col_[g] = -1;

        const int hub = col_count_;
        bool origin_may_shrink = lex_sign(pot_col_[origin]) == 0;

        std::vector<int> touched;
        int endpoint = -1;
        auto mark = [&](int node, int via_group, int from_col, int prev) {
            bfs_seen_[node] = true;
            bfs_pred_[node] = {via_group, from_col, prev};
            touched.push_back(node);
            if (node == origin || (node == hub && origin_may_shrink)) endpoint = node;
        };

        // Displace an occupant of `col` along its tight edges.
        auto expand_col = [&](int col, std::vector<int>& next) {
            std::vector<int> occupants = col_groups_[col];
            std::sort(occupants.begin(), occupants.end());
            for (int h : occupants) {
                if (locked_[h]) continue;
                for (const Arc& arc : adj_[h]) {
                    int col2 = arc.base;
                    if (col2 == col || bfs_seen_[col2]) continue;
                    if (!tight(h, col2, arc.weight)) continue;
                    mark(col2, h, col, col);
                    if (endpoint >= 0) return;
                    next.push_back(col2);
                }
                if (!full_coverage_) {
                    int d = dummy_col(h);
                    if (!bfs_seen_[d] && tight(h, d, 0.0)) {
                        mark(d, h, col, col);
                        if (endpoint >= 0) return;
                        next.push_back(d);
                    }
                }
            }
        };

        mark(target, g, -1, -1);
        std::vector<int> frontier;
        if (endpoint < 0) frontier.push_back(target);
        while (endpoint < 0 && !frontier.empty()) {
            std::vector<int> next;
            for (int node : frontier) {
                if (node == hub) {
                    // Pull a unit out of any zero-potential donor column.
                    for (int col = 0; col < col_count_ && endpoint < 0; ++col) {
                        if (col == origin || col_groups_[col].empty()) continue;
                        if (lex_sign(pot_col_[col]) != 0) continue;
                        std::vector<int> occupants = col_groups_[col];
                        std::sort(occupants.begin(), occupants.end());
                        for (int h : occupants) {
                            if (locked_[h]) continue;
                            for (const Arc& arc : adj_[h]) {
                                int col2 = arc.base;
                                if (col2 == col || bfs_seen_[col2]) continue;
                                if (!tight(h, col2, arc.weight)) continue;
                                mark(col2, h, col, hub);
                                if (endpoint >= 0) break;
                                next.push_back(col2);
                            }
                            if (endpoint >= 0) break;
                            if (!full_coverage_) {
                                int d = dummy_col(h);
                                if (!bfs_seen_[d] && tight(h, d, 0.0)) {
                                    mark(d, h, col, hub);
                                    if (endpoint >= 0) break;
                                    next.push_back(d);
                                }
                            }
                        }
                    }
                } else {
                    if (has_spare(node) && !bfs_seen_[hub]) {
                        mark(hub, -1, -1, node);
                        if (endpoint < 0) next.push_back(hub);
                    }
                    if (endpoint < 0) expand_col(node, next);
                }
                if (endpoint >= 0) break;
            }
            frontier = std::move(next);
        }

        bool ok = endpoint >= 0;
        if (ok) {
            // Execute the moves backwards from the endpoint; each move frees
            // the slot needed by the one before it.
            int node = endpoint;
            while (node != target) {
                auto [h, from_col, prev] = bfs_pred_[node];
                if (h >= 0) {
                    auto& from_groups = col_groups_[from_col];
                    from_groups.erase(std::find(from_groups.begin(), from_groups.end(), h));
                    col_groups_[node].push_back(h);
                    match_col_[h] = node;
                }
                node = prev;
            }
            col_groups_[target].push_back(g);
            match_col_[g] = target;
        } else {
            col_groups_[origin].push_back(g);
            match_col_[g] = origin;
        }

        for (int node : touched) {
            bfs_seen_[node] = false;
            bfs_pred_[node] = {-1, -1, -1};
        }
        return ok;
    }

    Assignment extract() const {
        Assignment out;
        out.assigned_base.assign(group_count_, kUnmatched);
        for (int g = 0; g < group_count_; ++g) {
            int col = match_col_[g];
            if (col < 0 || is_dummy(col)) continue;
            out.assigned_base[g] = col;
            out.coverage += 1;
            auto it = std::lower_bound(adj_[g].begin(), adj_[g].end(), Arc{col, 0.0});
            out.total_weight += it->weight;
        }
        return out;
    }

    const AssignmentProblem& problem_;
    bool full_coverage_;
    int base_count_ = 0;
    int group_count_ = 0;
    int col_count_ = 0;
    double max_weight_ = 0.0;
    double tolerance_ = 0.0;

    std::vector<std::vector<Arc>> adj_;
    std::vector<int> match_col_;
    std::vector<std::vector<int>> col_groups_;
    std::vector<Cost2> pot_group_, pot_col_;

    // Scratch, reset after every search.
    std::vector<Cost2> dist_;
    std::vector<int> parent_group_;
    std::vector<char> settled_, reached_;
    std::vector<int> reached_from_;
    struct Pred {
        int via_group;
        int from_col;
        int prev;
    };

    std::vector<char> locked_;
    std::vector<char> bfs_seen_;
    std::vector<Pred> bfs_pred_;
};

}  // namespace

Assignment solve_max(const AssignmentProblem& problem) {
    problem.validate();
    return MaxMatcher(problem, /*full_coverage=*/false).run();
}

Assignment solve_min(const AssignmentProblem& problem) {
    problem.validate();
    double max_weight = 0.0;
    for (const auto& e : problem.edges) max_weight = std::max(max_weight, e.weight);

    AssignmentProblem transformed = problem;
    for (auto& e : transformed.edges) e.weight = max_weight - e.weight;

    Assignment assignment = MaxMatcher(transformed, /*full_coverage=*/true).run();

    // Recover the original objective; coverage is identical by construction.
    assignment.total_weight = 0.0;
    std::vector<std::vector<std::pair<int, double>>> weights(problem.group_count);
    for (const auto& e : problem.edges) weights[e.group].push_back({e.base, e.weight});
    for (int g = 0; g < problem.group_count; ++g) {
        int base = assignment.assigned_base[g];
        if (base == kUnmatched) continue;
        for (const auto& [b, w] : weights[g])
            if (b == base) assignment.total_weight += w;
    }
    return assignment;
}

Assignment solve_dense_max(const std::vector<std::vector<double>>& weights) {
    AssignmentProblem problem;
    problem.base_count = static_cast<int>(weights.size());
    problem.group_count = weights.empty() ? 0 : static_cast<int>(weights[0].size());
    problem.cap = 1;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (static_cast<int>(weights[i].size()) != problem.group_count)
            fail(ErrorCode::InvalidArgument, "solve_dense_max: ragged weight matrix");
        for (size_t j = 0; j < weights[i].size(); ++j)
            problem.edges.push_back(
                {static_cast<int>(i), static_cast<int>(j), weights[i][j]});
    }
    return solve_max(problem);
}

namespace {

// (group -> base) vectors ordered with kUnmatched larger than any base index.
bool lex_vector_less(const std::vector<int>& a, const std::vector<int>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (a[i] == kUnmatched) return false;
        if (b[i] == kUnmatched) return true;
        return a[i] < b[i];
    }
    return false;
}

}  // namespace

BruteForceBounds brute_force_bounds(const AssignmentProblem& problem) {
    problem.validate();

    std::vector<std::vector<std::pair<int, double>>> options(problem.group_count);
    for (const auto& e : problem.edges) options[e.group].push_back({e.base, e.weight});
    for (auto& opts : options) std::sort(opts.begin(), opts.end());

    double combinations = 1.0;
    for (const auto& opts : options)
        if (!opts.empty()) combinations *= static_cast<double>(opts.size() + 1);
    if (combinations > kBruteForceGuard)
        fail(ErrorCode::TooLarge, "brute force enumeration would visit about " +
                                      format_number(combinations) + " assignments (guard " +
                                      format_number(kBruteForceGuard) + ")");

    std::vector<int> current(problem.group_count, kUnmatched);
    std::vector<int> usage(problem.base_count, 0);

    BruteForceBounds best;
    bool have_max = false, have_min = false;
    double max_total = 0, min_total = 0;
    int max_coverage = -1;
    std::vector<int> max_vector, min_vector;

    auto consider = [&](double total, int coverage, bool full) {
        if (!have_max || total > best.upper ||
            (total == best.upper &&
             (coverage > max_coverage ||
              (coverage == max_coverage && lex_vector_less(current, max_vector))))) {
            best.upper = total;
            max_total = total;
            max_coverage = coverage;
            max_vector = current;
            have_max = true;
        }
        if (full) {
            if (!have_min || total < min_total ||
                (total == min_total && lex_vector_less(current, min_vector))) {
                min_total = total;
                min_vector = current;
                have_min = true;
            }
        }
    };

    // Depth-first product over per-group options (candidates plus unmatched).
    auto dfs = [&](auto&& self, int g, double total, int coverage, bool full) -> void {
        if (g == problem.group_count) {
            consider(total, coverage, full);
            return;
        }
        for (const auto& [base, weight] : options[g]) {
            if (usage[base] == problem.cap) continue;
            ++usage[base];
            current[g] = base;
            self(self, g + 1, total + weight, coverage + 1, full);
            current[g] = kUnmatched;
            --usage[base];
        }
        self(self, g + 1, total, coverage, full && options[g].empty());
    };
    dfs(dfs, 0, 0.0, 0, true);

    auto to_assignment = [&](const std::vector<int>& vec, double total) {
        Assignment a;
        a.assigned_base = vec;
        a.total_weight = total;
        for (int b : vec)
            if (b != kUnmatched) ++a.coverage;
        return a;
    };

    best.max_assignment = to_assignment(max_vector, max_total);
    if (have_min) {
        best.lower = min_total;
        best.min_assignment = to_assignment(min_vector, min_total);
    }
    return best;
}

void write_problem_csv(const AssignmentProblem& problem, const std::string& path) {
    CsvTable table;
    table.header = {"kind", "base", "group", "weight"};
    table.rows.push_back({"meta", std::to_string(problem.base_count),
                          std::to_string(problem.group_count), std::to_string(problem.cap)});
    for (const auto& e : problem.edges)
        table.rows.push_back(
            {"edge", std::to_string(e.base), std::to_string(e.group), format_number(e.weight)});
    write_csv_file(table, path);
}

AssignmentProblem read_problem_csv(const std::string& path) {
    CsvTable table = read_csv_file(path);
    if (table.header != CsvRow{"kind", "base", "group", "weight"})
        fail(ErrorCode::CsvParse, path + ": expected header kind,base,group,weight");
    if (table.rows.empty() || table.rows[0][0] != "meta")
        fail(ErrorCode::CsvParse, path + ": first row must be the meta record");

    AssignmentProblem problem;
    problem.base_count = std::atoi(table.rows[0][1].c_str());
    problem.group_count = std::atoi(table.rows[0][2].c_str());
    problem.cap = std::atoi(table.rows[0][3].c_str());
    for (size_t r = 1; r < table.rows.size(); ++r) {
        if (table.rows[r][0] != "edge")
            fail(ErrorCode::CsvParse, path + ": row " + std::to_string(r + 1) + ": unknown kind '" +
                                          table.rows[r][0] + "'");
        problem.edges.push_back({std::atoi(table.rows[r][1].c_str()),
                                 std::atoi(table.rows[r][2].c_str()),
                                 std::strtod(table.rows[r][3].c_str(), nullptr)});
    }
    problem.validate();
    return problem;
}

}  // namespace aqb
