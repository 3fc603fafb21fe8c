#include "aqbound/query.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "aqbound/errors.hpp"
#include "aqbound/similarity.hpp"

namespace aqb {

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class TokenKind { Ident, Number, String, Symbol, End };

struct Token {
    TokenKind kind;
    std::string text;   // ident (as written), symbol, or string payload
    double number = 0;  // Number
    size_t pos = 0;     // 0-based character offset
};

[[noreturn]] void syntax_error(size_t pos, const std::string& message) {
    fail(ErrorCode::QuerySyntax,
         "query syntax error at position " + std::to_string(pos + 1) + ": " + message);
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        size_t start = i;
        if (std::isalpha(c) || c == '_') {
            std::string word;
            while (i < text.size()) {
                unsigned char w = static_cast<unsigned char>(text[i]);
                if (!std::isalnum(w) && w != '_') break;
                word.push_back(text[i++]);
            }
            tokens.push_back({TokenKind::Ident, word, 0, start});
        } else if (std::isdigit(c) || (c == '-' && i + 1 < text.size() &&
                                       std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::string num;
            while (i < text.size()) {
                char w = text[i];
                if (!std::isdigit(static_cast<unsigned char>(w)) && w != '.' && w != '-' &&
                    w != '+' && w != 'e' && w != 'E')
                    break;
                num.push_back(text[i++]);
            }
            char* end = nullptr;
            double value = std::strtod(num.c_str(), &end);
            if (end != num.c_str() + num.size())
                syntax_error(start, "bad number literal '" + num + "'");
            tokens.push_back({TokenKind::Number, num, value, start});
        } else if (c == '\'') {
            std::string payload;
            ++i;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '\'') {
                    if (i + 1 < text.size() && text[i + 1] == '\'') {
                        payload.push_back('\'');
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                payload.push_back(text[i++]);
            }
            if (!closed) syntax_error(start, "unterminated string literal");
            tokens.push_back({TokenKind::String, payload, 0, start});
        } else {
            std::string sym(1, text[i]);
            ++i;
            if ((sym == "<" || sym == ">" || sym == "!") && i < text.size()) {
                char nxt = text[i];
                if (nxt == '=' || (sym == "<" && nxt == '>')) {
                    sym.push_back(nxt);
                    ++i;
                }
            }
            static const char* known[] = {"(", ")", "=", "!=", "<>", "<", "<=", ">", ">=", ".", ","};
            bool ok = false;
            for (const char* k : known)
                if (sym == k) ok = true;
            if (!ok) syntax_error(start, "unexpected character '" + sym + "'");
            tokens.push_back({TokenKind::Symbol, sym, 0, start});
        }
    }
    tokens.push_back({TokenKind::End, "", 0, text.size()});
    return tokens;
}

std::string upper(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

// ---------------------------------------------------------------------------
// Parser + binder

class Parser {
  public:
    Parser(const std::string& text, const Relation& base, const Relation& augmenting)
        : text_(text), base_(base), aug_(augmenting), tokens_(lex(text)) {}

    AggregateQuery parse() {
        AggregateQuery query;
        query.text = text_;
        expect_keyword("SELECT");
        const Token& fn = next();
        if (fn.kind != TokenKind::Ident) syntax_error(fn.pos, "expected SUM, COUNT or AVG");
        std::string aggname = upper(fn.text);
        if (aggname == "SUM") query.agg = AggregateKind::Sum;
        else if (aggname == "COUNT") query.agg = AggregateKind::Count;
        else if (aggname == "AVG") query.agg = AggregateKind::Avg;
        else syntax_error(fn.pos, "expected SUM, COUNT or AVG, got '" + fn.text + "'");

        expect_symbol("(");
        const Token& t = peek();
        if (t.kind == TokenKind::Number && t.text == "1") {
            next();
            if (query.agg != AggregateKind::Count)
                syntax_error(t.pos, "only COUNT accepts the target '1'");
        } else {
            ColumnRef ref = parse_column();
            if (query.agg != AggregateKind::Count && ref.kind != ColumnKind::Number)
                fail(ErrorCode::InvalidArgument,
                     "aggregation target '" + ref.name + "' must be a numeric column");
            query.target = ref;
        }
        expect_symbol(")");

        if (is_keyword(peek(), "FROM")) {  // accepted and ignored
            next();
            const Token& name = next();
            if (name.kind != TokenKind::Ident) syntax_error(name.pos, "expected a name after FROM");
        }
        expect_keyword("WHERE");
        query.predicate = parse_or();
        const Token& end = peek();
        if (end.kind != TokenKind::End) syntax_error(end.pos, "unexpected trailing input");
        return query;
    }

  private:
    const Token& peek() const { return tokens_[cursor_]; }
    const Token& next() { return tokens_[cursor_++]; }

    static bool is_keyword(const Token& t, const char* kw) {
        return t.kind == TokenKind::Ident && upper(t.text) == kw;
    }

    void expect_keyword(const char* kw) {
        const Token& t = next();
        if (!is_keyword(t, kw)) syntax_error(t.pos, std::string("expected ") + kw);
    }

    void expect_symbol(const char* sym) {
        const Token& t = next();
        if (t.kind != TokenKind::Symbol || t.text != sym)
            syntax_error(t.pos, std::string("expected '") + sym + "'");
    }

    ColumnRef parse_column() {
        const Token& t = next();
        if (t.kind != TokenKind::Ident) syntax_error(t.pos, "expected a column name");
        std::string first = t.text;
        std::string second;
        if (peek().kind == TokenKind::Symbol && peek().text == ".") {
            next();
            const Token& part = next();
            if (part.kind != TokenKind::Ident)
                syntax_error(part.pos, "expected a column name after '.'");
            second = part.text;
        }
        return resolve_column(first, second, t.pos);
    }

    ColumnRef make_ref(TableSide side, int index) const {
        const Relation& rel = side == TableSide::Base ? base_ : aug_;
        return ColumnRef{side, index, rel.columns[index].name, rel.columns[index].kind};
    }

    ColumnRef resolve_column(const std::string& first, const std::string& second, size_t pos) {
        if (!second.empty()) {
            std::string qual = upper(first);
            if (qual == "BASE" || qual == "R" || upper(base_.schema.name) == qual) {
                int idx = base_.column_index(second);
                if (idx < 0)
                    fail(ErrorCode::UnknownColumn,
                         "unknown column '" + second + "' on the base relation");
                return make_ref(TableSide::Base, idx);
            }
            if (qual == "AUG" || qual == "AUGMENTING" || qual == "S" ||
                upper(aug_.schema.name) == qual) {
                int idx = aug_.column_index(second);
                if (idx < 0)
                    fail(ErrorCode::UnknownColumn,
                         "unknown column '" + second + "' on the augmenting relation");
                return make_ref(TableSide::Augmenting, idx);
            }
            syntax_error(pos, "unknown table qualifier '" + first + "'");
        }
        int bi = base_.column_index(first);
        int ai = aug_.column_index(first);
        if (bi >= 0 && ai >= 0)
            fail(ErrorCode::UnknownColumn, "column '" + first +
                                               "' exists on both relations; qualify it as base." +
                                               first + " or aug." + first);
        if (bi >= 0) return make_ref(TableSide::Base, bi);
        if (ai >= 0) return make_ref(TableSide::Augmenting, ai);
        fail(ErrorCode::UnknownColumn, "unknown column '" + first + "'");
    }

    PredicatePtr parse_or() {
        PredicatePtr left = parse_and();
        while (is_keyword(peek(), "OR")) {
            next();
            PredicatePtr right = parse_and();
            auto node = std::make_shared<Predicate>();
            node->kind = Predicate::Kind::Or;
            node->lhs = left;
            node->rhs = right;
            left = node;
        }
        return left;
    }

    PredicatePtr parse_and() {
        PredicatePtr left = parse_not();
        while (is_keyword(peek(), "AND")) {
            next();
            PredicatePtr right = parse_not();
            auto node = std::make_shared<Predicate>();
            node->kind = Predicate::Kind::And;
            node->lhs = left;
            node->rhs = right;
            left = node;
        }
        return left;
    }

    PredicatePtr parse_not() {
        if (is_keyword(peek(), "NOT")) {
            next();
            auto node = std::make_shared<Predicate>();
            node->kind = Predicate::Kind::Not;
            node->lhs = parse_not();
            return node;
        }
        return parse_primary();
    }

    PredicatePtr parse_primary() {
        const Token& t = peek();
        if (t.kind == TokenKind::Symbol && t.text == "(") {
            next();
            PredicatePtr inner = parse_or();
            expect_symbol(")");
            return inner;
        }
        if (is_keyword(t, "TRUE") || is_keyword(t, "FALSE")) {
            next();
            auto node = std::make_shared<Predicate>();
            node->kind = Predicate::Kind::Const;
            node->const_value = is_keyword(t, "TRUE");
            return node;
        }
        if (t.kind != TokenKind::Ident) syntax_error(t.pos, "expected a predicate");

        ColumnRef column = parse_column();
        const Token& op = next();
        if (is_keyword(op, "CONTAINS")) {
            const Token& kw = next();
            if (kw.kind != TokenKind::String)
                syntax_error(kw.pos, "CONTAINS expects a string literal");
            if (column.kind != ColumnKind::Text)
                fail(ErrorCode::InvalidArgument,
                     "CONTAINS requires a text column, '" + column.name + "' is numeric");
            auto node = std::make_shared<Predicate>();
            node->kind = Predicate::Kind::Contains;
            node->column = column;
            node->text_literal = kw.text;
            return node;
        }
        if (op.kind != TokenKind::Symbol) syntax_error(op.pos, "expected a comparison operator");

        CompareOp cmp;
        if (op.text == "=") cmp = CompareOp::Eq;
        else if (op.text == "!=" || op.text == "<>") cmp = CompareOp::Ne;
        else if (op.text == "<") cmp = CompareOp::Lt;
        else if (op.text == "<=") cmp = CompareOp::Le;
        else if (op.text == ">") cmp = CompareOp::Gt;
        else if (op.text == ">=") cmp = CompareOp::Ge;
        else syntax_error(op.pos, "expected a comparison operator, got '" + op.text + "'");

        auto node = std::make_shared<Predicate>();
        node->kind = Predicate::Kind::Compare;
        node->column = column;
        node->op = cmp;

        const Token& lit = next();
        if (lit.kind == TokenKind::Number) {
            if (column.kind != ColumnKind::Number)
                fail(ErrorCode::InvalidArgument, "column '" + column.name +
                                                     "' is text but compared to a number");
            node->text_compare = false;
            node->number_literal = lit.number;
        } else if (lit.kind == TokenKind::String) {
            if (column.kind != ColumnKind::Text)
                fail(ErrorCode::InvalidArgument, "column '" + column.name +
                                                     "' is numeric but compared to a string");
            if (cmp != CompareOp::Eq && cmp != CompareOp::Ne)
                fail(ErrorCode::InvalidArgument,
                     "ordering comparisons require a numeric column ('" + column.name + "')");
            node->text_compare = true;
            node->text_literal = lit.text;
        } else {
            syntax_error(lit.pos, "expected a literal");
        }
        return node;
    }

    const std::string& text_;
    const Relation& base_;
    const Relation& aug_;
    std::vector<Token> tokens_;
    size_t cursor_ = 0;
};

}  // namespace

AggregateQuery parse_query(const std::string& text, const Relation& base,
                           const Relation& augmenting) {
    return Parser(text, base, augmenting).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

bool compare_numbers(CompareOp op, double a, double b) {
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return a != b;
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Gt: return a > b;
        case CompareOp::Ge: return a >= b;
    }
    return false;
}

const Relation& side_relation(const ColumnRef& ref, const Relation& base, const Relation& aug) {
    return ref.side == TableSide::Base ? base : aug;
}

int side_row(const ColumnRef& ref, int base_row, int aug_row) {
    return ref.side == TableSide::Base ? base_row : aug_row;
}

}  // namespace

bool eval_predicate(const Predicate& predicate, const Relation& base, int base_row,
                    const Relation& augmenting, int aug_row) {
    switch (predicate.kind) {
        case Predicate::Kind::Const:
            return predicate.const_value;
        case Predicate::Kind::And:
            return eval_predicate(*predicate.lhs, base, base_row, augmenting, aug_row) &&
                   eval_predicate(*predicate.rhs, base, base_row, augmenting, aug_row);
        case Predicate::Kind::Or:
            return eval_predicate(*predicate.lhs, base, base_row, augmenting, aug_row) ||
                   eval_predicate(*predicate.rhs, base, base_row, augmenting, aug_row);
        case Predicate::Kind::Not:
            return !eval_predicate(*predicate.lhs, base, base_row, augmenting, aug_row);
        case Predicate::Kind::Compare: {
            const Relation& rel = side_relation(predicate.column, base, augmenting);
            int row = side_row(predicate.column, base_row, aug_row);
            if (predicate.text_compare) {
                const std::string& cell = rel.text_at(row, predicate.column.index);
                bool eq = cell == predicate.text_literal;
                return predicate.op == CompareOp::Eq ? eq : !eq;
            }
            return compare_numbers(predicate.op, rel.num_at(row, predicate.column.index),
                                   predicate.number_literal);
        }
        case Predicate::Kind::Contains: {
            const Relation& rel = side_relation(predicate.column, base, augmenting);
            int row = side_row(predicate.column, base_row, aug_row);
            auto cell_tokens = token_set(rel.text_at(row, predicate.column.index));
            auto keyword_tokens = token_set(predicate.text_literal);
            if (keyword_tokens.empty()) return false;
            for (const auto& t : keyword_tokens)
                if (!std::binary_search(cell_tokens.begin(), cell_tokens.end(), t)) return false;
            return true;
        }
    }
    return false;
}

PairStats pair_stats(const AggregateQuery& query, const Relation& base, int base_row,
                     const Relation& augmenting, const EntityGroup& group) {
    PairStats stats;
    for (int srow : group.row_indices) {
        if (!eval_predicate(*query.predicate, base, base_row, augmenting, srow)) continue;
        ++stats.count;
        if (query.target) {
            const Relation& rel = side_relation(*query.target, base, augmenting);
            int row = side_row(*query.target, base_row, srow);
            stats.sum += rel.num_at(row, query.target->index);
        }
    }
    return stats;
}

double pair_weight(const AggregateQuery& query, const Relation& base, int base_row,
                   const Relation& augmenting, const EntityGroup& group) {
    PairStats stats = pair_stats(query, base, base_row, augmenting, group);
    if (query.agg == AggregateKind::Count) return static_cast<double>(stats.count);
    if (stats.sum < 0)
        fail(ErrorCode::NegativeValue,
             "qualifying pair weight is negative (" + format_number(stats.sum) + ") for group '" +
                 join_tuple(group.id_tuple) + "'; bounds require nonnegative contributions");
    return stats.sum;
}

AssignmentProblem build_query_problem(const AggregateQuery& query, const Relation& base,
                                      const Relation& augmenting,
                                      const std::vector<EntityGroup>& groups,
                                      const CandidateSet& candidates, int cap) {
    AssignmentProblem problem;
    problem.base_count = candidates.base_count;
    problem.group_count = candidates.group_count;
    problem.cap = cap;
    problem.edges.reserve(candidates.edges.size());
    for (const auto& e : candidates.edges)
        problem.edges.push_back(
            {e.base_row, e.group, pair_weight(query, base, e.base_row, augmenting, groups[e.group])});
    return problem;
}

std::pair<double, double> avg_bounds(double l_sum, double u_sum, int base_rows, int group_count,
                                     int cap, int d) {
    if (d < 1)
        fail(ErrorCode::UndefinedAverage,
             "AVG bounds undefined: no candidate group has a positive-weight edge");
    double denom_l = std::min(static_cast<double>(base_rows) * cap, static_cast<double>(group_count));
    if (denom_l < 1) denom_l = 1;
    return {l_sum / denom_l, u_sum / d};
}

ResultInterval result_interval(const AggregateQuery& query, const Relation& base,
                               const Relation& augmenting, const std::vector<EntityGroup>& groups,
                               const CandidateSet& candidates, int cap) {
    if (cap < 1) fail(ErrorCode::InvalidArgument, "in-degree cap must be >= 1");

    AggregateQuery solve_query = query;
    // AVG bounds derive from the SUM instance over the same predicate/target.
    if (query.agg == AggregateKind::Avg) solve_query.agg = AggregateKind::Sum;

    AssignmentProblem problem =
        build_query_problem(solve_query, base, augmenting, groups, candidates, cap);

    ResultInterval out;
    out.diagnostics.cap_used = cap;
    out.diagnostics.base_rows = candidates.base_count;
    out.diagnostics.group_count = candidates.group_count;
    out.diagnostics.candidate_edges = static_cast<int64_t>(candidates.edges.size());

    std::vector<char> has_edge(groups.size(), 0), has_positive(groups.size(), 0);
    for (const auto& e : problem.edges) {
        has_edge[e.group] = 1;
        if (e.weight > 0) has_positive[e.group] = 1;
    }
    for (size_t g = 0; g < groups.size(); ++g) {
        if (!has_edge[g]) ++out.diagnostics.uncovered_groups;
        if (has_positive[g]) ++out.diagnostics.positive_weight_groups;
    }

    Assignment max_assignment = solve_max(problem);
    out.upper = max_assignment.total_weight;
    try {
        Assignment min_assignment = solve_min(problem);
        out.lower = min_assignment.total_weight;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Infeasible) throw;
        out.diagnostics.feasible_min = false;
    }

    if (query.agg == AggregateKind::Avg) {
        auto [l_avg, u_avg] =
            avg_bounds(out.lower.value_or(0.0), *out.upper, candidates.base_count,
                       candidates.group_count, cap, out.diagnostics.positive_weight_groups);
        out.upper = u_avg;
        if (out.lower) out.lower = l_avg;
    }
    return out;
}

double relative_error(double lower, double upper, double nominal) {
    if (nominal == 0)
        fail(ErrorCode::ZeroNominal, "relative error undefined: nominal result is zero");
    return (upper - lower) / nominal;
}

double nominal_result(const AggregateQuery& query, const Relation& base,
                      const Relation& augmenting, const std::vector<EntityGroup>& groups,
                      const Matching& matching) {
    double sum = 0.0;
    int64_t count = 0;
    for (const auto& pair : matching.pairs) {
        if (pair.group < 0 || pair.group >= static_cast<int>(groups.size()))
            fail(ErrorCode::InvalidArgument, "nominal_result: matching group out of range");
        PairStats stats = pair_stats(query, base, pair.base_row, augmenting, groups[pair.group]);
        sum += stats.sum;
        count += stats.count;
    }
    switch (query.agg) {
        case AggregateKind::Sum: return sum;
        case AggregateKind::Count: return static_cast<double>(count);
        case AggregateKind::Avg:
            if (count == 0)
                fail(ErrorCode::UndefinedAverage,
                     "AVG undefined: the matching yields no qualifying pairs");
            return sum / static_cast<double>(count);
    }
    return 0.0;
}

Matching greedy_matching(const CandidateSet& candidates, int cap) {
    if (cap < 1) fail(ErrorCode::InvalidArgument, "greedy_matching: cap must be >= 1");
    std::vector<const CandidateSet::Edge*> order;
    order.reserve(candidates.edges.size());
    for (const auto& e : candidates.edges) order.push_back(&e);
    const bool distance = candidates.score_kind == ScoreKind::Distance;
    std::sort(order.begin(), order.end(),
              [distance](const CandidateSet::Edge* a, const CandidateSet::Edge* b) {
                  if (a->score != b->score) return distance ? a->score < b->score : a->score > b->score;
                  if (a->base_row != b->base_row) return a->base_row < b->base_row;
                  return a->group < b->group;
              });

    std::vector<char> group_used(candidates.group_count, 0);
    std::vector<int> base_used(candidates.base_count, 0);
    Matching matching;
    for (const auto* e : order) {
        if (group_used[e->group] || base_used[e->base_row] >= cap) continue;
        group_used[e->group] = 1;
        ++base_used[e->base_row];
        matching.pairs.push_back({e->base_row, e->group});
    }
    // Deterministic report order regardless of score ordering.
    std::sort(matching.pairs.begin(), matching.pairs.end(),
              [](const Matching::Pair& a, const Matching::Pair& b) {
                  if (a.base_row != b.base_row) return a.base_row < b.base_row;
                  return a.group < b.group;
              });
    return matching;
}

}  // namespace aqb
