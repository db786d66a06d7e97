#ifndef MV_LTL_HPP
#define MV_LTL_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mv/error.hpp"

namespace mv::ltl {

enum class Op : std::uint8_t {
    constant,
    atom,
    negation,
    conjunction,
    disjunction,
    implication,
    next,
    until,
    globally,
    finally,
};

[[nodiscard]] constexpr bool is_unary(Op op) noexcept {
    return op == Op::negation || op == Op::next || op == Op::globally || op == Op::finally;
}
[[nodiscard]] constexpr bool is_binary(Op op) noexcept {
    return op == Op::conjunction || op == Op::disjunction || op == Op::implication || op == Op::until;
}

/// Immutable LTL syntax tree with shared subtrees. Equality is structural.
class Formula {
public:
    static Formula constant(bool value) {
        auto n = std::make_shared<Node>();
        n->op = Op::constant;
        n->value = value;
        return Formula(std::move(n));
    }
    static Formula atom(std::string name) {
        auto n = std::make_shared<Node>();
        n->op = Op::atom;
        n->name = std::move(name);
        return Formula(std::move(n));
    }
    static Formula unary(Op op, Formula operand) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(operand.node_);
        return Formula(std::move(n));
    }
    static Formula binary(Op op, Formula lhs, Formula rhs) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(lhs.node_);
        n->rhs = std::move(rhs.node_);
        return Formula(std::move(n));
    }

    [[nodiscard]] Op op() const noexcept { return node_->op; }
    [[nodiscard]] bool value() const noexcept { return node_->value; }
    [[nodiscard]] std::string const& name() const noexcept { return node_->name; }
    /// Operand of a unary node, left operand of a binary node.
    [[nodiscard]] Formula lhs() const { return Formula(node_->lhs); }
    [[nodiscard]] Formula rhs() const { return Formula(node_->rhs); }
    [[nodiscard]] Formula operand() const { return lhs(); }

    /// Identity of the shared node, usable as a cache key.
    [[nodiscard]] void const* id() const noexcept { return node_.get(); }

    friend bool operator==(Formula const& a, Formula const& b) { return equal(a.node_.get(), b.node_.get()); }

private:
    struct Node {
        Op op{Op::constant};
        bool value{false};
        std::string name;
        std::shared_ptr<Node const> lhs;
        std::shared_ptr<Node const> rhs;
    };

    explicit Formula(std::shared_ptr<Node const> n) : node_(std::move(n)) {}

    static bool equal(Node const* a, Node const* b) {
        if (a == b) return true;
        if (!a || !b || a->op != b->op) return false;
        switch (a->op) {
            case Op::constant: return a->value == b->value;
            case Op::atom: return a->name == b->name;
            default: return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
        }
    }

    std::shared_ptr<Node const> node_;
};

inline Formula operator!(Formula f) { return Formula::unary(Op::negation, std::move(f)); }
inline Formula operator&&(Formula a, Formula b) { return Formula::binary(Op::conjunction, std::move(a), std::move(b)); }
inline Formula operator||(Formula a, Formula b) { return Formula::binary(Op::disjunction, std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) { return Formula::binary(Op::implication, std::move(a), std::move(b)); }
inline Formula next(Formula f) { return Formula::unary(Op::next, std::move(f)); }
inline Formula until(Formula a, Formula b) { return Formula::binary(Op::until, std::move(a), std::move(b)); }
inline Formula globally(Formula f) { return Formula::unary(Op::globally, std::move(f)); }
inline Formula finally(Formula f) { return Formula::unary(Op::finally, std::move(f)); }
inline Formula atom(std::string name) { return Formula::atom(std::move(name)); }

/// Atom names in first-occurrence (pre-order) order.
[[nodiscard]] inline std::vector<std::string> atoms_of(Formula const& f) {
    std::vector<std::string> out;
    auto walk = [&](auto&& self, Formula const& g) -> void {
        if (g.op() == Op::atom) {
            if (std::find(out.begin(), out.end(), g.name()) == out.end()) out.push_back(g.name());
        } else if (is_unary(g.op())) {
            self(self, g.operand());
        } else if (is_binary(g.op())) {
            self(self, g.lhs());
            self(self, g.rhs());
        }
    };
    walk(walk, f);
    return out;
}

/// Replaces atoms by name; atoms missing from the map are kept.
[[nodiscard]] inline Formula rename_atoms(Formula const& f, std::map<std::string, std::string> const& names) {
    switch (f.op()) {
        case Op::constant: return f;
        case Op::atom: {
            auto it = names.find(f.name());
            return it == names.end() ? f : Formula::atom(it->second);
        }
        default:
            if (is_unary(f.op())) return Formula::unary(f.op(), rename_atoms(f.operand(), names));
            return Formula::binary(f.op(), rename_atoms(f.lhs(), names), rename_atoms(f.rhs(), names));
    }
}

// ---------------------------------------------------------------------------
// Printing

enum class Dialect { ascii, smv };

/// Fully parenthesized form; every binary operation is wrapped, unary operators
/// prefix their operand. parse(print(f)) == f.
[[nodiscard]] inline std::string print(Formula const& f, Dialect dialect = Dialect::ascii) {
    switch (f.op()) {
        case Op::constant:
            if (dialect == Dialect::smv) return f.value() ? "TRUE" : "FALSE";
            return f.value() ? "true" : "false";
        case Op::atom: return f.name();
        case Op::negation: return "!" + print(f.operand(), dialect);
        case Op::next: return "X " + print(f.operand(), dialect);
        case Op::globally: return "G " + print(f.operand(), dialect);
        case Op::finally: return "F " + print(f.operand(), dialect);
        case Op::conjunction: return "(" + print(f.lhs(), dialect) + " & " + print(f.rhs(), dialect) + ")";
        case Op::disjunction: return "(" + print(f.lhs(), dialect) + " | " + print(f.rhs(), dialect) + ")";
        case Op::implication: return "(" + print(f.lhs(), dialect) + " -> " + print(f.rhs(), dialect) + ")";
        case Op::until: return "(" + print(f.lhs(), dialect) + " U " + print(f.rhs(), dialect) + ")";
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class Tok : std::uint8_t { ident, kw_true, kw_false, lparen, rparen, op_not, op_and, op_or, op_implies, op_next,
                                op_until, op_globally, op_finally, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;  // byte offset into the input
};

inline std::vector<Token> tokenize(std::string_view in) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto const starts = [&](std::string_view s) { return in.substr(i, s.size()) == s; };
    while (i < in.size()) {
        unsigned char const c = static_cast<unsigned char>(in[i]);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t const at = i;
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i + 1;
            while (j < in.size() && (std::isalnum(static_cast<unsigned char>(in[j])) || in[j] == '_')) ++j;
            std::string word(in.substr(i, j - i));
            i = j;
            Tok kind = Tok::ident;
            if (word == "X") kind = Tok::op_next;
            else if (word == "U") kind = Tok::op_until;
            else if (word == "G") kind = Tok::op_globally;
            else if (word == "F") kind = Tok::op_finally;
            else if (word == "true" || word == "TRUE") kind = Tok::kw_true;
            else if (word == "false" || word == "FALSE") kind = Tok::kw_false;
            out.push_back({kind, std::move(word), at});
            continue;
        }
        struct Sym {
            std::string_view text;
            Tok kind;
        };
        static constexpr Sym symbols[] = {
            {"->", Tok::op_implies}, {"\xE2\x86\x92", Tok::op_implies},  // →
            {"&&", Tok::op_and},     {"&", Tok::op_and},
            {"\xE2\x88\xA7", Tok::op_and},                                 // ∧
            {"||", Tok::op_or},      {"|", Tok::op_or},
            {"\xE2\x88\xA8", Tok::op_or},                                  // ∨
            {"!", Tok::op_not},      {"\xC2\xAC", Tok::op_not},          // ¬
            {"(", Tok::lparen},      {")", Tok::rparen},
        };
        bool matched = false;
        for (auto const& s : symbols) {
            if (starts(s.text)) {
                out.push_back({s.kind, std::string(s.text), at});
                i += s.text.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw ParseError("unknown token '" + std::string(1, in[i]) + "' at position " + std::to_string(at));
        }
    }
    out.push_back({Tok::end, "", in.size()});
    return out;
}

// Precedence, tightest first: {!, X, G, F} > U > & > | > ->.
// U and -> associate to the right, & and | to the left.
class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Formula parse() {
        auto f = implication();
        if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    Token const& peek() const { return toks_[pos_]; }
    Token const& take() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(std::string const& what) const {
        throw ParseError("syntax error at position " + std::to_string(peek().pos) + ": " + what);
    }

    Formula implication() {
        auto lhs = disjunction();
        if (accept(Tok::op_implies)) return implies(std::move(lhs), implication());
        return lhs;
    }
    Formula disjunction() {
        auto lhs = conjunction();
        while (accept(Tok::op_or)) lhs = std::move(lhs) || conjunction();
        return lhs;
    }
    Formula conjunction() {
        auto lhs = until_expr();
        while (accept(Tok::op_and)) lhs = std::move(lhs) && until_expr();
        return lhs;
    }
    Formula until_expr() {
        auto lhs = unary();
        if (accept(Tok::op_until)) return until(std::move(lhs), until_expr());
        return lhs;
    }
    Formula unary() {
        switch (peek().kind) {
            case Tok::op_not: take(); return !unary();
            case Tok::op_next: take(); return next(unary());
            case Tok::op_globally: take(); return globally(unary());
            case Tok::op_finally: take(); return finally(unary());
            default: return primary();
        }
    }
    Formula primary() {
        auto const& t = peek();
        switch (t.kind) {
            case Tok::ident: return Formula::atom(take().text);
            case Tok::kw_true: take(); return Formula::constant(true);
            case Tok::kw_false: take(); return Formula::constant(false);
            case Tok::lparen: {
                take();
                auto f = implication();
                if (!accept(Tok::rparen)) fail("expected ')'");
                return f;
            }
            case Tok::end: fail("unexpected end of formula");
            default: fail("unexpected '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_{0};
};

}  // namespace detail

[[nodiscard]] inline Formula parse(std::string_view text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Traces and evaluation

/// Finite sequence of total valuations over an ordered atom set. Denotes the infinite
/// trace obtained by repeating the last valuation forever.
class SemanticTrace {
public:
    using Valuation = std::vector<bool>;

    SemanticTrace() = default;
    explicit SemanticTrace(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (!index_.emplace(atoms_[i], i).second) throw Error("duplicate atom '" + atoms_[i] + "'");
        }
    }

    /// Appends a valuation; must assign every atom.
    void push_back(Valuation v) {
        if (v.size() != atoms_.size()) throw Error("valuation is not total over the atom set");
        states_.push_back(std::move(v));
    }

    /// Appends a valuation given as the set of true atoms.
    void push_true(std::vector<std::string> const& true_atoms) {
        Valuation v(atoms_.size(), false);
        for (auto const& a : true_atoms) v.at(index_of(a)) = true;
        push_back(std::move(v));
    }

    [[nodiscard]] std::vector<std::string> const& atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] Valuation const& state(std::size_t i) const { return states_.at(i); }
    [[nodiscard]] bool has_atom(std::string const& name) const { return index_.count(name) != 0; }

    [[nodiscard]] std::size_t index_of(std::string const& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw EvaluationError("unknown atom '" + name + "'");
        return it->second;
    }

    [[nodiscard]] bool value(std::size_t instant, std::string const& name) const {
        return states_.at(instant)[index_of(name)];
    }

private:
    std::vector<std::string> atoms_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Valuation> states_;
};

/// Truth table of every subformula of one formula over one trace, filled by dynamic
/// programming from the last instant backwards. At the last instant the suffix is
/// constant, so X, G and F reduce to their operand and (a U b) to b.
class Evaluation {
public:
    Evaluation(Formula const& f, SemanticTrace const& trace) : len_(trace.size()) {
        if (len_ == 0) throw EvaluationError("cannot evaluate on an empty trace");
        root_ = visit(f, trace);
    }

    [[nodiscard]] bool at(std::size_t instant) const { return row(root_, instant); }

    /// Truth values of a subformula of the evaluated formula at every instant.
    [[nodiscard]] std::vector<bool> const& values(Formula const& sub) const {
        auto it = slot_.find(sub.id());
        if (it == slot_.end()) throw Error("formula is not a subformula of the evaluated one");
        return table_[it->second];
    }

    [[nodiscard]] std::size_t length() const noexcept { return len_; }

private:
    bool row(std::size_t slot, std::size_t instant) const {
        if (instant >= len_) throw EvaluationError("instant " + std::to_string(instant) + " out of range");
        return table_[slot][instant];
    }

    std::size_t visit(Formula const& f, SemanticTrace const& trace) {
        if (auto it = slot_.find(f.id()); it != slot_.end()) return it->second;
        std::vector<bool> v(len_, false);
        std::size_t const last = len_ - 1;
        switch (f.op()) {
            case Op::constant: std::fill(v.begin(), v.end(), f.value()); break;
            case Op::atom: {
                std::size_t const a = trace.index_of(f.name());
                for (std::size_t i = 0; i < len_; ++i) v[i] = trace.state(i)[a];
                break;
            }
            case Op::negation: {
                auto const& x = table_[visit(f.operand(), trace)];
                for (std::size_t i = 0; i < len_; ++i) v[i] = !x[i];
                break;
            }
            case Op::conjunction:
            case Op::disjunction:
            case Op::implication: {
                std::size_t const ls = visit(f.lhs(), trace);
                std::size_t const rs = visit(f.rhs(), trace);
                auto const& l = table_[ls];
                auto const& r = table_[rs];
                for (std::size_t i = 0; i < len_; ++i) {
                    if (f.op() == Op::conjunction) v[i] = l[i] && r[i];
                    else if (f.op() == Op::disjunction) v[i] = l[i] || r[i];
                    else v[i] = !l[i] || r[i];
                }
                break;
            }
            case Op::next: {
                auto const& x = table_[visit(f.operand(), trace)];
                for (std::size_t i = 0; i < last; ++i) v[i] = x[i + 1];
                v[last] = x[last];
                break;
            }
            case Op::globally: {
                auto const& x = table_[visit(f.operand(), trace)];
                v[last] = x[last];
                for (std::size_t i = last; i-- > 0;) v[i] = x[i] && v[i + 1];
                break;
            }
            case Op::finally: {
                auto const& x = table_[visit(f.operand(), trace)];
                v[last] = x[last];
                for (std::size_t i = last; i-- > 0;) v[i] = x[i] || v[i + 1];
                break;
            }
            case Op::until: {
                std::size_t const ls = visit(f.lhs(), trace);
                std::size_t const rs = visit(f.rhs(), trace);
                auto const& l = table_[ls];
                auto const& r = table_[rs];
                v[last] = r[last];
                for (std::size_t i = last; i-- > 0;) v[i] = r[i] || (l[i] && v[i + 1]);
                break;
            }
        }
        table_.push_back(std::move(v));
        slot_.emplace(f.id(), table_.size() - 1);
        return table_.size() - 1;
    }

    std::size_t len_;
    std::size_t root_{0};
    std::vector<std::vector<bool>> table_;
    std::unordered_map<void const*, std::size_t> slot_;
};

/// Truth of f at a 0-based instant of the stutter-extended trace.
[[nodiscard]] inline bool evaluate(Formula const& f, SemanticTrace const& trace, std::size_t instant = 0) {
    if (instant >= trace.size()) throw EvaluationError("instant " + std::to_string(instant) + " out of range");
    return Evaluation(f, trace).at(instant);
}

/// Earliest 0-based instant at which the body of the outermost G fails, if any.
[[nodiscard]] inline std::optional<std::size_t> first_globally_failure(Formula const& f, SemanticTrace const& trace) {
    std::optional<Formula> g;
    auto find = [&](auto&& self, Formula const& h) -> void {
        if (g) return;
        if (h.op() == Op::globally) {
            g = h;
            return;
        }
        if (is_unary(h.op())) self(self, h.operand());
        else if (is_binary(h.op())) {
            self(self, h.lhs());
            self(self, h.rhs());
        }
    };
    find(find, f);
    if (!g) return std::nullopt;
    Evaluation ev(f, trace);
    auto const& body = ev.values(g->operand());
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (!body[i]) return i;
    }
    return std::nullopt;
}

}  // namespace mv::ltl

#endif  // MV_LTL_HPP
