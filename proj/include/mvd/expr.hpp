#pragma once

// Small infix expression language for coefficient functions.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]          (right associative)
//   primary := number | constant | variable | func '(' expr ')' | '(' expr ')'
//
// Variables are x, s and t; constants e and pi; functions exp, log, sin,
// cos, sqrt and abs, all of arity one.

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "mvd/errors.hpp"

namespace mvd {

enum class Var : std::uint8_t { x, s, t };

inline constexpr std::string_view var_name(Var v) {
    switch (v) {
        case Var::x: return "x";
        case Var::s: return "s";
        case Var::t: return "t";
    }
    return "?";
}

/// Set of variable names an expression may reference.
class VarSet {
public:
    constexpr VarSet() = default;
    constexpr VarSet(std::initializer_list<Var> vars) {
        for (Var v : vars) bits_ |= bit(v);
    }

    constexpr bool contains(Var v) const noexcept { return (bits_ & bit(v)) != 0; }
    constexpr VarSet& insert(Var v) noexcept {
        bits_ |= bit(v);
        return *this;
    }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr bool subset_of(VarSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }

    friend constexpr bool operator==(VarSet, VarSet) = default;

    std::string to_string() const {
        std::string out = "{";
        for (Var v : {Var::x, Var::s, Var::t}) {
            if (!contains(v)) continue;
            if (out.size() > 1) out += ", ";
            out += var_name(v);
        }
        return out + "}";
    }

private:
    static constexpr std::uint8_t bit(Var v) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }
    std::uint8_t bits_ = 0;
};

/// Values bound to the variables of an expression; unset means missing.
struct Bindings {
    std::optional<double> x = std::nullopt;
    std::optional<double> s = std::nullopt;
    std::optional<double> t = std::nullopt;

    std::optional<double> get(Var v) const noexcept {
        switch (v) {
            case Var::x: return x;
            case Var::s: return s;
            case Var::t: return t;
        }
        return std::nullopt;
    }
};

enum class Func : std::uint8_t { exp, log, sin, cos, sqrt, abs };
enum class Constant : std::uint8_t { e, pi };

inline constexpr std::string_view func_name(Func f) {
    constexpr std::array<std::string_view, 6> names{"exp", "log", "sin", "cos", "sqrt", "abs"};
    return names[static_cast<std::size_t>(f)];
}

namespace detail {

struct ExprNode {
    enum class Kind : std::uint8_t { number, variable, constant, negate, binary, call };

    Kind kind = Kind::number;
    double number = 0.0;
    Var var = Var::x;
    Constant constant = Constant::e;
    char op = 0;
    Func func = Func::exp;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

inline double checked(double value, const char* what) {
    if (!std::isfinite(value)) throw EvalError(std::string("non-finite result in ") + what);
    return value;
}

inline double eval_node(const ExprNode& n, const Bindings& b) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::number: return n.number;
        case K::constant: return n.constant == Constant::e ? std::numbers::e : std::numbers::pi;
        case K::variable: {
            auto v = b.get(n.var);
            if (!v) throw EvalError("missing binding for variable '" + std::string(var_name(n.var)) + "'");
            return *v;
        }
        case K::negate: return -eval_node(*n.lhs, b);
        case K::binary: {
            const double a = eval_node(*n.lhs, b);
            const double c = eval_node(*n.rhs, b);
            switch (n.op) {
                case '+': return checked(a + c, "addition");
                case '-': return checked(a - c, "subtraction");
                case '*': return checked(a * c, "multiplication");
                case '/':
                    if (c == 0.0) throw EvalError("division by zero");
                    return checked(a / c, "division");
                case '^':
                    if (a < 0.0 && c != std::trunc(c))
                        throw EvalError("negative base raised to a non-integer power");
                    if (a == 0.0 && c < 0.0) throw EvalError("zero raised to a negative power");
                    return checked(std::pow(a, c), "power");
            }
            break;
        }
        case K::call: {
            const double a = eval_node(*n.lhs, b);
            switch (n.func) {
                case Func::exp: return checked(std::exp(a), "exp");
                case Func::log:
                    if (!(a > 0.0)) throw EvalError("log of a non-positive number");
                    return std::log(a);
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::sqrt:
                    if (a < 0.0) throw EvalError("sqrt of a negative number");
                    return std::sqrt(a);
                case Func::abs: return std::abs(a);
            }
            break;
        }
    }
    throw EvalError("corrupt expression node");
}

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline void print_node(const ExprNode& n, std::string& out) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::number: out += format_number(n.number); return;
        case K::constant: out += n.constant == Constant::e ? "e" : "pi"; return;
        case K::variable: out += var_name(n.var); return;
        case K::negate:
            out += "(-";
            print_node(*n.lhs, out);
            out += ")";
            return;
        case K::binary:
            out += "(";
            print_node(*n.lhs, out);
            out += ' ';
            out += n.op;
            out += ' ';
            print_node(*n.rhs, out);
            out += ")";
            return;
        case K::call:
            out += func_name(n.func);
            out += "(";
            print_node(*n.lhs, out);
            out += ")";
            return;
    }
}

inline bool same_tree(const ExprNode& a, const ExprNode& b) {
    using K = ExprNode::Kind;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case K::number: return a.number == b.number;
        case K::constant: return a.constant == b.constant;
        case K::variable: return a.var == b.var;
        case K::negate: return same_tree(*a.lhs, *b.lhs);
        case K::binary: return a.op == b.op && same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
        case K::call: return a.func == b.func && same_tree(*a.lhs, *b.lhs);
    }
    return false;
}

inline void collect_vars(const ExprNode& n, VarSet& vars) {
    if (n.kind == ExprNode::Kind::variable) vars.insert(n.var);
    if (n.lhs) collect_vars(*n.lhs, vars);
    if (n.rhs) collect_vars(*n.rhs, vars);
}

class Parser {
public:
    Parser(std::string_view text, VarSet allowed) : text_(text), allowed_(allowed) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ == text_.size()) fail("empty expression");
        auto root = expr();
        skip_ws();
        if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make_binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::binary;
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_binary('+', lhs, term());
            else if (accept('-')) lhs = make_binary('-', lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_binary('*', lhs, unary());
            else if (accept('/')) lhs = make_binary('/', lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::negate;
            n->lhs = unary();
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make_binary('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ == text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) fail("malformed number");
        // An exponent marker is only consumed when digits follow, so "2*e" keeps e as a constant.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::number;
        n->number = value;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        auto n = std::make_shared<ExprNode>();

        for (Func f : {Func::exp, Func::log, Func::sin, Func::cos, Func::sqrt, Func::abs}) {
            if (name != func_name(f)) continue;
            if (!accept('(')) fail("function '" + std::string(name) + "' requires an argument list");
            n->kind = ExprNode::Kind::call;
            n->func = f;
            n->lhs = expr();
            if (accept(',')) fail("function '" + std::string(name) + "' takes exactly one argument");
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (name == "e" || name == "pi") {
            n->kind = ExprNode::Kind::constant;
            n->constant = name == "e" ? Constant::e : Constant::pi;
            return n;
        }
        for (Var v : {Var::x, Var::s, Var::t}) {
            if (name != var_name(v)) continue;
            if (!allowed_.contains(v)) {
                pos_ = start;
                fail("variable '" + std::string(name) + "' is not allowed here; allowed: " + allowed_.to_string());
            }
            n->kind = ExprNode::Kind::variable;
            n->var = v;
            return n;
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    VarSet allowed_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Immutable parsed expression. Copies share the tree.
class Expr {
public:
    double operator()(const Bindings& b) const { return detail::eval_node(*root_, b); }

    /// Fully parenthesized text that reparses to the same tree.
    std::string to_string() const {
        std::string out;
        detail::print_node(*root_, out);
        return out;
    }

    VarSet variables() const {
        VarSet vars;
        detail::collect_vars(*root_, vars);
        return vars;
    }

    friend bool operator==(const Expr& a, const Expr& b) { return detail::same_tree(*a.root_, *b.root_); }

private:
    explicit Expr(detail::NodePtr root) : root_(std::move(root)) {}
    friend Expr parse_expr(std::string_view, VarSet);

    detail::NodePtr root_;
};

inline Expr parse_expr(std::string_view text, VarSet allowed) {
    return Expr(detail::Parser(text, allowed).parse());
}

inline double eval_expr(const Expr& ast, const Bindings& bindings) { return ast(bindings); }

}  // namespace mvd
