#pragma once

// The formula expression DSL: abstract syntax, parser, evaluator, printer,
// and symbolic dimension inference.
//
// Grammar (standard precedence, '^' binds tightest and is right-associative):
//
//   expr        := additive
//   additive    := multiplicative (('+' | '-') multiplicative)*
//   multiplicative := unary (('*' | '/') unary)*
//   unary       := '-' unary | power
//   power       := primary ('^' unary)?
//   primary     := NUMBER | IDENT | IDENT '(' args ')' | '(' expr ')'
//
// Functions: sqrt, abs, sin, cos, tan (unary); min, max (binary);
// select(cond, a, b) where cond is `additive CMP additive` with CMP one of
// <, <=, =, ==, >=, >. select evaluates the condition and then only the
// taken branch, so guarded expressions like select(x = 0, 0, 1/x) are safe.
//
// Evaluation is over IEEE doubles with a single code path and no
// reassociation, so identical inputs give bit-identical results.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/units.hpp"

namespace ipg {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Var, Binary, Neg, Call, Select };

    Kind kind;
    double number = 0.0;     // Kind::Number
    std::string name;        // Var: identifier; Binary: "+-*/^"; Call: function;
                             // Select: comparison operator ("<", "<=", "=", ">=", ">")
    std::vector<ExprPtr> args;

    static ExprPtr make_number(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Number;
        e->number = v;
        return e;
    }
    static ExprPtr make_var(std::string n) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->name = std::move(n);
        return e;
    }
    static ExprPtr make_binary(std::string op, ExprPtr l, ExprPtr r) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Binary;
        e->name = std::move(op);
        e->args = {std::move(l), std::move(r)};
        return e;
    }
    static ExprPtr make_neg(ExprPtr x) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Neg;
        e->args = {std::move(x)};
        return e;
    }
    static ExprPtr make_call(std::string fn, std::vector<ExprPtr> args) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Call;
        e->name = std::move(fn);
        e->args = std::move(args);
        return e;
    }
    // args = {cond_lhs, cond_rhs, then, else}
    static ExprPtr make_select(std::string cmp, std::vector<ExprPtr> args) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Select;
        e->name = std::move(cmp);
        e->args = std::move(args);
        return e;
    }
};

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
        return false;
    if (a->kind == Expr::Kind::Number &&
        !(a->number == b->number || (std::isnan(a->number) && std::isnan(b->number))))
        return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i], b->args[i])) return false;
    return true;
}

namespace detail {

struct ExprParser {
    const std::string& src;
    size_t pos = 0;

    explicit ExprParser(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError(what + " at offset " + std::to_string(pos) + " in \"" + src + "\"");
    }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    ExprPtr parse() {
        ExprPtr e = parse_additive();
        skip_ws();
        if (pos != src.size()) fail("trailing input");
        return e;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        for (;;) {
            skip_ws();
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) {
                char op = src[pos++];
                lhs = Expr::make_binary(std::string(1, op), lhs, parse_multiplicative());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (pos < src.size() && (src[pos] == '*' || src[pos] == '/')) {
                char op = src[pos++];
                lhs = Expr::make_binary(std::string(1, op), lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (pos < src.size() && src[pos] == '-') {
            ++pos;
            return Expr::make_neg(parse_unary());
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        skip_ws();
        if (pos < src.size() && src[pos] == '^') {
            ++pos;
            return Expr::make_binary("^", base, parse_unary());
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            ExprPtr inner = parse_additive();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = parse_ident();
            skip_ws();
            if (pos < src.size() && src[pos] == '(') {
                ++pos;
                return parse_call(name);
            }
            return Expr::make_var(name);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    ExprPtr parse_number() {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
            ++pos;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            ++pos;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
        }
        double v = 0.0;
        auto res = std::from_chars(src.data() + start, src.data() + pos, v);
        if (res.ec != std::errc{} || res.ptr != src.data() + pos)
            fail("malformed number \"" + src.substr(start, pos - start) + "\"");
        return Expr::make_number(v);
    }

    std::string parse_ident() {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        return src.substr(start, pos - start);
    }

    ExprPtr parse_call(const std::string& fn) {
        if (fn == "select") {
            // select(additive CMP additive, expr, expr)
            ExprPtr lhs = parse_additive();
            std::string cmp = parse_cmp_op();
            ExprPtr rhs = parse_additive();
            if (!eat(',')) fail("expected ',' after select condition");
            ExprPtr then_e = parse_additive();
            if (!eat(',')) fail("expected ',' after select first branch");
            ExprPtr else_e = parse_additive();
            if (!eat(')')) fail("expected ')' closing select");
            return Expr::make_select(cmp, {lhs, rhs, then_e, else_e});
        }
        std::vector<ExprPtr> args;
        if (peek() != ')') {
            args.push_back(parse_additive());
            while (eat(',')) args.push_back(parse_additive());
        }
        if (!eat(')')) fail("expected ')' closing call to " + fn);
        size_t want = (fn == "sqrt" || fn == "abs" || fn == "sin" || fn == "cos" || fn == "tan")
                          ? 1
                      : (fn == "min" || fn == "max") ? 2
                                                     : SIZE_MAX;
        if (want == SIZE_MAX) fail("unknown function \"" + fn + "\"");
        if (args.size() != want)
            fail(fn + " expects " + std::to_string(want) + " argument(s), got " +
                 std::to_string(args.size()));
        return Expr::make_call(fn, std::move(args));
    }

    std::string parse_cmp_op() {
        skip_ws();
        if (pos >= src.size()) fail("expected comparison operator");
        char c = src[pos];
        if (c == '<' || c == '>') {
            ++pos;
            if (pos < src.size() && src[pos] == '=') {
                ++pos;
                return std::string(1, c) + "=";
            }
            return std::string(1, c);
        }
        if (c == '=') {
            ++pos;
            if (pos < src.size() && src[pos] == '=') ++pos; // accept both '=' and '=='
            return "=";
        }
        fail("expected comparison operator");
    }
};

} // namespace detail

inline ExprPtr parse_expr(const std::string& source) {
    detail::ExprParser p(source);
    return p.parse();
}

// ---------------------------------------------------------------------------
// Evaluation

using Env = std::unordered_map<std::string, double>;

namespace detail {

inline double checked(double v) {
    if (!std::isfinite(v)) throw NonFiniteError();
    return v;
}

} // namespace detail

inline double evaluate(const ExprPtr& e, const Env& env) {
    switch (e->kind) {
    case Expr::Kind::Number:
        return e->number;
    case Expr::Kind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) throw UnboundVariableError(e->name);
        return it->second;
    }
    case Expr::Kind::Neg:
        return -evaluate(e->args[0], env);
    case Expr::Kind::Binary: {
        double l = evaluate(e->args[0], env);
        double r = evaluate(e->args[1], env);
        switch (e->name[0]) {
        case '+': return detail::checked(l + r);
        case '-': return detail::checked(l - r);
        case '*': return detail::checked(l * r);
        case '/':
            if (r == 0.0) throw DivisionByZeroError();
            return detail::checked(l / r);
        case '^': {
            double v = std::pow(l, r);
            if (std::isnan(v) && !std::isnan(l) && !std::isnan(r)) throw DomainError("pow", l);
            return detail::checked(v);
        }
        }
        throw ParseError("corrupt binary node");
    }
    case Expr::Kind::Call: {
        const std::string& fn = e->name;
        double a = evaluate(e->args[0], env);
        if (fn == "sqrt") {
            if (a < 0.0) throw DomainError("sqrt", a);
            return std::sqrt(a);
        }
        if (fn == "abs") return std::fabs(a);
        if (fn == "sin") return detail::checked(std::sin(a));
        if (fn == "cos") return detail::checked(std::cos(a));
        if (fn == "tan") return detail::checked(std::tan(a));
        double b = evaluate(e->args[1], env);
        if (fn == "min") return std::fmin(a, b);
        if (fn == "max") return std::fmax(a, b);
        throw ParseError("corrupt call node: " + fn);
    }
    case Expr::Kind::Select: {
        double l = evaluate(e->args[0], env);
        double r = evaluate(e->args[1], env);
        bool cond;
        if (e->name == "<") cond = l < r;
        else if (e->name == "<=") cond = l <= r;
        else if (e->name == "=") cond = l == r;
        else if (e->name == ">=") cond = l >= r;
        else if (e->name == ">") cond = l > r;
        else throw ParseError("corrupt select node: " + e->name);
        return evaluate(e->args[cond ? 2 : 3], env);
    }
    }
    throw ParseError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Symbolic dimension inference

using DimEnv = std::unordered_map<std::string, Dim>;

// Infers the dimension of `e` under parameter dimensions `env`. Literals are
// dimensionless (physical constants must be declared parameters). Throws
// DimensionMismatchError on unsound bodies, UndeclaredParameterError on
// unknown names.
inline Dim infer_dim(const ExprPtr& e, const DimEnv& env) {
    switch (e->kind) {
    case Expr::Kind::Number:
        return Dim{};
    case Expr::Kind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) throw UndeclaredParameterError(e->name);
        return it->second;
    }
    case Expr::Kind::Neg:
        return infer_dim(e->args[0], env);
    case Expr::Kind::Binary: {
        Dim l = infer_dim(e->args[0], env);
        switch (e->name[0]) {
        case '+':
        case '-': {
            Dim r = infer_dim(e->args[1], env);
            if (l != r)
                throw DimensionMismatchError("'" + e->name + "' over " + to_string(l) +
                                             " and " + to_string(r));
            return l;
        }
        case '*': return l + infer_dim(e->args[1], env);
        case '/': return l - infer_dim(e->args[1], env);
        case '^': {
            Dim r = infer_dim(e->args[1], env);
            if (!r.is_dimensionless())
                throw DimensionMismatchError("exponent must be dimensionless");
            if (l.is_dimensionless()) return Dim{};
            // Dimensioned base: exponent must be a literal integer, or 0.5
            // with all exponents even.
            const Expr* exp_node = e->args[1].get();
            bool negated = false;
            while (exp_node->kind == Expr::Kind::Neg) {
                negated = !negated;
                exp_node = exp_node->args[0].get();
            }
            if (exp_node->kind != Expr::Kind::Number)
                throw DimensionMismatchError(
                    "dimensioned base requires a literal exponent");
            double k = negated ? -exp_node->number : exp_node->number;
            if (k == 0.5) {
                if (!l.all_even())
                    throw DimensionMismatchError("sqrt of " + to_string(l) +
                                                 " has fractional dimensions");
                return l.halved();
            }
            if (k != static_cast<double>(static_cast<int>(k)))
                throw DimensionMismatchError(
                    "dimensioned base requires an integer exponent");
            return l * static_cast<int>(k);
        }
        }
        throw ParseError("corrupt binary node");
    }
    case Expr::Kind::Call: {
        const std::string& fn = e->name;
        Dim a = infer_dim(e->args[0], env);
        if (fn == "sqrt") {
            if (!a.all_even())
                throw DimensionMismatchError("sqrt of " + to_string(a) +
                                             " has fractional dimensions");
            return a.halved();
        }
        if (fn == "abs") return a;
        if (fn == "sin" || fn == "cos" || fn == "tan") {
            if (!a.is_dimensionless())
                throw DimensionMismatchError(fn + " requires a dimensionless argument, got " +
                                             to_string(a));
            return Dim{};
        }
        Dim b = infer_dim(e->args[1], env);
        if (a != b)
            throw DimensionMismatchError(fn + " over " + to_string(a) + " and " + to_string(b));
        return a;
    }
    case Expr::Kind::Select: {
        Dim l = infer_dim(e->args[0], env);
        Dim r = infer_dim(e->args[1], env);
        if (l != r)
            throw DimensionMismatchError("select comparison over " + to_string(l) + " and " +
                                         to_string(r));
        Dim t = infer_dim(e->args[2], env);
        Dim f = infer_dim(e->args[3], env);
        if (t != f)
            throw DimensionMismatchError("select branches disagree: " + to_string(t) + " vs " +
                                         to_string(f));
        return t;
    }
    }
    throw ParseError("corrupt expression node");
}

// Collects every variable name referenced by `e` into `out`.
inline void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
    if (e->kind == Expr::Kind::Var) {
        out.push_back(e->name);
        return;
    }
    for (const auto& a : e->args) collect_vars(a, out);
}

// ---------------------------------------------------------------------------
// Printing (minimal parentheses; parse(print(e)) is structurally equal to e)

namespace detail {

// Precedence levels: additive 1, multiplicative 2, unary 3, power 4, atom 5.
inline int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Binary:
        if (e.name == "+" || e.name == "-") return 1;
        if (e.name == "*" || e.name == "/") return 2;
        return 4; // ^
    case Expr::Kind::Neg:
        return 3;
    default:
        return 5;
    }
}

inline void print_expr(const Expr& e, std::string& out) {
    auto child = [&](const Expr& c, int min_prec) {
        bool parens = precedence(c) < min_prec;
        if (parens) out += "(";
        print_expr(c, out);
        if (parens) out += ")";
    };
    switch (e.kind) {
    case Expr::Kind::Number:
        if (e.number < 0) {
            // Negative literals only arise from programmatic construction;
            // parenthesize so reparsing preserves structure as a Neg node is
            // never produced here.
            out += "(" + format_double(e.number) + ")";
        } else {
            out += format_double(e.number);
        }
        return;
    case Expr::Kind::Var:
        out += e.name;
        return;
    case Expr::Kind::Neg:
        out += "-";
        child(*e.args[0], 3);
        return;
    case Expr::Kind::Binary: {
        int prec = precedence(e);
        if (e.name == "^") {
            child(*e.args[0], 5);
            out += "^";
            child(*e.args[1], 3);
            return;
        }
        child(*e.args[0], prec);
        out += " " + e.name + " ";
        // Left-associative: right child needs strictly higher precedence.
        child(*e.args[1], prec + 1);
        return;
    }
    case Expr::Kind::Call: {
        out += e.name + "(";
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            print_expr(*e.args[i], out);
        }
        out += ")";
        return;
    }
    case Expr::Kind::Select:
        out += "select(";
        print_expr(*e.args[0], out);
        out += " " + e.name + " ";
        print_expr(*e.args[1], out);
        out += ", ";
        print_expr(*e.args[2], out);
        out += ", ";
        print_expr(*e.args[3], out);
        out += ")";
        return;
    }
}

} // namespace detail

inline std::string to_string(const ExprPtr& e) {
    std::string out;
    detail::print_expr(*e, out);
    return out;
}

} // namespace ipg
