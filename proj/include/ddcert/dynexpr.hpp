#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddcert::expr {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& message);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    EvalError(std::string subexpression, const std::string& message);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Sqrt, Abs };

/// Immutable expression tree. Children are shared, so copies are cheap.
class Expr {
public:
    static Expr number(double v);
    static Expr var(std::size_t index);  ///< 1-based: var(1) is x1
    static Expr unary(Op op, Expr arg);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    Op op() const { return node_->op; }
    double value() const { return node_->value; }
    std::size_t index() const { return node_->index; }
    const Expr& lhs() const { return node_->kids.at(0); }
    const Expr& rhs() const { return node_->kids.at(1); }
    std::size_t arity() const { return node_->kids.size(); }

    /// Largest variable index referenced (0 if none).
    std::size_t max_var() const;

    double eval(std::span<const double> x) const;

    /// Fully parenthesized text that parses back to an equal tree.
    std::string print() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node {
        Op op = Op::Number;
        double value = 0.0;
        std::size_t index = 0;
        std::vector<Expr> kids;
    };
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Grammar (whitespace-insensitive):
///   sum    := prod (('+'|'-') prod)*
///   prod   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?      right-associative
///   atom   := NUMBER | 'x'INDEX | FUNC '(' sum ')' | '(' sum ')'
///   FUNC   := sin | cos | sqrt | abs
Expr parse(std::string_view source);

inline double eval(const Expr& e, std::span<const double> x) { return e.eval(x); }
inline std::string print(const Expr& e) { return e.print(); }

}  // namespace ddcert::expr
