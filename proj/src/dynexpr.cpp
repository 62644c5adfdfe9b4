#include "ddcert/dynexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ddcert::expr {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

EvalError::EvalError(std::string subexpression, const std::string& message)
    : std::runtime_error(message + " in '" + subexpression + "'"),
      subexpression_(std::move(subexpression)) {}

Expr Expr::number(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Number;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::var(std::size_t index) {
    if (index == 0) throw std::invalid_argument("variable indices are 1-based");
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->index = index;
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids.push_back(std::move(arg));
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids.push_back(std::move(lhs));
    n->kids.push_back(std::move(rhs));
    return Expr(std::move(n));
}

std::size_t Expr::max_var() const {
    if (op() == Op::Var) return index();
    std::size_t m = 0;
    for (const auto& k : node_->kids) m = std::max(m, k.max_var());
    return m;
}

namespace {

const char* func_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Sqrt: return "sqrt";
        case Op::Abs: return "abs";
        default: return nullptr;
    }
}

char binary_symbol(Op op) {
    switch (op) {
        case Op::Add: return '+';
        case Op::Sub: return '-';
        case Op::Mul: return '*';
        case Op::Div: return '/';
        case Op::Pow: return '^';
        default: return '?';
    }
}

std::string format_number(double v) {
    // Shortest representation that round-trips exactly.
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, end);
}

double checked(double v, const Expr& e, const char* what) {
    if (!std::isfinite(v)) throw EvalError(e.print(), std::string("non-finite result (") + what + ")");
    return v;
}

}  // namespace

double Expr::eval(std::span<const double> x) const {
    switch (op()) {
        case Op::Number:
            return value();
        case Op::Var:
            if (index() > x.size()) {
                throw EvalError(print(), "variable index exceeds state dimension " + std::to_string(x.size()));
            }
            return x[index() - 1];
        case Op::Neg:
            return -lhs().eval(x);
        case Op::Add: {
            const double a = lhs().eval(x);
            return checked(a + rhs().eval(x), *this, "addition");
        }
        case Op::Sub: {
            const double a = lhs().eval(x);
            return checked(a - rhs().eval(x), *this, "subtraction");
        }
        case Op::Mul: {
            const double a = lhs().eval(x);
            return checked(a * rhs().eval(x), *this, "multiplication");
        }
        case Op::Div: {
            const double a = lhs().eval(x);
            return checked(a / rhs().eval(x), *this, "division");
        }
        case Op::Pow: {
            const double base = lhs().eval(x);
            return checked(std::pow(base, rhs().eval(x)), *this, "power");
        }
        case Op::Sin:
            return checked(std::sin(lhs().eval(x)), *this, "sin");
        case Op::Cos:
            return checked(std::cos(lhs().eval(x)), *this, "cos");
        case Op::Sqrt:
            return checked(std::sqrt(lhs().eval(x)), *this, "sqrt of negative");
        case Op::Abs:
            return std::abs(lhs().eval(x));
    }
    throw std::logic_error("eval: unknown op");
}

std::string Expr::print() const {
    switch (op()) {
        case Op::Number: {
            const double v = value();
            // Negative literals only arise from constructed trees; keep them atomic.
            return v < 0 || std::signbit(v) ? "(" + format_number(v) + ")" : format_number(v);
        }
        case Op::Var:
            return "x" + std::to_string(index());
        case Op::Neg:
            return "(-" + lhs().print() + ")";
        case Op::Sin:
        case Op::Cos:
        case Op::Sqrt:
        case Op::Abs:
            return std::string(func_name(op())) + "(" + lhs().print() + ")";
        default:
            return "(" + lhs().print() + " " + binary_symbol(op()) + " " + rhs().print() + ")";
    }
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Number:
            // Bitwise comparison so that -0.0 and 0.0 are distinguished.
            return std::signbit(a.value()) == std::signbit(b.value()) && a.value() == b.value();
        case Op::Var:
            return a.index() == b.index();
        default:
            if (a.arity() != b.arity()) return false;
            for (std::size_t i = 0; i < a.arity(); ++i) {
                if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
            }
            return true;
    }
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        Expr e = sum();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' before end of input");
        if (src_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    Expr sum() {
        Expr e = prod();
        while (true) {
            if (accept('+')) e = Expr::binary(Op::Add, e, prod());
            else if (accept('-')) e = Expr::binary(Op::Sub, e, prod());
            else return e;
        }
    }

    Expr prod() {
        Expr e = unary();
        while (true) {
            if (accept('*')) e = Expr::binary(Op::Mul, e, unary());
            else if (accept('/')) e = Expr::binary(Op::Div, e, unary());
            else return e;
        }
    }

    Expr unary() {
        if (accept('-')) return Expr::unary(Op::Neg, unary());
        return power();
    }

    // '^' binds tighter than unary minus and is right-associative.
    Expr power() {
        Expr base = atom();
        if (!accept('^')) return base;
        return Expr::binary(Op::Pow, base, unary());
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(std::string("unexpected '") + c + "'");
    }

    Expr number() {
        const std::size_t at = pos_;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
        if (ec != std::errc()) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        if (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
            throw ParseError(pos_, "implicit multiplication is not supported; use '*'");
        }
        (void)at;
        return Expr::number(v);
    }

    Expr identifier() {
        const std::size_t at = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(at, pos_ - at);

        if (name.size() >= 2 && name[0] == 'x') {
            std::size_t idx = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
            if (ec == std::errc() && ptr == name.data() + name.size() && idx >= 1 && name[1] != '0') {
                return Expr::var(idx);
            }
        }

        Op op;
        if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "sqrt") op = Op::Sqrt;
        else if (name == "abs") op = Op::Abs;
        else throw ParseError(at, "unknown identifier '" + std::string(name) + "'");

        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != '(') fail("expected '(' after function name");
        ++pos_;
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ')') {
            fail(std::string("arity error: ") + func_name(op) + " takes exactly 1 argument, got 0");
        }
        Expr arg = sum();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ',') {
            fail(std::string("arity error: ") + func_name(op) + " takes exactly 1 argument");
        }
        expect(')');
        return Expr::unary(op, std::move(arg));
    }
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).run(); }

}  // namespace ddcert::expr
