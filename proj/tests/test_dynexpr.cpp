#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "ddcert/dynexpr.hpp"
#include "parser_cases.hpp"

using namespace ddcert::expr;

TEST_CASE("precedence builds the expected tree") {
    const Expr e = parse("x1 - 0.05*x2");
    REQUIRE(e.op() == Op::Sub);
    CHECK(e.lhs().op() == Op::Var);
    CHECK(e.lhs().index() == 1);
    REQUIRE(e.rhs().op() == Op::Mul);
    CHECK(e.rhs().lhs().value() == 0.05);
    CHECK(e.rhs().rhs().index() == 2);
}

TEST_CASE("nested calls") {
    const Expr e = parse("0.001*sqrt(abs(x1))");
    REQUIRE(e.op() == Op::Mul);
    REQUIRE(e.rhs().op() == Op::Sqrt);
    REQUIRE(e.rhs().lhs().op() == Op::Abs);
    CHECK(e.rhs().lhs().lhs().op() == Op::Var);
}

TEST_CASE("parser table prints exactly and round-trips") {
    for (const auto& c : kParserCases) {
        CAPTURE(c.source);
        const Expr e = parse(c.source);
        CHECK(e.print() == c.printed);
        CHECK(parse(e.print()) == e);
    }
}

TEST_CASE("syntax errors carry offsets") {
    auto offset_of = [](const char* s) -> long {
        try {
            parse(s);
        } catch (const ParseError& e) {
            return static_cast<long>(e.offset());
        }
        return -1;
    };
    CHECK(offset_of("sin(") == 4);
    CHECK(offset_of("x1 +") == 4);
    CHECK(offset_of("foo(x1)") == 0);
    CHECK(offset_of("x0") == 0);
    CHECK(offset_of("sin()") == 4);
    CHECK(offset_of("sin(x1, x2)") >= 0);
    CHECK(offset_of("2x1") == 1);
    CHECK(offset_of("(x1") >= 0);
    CHECK(offset_of("x1)") == 2);
    CHECK(offset_of("") == 0);
}

TEST_CASE("evaluation") {
    const std::vector<double> a{1, 0};
    CHECK(parse("x1 - 0.05*x2").eval(a) == 1.0);
    CHECK(parse("x2 + 0.05*(x1 - x2)").eval(a) == 0.05);
    CHECK(parse("2^3^2").eval(a) == 512.0);
    CHECK(parse("-2^2").eval(a) == -4.0);
    CHECK(parse("8/4/2").eval(a) == 1.0);
    const std::vector<double> z{0, 0};
    CHECK_THROWS_AS(parse("1/x1").eval(z), EvalError);
    try {
        parse("x2 + 1/x1").eval(z);
    } catch (const EvalError& e) {
        CHECK(e.subexpression() == "(1 / x1)");
    }
    CHECK_THROWS_AS(parse("sqrt(x1 - 1)").eval(z), EvalError);
    CHECK(parse("sqrt(abs(x1 - 1))").eval(z) == 1.0);
}

TEST_CASE("max_var") {
    CHECK(parse("x1 + x12*x3").max_var() == 12);
    CHECK(parse("3").max_var() == 0);
}
