#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "ipg/expr.hpp"
#include "ipg/units.hpp"

using namespace ipg;

TEST_CASE("unit parsing produces SI dimension vectors") {
    CHECK(parse_unit("m/s") == Dim{{1, 0, -1, 0, 0, 0, 0}});
    CHECK(parse_unit("m/s^2") == Dim{{1, 0, -2, 0, 0, 0, 0}});
    CHECK(parse_unit("kg*m^2/s") == Dim{{2, 1, -1, 0, 0, 0, 0}});
    CHECK(parse_unit("kg*m/s") == Dim{{1, 1, -1, 0, 0, 0, 0}});
    CHECK(parse_unit("N") == parse_unit("kg*m/s^2"));
    CHECK(parse_unit("J") == parse_unit("N*m"));
    CHECK(parse_unit("W") == parse_unit("J/s"));
    CHECK(parse_unit("Hz") == parse_unit("1/s"));
    CHECK(parse_unit("N*s") == parse_unit("kg*m/s"));
    CHECK(parse_unit("N/m") == Dim{{0, 1, -2, 0, 0, 0, 0}});
}

TEST_CASE("angles and ratios are dimensionless") {
    CHECK(parse_unit("rad").is_dimensionless());
    CHECK(parse_unit("dimensionless").is_dimensionless());
    CHECK(parse_unit("rad/s") == parse_unit("1/s"));
    CHECK(parse_unit("rad/s^2") == parse_unit("1/s^2"));
}

TEST_CASE("unknown and malformed units are rejected") {
    CHECK_THROWS_AS(parse_unit("furlong"), UnknownUnitError);
    CHECK_THROWS_AS(parse_unit("m//s"), ParseError);
    CHECK_THROWS_AS(parse_unit("m^"), ParseError);
    CHECK_THROWS_AS(parse_unit(""), ParseError);
}

TEST_CASE("expression evaluation: kinematics worked example") {
    auto e = parse_expr("initial_velocity + acceleration * elapsed_time");
    Env env{{"initial_velocity", 10.0}, {"acceleration", 1.5}, {"elapsed_time", 4.0}};
    CHECK(evaluate(e, env) == 16.0);
}

TEST_CASE("expression evaluation: restitution ratio") {
    auto e = parse_expr("(v2_final - v1_final) / (v1_initial - v2_initial)");
    Env env{{"v1_initial", 10.0}, {"v2_initial", 0.0}, {"v1_final", 2.5}, {"v2_final", 7.5}};
    CHECK(evaluate(e, env) == 0.5);
}

TEST_CASE("moment-of-inertia body parses to the expected shape") {
    auto e = parse_expr("(1/2) * mass * radius^2");
    REQUIRE(e->kind == Expr::Kind::Binary);
    CHECK(e->name == "*");
    // Left subtree: (1/2) * mass, right subtree: radius^2.
    REQUIRE(e->args[1]->kind == Expr::Kind::Binary);
    CHECK(e->args[1]->name == "^");
    CHECK(e->args[1]->args[0]->name == "radius");
    Env env{{"mass", 12.0}, {"radius", 0.25}};
    CHECK(evaluate(e, env) == 0.375);
}

TEST_CASE("precedence and associativity") {
    CHECK(evaluate(parse_expr("2 + 3 * 4"), {}) == 14.0);
    CHECK(evaluate(parse_expr("2 * 3 ^ 2"), {}) == 18.0);
    CHECK(evaluate(parse_expr("8 - 3 - 2"), {}) == 3.0);        // left associative
    CHECK(evaluate(parse_expr("2 ^ 3 ^ 2"), {}) == 512.0);      // right associative
    CHECK(evaluate(parse_expr("-3 ^ 2"), {}) == -9.0);          // '^' binds tighter than '-'
    CHECK(evaluate(parse_expr("2 ^ -1"), {}) == 0.5);
    CHECK(evaluate(parse_expr("18 / 3 / 2"), {}) == 3.0);
}

TEST_CASE("functions") {
    CHECK(evaluate(parse_expr("sqrt(16)"), {}) == 4.0);
    CHECK(evaluate(parse_expr("abs(-3.5)"), {}) == 3.5);
    CHECK(evaluate(parse_expr("min(2, 5)"), {}) == 2.0);
    CHECK(evaluate(parse_expr("max(2, 5)"), {}) == 5.0);
    CHECK(evaluate(parse_expr("sin(0)"), {}) == 0.0);
    CHECK(evaluate(parse_expr("cos(0)"), {}) == 1.0);
    CHECK_THAT(evaluate(parse_expr("tan(0.785398163397448)"), {}),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("select comparisons and laziness") {
    Env env{{"x", -4.0}};
    // The untaken branch must not be evaluated: sqrt(-4) would throw.
    CHECK(evaluate(parse_expr("select(x >= 0, sqrt(x), 0 - x)"), env) == 4.0);
    CHECK(evaluate(parse_expr("select(x = 0, 0, 1 / x)"), Env{{"x", 0.0}}) == 0.0);
    CHECK(evaluate(parse_expr("select(1 < 2, 10, 20)"), {}) == 10.0);
    CHECK(evaluate(parse_expr("select(2 <= 2, 10, 20)"), {}) == 10.0);
    CHECK(evaluate(parse_expr("select(3 > 2, 10, 20)"), {}) == 10.0);
    CHECK(evaluate(parse_expr("select(1 >= 2, 10, 20)"), {}) == 20.0);
    CHECK(evaluate(parse_expr("select(1 == 1, 10, 20)"), {}) == 10.0);
}

TEST_CASE("evaluation error taxonomy") {
    CHECK_THROWS_AS(evaluate(parse_expr("1 / 0"), {}), DivisionByZeroError);
    CHECK_THROWS_AS(evaluate(parse_expr("x / (y - y)"), Env{{"x", 1}, {"y", 3}}),
                    DivisionByZeroError);
    CHECK_THROWS_AS(evaluate(parse_expr("sqrt(0 - 1)"), {}), DomainError);
    CHECK_THROWS_AS(evaluate(parse_expr("missing + 1"), {}), UnboundVariableError);
    CHECK_THROWS_AS(evaluate(parse_expr("a * b"), Env{{"a", 1e308}, {"b", 10.0}}),
                    NonFiniteError);
    CHECK_THROWS_AS(evaluate(parse_expr("(0 - 2) ^ 0.5"), {}), DomainError);

    try {
        evaluate(parse_expr("sqrt(0 - 9)"), {});
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.function() == "sqrt");
        CHECK(e.argument() == -9.0);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_expr("a +"), ParseError);
    CHECK_THROWS_AS(parse_expr("2 +* 3"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(1)"), ParseError);       // unknown function
    CHECK_THROWS_AS(parse_expr("sqrt(1, 2)"), ParseError);   // arity
    CHECK_THROWS_AS(parse_expr("(a + b"), ParseError);
    CHECK_THROWS_AS(parse_expr("a b"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("select(1, 2, 3)"), ParseError); // missing comparison
}

TEST_CASE("printer round-trips structurally") {
    const char* sources[] = {
        "initial_velocity + acceleration * elapsed_time",
        "(1/2) * mass * radius^2",
        "(v2_final - v1_final) / (v1_initial - v2_initial)",
        "sqrt(u^2 + 2 * a * s)",
        "u * sin(theta) * t - (1/2) * g * t^2",
        "select(x >= 0, sqrt(x), 0 - x)",
        "-(a + b) * -c",
        "2 ^ 3 ^ 2",
        "8 - (3 - 2)",
        "a / (b * c)",
        "min(max(a, b), abs(c - d))",
        "m1 * m2 / (m1 + m2)",
        "select(h2 >= 0, select(h2 <= r + 1e-9, h2, h1), h1)",
    };
    for (const char* s : sources) {
        CAPTURE(s);
        auto e1 = parse_expr(s);
        std::string printed = to_string(e1);
        CAPTURE(printed);
        auto e2 = parse_expr(printed);
        CHECK(expr_equal(e1, e2));
    }
}

TEST_CASE("evaluation is bit-deterministic") {
    auto e = parse_expr("sqrt(u^2 + 2 * a * s) * sin(theta) / (1 + mu)");
    Env env{{"u", 12.7}, {"a", 3.3}, {"s", 41.9}, {"theta", 0.61}, {"mu", 0.23}};
    double v1 = evaluate(e, env);
    double v2 = evaluate(e, env);
    CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
}

TEST_CASE("dimension inference accepts sound bodies") {
    DimEnv env{{"initial_velocity", parse_unit("m/s")},
               {"acceleration", parse_unit("m/s^2")},
               {"elapsed_time", parse_unit("s")}};
    CHECK(infer_dim(parse_expr("initial_velocity + acceleration * elapsed_time"), env) ==
          parse_unit("m/s"));

    DimEnv env2{{"g", parse_unit("m/s^2")}, {"height", parse_unit("m")}};
    CHECK(infer_dim(parse_expr("sqrt(2 * g * height)"), env2) == parse_unit("m/s"));
    CHECK(infer_dim(parse_expr("(2 * g * height) ^ 0.5"), env2) == parse_unit("m/s"));

    DimEnv env3{{"mass", parse_unit("kg")}, {"radius", parse_unit("m")}};
    CHECK(infer_dim(parse_expr("(1/2) * mass * radius^2"), env3) == parse_unit("kg*m^2"));

    // Literals are dimensionless; trig requires dimensionless arguments.
    DimEnv env4{{"u", parse_unit("m/s")}, {"theta", parse_unit("rad")},
                {"g", parse_unit("m/s^2")}};
    CHECK(infer_dim(parse_expr("u^2 * sin(2 * theta) / g"), env4) == parse_unit("m"));
}

TEST_CASE("dimension inference rejects unsound bodies") {
    DimEnv env{{"mass", parse_unit("kg")},
               {"elapsed_time", parse_unit("s")},
               {"velocity", parse_unit("m/s")}};
    CHECK_THROWS_AS(infer_dim(parse_expr("mass + elapsed_time"), env), DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("sin(mass)"), env), DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("sqrt(velocity)"), env), DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("mass ^ elapsed_time"), env), DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("mass ^ 1.7"), env), DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("select(mass > elapsed_time, 1, 2)"), env),
                    DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("select(mass > 0, mass, elapsed_time)"), env),
                    DimensionMismatchError);
    CHECK_THROWS_AS(infer_dim(parse_expr("mass + unknown_thing"), env),
                    UndeclaredParameterError);
}

TEST_CASE("dimensionless exponent expressions are allowed on dimensionless bases") {
    DimEnv env{{"ratio", Dim{}}, {"k", Dim{}}};
    CHECK(infer_dim(parse_expr("ratio ^ k"), env).is_dimensionless());
}
