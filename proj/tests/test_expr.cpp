#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "schw/expr.hpp"

using namespace schw;

TEST_CASE("basic evaluation and jets") {
    ScalarField f = ScalarField::parse("x1 + x2^2", 2);
    double x[2] = {1.0, 2.0};
    CHECK(f.eval(x) == doctest::Approx(5.0));

    Jet j = f.eval_jet(x, 2);
    std::vector<int> a10{1, 0}, a01{0, 1}, a20{2, 0}, a02{0, 2}, a11{1, 1};
    CHECK(j.value() == doctest::Approx(5.0));
    CHECK(j.partial(a10) == doctest::Approx(1.0));
    CHECK(j.partial(a01) == doctest::Approx(4.0));
    CHECK(j.partial(a20) == doctest::Approx(0.0));
    CHECK(j.partial(a02) == doctest::Approx(2.0));
    CHECK(j.partial(a11) == doctest::Approx(0.0));
}

TEST_CASE("constants and division") {
    ScalarField c = ScalarField::parse("3", 2);
    double x[2] = {9.0, -4.0};
    CHECK(c.eval(x) == doctest::Approx(3.0));
    CHECK(c.eval_jet(x, 3).max_abs_coeff() == doctest::Approx(3.0));

    ScalarField r = ScalarField::parse("1/(x1+1)", 1);
    double bad[1] = {-1.0};
    CHECK_THROWS_AS(r.eval(bad), DomainError);
    CHECK_THROWS_AS(r.eval_jet(bad, 2), DomainError);
    double ok[1] = {1.0};
    CHECK(r.eval(ok) == doctest::Approx(0.5));
}

TEST_CASE("grammar corners") {
    // '^' binds to the full base, including a leading minus.
    ScalarField f = ScalarField::parse("-2^2", 1);
    double x[1] = {0.0};
    CHECK(f.eval(x) == doctest::Approx(4.0));

    ScalarField g = ScalarField::parse("-(2^2)", 1);
    CHECK(g.eval(x) == doctest::Approx(-4.0));

    ScalarField h = ScalarField::parse("2*x1^3 - x1/2", 1);
    double y[1] = {2.0};
    CHECK(h.eval(y) == doctest::Approx(15.0));

    ScalarField neg = ScalarField::parse("x1^-1", 1);
    CHECK(neg.eval(y) == doctest::Approx(0.5));
}

TEST_CASE("errors carry positions") {
    CHECK_THROWS_AS(ScalarField::parse("x1 +", 2), ParseError);
    CHECK_THROWS_AS(ScalarField::parse("x3", 2), ParseError);
    CHECK_THROWS_AS(ScalarField::parse("(x1", 2), ParseError);
    CHECK_THROWS_AS(ScalarField::parse("x1 x2", 2), ParseError);
    CHECK_THROWS_AS(ScalarField::parse("x1^x2", 2), ParseError);
    CHECK_THROWS_AS(ScalarField::parse("x", 2), ParseError);

    try {
        ScalarField::parse("x1 + @", 2);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.pos == 5);
    }
}

TEST_CASE("whitespace and nesting") {
    ScalarField f = ScalarField::parse("  ( x1 + 2 ) * ( x1 - 2 )  ", 1);
    double x[1] = {3.0};
    CHECK(f.eval(x) == doctest::Approx(5.0));
}
