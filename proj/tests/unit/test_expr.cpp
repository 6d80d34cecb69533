#include <cmath>

#include "doctest.h"
#include "gascert/expr.hpp"

using namespace gascert;

TEST_CASE("parse delayed Ricker and evaluate at the fixed point") {
  const Expression e = parse("u1*exp(b*(1-u2))", 2, {"b"});
  CHECK(e.arity() == 2);
  CHECK(e.eval({1.0, 1.0}, {{"b", 0.5}}) == doctest::Approx(1.0).epsilon(1e-15));
  const DualVector d = e.eval_dual({1.0, 1.0}, {{"b", 0.5}});
  CHECK(d.value == doctest::Approx(1.0));
  CHECK(d.partials[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.partials[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_FALSE(d.non_differentiable);
}

TEST_CASE("identity in one variable") {
  const Expression e = parse("u1", 1, {});
  for (double x : {-3.0, 0.0, 2.5}) CHECK(e.eval({x}) == x);
}

TEST_CASE("variable index beyond k is rejected") {
  CHECK_THROWS_AS(parse("u3", 2, {}), ParseError);
  CHECK_THROWS_AS(parse("u0", 2, {}), ParseError);
}

TEST_CASE("unknown identifiers and syntax errors carry offsets") {
  try {
    parse("u1 + c", 1, {});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  try {
    parse("(u1 + 2", 1, {});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
  }
  CHECK_THROWS_AS(parse("", 1, {}), ParseError);
  CHECK_THROWS_AS(parse("exp(u1, u1)", 1, {}), ParseError);
  CHECK_THROWS_AS(parse("max(u1)", 1, {}), ParseError);
  CHECK_THROWS_AS(parse("u1 2", 1, {}), ParseError);
}

TEST_CASE("linear combination from the negative-feedback example") {
  const Expression e = parse("-(3/5)*u1-(3/5)*u2", 2, {});
  CHECK(e.eval({1.0, 1.0}) == doctest::Approx(-1.2).epsilon(1e-15));
}

TEST_CASE("division by zero is a domain error naming the node") {
  const Expression e = parse("1/u1", 1, {});
  try {
    e.eval({0.0});
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.node() == "1/u1");
    CHECK(err.input() == 0.0);
  }
  CHECK_FALSE(e.try_eval(std::vector<double>{0.0}).has_value());
}

TEST_CASE("log and sqrt of negative inputs are errors, not NaN") {
  CHECK_THROWS_AS(parse("log(u1)", 1, {}).eval({-1.0}), DomainError);
  CHECK_THROWS_AS(parse("log(u1)", 1, {}).eval({0.0}), DomainError);
  CHECK_THROWS_AS(parse("sqrt(u1)", 1, {}).eval({-1e-9}), DomainError);
  CHECK_THROWS_AS(parse("exp(u1)", 1, {}).eval({1000.0}), DomainError);
  CHECK_THROWS_AS(parse("u1^(-1)", 1, {}).eval({0.0}), DomainError);
  CHECK_THROWS_AS(parse("u1^0.5", 1, {}).eval({-4.0}), DomainError);
}

TEST_CASE("constant and product rule duals") {
  const DualVector c = parse("3", 2, {}).eval_dual({0.7, -2.0});
  CHECK(c.value == 3.0);
  CHECK(c.partials == std::vector<double>{0.0, 0.0});
  const DualVector p = parse("u1*u2", 2, {}).eval_dual({2.0, 3.0});
  CHECK(p.value == 6.0);
  CHECK(p.partials == std::vector<double>{3.0, 2.0});
}

TEST_CASE("precedence: ^ over unary minus over * / over + -") {
  CHECK(parse("-2^2", 1, {}).eval({0.0}) == -4.0);
  CHECK(parse("2^3^2", 1, {}).eval({0.0}) == 512.0);
  CHECK(parse("2*3+4", 1, {}).eval({0.0}) == 10.0);
  CHECK(parse("2+3*4", 1, {}).eval({0.0}) == 14.0);
  CHECK(parse("8/4/2", 1, {}).eval({0.0}) == 1.0);
  CHECK(parse("8-4-2", 1, {}).eval({0.0}) == 2.0);
  CHECK(parse("2^-1", 1, {}).eval({0.0}) == 0.5);
  CHECK(parse("  u1 *\t2 ", 1, {}).eval({3.0}) == 6.0);
}

TEST_CASE("abs at zero sets the non-differentiable flag") {
  const DualVector d = parse("abs(u1)", 1, {}).eval_dual({0.0});
  CHECK(d.non_differentiable);
  CHECK(d.partials[0] == 0.0);
  const DualVector e = parse("abs(u1)", 1, {}).eval_dual({-2.0});
  CHECK_FALSE(e.non_differentiable);
  CHECK(e.partials[0] == -1.0);
}

TEST_CASE("min and max select and differentiate the active branch") {
  const Expression e = parse("max(1 - u1, 0) + min(u1, u2)", 2, {});
  const DualVector d = e.eval_dual({0.25, 2.0});
  CHECK(d.value == doctest::Approx(1.0));
  CHECK(d.partials[0] == doctest::Approx(0.0));
  CHECK(d.partials[1] == doctest::Approx(0.0));
  CHECK(parse("max(u1, u2)", 2, {}).eval_dual({1.0, 1.0}).non_differentiable);
}

TEST_CASE("print then parse is structurally identical") {
  const char* texts[] = {"u1*exp(b*(1 - u2))",
                         "(b + 1)^2/((b*u1 + 1)*(b*u2 + 1))",
                         "-(u1 - 2)^-2",
                         "2^3^u1",
                         "(2^3)^u1",
                         "u1 - (u2 - 1)",
                         "u1/(u2/3)",
                         "-u1*-u2",
                         "max(abs(u1), sqrt(u2)) + log(u1 + 1)"};
  for (const char* t : texts) {
    const Expression a = parse(t, 2, {"b"});
    const Expression b = parse(a.to_string(), 2, {"b"});
    CHECK_MESSAGE(structurally_equal(a, b), t, " printed as ", a.to_string());
    CHECK(a.to_string() == b.to_string());
  }
}

TEST_CASE("bind and substitute") {
  const Expression e = parse("a*u1 + u2", 2, {"a"});
  const Expression bound = e.bind({{"a", 2.0}});
  CHECK(bound.parameters().empty());
  CHECK(bound.eval({1.0, 3.0}) == 5.0);
  const Expression s = e.substitute(std::vector<Expression>{Expression::variable(2), Expression::constant(1.0)});
  CHECK(s.eval({0.0, 4.0}, {{"a", 3.0}}) == 13.0);
  CHECK_THROWS_AS(e.eval({1.0, 1.0}), Error);
}

TEST_CASE("shared subtrees are evaluated once per call but give consistent results") {
  Expression x = Expression::variable(1);
  for (int i = 0; i < 40; ++i) x = x * x / x;  // forms a DAG with heavy sharing
  CHECK(x.node_count() < 200);
  CHECK(x.eval({1.7}) == doctest::Approx(1.7));
  CHECK(x.eval_dual({1.7}).partials[0] == doctest::Approx(1.0));
}
