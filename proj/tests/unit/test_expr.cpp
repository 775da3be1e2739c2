#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "pdq/expr.hpp"

using namespace pdq;

TEST_CASE("constants and variables evaluate directly", "[expr]") {
  const auto two = parse_intensity("2.0");
  REQUIRE(two.root().kind == ExprKind::constant);
  REQUIRE(two.root().value == 2.0);
  REQUIRE(eval_intensity(two, {0, 0.0, 0.0}) == 2.0);
  REQUIRE(eval_intensity(two, {7, 3.5, 1.25}) == 2.0);

  const auto n = parse_intensity("n");
  REQUIRE(eval_intensity(n, {5, 0.0, 0.0}) == 5.0);
  const auto x = parse_intensity("x");
  REQUIRE(eval_intensity(x, {1, 0.25, 0.0}) == 0.25);
  const auto y = parse_intensity("y");
  REQUIRE(eval_intensity(y, {1, 0.0, 4.0}) == 4.0);
}

TEST_CASE("heavy-tail hazard expression", "[expr]") {
  const auto e = parse_intensity("6/(1+x)");
  REQUIRE(eval_intensity(e, {1, 2.0, 0.0}) == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(eval_intensity(e, {1, 0.0, 9.0}) == Catch::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("piecewise-constant in n via min", "[expr]") {
  const auto e = parse_intensity("1 + min(n, 3)*0.1");
  REQUIRE(eval_intensity(e, {5, 0.0, 0.0}) ==
          Catch::Approx(1.3).margin(1e-15));
  REQUIRE(eval_intensity(e, {0, 0.0, 0.0}) == Catch::Approx(1.0));
  REQUIRE(eval_intensity(e, {2, 0.0, 0.0}) == Catch::Approx(1.2));
}

TEST_CASE("operator precedence and grouping", "[expr]") {
  REQUIRE(eval_intensity(parse_intensity("2+3*4"), {}) == 14.0);
  REQUIRE(eval_intensity(parse_intensity("(2+3)*4"), {}) == 20.0);
  REQUIRE(eval_intensity(parse_intensity("2*3^2"), {}) == 18.0);
  REQUIRE(eval_intensity(parse_intensity("20/4/5"), {}) == 1.0);
  REQUIRE(eval_intensity(parse_intensity("7-3-2"), {}) == 2.0);
  REQUIRE(eval_intensity(parse_intensity("exp(0)"), {}) == 1.0);
  REQUIRE(eval_intensity(parse_intensity("log(exp(2))"), {}) ==
          Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("if_gt evaluates only the taken branch", "[expr]") {
  const auto e = parse_intensity("if_gt(x, 1, log(x - 1), 0.25)");
  // x <= 1: the log branch is out of domain but must not be touched.
  REQUIRE(eval_intensity(e, {1, 0.5, 0.0}) == 0.25);
  REQUIRE(eval_intensity(e, {1, 1.0, 0.0}) == 0.25);
  REQUIRE(eval_intensity(e, {1, 1.0 + std::exp(1.0), 0.0}) ==
          Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse errors carry positions", "[expr]") {
  REQUIRE_THROWS_AS(parse_intensity("z"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("foo(1)"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("min(1)"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("if_gt(1, 2, 3)"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("1 +"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("-1"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("(1"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity("1 2"), ParseError);
  REQUIRE_THROWS_AS(parse_intensity(""), ParseError);

  try {
    parse_intensity("1 + qq * 2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.position() == 4);
    REQUIRE(std::string(e.what()).find("qq") != std::string::npos);
  }
}

TEST_CASE("evaluation domain errors carry the offending state", "[expr]") {
  const auto div = parse_intensity("1/x");
  REQUIRE_THROWS_AS(eval_intensity(div, {1, 0.0, 0.0}), EvalError);
  const auto lg = parse_intensity("log(x)");
  REQUIRE_THROWS_AS(eval_intensity(lg, {1, 0.0, 0.0}), EvalError);
  // Negative final values are rejected: intensities must be non-negative.
  const auto neg = parse_intensity("0 - 1");
  REQUIRE_THROWS_AS(eval_intensity(neg, {}), EvalError);
  try {
    eval_intensity(div, {3, 0.0, 7.0});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    REQUIRE(e.state().n == 3);
    REQUIRE(e.state().y == 7.0);
  }
}

TEST_CASE("canonical print round-trips", "[expr]") {
  for (const char* text :
       {"1+2*3", "(1+2)*3", "x^2", "if_gt(n, 2.5, 1, 0.5)",
        "exp(log(min(x, y) + 1))", "6/(1+x)", "max(x, y)/(n + 1)",
        "2-(3-4)+x", "1/(2/(3/x))", "0.1", "1e2", "2.5e-3"}) {
    const auto e = parse_intensity(text);
    const std::string printed = e.str();
    const auto re = parse_intensity(printed);
    INFO(text << " -> " << printed);
    REQUIRE(expr_equal(e.root(), re.root()));
    REQUIRE(re.str() == printed);
  }
}

namespace {

ExprPtr random_tree(std::mt19937_64& g, int depth) {
  auto node = std::make_shared<ExprNode>();
  const auto pick = [&](int n) {
    return static_cast<int>(g() % static_cast<std::uint64_t>(n));
  };
  if (depth <= 0 || pick(3) == 0) {
    switch (pick(4)) {
      case 0:
        node->kind = ExprKind::constant;
        node->value = (1 + pick(8)) / 2.0;
        break;
      case 1: node->kind = ExprKind::var_n; break;
      case 2: node->kind = ExprKind::var_x; break;
      default: node->kind = ExprKind::var_y; break;
    }
    return node;
  }
  const ExprKind kinds[] = {ExprKind::add,      ExprKind::sub,
                            ExprKind::mul,      ExprKind::div,
                            ExprKind::call_min, ExprKind::call_max,
                            ExprKind::call_exp, ExprKind::call_if_gt};
  node->kind = kinds[pick(8)];
  std::size_t arity = 2;
  if (node->kind == ExprKind::call_exp) arity = 1;
  if (node->kind == ExprKind::call_if_gt) arity = 4;
  for (std::size_t i = 0; i < arity; ++i)
    node->args.push_back(random_tree(g, depth - 1));
  return node;
}

std::string print_tree(const ExprNode& n) {
  std::string out;
  pdq::detail::print_expr(n, 1, out);
  return out;
}

}  // namespace

TEST_CASE("random trees survive print/parse round trips", "[expr]") {
  std::mt19937_64 g(20260815);
  for (int i = 0; i < 500; ++i) {
    const auto tree = random_tree(g, 4);
    const std::string printed = print_tree(*tree);
    const auto re = parse_intensity(printed);
    INFO(printed);
    REQUIRE(expr_equal(*tree, re.root()));
    REQUIRE(re.str() == printed);
  }
}

TEST_CASE("whitespace and scientific notation are accepted", "[expr]") {
  const auto e = parse_intensity("  1.5e1 \t+\n x ");
  REQUIRE(eval_intensity(e, {1, 2.0, 0.0}) == 17.0);
}
