#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace sugra {
namespace {

using testing::Rng;

const Chart kUx({"u", "x1", "x2", "x3", "v"});

TEST(Chart, RejectsDuplicatesReservedAndOversize) {
  EXPECT_THROW(Chart({"a", "a"}), Error);
  EXPECT_THROW(Chart({"sin"}), Error);
  EXPECT_THROW(Chart({"1x"}), Error);
  EXPECT_THROW(Chart(std::vector<std::string>{}), Error);
  EXPECT_THROW(testing::numbered_chart(12), Error);
  EXPECT_EQ(testing::numbered_chart(11).dim(), 11u);
  EXPECT_EQ(kUx.index_of("x2"), 2u);
  EXPECT_FALSE(kUx.index_of("y"));
}

TEST(Parse, SumOfSquares) {
  Expr e = parse_expr("x1^2 + x2^2 + x3^2", kUx);
  ASSERT_EQ(e.kind(), ExprKind::Add);
  ASSERT_EQ(e.args().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const Expr& t = e.args()[i];
    ASSERT_EQ(t.kind(), ExprKind::IntPow);
    EXPECT_EQ(t.exponent(), 2);
    ASSERT_EQ(t.args()[0].kind(), ExprKind::Coord);
    EXPECT_EQ(t.args()[0].coord_index(), i + 1);
  }
}

TEST(Parse, ExpOverConstant) {
  Expr e = parse_expr("exp(2*x1)/4", kUx);
  ASSERT_EQ(e.kind(), ExprKind::Div);
  EXPECT_EQ(e.args()[1].kind(), ExprKind::Const);
  EXPECT_EQ(e.args()[1].value(), 4.0);
  const Expr& ex = e.args()[0];
  ASSERT_EQ(ex.kind(), ExprKind::Exp);
  const Expr& m = ex.args()[0];
  ASSERT_EQ(m.kind(), ExprKind::Mul);
  EXPECT_EQ(m.args()[0].value(), 2.0);
  EXPECT_EQ(m.args()[1].coord_index(), 1u);
}

TEST(Parse, UnknownIdentifier) {
  try {
    parse_expr("1/6 * f^2", kUx);
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::UnknownIdentifier);
    EXPECT_EQ(e.position(), 6u);
  }
}

TEST(Parse, MalformedExponent) {
  for (const char* s : {"x1^", "x1^1.5", "x1^x2", "x1^(2)", "x1^-"}) {
    try {
      parse_expr(s, kUx);
      FAIL() << s;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), ParseErrorKind::MalformedExponent) << s;
    }
  }
}

TEST(Parse, PowerBindsTighterThanUnaryMinus) {
  const Point p{0, 3, 0, 0, 0};
  EXPECT_EQ(eval(parse_expr("-x1^2", kUx), p), -9.0);
  EXPECT_EQ(eval(parse_expr("x1^-2", kUx), p), 1.0 / 9.0);
  EXPECT_EQ(eval(parse_expr("2*-x1", kUx), p), -6.0);
  EXPECT_EQ(eval(parse_expr("8/2/2", kUx), p), 2.0);
  EXPECT_EQ(eval(parse_expr("8-2-2", kUx), p), 4.0);
  EXPECT_EQ(eval(parse_expr("1.5e1 + .5", kUx), p), 15.5);
}

TEST(Parse, FuzzCorpusIsRejectedWithoutCrashing) {
  const char* corpus[] = {"",      " ",      "(",        ")",        "x1 +",   "+ x1",    "x1 x2",  "sin",
                          "sin x1", "sin()", "sin(x1",   "x1)",      "2..3",   "1e",      "1e+",    "*2",
                          "x1 ** 2", "--x1", "x1^^2",    "x1^2^2",   "exp(,)", "()",      "foo(x1)", "x1 $ 2",
                          "u v",    "3 (x1)", "cos(x1)(x2)", "x1/",   "1/(2",  "sqrt(-)", "é",      "x1^+",
                          "1e400e", "x1;"};
  for (const char* s : corpus) EXPECT_THROW(parse_expr(s, kUx), ParseError) << '"' << s << '"';

  // Random mutations of valid text must either parse or raise ParseError.
  Rng rng(7);
  const std::string seeds[] = {"x1^2 + x2^2 + x3^2", "exp(2*x1)/4", "sqrt(1 - u^2) * sin(v)", "-(x1 + 2)^-3"};
  const std::string alphabet = "x1u v()+-*/^.e0123456789 sincoexpqrt,";
  for (int trial = 0; trial < 3000; ++trial) {
    std::string s = seeds[trial % 4];
    const int edits = 1 + trial % 3;
    for (int k = 0; k < edits; ++k) {
      std::size_t pos = std::uniform_int_distribution<std::size_t>(0, s.size())(rng);
      char ch = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      switch (trial % 3) {
        case 0: s.insert(s.begin() + pos, ch); break;
        case 1: if (pos < s.size()) s.erase(s.begin() + pos); break;
        default: if (pos < s.size()) s[pos] = ch; break;
      }
    }
    try {
      parse_expr(s, kUx);
    } catch (const ParseError&) {
    }
  }
}

TEST(Print, RoundTripsRandomExpressions) {
  Rng rng(11);
  const std::vector<std::size_t> coords{0, 1, 2, 3, 4};
  for (int t = 0; t < 200; ++t) {
    Expr e = testing::random_expr(coords, rng, 3);
    Expr back = parse_expr(to_string(e, kUx), kUx);
    for (int k = 0; k < 5; ++k) {
      Point p = testing::random_point(5, rng, -1.0, 1.0);
      EXPECT_EQ(eval(back, p), eval(e, p)) << to_string(e, kUx);
    }
  }
}

TEST(Diff, CalculusRules) {
  const Chart c({"u"});
  Expr d = diff(parse_expr("sin(u)", c), 0);
  ASSERT_EQ(d.kind(), ExprKind::Cos);
  EXPECT_EQ(d.args()[0].coord_index(), 0u);

  Expr q = diff(parse_expr("x1^2+x2^2+x3^2", kUx), 1);
  for (double x : {-1.0, 0.25, 3.0}) EXPECT_EQ(eval(q, Point{0, x, 7, 7, 0}), 2.0 * x);
  EXPECT_TRUE(diff(parse_expr("x2^3", kUx), 1).is_zero());
}

TEST(Diff, MatchesCentralDifferenceAtSpecificPoint) {
  Expr e = parse_expr("exp(2*x1)/4", kUx);
  Point p{0, 0.3, 0, 0, 0};
  const double fd = testing::fd_diff([&](const Point& q) { return eval(e, q); }, p, 1, 1e-5);
  EXPECT_NEAR(eval(diff(e, 1), p), fd, 1e-8);
  EXPECT_NEAR(eval(diff(e, 1), p), std::exp(0.6) / 2.0, 1e-15);
}

TEST(Diff, MatchesFiniteDifferencesOnRandomExpressions) {
  Rng rng(3);
  const std::vector<std::size_t> coords{0, 1, 2, 3, 4};
  for (int t = 0; t < 100; ++t) {
    Expr e = testing::random_expr(coords, rng, 3);
    Point p = testing::random_point(5, rng);
    for (std::size_t i = 0; i < 5; ++i) {
      const double exact = eval(diff(e, i), p);
      const double fd = testing::fd_diff([&](const Point& q) { return eval(e, q); }, p, i, 1e-5);
      EXPECT_NEAR(exact, fd, 1e-6 * std::max(1.0, std::abs(exact))) << to_string(e, kUx);
    }
  }
}

TEST(Diff, MixedPartialsCommute) {
  Rng rng(5);
  const std::vector<std::size_t> coords{0, 1, 2, 3, 4};
  for (int t = 0; t < 20; ++t) {
    Expr e = testing::random_expr(coords, rng, 3);
    for (int k = 0; k < 5; ++k) {
      Point p = testing::random_point(5, rng);
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          const double a = eval(diff(diff(e, i), j), p), b = eval(diff(diff(e, j), i), p);
          EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
        }
      }
    }
  }
}

TEST(Eval, Arithmetic) {
  EXPECT_EQ(eval(parse_expr("x1^2", kUx), Point{0, 2, 0, 0, 0}), 4.0);
  EXPECT_DOUBLE_EQ(eval(parse_expr("1/6 * u^2 * (x1^2+x2^2+x3^2)", kUx), Point{1, 1, 1, 1, 0}), 0.5);
}

TEST(Eval, DomainErrorsCarryTheSubexpression) {
  try {
    eval(parse_expr("1 + sqrt(u)", kUx), Point{-1, 0, 0, 0, 0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.offending().kind(), ExprKind::Sqrt);
  }
  try {
    eval(parse_expr("x1 / (u - 1)", kUx), Point{1, 0, 0, 0, 0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.offending().kind(), ExprKind::Div);
  }
  EXPECT_THROW(eval(parse_expr("u^-2", kUx), Point{0, 0, 0, 0, 0}), DomainError);
}

TEST(Tape, SharesCommonSubexpressions) {
  Expr s = parse_expr("sin(x1 + x2)", kUx);
  std::vector<Expr> outs{s * s, s + Expr::constant(1.0), diff(s, 1)};
  Tape tape(outs);
  EXPECT_EQ(tape.output_count(), 3u);
  Tape single(std::vector<Expr>{s});
  EXPECT_LT(tape.op_count(), 3 * single.op_count() + 6);
  Point p{0, 0.2, 0.3, 0, 0};
  auto v = tape.run(p);
  EXPECT_DOUBLE_EQ(v[0], std::sin(0.5) * std::sin(0.5));
  EXPECT_DOUBLE_EQ(v[2], std::cos(0.5));
}

TEST(Expr, StructuralEqualityAndSimplification) {
  Expr x = Expr::coord(1);
  EXPECT_TRUE(structurally_equal(x + Expr(), x));
  EXPECT_TRUE(structurally_equal(Expr::mul({Expr::constant(1.0), x}), x));
  EXPECT_TRUE(Expr::mul({Expr::constant(0.0), x}).is_zero());
  EXPECT_FALSE(structurally_equal(x + Expr::constant(1.0), x));
  EXPECT_EQ(node_count(x * x + x), 3u);
}

}  // namespace
}  // namespace sugra
