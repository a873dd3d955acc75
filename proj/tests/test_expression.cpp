#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bseries/errors.hpp"
#include "bseries/expression.hpp"

namespace {

using namespace bseries;

double eval(std::string_view text, std::vector<double> x) {
  const auto e = parse_expression(text, x.size());
  return evaluate<double>(*e, std::span<const double>(x));
}

TEST(Parser, Precedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3", {0}), 7.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2", {0}), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2 ^ 2", {0}), -4.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3", {0}), 9.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2", {0}), 1.0);
  EXPECT_DOUBLE_EQ(eval("5 - 3 - 1", {0}), 1.0);
  EXPECT_DOUBLE_EQ(eval("x1 ^ -2", {2.0}), 0.25);
  EXPECT_DOUBLE_EQ(eval("2.5e-1 * 4", {0}), 1.0);
}

TEST(Parser, VariablesAndFunctions) {
  EXPECT_DOUBLE_EQ(eval("x1 * x2 + x2 ^ 2", {3.0, 0.5}), 1.75);
  EXPECT_DOUBLE_EQ(eval("exp(x1)", {1.0}), std::exp(1.0));
  EXPECT_DOUBLE_EQ(eval("log(x1) + sin(x1) + cos(x1) + sqrt(x1) + tanh(x1)", {0.7}),
                   std::log(0.7) + std::sin(0.7) + std::cos(0.7) + std::sqrt(0.7) + std::tanh(0.7));
}

TEST(Parser, ErrorOffsets) {
  try {
    parse_expression("x1 +", 1);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse_expression("x3", 2), ParseError);
  EXPECT_THROW(parse_expression("foo(x1)", 1), ParseError);
  EXPECT_THROW(parse_expression("(x1", 1), ParseError);
  EXPECT_THROW(parse_expression("x1 x1", 1), ParseError);
  EXPECT_THROW(parse_expression("", 1), ParseError);
}

TEST(Parser, ListOffsetsAreGlobal) {
  try {
    parse_expression_list("1; x1 *", 1);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  EXPECT_EQ(parse_expression_list("1; x1*x2 + x2^2", 2).size(), 2u);
  EXPECT_EQ(parse_expression_list("1\nx1\n", 1).size(), 2u);
}

TEST(Parser, PrintRoundTrip) {
  const char* cases[] = {"1", "x1*x2 + x2^2", "-x1^2", "exp(-x1/3) - 2^x2", "sqrt(x1)*tanh(x2) / (1 + x1)",
                         "x1^-2", "0.1 + 1e-3 * x2", "-(x1 - x2) * -3"};
  for (const char* c : cases) {
    const auto e = parse_expression(c, 2);
    const auto back = parse_expression(to_string(*e), 2);
    EXPECT_TRUE(structurally_equal(*e, *back)) << c << " -> " << to_string(*e);
  }
}

TEST(Evaluate, DomainErrors) {
  EXPECT_THROW(eval("log(x1)", {0.0}), DomainError);
  EXPECT_THROW(eval("sqrt(x1)", {-1.0}), DomainError);
  EXPECT_THROW(eval("1 / x1", {0.0}), DomainError);
  EXPECT_THROW(eval("x1 ^ 0.5", {-1.0}), DomainError);
  EXPECT_DOUBLE_EQ(eval("x1 ^ 3", {-2.0}), -8.0);
}

TEST(Evaluate, MaxVariable) {
  EXPECT_EQ(max_variable(*parse_expression("1 + x3", 3)), 3u);
  EXPECT_EQ(max_variable(*parse_expression("1", 3)), 0u);
}

}  // namespace
