#pragma once

// Arithmetic expressions over variables x1..xd.
//
// Grammar (precedence from loosest to tightest):
//
//   expr    := term   { ('+' | '-') term }
//   term    := unary  { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]          (right-associative)
//   primary := number | 'x' index | name '(' expr ')' | '(' expr ')'
//   name    := exp | log | sin | cos | sqrt | tanh
//
// Numbers are decimal literals with an optional exponent (1, 0.5, 2.5e-3).

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bseries/errors.hpp"
#include "bseries/jet.hpp"

namespace bseries {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Func { kExp, kLog, kSin, kCos, kSqrt, kTanh };

struct Expr {
  enum class Kind { kConstant, kVariable, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall };

  Kind kind = Kind::kConstant;
  double value = 0.0;    // kConstant
  std::size_t var = 0;   // kVariable, 0-based
  Func func = Func::kExp;  // kCall
  std::vector<ExprPtr> args;
};

ExprPtr make_constant(double v);
ExprPtr make_variable(std::size_t index);
ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_neg(ExprPtr arg);
ExprPtr make_call(Func f, ExprPtr arg);

/// Parses a single expression; variable indices must not exceed `dim`.
ExprPtr parse_expression(std::string_view text, std::size_t dim);

/// Splits on ';' or newlines and parses each non-empty piece. Reported error
/// offsets are relative to the whole `source`.
std::vector<ExprPtr> parse_expression_list(std::string_view source, std::size_t dim);

/// Fully parenthesized text that parses back to a structurally equal tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Largest 1-based variable index used, 0 when none.
std::size_t max_variable(const Expr& e);

/// Evaluation over a plain number type (double, long double).
template <typename T>
T evaluate(const Expr& e, std::span<const T> x) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConstant:
      return static_cast<T>(e.value);
    case K::kVariable:
      return x[e.var];
    case K::kAdd:
      return evaluate(*e.args[0], x) + evaluate(*e.args[1], x);
    case K::kSub:
      return evaluate(*e.args[0], x) - evaluate(*e.args[1], x);
    case K::kMul:
      return evaluate(*e.args[0], x) * evaluate(*e.args[1], x);
    case K::kDiv: {
      const T d = evaluate(*e.args[1], x);
      if (d == T(0)) throw DomainError("division by zero");
      return evaluate(*e.args[0], x) / d;
    }
    case K::kPow: {
      const T b = evaluate(*e.args[0], x);
      const T p = evaluate(*e.args[1], x);
      if (p != std::floor(p) && !(b > T(0))) throw DomainError("non-integer power of nonpositive base");
      return std::pow(b, p);
    }
    case K::kNeg:
      return -evaluate(*e.args[0], x);
    case K::kCall: {
      const T a = evaluate(*e.args[0], x);
      switch (e.func) {
        case Func::kExp:
          return std::exp(a);
        case Func::kLog:
          if (!(a > T(0))) throw DomainError("log of nonpositive value");
          return std::log(a);
        case Func::kSin:
          return std::sin(a);
        case Func::kCos:
          return std::cos(a);
        case Func::kSqrt:
          if (a < T(0)) throw DomainError("sqrt of negative value");
          return std::sqrt(a);
        case Func::kTanh:
          return std::tanh(a);
      }
    }
  }
  throw std::logic_error("unknown expression node");
}

/// Propagates jets through the expression; `vars[i]` is the jet of x_{i+1}.
Jet evaluate_jet(const Expr& e, std::span<const Jet> vars);

}  // namespace bseries
