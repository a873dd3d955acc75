#include "bseries/expression.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>

namespace bseries {

ExprPtr make_constant(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kConstant;
  e->value = v;
  return e;
}

ExprPtr make_variable(std::size_t index) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kVariable;
  e->var = index;
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

ExprPtr make_neg(ExprPtr arg) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kNeg;
  e->args = {std::move(arg)};
  return e;
}

ExprPtr make_call(Func f, ExprPtr arg) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kCall;
  e->func = f;
  e->args = {std::move(arg)};
  return e;
}

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr FuncName kFunctions[] = {
    {"exp", Func::kExp}, {"log", Func::kLog}, {"sin", Func::kSin},
    {"cos", Func::kCos}, {"sqrt", Func::kSqrt}, {"tanh", Func::kTanh},
};

std::string_view func_name(Func f) {
  for (const auto& fn : kFunctions) {
    if (fn.func == f) return fn.name;
  }
  return "?";
}

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t dim, std::size_t base_offset)
      : text_(text), dim_(dim), base_(base_offset) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (true) {
      skip_ws();
      if (accept('+')) {
        lhs = make_binary(Expr::Kind::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary(Expr::Kind::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (true) {
      skip_ws();
      if (accept('*')) {
        lhs = make_binary(Expr::Kind::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(Expr::Kind::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    skip_ws();
    if (accept('-')) return make_neg(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    skip_ws();
    if (accept('^')) return make_binary(Expr::Kind::kPow, base, parse_unary());
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_expr();
      skip_ws();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return make_constant(v);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);

    if (word.size() >= 2 && word[0] == 'x' &&
        word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      std::size_t index = 0;
      std::from_chars(word.data() + 1, word.data() + word.size(), index);
      if (index < 1 || index > dim_) {
        pos_ = start;
        fail("variable " + std::string(word) + " outside x1..x" + std::to_string(dim_));
      }
      return make_variable(index - 1);
    }
    for (const auto& fn : kFunctions) {
      if (fn.name == word) {
        skip_ws();
        if (!accept('(')) fail("expected '(' after " + std::string(word));
        ExprPtr arg = parse_expr();
        skip_ws();
        if (!accept(')')) fail("expected ')'");
        return make_call(fn.func, arg);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(word) + "'");
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, base_ + pos_); }

  std::string_view text_;
  std::size_t dim_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Integer value of a constant exponent, if it is one.
std::optional<long long> integer_exponent(const Expr& e) {
  double v = 0.0;
  if (e.kind == Expr::Kind::kConstant) {
    v = e.value;
  } else if (e.kind == Expr::Kind::kNeg && e.args[0]->kind == Expr::Kind::kConstant) {
    v = -e.args[0]->value;
  } else {
    return std::nullopt;
  }
  if (v != std::floor(v) || std::fabs(v) > 1e9) return std::nullopt;
  return static_cast<long long>(v);
}

}  // namespace

ExprPtr parse_expression(std::string_view text, std::size_t dim) { return ExprParser(text, dim, 0).parse(); }

std::vector<ExprPtr> parse_expression_list(std::string_view source, std::size_t dim) {
  std::vector<ExprPtr> out;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t stop = source.find_first_of(";\n", start);
    if (stop == std::string_view::npos) stop = source.size();
    const std::string_view piece = source.substr(start, stop - start);
    if (piece.find_first_not_of(" \t\r") != std::string_view::npos) {
      out.push_back(ExprParser(piece, dim, start).parse());
    }
    start = stop + 1;
  }
  return out;
}

std::string to_string(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConstant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      std::string s(buf);
      return e.value < 0 ? "(0" + s + ")" : s;
    }
    case K::kVariable:
      return "x" + std::to_string(e.var + 1);
    case K::kAdd:
      return "(" + to_string(*e.args[0]) + " + " + to_string(*e.args[1]) + ")";
    case K::kSub:
      return "(" + to_string(*e.args[0]) + " - " + to_string(*e.args[1]) + ")";
    case K::kMul:
      return "(" + to_string(*e.args[0]) + " * " + to_string(*e.args[1]) + ")";
    case K::kDiv:
      return "(" + to_string(*e.args[0]) + " / " + to_string(*e.args[1]) + ")";
    case K::kPow:
      return "(" + to_string(*e.args[0]) + " ^ " + to_string(*e.args[1]) + ")";
    case K::kNeg:
      return "(-" + to_string(*e.args[0]) + ")";
    case K::kCall:
      return std::string(func_name(e.func)) + "(" + to_string(*e.args[0]) + ")";
  }
  return "?";
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::kConstant:
      return a.value == b.value;
    case Expr::Kind::kVariable:
      return a.var == b.var;
    case Expr::Kind::kCall:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

std::size_t max_variable(const Expr& e) {
  std::size_t m = e.kind == Expr::Kind::kVariable ? e.var + 1 : 0;
  for (const auto& a : e.args) m = std::max(m, max_variable(*a));
  return m;
}

Jet evaluate_jet(const Expr& e, std::span<const Jet> vars) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConstant:
      return Jet(vars[0].layout_ptr(), e.value);
    case K::kVariable:
      return vars[e.var];
    case K::kAdd:
      return evaluate_jet(*e.args[0], vars) + evaluate_jet(*e.args[1], vars);
    case K::kSub:
      return evaluate_jet(*e.args[0], vars) - evaluate_jet(*e.args[1], vars);
    case K::kMul:
      return evaluate_jet(*e.args[0], vars) * evaluate_jet(*e.args[1], vars);
    case K::kDiv:
      return evaluate_jet(*e.args[0], vars) / evaluate_jet(*e.args[1], vars);
    case K::kPow: {
      Jet base = evaluate_jet(*e.args[0], vars);
      if (auto n = integer_exponent(*e.args[1])) return pow(base, *n);
      return pow(base, evaluate_jet(*e.args[1], vars));
    }
    case K::kNeg:
      return -evaluate_jet(*e.args[0], vars);
    case K::kCall: {
      Jet a = evaluate_jet(*e.args[0], vars);
      switch (e.func) {
        case Func::kExp:
          return exp(a);
        case Func::kLog:
          return log(a);
        case Func::kSin:
          return sin(a);
        case Func::kCos:
          return cos(a);
        case Func::kSqrt:
          return sqrt(a);
        case Func::kTanh:
          return tanh(a);
      }
    }
  }
  throw std::logic_error("unknown expression node");
}

}  // namespace bseries
