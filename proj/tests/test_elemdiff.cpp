#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bseries/elemdiff.hpp"
#include "bseries/errors.hpp"

namespace {

using namespace bseries;

// Plain recursion without memoization; children contracted in the given order.
Vector naive(const VectorField& f, const RootedTree& t, const std::vector<double>& x,
             bool reverse_children = false) {
  if (t.is_empty()) return x;
  std::vector<Vector> args;
  for (const auto& c : t.children()) args.push_back(naive(f, c, x, reverse_children));
  if (reverse_children) std::reverse(args.begin(), args.end());
  const auto tensors = f.compute_derivative_tensor(x, args.size());
  Vector out;
  for (const auto& c : tensors) out.push_back(c.apply(args));
  return out;
}

const std::vector<std::pair<const char*, std::vector<double>>> kCatalog = {
    {"exp(x1)", {1.0}},
    {"1; x1*x2 + x2^2", {0.0, 0.5}},
};

TEST(ElementaryDifferential, EmptyTreeIsIdentity) {
  const auto f = VectorField::parse("1; x1*x2 + x2^2", 2);
  const std::vector<double> x{0.3, 0.7};
  EXPECT_EQ(elementary_differential(f, RootedTree::empty(), x), x);
}

TEST(ElementaryDifferential, ScalarHandExpansion) {
  // f = sin + cube: f' = cos + 3x^2, f'' = -sin + 6x.
  const auto f = VectorField::parse("sin(x1) + x1^3", 1);
  const double x = 0.6;
  const double f0 = std::sin(x) + x * x * x;
  const double f1 = std::cos(x) + 3 * x * x;
  const double f2 = -std::sin(x) + 6 * x;
  const std::vector<double> p{x};
  EXPECT_NEAR(elementary_differential(f, RootedTree::parse("[.,.]"), p)[0], f2 * f0 * f0, 1e-14);
  EXPECT_NEAR(elementary_differential(f, RootedTree::parse("[[.]]"), p)[0], f1 * f1 * f0, 1e-14);
  EXPECT_NEAR(elementary_differential(f, RootedTree::node(), p)[0], f0, 1e-15);
}

TEST(ElementaryDifferential, ExpTelescopes) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const double x0 = 0.3;
  ElementaryDifferentials ed(f, {x0});
  for (std::size_t n = 1; n <= 8; ++n) {
    const double expect = std::exp(static_cast<double>(n) * x0);
    for (const auto& t : enumerate_unlabelled(n)) EXPECT_NEAR(ed.of(t)[0], expect, 1e-13 * expect) << t.code();
  }
}

TEST(ElementaryDifferential, LabelInvariance) {
  for (const auto& [src, x] : kCatalog) {
    const auto f = VectorField::parse(src, x.size());
    for (std::size_t n = 1; n <= 6; ++n) {
      for_each_label_sequence(n, [&](std::span<const std::uint32_t> seq) {
        const auto lt = decode_labels(seq);
        EXPECT_EQ(elementary_differential(f, lt, x), elementary_differential(f, forget(lt), x));
      });
    }
  }
}

TEST(ElementaryDifferential, MemoMatchesNaive) {
  for (const auto& [src, x] : kCatalog) {
    const auto f = VectorField::parse(src, x.size());
    ElementaryDifferentials ed(f, x);
    for (std::size_t n = 1; n <= 6; ++n) {
      for (const auto& t : enumerate_unlabelled(n)) EXPECT_EQ(ed.of(t), naive(f, t, x)) << t.code();
    }
  }
}

TEST(ElementaryDifferential, RootSymmetry) {
  const auto f = VectorField::parse("sin(x1)*x2^2 + x3; x1*x2*x3; exp(x2 - x3)", 3);
  const std::vector<double> x{0.2, 0.5, -0.3};
  for (std::size_t n = 3; n <= 6; ++n) {
    for (const auto& t : enumerate_unlabelled(n)) {
      const auto a = naive(f, t, x, false);
      const auto b = naive(f, t, x, true);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * std::max(1.0, std::fabs(a[i])));
    }
  }
}

TEST(Observable, SelfObservableIsF) {
  for (const auto& [src, x] : kCatalog) {
    const auto f = VectorField::parse(src, x.size());
    ElementaryDifferentials ed(f, x);
    for (std::size_t n = 1; n <= 5; ++n) {
      for (const auto& t : enumerate_unlabelled(n)) EXPECT_EQ(ed.observable(f, t), ed.of(t)) << t.code();
    }
  }
}

TEST(Observable, IdentityObservable) {
  const auto f = VectorField::parse("1; x1*x2 + x2^2", 2);
  const auto id = VectorField::parse("x1; x2", 2);
  const std::vector<double> x{0.0, 0.5};
  ElementaryDifferentials ed(f, x);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& t : enumerate_unlabelled(n)) {
      const auto v = ed.observable(id, t);
      if (t.children().size() == 1) {
        EXPECT_EQ(v, ed.of(t.children()[0]));
      } else if (t.children().size() >= 2) {
        for (double c : v) EXPECT_EQ(c, 0.0);
      }
    }
  }
}

TEST(Observable, ConstantObservable) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const auto g = VectorField::parse_map("2.5; -1", 1);
  ElementaryDifferentials ed(f, {0.1});
  EXPECT_EQ(ed.observable(g, RootedTree::node()), (Vector{2.5, -1.0}));
  for (std::size_t n = 2; n <= 5; ++n) {
    for (const auto& t : enumerate_unlabelled(n)) {
      for (double c : ed.observable(g, t)) EXPECT_EQ(c, 0.0);
    }
  }
}

TEST(Observable, EmptyTreeNeedsSquareMap) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const auto g = VectorField::parse_map("x1; x1^2", 1);
  EXPECT_THROW(observable_differential(f, g, RootedTree::empty(), std::vector<double>{0.0}), ConfigError);
  const auto h = VectorField::parse("x1^2", 1);
  EXPECT_EQ(observable_differential(f, h, RootedTree::empty(), std::vector<double>{0.4}), (Vector{0.4}));
}

TEST(ElementaryDifferential, DimensionChecks) {
  const auto f = VectorField::parse("exp(x1)", 1);
  EXPECT_THROW(ElementaryDifferentials(f, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(ElementaryDifferentials(VectorField::parse_map("x1; x1", 1), {1.0}), ConfigError);
}

}  // namespace
