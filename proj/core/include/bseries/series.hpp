#pragma once

// Deterministic series engines for x' = f(x), x(t0) = x0.

#include <cstddef>
#include <span>
#include <vector>

#include "bseries/tree.hpp"
#include "bseries/vecfield.hpp"

namespace bseries {

struct SeriesResult {
  Vector value;
  std::size_t order = 0;
  /// Number of tree terms summed, the empty tree included.
  std::size_t term_count = 0;
  /// Set when the last order contributed more than the one before it.
  bool diverging = false;
};

/// sum over canonical trees |t| <= n of (t - t0)^|t| / (t! sigma(t)) F(t)(x0).
SeriesResult truncated_butcher(const VectorField& f, std::span<const double> x0, double t0, double t,
                               std::size_t n);

/// The same sum taken over increasing-labelled trees with weight (t - t0)^k / k!.
SeriesResult truncated_butcher_labelled(const VectorField& f, std::span<const double> x0, double t0, double t,
                                        std::size_t n);

/// Taylor coefficients c_0..c_n of the solution, c_k = x^(k)(t0) / k!, by
/// propagating a time jet of the solution through f.
std::vector<Vector> taylor_coefficients(const VectorField& f, std::span<const double> x0, std::size_t n);

/// sum over trees of order n of alpha(t) F(t)(x), which is x^(n) along the solution through x.
Vector derivative_sum(const VectorField& f, std::span<const double> x, std::size_t n);

/// Tree expansion of g(x(t)) up to trees of order n.
Vector observable_series(const VectorField& f, const VectorField& g, std::span<const double> x0, double t0,
                         double t, std::size_t n);

double to_double(const Rational& r);
double to_double(const BigInt& i);

}  // namespace bseries
