#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bseries/expression.hpp"
#include "bseries/jet.hpp"
#include "bseries/tree.hpp"

namespace bseries {

using Vector = std::vector<double>;

/// Fully symmetric tensor of order m over R^d, one entry per multi-index
/// |beta| = m (graded lexicographic order, see jet.hpp).
class SymTensor {
 public:
  SymTensor(std::shared_ptr<const JetLayout> layout, std::size_t order);

  std::size_t order() const noexcept { return order_; }
  std::size_t dim() const noexcept { return layout_->dim(); }
  std::size_t entry_count() const noexcept { return values_.size(); }

  /// Entry T[i1, ..., im] with 0-based indices; any permutation reads the same.
  double at(std::span<const std::size_t> indices) const;
  double& entry(const MultiIndex& beta);
  std::span<const double> entries() const noexcept { return values_; }

  /// Contracts one slot with `a`; the result is symmetric of order m - 1.
  SymTensor contract(std::span<const double> a) const;

  /// T(a_1, ..., a_m), contracting a_1 first.
  double apply(std::span<const Vector> args) const;

  double max_abs() const noexcept;

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::size_t order_;
  std::vector<double> values_;
};

/// A smooth map R^d -> R^{d'} given by one expression per output component.
/// Derivative tensors are cached per (point, order); the cache is shared by
/// copies of the field and safe for concurrent use.
class VectorField {
 public:
  /// Parses `dim` expressions separated by ';' or newlines.
  static VectorField parse(std::string_view source, std::size_t dim);

  /// Parses any positive number of components (observables R^d -> R^{d'}).
  static VectorField parse_map(std::string_view source, std::size_t input_dim);

  VectorField(std::vector<ExprPtr> components, std::size_t input_dim, std::size_t max_order = kDefaultOrderCap);

  /// x -> A x + this(x), with A given row-major as d x d.
  VectorField plus_linear(std::span<const double> a_row_major) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t output_dim() const noexcept { return exprs_.size(); }
  std::size_t max_order() const noexcept { return max_order_; }
  const std::vector<ExprPtr>& components() const noexcept { return exprs_; }

  Vector operator()(std::span<const double> x) const;

  /// Jet of one component at `center`, truncated at `degree`.
  Jet eval_jet(std::size_t component, std::span<const double> center, std::size_t degree) const;

  /// The order-m derivative tensors of every component at x (cached).
  std::shared_ptr<const std::vector<SymTensor>> derivative_tensor(std::span<const double> x, std::size_t m) const;

  /// Same, bypassing the cache.
  std::vector<SymTensor> compute_derivative_tensor(std::span<const double> x, std::size_t m) const;

  /// Central-difference approximation of the order-m tensors (m <= 4),
  /// evaluated in extended precision.
  std::vector<SymTensor> finite_difference_tensor(std::span<const double> x, std::size_t m, double h) const;

  std::string to_string() const;

 private:
  struct Cache {
    std::shared_mutex mutex;
    std::map<std::pair<std::vector<std::uint64_t>, std::size_t>, std::shared_ptr<const std::vector<SymTensor>>> entries;
  };

  void check_point(std::span<const double> x) const;

  std::vector<ExprPtr> exprs_;
  std::size_t dim_;
  std::size_t max_order_;
  std::shared_ptr<Cache> cache_;
};

/// Heuristic derivative bound max_{m <= max_m} max-norm of the order-m tensors at x.
double estimate_derivative_bound(const VectorField& f, std::span<const double> x, std::size_t max_m = 8);

}  // namespace bseries
