#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bseries/tree.hpp"
#include "bseries/vecfield.hpp"

namespace bseries {

/// Elementary differentials F(t)(x) of one field at one point.
///
/// Values are memoized by canonical shape, so repeated subtrees are
/// evaluated once. Contractions take the children in canonical order,
/// which makes the result a function of the shape alone (labelled trees
/// give bit-identical values to their forgotten shapes). An instance is not
/// thread-safe; use one per thread.
class ElementaryDifferentials {
 public:
  /// `f` must map R^d to R^d and `x` lie in R^d.
  ElementaryDifferentials(VectorField f, Vector x);

  const VectorField& field() const noexcept { return f_; }
  const Vector& point() const noexcept { return x_; }

  /// F(t)(x); F({}) is the identity, so the empty tree yields x.
  const Vector& of(const RootedTree& t);
  Vector of(const LabelledTree& t) { return of(forget(t)); }

  /// F_g(t)(x) = grad^m g(F(t_1), ..., F(t_m)) with the inner factors taken
  /// from f. The empty tree is only accepted when g maps R^d to R^d.
  Vector observable(const VectorField& g, const RootedTree& t);

 private:
  std::shared_ptr<const std::vector<SymTensor>> tensors(const VectorField& field, std::size_t m);
  Vector contract_root(const VectorField& field, const RootedTree& t);

  VectorField f_;
  Vector x_;
  std::map<std::string, Vector> memo_;
  std::vector<std::shared_ptr<const std::vector<SymTensor>>> f_tensors_;
};

Vector elementary_differential(const VectorField& f, const RootedTree& t, std::span<const double> x);
Vector elementary_differential(const VectorField& f, const LabelledTree& t, std::span<const double> x);
Vector observable_differential(const VectorField& f, const VectorField& g, const RootedTree& t,
                               std::span<const double> x);

}  // namespace bseries
