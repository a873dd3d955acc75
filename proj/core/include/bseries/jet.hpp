#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A jet of dimension d and degree M stores c[beta] = (d^beta h)(x0) / beta!
// for every multi-index |beta| <= M. Coefficients are laid out in graded
// lexicographic order: all of degree 0, then degree 1, ..., and within a
// degree the exponent vectors in decreasing lexicographic order, e.g. for
// d = 2, degree 2: (2,0), (1,1), (0,2).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace bseries {

using MultiIndex = std::vector<std::uint32_t>;

class JetLayout {
 public:
  /// Shared, immutable layout for (dim, degree).
  static std::shared_ptr<const JetLayout> get(std::size_t dim, std::size_t degree);

  JetLayout(std::size_t dim, std::size_t degree);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return indices_.size(); }

  /// First flat index of degree k; block k is [begin(k), begin(k + 1)).
  std::size_t begin(std::size_t k) const { return offsets_.at(k); }
  std::size_t end(std::size_t k) const { return offsets_.at(k + 1); }

  const MultiIndex& multi_index(std::size_t flat) const { return indices_.at(flat); }
  std::size_t index_of(const MultiIndex& beta) const;

  /// Flat index of beta_i + beta_j, or npos when the sum exceeds the degree.
  std::size_t sum_index(std::size_t i, std::size_t j) const noexcept { return sums_[i * indices_.size() + j]; }

  /// Flat index of the unit multi-index e_var.
  std::size_t unit_index(std::size_t var) const { return 1 + var; }

  /// beta! = prod beta_i!
  double multi_factorial(std::size_t flat) const { return mfact_.at(flat); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t dim_;
  std::size_t degree_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> sums_;
  std::vector<double> mfact_;
};

class Jet {
 public:
  Jet(std::shared_ptr<const JetLayout> layout, double constant = 0.0);

  /// The jet of the coordinate function x_var expanded at `value`.
  static Jet variable(std::shared_ptr<const JetLayout> layout, std::size_t var, double value);

  const JetLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const JetLayout>& layout_ptr() const noexcept { return layout_; }
  std::size_t dim() const noexcept { return layout_->dim(); }
  std::size_t degree() const noexcept { return layout_->degree(); }

  double value() const noexcept { return c_[0]; }
  double operator[](std::size_t flat) const noexcept { return c_[flat]; }
  double& operator[](std::size_t flat) noexcept { return c_[flat]; }
  double coefficient(const MultiIndex& beta) const { return c_[layout_->index_of(beta)]; }
  std::span<const double> coefficients() const noexcept { return c_; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(Jet a) { return a *= -1.0; }

  /// Adds scale * (degree-ja part of a) * (degree-jb part of b) into this jet.
  void accumulate_product(const Jet& a, std::size_t ja, const Jet& b, std::size_t jb, double scale);

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
};

// Elementary functions, composed through the homogeneous-part recurrences of
// their defining differential equations. Throw DomainError outside the domain.
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet sqrt(const Jet& u);
Jet tanh(const Jet& u);
Jet pow(const Jet& base, long long exponent);
Jet pow(const Jet& base, const Jet& exponent);

}  // namespace bseries
