#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bseries/rng.hpp"

namespace bseries {

/// Probability law (p_n) of the random tree order.
///
/// Text forms: `geometric:P` with p_n = (1 - P) P^n; `poisson:L` with mean L;
/// `optimal:C=..,dt=..,s0=..` with p_0 = c0 s0, p_n = c0 (C dt)^n / n and
/// c0 = 1 / (s0 - log(1 - C dt)); `table:q0,q1,...` with explicit support.
///
/// A capped distribution is the restriction to {0..cap}, renormalized; it is
/// sampled by inversion over cached prefix sums.
class SizeDistribution {
 public:
  enum class Kind { kGeometric, kPoisson, kOptimal, kTable };

  static SizeDistribution geometric(double p);
  static SizeDistribution poisson(double lambda);
  static SizeDistribution optimal(double c, double dt, double s0);
  static SizeDistribution table(std::vector<double> probabilities);
  static SizeDistribution parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  std::string to_string() const;

  /// Largest order with positive probability allowed, if finite.
  std::optional<std::size_t> max_size() const noexcept;
  bool is_capped() const noexcept { return cap_.has_value(); }

  /// Restriction to {0..max_size}, renormalized. Tables keep their support.
  SizeDistribution capped(std::size_t max_size) const;

  /// Probability mass the cap retained from the uncapped law (1 when uncapped).
  double retained_mass() const noexcept { return retained_; }

  double pmf(std::size_t n) const;

  /// Uncapped pmf of the underlying family.
  double base_pmf(std::size_t n) const;

  std::size_t sample(StreamRng& rng) const;

  /// True when p_n > 0 for every n in the (finite) support.
  bool positive_on_support() const;

  double geometric_p() const noexcept { return a_; }
  double poisson_lambda() const noexcept { return a_; }
  double optimal_c() const noexcept { return a_; }
  double optimal_dt() const noexcept { return b_; }
  double optimal_s0() const noexcept { return s0_; }
  /// c0 of the optimal family.
  double optimal_c0() const noexcept { return c0_; }
  const std::vector<double>& table_probabilities() const noexcept { return table_; }

 private:
  SizeDistribution() = default;
  std::size_t sample_uncapped(StreamRng& rng) const;

  Kind kind_ = Kind::kTable;
  double a_ = 0.0;
  double b_ = 0.0;
  double s0_ = 0.0;
  double c0_ = 0.0;
  std::vector<double> table_;
  std::optional<std::size_t> cap_;
  double retained_ = 1.0;
  std::vector<double> cdf_;  // prefix sums when the support is finite
};

}  // namespace bseries
