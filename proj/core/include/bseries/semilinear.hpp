#pragma once

// Semilinear problems x' = A x + g(x) with A a Markov generator.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bseries/rng.hpp"
#include "bseries/sampler.hpp"
#include "bseries/vecfield.hpp"

namespace bseries {

using Matrix = Eigen::MatrixXd;

/// Generator of a continuous-time Markov chain on states 0..d-1: nonnegative
/// off-diagonal rates, zero row sums.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Matrix q);

  /// Row-major entries separated by commas, whitespace or semicolons; one row per line.
  static GeneratorMatrix parse_csv(std::string_view text);

  const Matrix& matrix() const noexcept { return q_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  double exit_rate(std::size_t i) const { return -q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)); }
  std::vector<double> row_major() const;

 private:
  Matrix q_;
};

/// phi_n(dt, A) = dt^n sum_j (dt A)^j / (j + n)!; phi_0 is the matrix exponential.
Matrix phi(std::size_t n, double dt, const Matrix& a);

/// Every phi_k for k = 0..n from one augmented exponential.
std::vector<Matrix> phi_all(std::size_t n, double dt, const Matrix& a);

/// phi_0 x0 + sum over trees 1 <= |t| <= n of alpha(t) phi_|t| F_g(t)(x0), where
/// the inner differentials are those of the full field A x + g.
Vector exp_butcher_truncated(const Matrix& a, const VectorField& g, std::span<const double> x0, double t0,
                             double t, std::size_t n);

struct PoissonRealization {
  std::size_t count = 0;
  /// Increasing jump times in (t0, t].
  std::vector<double> times;
};

/// Unit-rate Poisson process on (t0, t] from exponential gaps.
PoissonRealization sample_poisson_realization(double t0, double t, StreamRng& rng);

struct CtmcPath {
  std::size_t initial = 0;
  /// Offsets from the start at which the chain jumps.
  std::vector<double> jump_times;
  /// State entered at each jump.
  std::vector<std::size_t> states;
  double horizon = 0.0;

  std::size_t state_at(double offset) const;
  std::size_t final_state() const { return states.empty() ? initial : states.back(); }
};

/// Gillespie simulation over [0, horizon].
CtmcPath simulate_ctmc(const GeneratorMatrix& q, std::size_t i0, double horizon, StreamRng& rng);

/// Estimate of component `component` of x(t). Jump counts above the order cap
/// are redrawn and the weight is corrected by the retained Poisson mass.
McEstimate semilinear_mc_estimate(const GeneratorMatrix& a, const VectorField& g, std::span<const double> x0,
                                  std::size_t component, double t0, double t, std::size_t samples,
                                  std::uint64_t seed, const McOptions& options = {});

/// The estimator's mean over jump counts <= max_n, with the conditional chain
/// law E[exp((t - T_n) A) | N = n] = n! phi_n / dt^n in place of sampling.
double semilinear_exhaustive_expectation(const GeneratorMatrix& a, const VectorField& g, std::span<const double> x0,
                                         std::size_t component, double t0, double t, std::size_t max_n);

/// Payoff weight of a sample with n jumps: e^dt ((n - 1) v 0)!.
double semilinear_weight(std::size_t n, double dt);

/// e^dt ((n - 1) v 0)! P(N = n) == dt^n / (n v 1) to 1e-12 relative.
bool payoff_weight_identity_check(std::size_t n, double dt);

}  // namespace bseries
