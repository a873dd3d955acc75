#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bseries/distribution.hpp"
#include "bseries/elemdiff.hpp"
#include "bseries/rng.hpp"
#include "bseries/tree.hpp"
#include "bseries/vecfield.hpp"

namespace bseries {

struct McOptions {
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  std::size_t workers = 1;
  /// Largest tree order a payoff may need. Unbounded laws are capped here.
  std::size_t max_size = kDefaultOrderCap;
};

struct McEstimate {
  Vector mean;
  /// Sample standard deviation over sqrt(samples), per component.
  Vector std_error;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> size_histogram;
  /// Sample mean of the squared Euclidean norm of the payoff.
  double mean_square = 0.0;
  std::vector<std::string> warnings;
};

/// Order from `dist`, then uniform attachment: vertex i + 1 picks its parent
/// uniformly among 1..i.
LabelledTree sample_labelled_tree(const SizeDistribution& dist, StreamRng& rng);

/// (t - t0)^n F(tree)(x0) / ((n v 1) p_n) with n = |tree|.
Vector payoff(ElementaryDifferentials& ed, double t0, double t, const LabelledTree& tree,
              const SizeDistribution& dist);
Vector payoff(const VectorField& f, std::span<const double> x0, double t0, double t, const LabelledTree& tree,
              const SizeDistribution& dist);

/// The law actually sampled by `mc_estimate`: unbounded laws capped at
/// `max_size`, finite tables checked against it. Appends a note to `warnings`
/// when the cap discards mass.
SizeDistribution effective_distribution(const SizeDistribution& dist, std::size_t max_size,
                                        std::vector<std::string>* warnings = nullptr);

/// Sample k draws from stream k of `seed`, so the estimate is bit-identical
/// for any worker count.
McEstimate mc_estimate(const VectorField& f, std::span<const double> x0, double t0, double t,
                       const SizeDistribution& dist, std::size_t samples, std::uint64_t seed,
                       const McOptions& options = {});

/// Expectation of the payoff restricted to orders <= max_n, by enumerating
/// every label sequence.
Vector exhaustive_expectation(const VectorField& f, std::span<const double> x0, double t0, double t,
                              const SizeDistribution& dist, std::size_t max_n);

struct MomentBound {
  bool divergent = false;
  double value = 0.0;
};

/// |x0|^q / p_0^(q-1) + sum_n (C dt)^(nq) / (n^q p_n^(q-1)).
MomentBound second_moment_bound(const SizeDistribution& dist, double c, double dt, double x0_norm, double q);

SizeDistribution optimal_distribution(double c, double dt, double s0);

}  // namespace bseries
