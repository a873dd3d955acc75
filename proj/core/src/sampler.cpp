#include "bseries/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bseries/errors.hpp"
#include "bseries/series.hpp"
#include "mc_driver.hpp"

namespace bseries {

namespace {

constexpr std::size_t kMaxExhaustive = 8;

// Li_q(rho) for 0 <= rho <= 1, q >= 1 (rho = 1 only with q > 1).
double polylog(double q, double rho) {
  if (rho == 0.0) return 0.0;
  if (q == 1.0) return -std::log1p(-rho);
  if (rho == 1.0) return std::riemann_zeta(q);
  if (q == 2.0 && rho > 0.5) {
    // Reflection keeps the direct sum below at argument <= 1/2.
    return std::numbers::pi * std::numbers::pi / 6.0 - std::log(rho) * std::log1p(-rho) - polylog(2.0, 1.0 - rho);
  }
  const double log_rho = std::log(rho);
  double sum = 0.0;
  for (std::size_t n = 1; n < 100'000'000; ++n) {
    const double nd = static_cast<double>(n);
    const double term = std::exp(nd * log_rho - q * std::log(nd));
    sum += term;
    // Two tail bounds: geometric in rho and the q-series tail.
    const double tail = std::min(term * rho / (1.0 - rho), std::pow(nd, 1.0 - q) / (q - 1.0));
    if (tail < 1e-17 * sum) break;
  }
  return sum;
}

Vector scaled(const Vector& v, double s) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

std::string describe(const LabelledTree& tree) {
  if (tree.is_empty()) return "empty tree";
  const auto labels = encode_labels(tree);
  return "tree " + forget(tree).code() + " with labels [" + format_labels(labels) + "]";
}

}  // namespace

LabelledTree sample_labelled_tree(const SizeDistribution& dist, StreamRng& rng) {
  const std::size_t n = dist.sample(rng);
  if (n == 0) return LabelledTree();
  LabelSequence seq(n - 1);
  for (std::size_t i = 1; i < n; ++i) seq[i - 1] = static_cast<std::uint32_t>(rng.uniform_int(1, i));
  return decode_labels(seq);
}

Vector payoff(ElementaryDifferentials& ed, double t0, double t, const LabelledTree& tree,
              const SizeDistribution& dist) {
  const std::size_t n = tree.size();
  const double pn = dist.pmf(n);
  if (!(pn > 0.0)) throw ConfigError("size law gives zero probability to sampled order " + std::to_string(n));
  if (n == 0) return scaled(ed.point(), 1.0 / pn);
  const double dt = t - t0;
  if (dt == 0.0) return Vector(ed.point().size(), 0.0);
  const double nd = static_cast<double>(n);
  return scaled(ed.of(forget(tree)), std::pow(dt, nd) / (nd * pn));
}

Vector payoff(const VectorField& f, std::span<const double> x0, double t0, double t, const LabelledTree& tree,
              const SizeDistribution& dist) {
  ElementaryDifferentials ed(f, Vector(x0.begin(), x0.end()));
  return payoff(ed, t0, t, tree, dist);
}

SizeDistribution effective_distribution(const SizeDistribution& dist, std::size_t max_size,
                                        std::vector<std::string>* warnings) {
  if (dist.kind() == SizeDistribution::Kind::kTable && !dist.positive_on_support()) {
    throw ConfigError("table size law has zero entries inside its support");
  }
  if (const auto top = dist.max_size()) {
    if (*top > max_size) {
      throw CapExceeded("size law reaches order " + std::to_string(*top) + " beyond the cap " +
                        std::to_string(max_size));
    }
    return dist;
  }
  SizeDistribution capped = dist.capped(max_size);
  const double lost = 1.0 - capped.retained_mass();
  if (warnings && lost > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", lost);
    warnings->push_back("size law capped at order " + std::to_string(max_size) + " (discarded mass " + buf +
                        "); the estimate targets the order-" + std::to_string(max_size) + " truncated series");
  }
  return capped;
}

McEstimate mc_estimate(const VectorField& f, std::span<const double> x0, double t0, double t,
                       const SizeDistribution& dist, std::size_t samples, std::uint64_t seed,
                       const McOptions& options) {
  if (x0.size() != f.dim()) throw ConfigError("x0 has the wrong dimension");
  const std::size_t cap = std::min(options.max_size, f.max_order());
  std::vector<std::string> warnings;
  const SizeDistribution law = effective_distribution(dist, cap, &warnings);
  const Vector start(x0.begin(), x0.end());

  auto make_state = [&] { return ElementaryDifferentials(f, start); };
  auto draw = [&](std::uint64_t k, ElementaryDifferentials& ed, Vector& out) -> std::size_t {
    StreamRng rng(seed, k);
    const LabelledTree tree = sample_labelled_tree(law, rng);
    try {
      out = payoff(ed, t0, t, tree, law);
    } catch (const DomainError& e) {
      throw DomainError("sample " + std::to_string(k) + ", " + describe(tree) + ": " + e.what());
    }
    return tree.size();
  };
  McEstimate est = detail::run_chunked(samples, seed, options.workers, f.dim(), *law.max_size() + 1, make_state, draw);
  est.warnings = std::move(warnings);
  return est;
}

Vector exhaustive_expectation(const VectorField& f, std::span<const double> x0, double t0, double t,
                              const SizeDistribution& dist, std::size_t max_n) {
  if (max_n > kMaxExhaustive || max_n > f.max_order()) {
    throw CapExceeded("exhaustive expectation is limited to order " + std::to_string(kMaxExhaustive));
  }
  ElementaryDifferentials ed(f, Vector(x0.begin(), x0.end()));
  Vector sum(x0.size(), 0.0);
  for (std::size_t n = 0; n <= max_n; ++n) {
    const double pn = dist.pmf(n);
    Vector inner(x0.size(), 0.0);
    if (n == 0) {
      inner = payoff(ed, t0, t, LabelledTree(), dist);
    } else {
      for_each_label_sequence(n, [&](std::span<const std::uint32_t> seq) {
        const Vector v = payoff(ed, t0, t, decode_labels(seq), dist);
        for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += v[i];
      });
    }
    const double weight = pn / to_double(factorial(n == 0 ? 0 : n - 1));
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += weight * inner[i];
  }
  return sum;
}

MomentBound second_moment_bound(const SizeDistribution& dist, double c, double dt, double x0_norm, double q) {
  if (!(q >= 1.0)) throw ConfigError("moment order q must be >= 1");
  if (!(c >= 0.0) || !(dt >= 0.0)) throw ConfigError("C and dt must be nonnegative");
  const double cdt = c * dt;
  const double root_term = std::pow(x0_norm, q) / std::pow(dist.pmf(0), q - 1.0);
  if (cdt == 0.0) return {false, root_term};

  if (const auto top = dist.max_size()) {
    double sum = root_term;
    for (std::size_t n = 1; n <= *top; ++n) {
      const double pn = dist.pmf(n);
      if (!(pn > 0.0)) throw ConfigError("moment bound needs p_n > 0 on the whole support");
      const double nd = static_cast<double>(n);
      sum += std::pow(cdt, nd * q) / (std::pow(nd, q) * std::pow(pn, q - 1.0));
    }
    return {!std::isfinite(sum), sum};
  }

  switch (dist.kind()) {
    case SizeDistribution::Kind::kGeometric: {
      const double p = dist.geometric_p();
      const double rho = std::pow(cdt, q) / std::pow(p, q - 1.0);
      if (!(rho < 1.0) && !(rho == 1.0 && q > 1.0)) return {true, 0.0};
      return {false, root_term + std::pow(1.0 - p, 1.0 - q) * polylog(q, rho)};
    }
    case SizeDistribution::Kind::kPoisson:
      // p_n^(q-1) decays like n!^(1-q), so any q > 1 diverges.
      if (q > 1.0 || !(cdt < 1.0)) return {true, 0.0};
      return {false, root_term - std::log1p(-cdt)};
    case SizeDistribution::Kind::kOptimal: {
      const double r = dist.optimal_c() * dist.optimal_dt();
      const double rho = std::pow(cdt, q) / std::pow(r, q - 1.0);
      if (!(rho < 1.0)) return {true, 0.0};
      return {false, root_term - std::pow(dist.optimal_c0(), 1.0 - q) * std::log1p(-rho)};
    }
    case SizeDistribution::Kind::kTable:
      break;
  }
  return {true, 0.0};
}

SizeDistribution optimal_distribution(double c, double dt, double s0) { return SizeDistribution::optimal(c, dt, s0); }

}  // namespace bseries
