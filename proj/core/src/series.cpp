#include "bseries/series.hpp"

#include <cmath>

#include "bseries/elemdiff.hpp"
#include "bseries/errors.hpp"

namespace bseries {

double to_double(const Rational& r) { return r.convert_to<double>(); }
double to_double(const BigInt& i) { return i.convert_to<double>(); }

namespace {

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void axpy(Vector& y, double a, const Vector& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void check_order(const VectorField& f, std::size_t n) {
  if (n > f.max_order()) {
    throw CapExceeded("series order " + std::to_string(n) + " exceeds the cap " + std::to_string(f.max_order()));
  }
}

// Adds one order's contribution and tracks growth of the increments.
struct OrderAccumulator {
  explicit OrderAccumulator(Vector start) : result{std::move(start)} {}

  void add_order(const Vector& contribution, std::size_t terms) {
    const double size = norm2(contribution);
    result.diverging = result.order >= 1 && last_size > 0.0 && size > last_size;
    last_size = size;
    for (std::size_t i = 0; i < result.value.size(); ++i) result.value[i] += contribution[i];
    result.term_count += terms;
  }

  SeriesResult result;
  double last_size = 0.0;
};

}  // namespace

SeriesResult truncated_butcher(const VectorField& f, std::span<const double> x0, double t0, double t,
                               std::size_t n) {
  check_order(f, n);
  ElementaryDifferentials ed(f, Vector(x0.begin(), x0.end()));
  OrderAccumulator acc(ed.point());
  acc.result.term_count = 1;
  const double dt = t - t0;
  for (std::size_t k = 1; k <= n; ++k) {
    Vector contribution(x0.size(), 0.0);
    const auto trees = enumerate_unlabelled(k, f.max_order());
    const double power = std::pow(dt, static_cast<double>(k));
    for (const auto& tree : trees) axpy(contribution, power * to_double(butcher_weight(tree)), ed.of(tree));
    acc.add_order(contribution, trees.size());
    acc.result.order = k;
  }
  return acc.result;
}

SeriesResult truncated_butcher_labelled(const VectorField& f, std::span<const double> x0, double t0, double t,
                                        std::size_t n) {
  check_order(f, n);
  ElementaryDifferentials ed(f, Vector(x0.begin(), x0.end()));
  OrderAccumulator acc(ed.point());
  acc.result.term_count = 1;
  const double dt = t - t0;
  for (std::size_t k = 1; k <= n; ++k) {
    Vector contribution(x0.size(), 0.0);
    const double weight = std::pow(dt, static_cast<double>(k)) * to_double(Rational(BigInt(1), factorial(k)));
    std::size_t terms = 0;
    for_each_label_sequence(k, [&](std::span<const std::uint32_t> seq) {
      axpy(contribution, weight, ed.of(decode_labels(seq)));
      ++terms;
    });
    acc.add_order(contribution, terms);
    acc.result.order = k;
  }
  return acc.result;
}

std::vector<Vector> taylor_coefficients(const VectorField& f, std::span<const double> x0, std::size_t n) {
  const std::size_t d = f.dim();
  if (x0.size() != d || f.output_dim() != d) throw ConfigError("Taylor oracle needs a field R^d -> R^d and x0 in R^d");
  auto layout = JetLayout::get(1, n);
  std::vector<Jet> x;
  for (std::size_t i = 0; i < d; ++i) x.emplace_back(layout, x0[i]);
  std::vector<Vector> coeffs(n + 1, Vector(d, 0.0));
  coeffs[0].assign(x0.begin(), x0.end());
  // The k-th time coefficient of f(x(.)) only involves c_0..c_k, so each
  // pass fixes one more coefficient: (k + 1) c_{k+1} = [f(x(.))]_k.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const Jet fi = evaluate_jet(*f.components()[i], x);
      if (!std::isfinite(fi[k])) throw DomainError("non-finite Taylor coefficient");
      coeffs[k + 1][i] = fi[k] / static_cast<double>(k + 1);
    }
    for (std::size_t i = 0; i < d; ++i) x[i][k + 1] = coeffs[k + 1][i];
  }
  return coeffs;
}

Vector derivative_sum(const VectorField& f, std::span<const double> x, std::size_t n) {
  if (n == 0) throw ConfigError("derivative_sum needs n >= 1");
  check_order(f, n);
  ElementaryDifferentials ed(f, Vector(x.begin(), x.end()));
  Vector sum(x.size(), 0.0);
  for (const auto& tree : enumerate_unlabelled(n, f.max_order())) axpy(sum, to_double(alpha(tree)), ed.of(tree));
  return sum;
}

Vector observable_series(const VectorField& f, const VectorField& g, std::span<const double> x0, double t0,
                         double t, std::size_t n) {
  if (n == 0) throw ConfigError("observable_series needs n >= 1");
  check_order(f, n);
  ElementaryDifferentials ed(f, Vector(x0.begin(), x0.end()));
  Vector sum(g.output_dim(), 0.0);
  const double dt = t - t0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double scale = std::pow(dt, static_cast<double>(k - 1)) * to_double(Rational(BigInt(1), factorial(k - 1)));
    for (const auto& tree : enumerate_unlabelled(k, f.max_order())) {
      axpy(sum, scale * to_double(alpha(tree)), ed.observable(g, tree));
    }
  }
  return sum;
}

}  // namespace bseries
