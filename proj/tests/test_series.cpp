#include <gtest/gtest.h>

#include <cmath>

#include "bseries/errors.hpp"
#include "bseries/series.hpp"
#include "series_probes.hpp"

namespace {

using namespace bseries;
using probes::relative_gap;

double exp_solution(double x0, double t) { return -std::log(std::exp(-x0) - t); }

TEST(Truncated, OrderZeroIsStart) {
  const auto f = VectorField::parse("1; x1*x2 + x2^2", 2);
  const std::vector<double> x0{0.0, 0.5};
  const auto r = truncated_butcher(f, x0, 0.0, 0.7, 0);
  EXPECT_EQ(r.value, x0);
  EXPECT_EQ(r.term_count, 1u);
  EXPECT_EQ(r.order, 0u);
}

TEST(Truncated, ScalarMonomialWeights) {
  const auto w4 = probes::monomial_weights(4);
  EXPECT_EQ(w4.at("0111"), Rational(1, 24));
  EXPECT_EQ(w4.at("0003"), Rational(1, 24));
  EXPECT_EQ(w4.at("0012"), Rational(1, 6));
  const auto w3 = probes::monomial_weights(3);
  EXPECT_EQ(w3.at("002"), Rational(1, 6));
  EXPECT_EQ(w3.at("011"), Rational(1, 6));
  EXPECT_EQ(probes::monomial_weights(2).at("01"), Rational(1, 2));
}

TEST(Truncated, ProbeFieldsIsolateMonomials) {
  EXPECT_NEAR(probes::order_contribution(VectorField::parse("1 + x1", 1), 4), 1.0 / 24, 1e-12);
  EXPECT_NEAR(probes::order_contribution(VectorField::parse("1 + x1^3/6", 1), 4), 1.0 / 24, 1e-12);
  const double c1 = probes::order_contribution(VectorField::parse("1 + x1 + x1^2/2", 1), 4);
  const double c2 = probes::order_contribution(VectorField::parse("1 + 2*x1 + x1^2/2", 1), 4);
  EXPECT_NEAR((8 * c1 - c2) / 6, 1.0 / 6, 1e-12);
}

TEST(Truncated, ExpClosedForm) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const auto r = truncated_butcher(f, std::vector<double>{1.0}, 0.0, 0.1, 8);
  // The solution is 1 - log(1 - e t) = 1 + sum_k (e t)^k / k, so the gap is the tail k > 8.
  double tail = 0.0;
  for (int k = 60; k > 8; --k) tail += std::pow(std::exp(1.0) * 0.1, k) / k;
  EXPECT_NEAR(exp_solution(1.0, 0.1) - r.value[0], tail, 1e-13);
  EXPECT_LE(std::fabs(r.value[0] - exp_solution(1.0, 0.1)), 1.2e-6);
  EXPECT_FALSE(r.diverging);
}

TEST(Truncated, DivergenceFlag) {
  const auto f = VectorField::parse("exp(x1)", 1);
  EXPECT_TRUE(truncated_butcher(f, std::vector<double>{1.0}, 0.0, 0.5, 8).diverging);
}

TEST(Truncated, CapRefused) {
  const auto f = VectorField::parse("exp(x1)", 1);
  EXPECT_THROW(truncated_butcher(f, std::vector<double>{1.0}, 0.0, 0.1, 13), CapExceeded);
}

TEST(Truncated, ConvergesMonotonically) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const double x0 = 1.0;
  const double t = 0.5 * std::exp(-x0);
  double last = INFINITY;
  for (std::size_t n = 0; n <= 10; ++n) {
    const double err = std::fabs(truncated_butcher(f, std::vector<double>{x0}, 0.0, t, n).value[0] - exp_solution(x0, t));
    EXPECT_LT(err, last) << n;
    last = err;
  }
}

TEST(Labelled, OrderThreeScalar) {
  // Probe a quadratic with f = 1, f' = 1, f'' = 2: (1/6) f^2 f'' + (1/6) f f'^2 = 1/2.
  const auto f = VectorField::parse("1 + x1 + x1^2", 1);
  const std::vector<double> x0{0.0};
  const double c3 = truncated_butcher_labelled(f, x0, 0.0, 1.0, 3).value[0] -
                    truncated_butcher_labelled(f, x0, 0.0, 1.0, 2).value[0];
  EXPECT_NEAR(c3, 0.5, 1e-14);
}

TEST(Labelled, TermCounts) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const std::vector<double> x0{0.0};
  std::size_t prev = truncated_butcher_labelled(f, x0, 0.0, 0.1, 0).term_count;
  for (std::size_t k = 1; k <= 7; ++k) {
    const std::size_t now = truncated_butcher_labelled(f, x0, 0.0, 0.1, k).term_count;
    EXPECT_EQ(BigInt(now - prev), factorial(k - 1));
    prev = now;
  }
}

TEST(OracleTriangle, CatalogProblems) {
  const std::vector<std::tuple<const char*, std::vector<double>, double>> cases = {
      {"exp(x1)", {1.0}, 0.2}, {"1; x1*x2 + x2^2", {0.0, 0.5}, 0.5}, {"1; x1*x2 + x2^2", {0.0, 0.5}, 1.0}};
  for (const auto& [src, x0, t] : cases) {
    const auto f = VectorField::parse(src, x0.size());
    for (std::size_t n = 0; n <= 6; ++n) {
      const auto a = truncated_butcher(f, x0, 0.0, t, n).value;
      const auto b = truncated_butcher_labelled(f, x0, 0.0, t, n).value;
      const auto c = probes::taylor_sum(f, x0, t, n);
      EXPECT_LE(relative_gap(a, b), 1e-12) << src << " n=" << n;
      EXPECT_LE(relative_gap(a, c), 1e-12) << src << " n=" << n;
    }
  }
}

TEST(Taylor, Examples) {
  const auto e = VectorField::parse("exp(x1)", 1);
  const auto c = taylor_coefficients(e, std::vector<double>{0.0}, 5);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_NEAR(c[k][0], 1.0 / static_cast<double>(k), 1e-15);
  EXPECT_EQ(c[0][0], 0.0);

  const auto lin = VectorField::parse("x1", 1);
  const auto cl = taylor_coefficients(lin, std::vector<double>{3.0}, 6);
  double fact = 1.0;
  for (std::size_t k = 0; k <= 6; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    EXPECT_NEAR(cl[k][0], 3.0 / fact, 1e-15);
  }

  const auto ric = VectorField::parse("1; x1*x2 + x2^2", 2);
  const auto cr = taylor_coefficients(ric, std::vector<double>{0.0, 0.5}, 3);
  // x2' = x1 x2 + x2^2 = 1/4, x2'' = x2 + (x1 + 2 x2) x2' = 3/4.
  EXPECT_NEAR(cr[1][1], 0.25, 1e-15);
  EXPECT_NEAR(cr[2][1], 0.375, 1e-15);
  EXPECT_NEAR(cr[1][0], 1.0, 1e-15);
  EXPECT_NEAR(cr[2][0], 0.0, 1e-15);
}

TEST(DerivativeSum, Examples) {
  const auto e = VectorField::parse("exp(x1)", 1);
  EXPECT_NEAR(derivative_sum(e, std::vector<double>{0.3}, 1)[0], std::exp(0.3), 1e-15);
  EXPECT_NEAR(derivative_sum(e, std::vector<double>{0.0}, 4)[0], 6.0, 1e-13);
  EXPECT_THROW(derivative_sum(e, std::vector<double>{0.0}, 0), ConfigError);
}

TEST(DerivativeSum, MatchesTaylorCoefficients) {
  const std::vector<std::pair<const char*, std::vector<double>>> cases = {{"exp(x1)", {0.4}},
                                                                          {"1; x1*x2 + x2^2", {0.0, 0.5}}};
  for (const auto& [src, x] : cases) {
    const auto f = VectorField::parse(src, x.size());
    const auto c = taylor_coefficients(f, x, 6);
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto s = derivative_sum(f, x, n);
      const double nf = to_double(factorial(n));
      std::vector<double> expect(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) expect[i] = nf * c[n][i];
      EXPECT_LE(relative_gap(s, expect), 1e-12) << src << " n=" << n;
    }
  }
}

TEST(ObservableSeries, IdentityMatchesSolution) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const auto id = VectorField::parse("x1", 1);
  const std::vector<double> x0{1.0};
  for (std::size_t n = 2; n <= 7; ++n) {
    // The identity observable reproduces the order n - 1 truncation.
    const auto obs = observable_series(f, id, x0, 0.0, 0.2, n);
    const auto sol = truncated_butcher(f, x0, 0.0, 0.2, n - 1).value;
    EXPECT_LE(relative_gap(obs, sol), 1e-12) << n;
  }
}

TEST(ObservableSeries, SelfObservableIsTimeDerivative) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const std::vector<double> x0{1.0};
  const double t = 0.05;
  const double h = 1e-5;
  double last = INFINITY;
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    const double obs = observable_series(f, f, x0, 0.0, t, n)[0];
    const double hi = truncated_butcher(f, x0, 0.0, t + h, 10).value[0];
    const double lo = truncated_butcher(f, x0, 0.0, t - h, 10).value[0];
    const double err = std::fabs(obs - (hi - lo) / (2 * h));
    EXPECT_LT(err, last);
    last = err;
  }
  EXPECT_LT(last, 1e-6);
}

TEST(ObservableSeries, ConstantObservable) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const auto g = VectorField::parse("4.5", 1);
  for (std::size_t n = 1; n <= 5; ++n) {
    EXPECT_DOUBLE_EQ(observable_series(f, g, std::vector<double>{0.2}, 0.0, 0.3, n)[0], 4.5);
  }
}

}  // namespace
