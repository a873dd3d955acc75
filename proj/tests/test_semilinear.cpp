#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>

#include "bseries/errors.hpp"
#include "bseries/semilinear.hpp"
#include "bseries/series.hpp"
#include "series_probes.hpp"

namespace {

using namespace bseries;

Matrix two_state() {
  Matrix a(2, 2);
  a << -1, 1, 1, -1;
  return a;
}

Matrix three_state() {
  Matrix a(3, 3);
  a << -1.5, 1.0, 0.5, 0.2, -0.2, 0.0, 2.0, 1.0, -3.0;
  return a;
}

double fact(std::size_t n) { return to_double(factorial(n)); }

TEST(Generator, Validation) {
  EXPECT_NO_THROW(GeneratorMatrix{two_state()});
  Matrix bad = two_state();
  bad(0, 1) = -1.0;
  bad(0, 0) = 1.0;
  EXPECT_THROW(GeneratorMatrix{bad}, ConfigError);
  Matrix unbalanced = two_state();
  unbalanced(0, 0) = -0.5;
  EXPECT_THROW(GeneratorMatrix{unbalanced}, ConfigError);
  EXPECT_THROW(GeneratorMatrix{Matrix(2, 3)}, ConfigError);
}

TEST(Generator, ParseCsv) {
  const auto g = GeneratorMatrix::parse_csv("# two states\n-1, 1\n1, -1\n");
  EXPECT_EQ(g.dim(), 2u);
  EXPECT_EQ(g.matrix(), two_state());
  EXPECT_EQ(g.row_major(), (std::vector<double>{-1, 1, 1, -1}));
  EXPECT_THROW(GeneratorMatrix::parse_csv("-1, 1\n1"), ConfigError);
  EXPECT_THROW(GeneratorMatrix::parse_csv("-1, x\n1, -1"), ConfigError);
}

TEST(Phi, ZeroMatrix) {
  const Matrix z = Matrix::Zero(3, 3);
  for (double dt : {0.0, 0.4, 2.5}) {
    for (std::size_t n = 0; n <= 6; ++n) {
      const Matrix expect = (n == 0 ? 1.0 : std::pow(dt, static_cast<double>(n)) / fact(n)) * Matrix::Identity(3, 3);
      EXPECT_LE((phi(n, dt, z) - expect).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Phi, ScalarRecurrence) {
  for (double a : {-3.0, -0.5, 0.7, 2.5}) {
    for (double dt : {0.3, 1.0, 2.0}) {
      const Matrix m = Matrix::Constant(1, 1, a);
      const auto phis = phi_all(7, dt, m);
      for (std::size_t n = 0; n <= 6; ++n) {
        const double lhs = a * phis[n + 1](0, 0);
        const double rhs = phis[n](0, 0) - std::pow(dt, static_cast<double>(n)) / fact(n);
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::fabs(rhs))) << "a=" << a << " dt=" << dt << " n=" << n;
      }
      EXPECT_NEAR(phis[0](0, 0), std::exp(a * dt), 1e-13 * std::exp(a * dt));
    }
  }
}

TEST(Phi, MatrixRecurrence) {
  for (const Matrix& a : {two_state(), three_state()}) {
    for (double dt : {0.2, 1.0, 3.0}) {
      const auto phis = phi_all(7, dt, a);
      for (std::size_t n = 0; n <= 6; ++n) {
        const Matrix r = a * phis[n + 1] - phis[n] +
                         (std::pow(dt, static_cast<double>(n)) / fact(n)) * Matrix::Identity(a.rows(), a.cols());
        EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-10) << "dt=" << dt << " n=" << n;
      }
      const Matrix ref = (dt * a).exp();
      EXPECT_LE((phis[0] - ref).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(Phi, TwoStateExponential) {
  for (double dt : {0.5, 1.0, 4.0}) {
    const double e = std::exp(-2 * dt);
    Matrix expect(2, 2);
    expect << 0.5 * (1 + e), 0.5 * (1 - e), 0.5 * (1 - e), 0.5 * (1 + e);
    EXPECT_LE((phi(0, dt, two_state()) - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ExpButcher, LinearProblem) {
  const auto zero = VectorField::parse("0; 0", 2);
  const std::vector<double> x0{1.0, 0.25};
  const Eigen::Vector2d ref = (0.7 * two_state()).exp() * Eigen::Vector2d(1.0, 0.25);
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto v = exp_butcher_truncated(two_state(), zero, x0, 0.0, 0.7, n);
    EXPECT_NEAR(v[0], ref[0], 1e-14);
    EXPECT_NEAR(v[1], ref[1], 1e-14);
  }
}

TEST(ExpButcher, ZeroMatrixReducesToButcher) {
  const auto g = VectorField::parse("exp(x1)", 1);
  const std::vector<double> x0{1.0};
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto a = exp_butcher_truncated(Matrix::Zero(1, 1), g, x0, 0.0, 0.2, n);
    const auto b = truncated_butcher(g, x0, 0.0, 0.2, n).value;
    EXPECT_LE(probes::relative_gap(a, b), 1e-12) << n;
  }
}

TEST(ExpButcher, MatchesTaylorOracle) {
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  const auto full = g.plus_linear(GeneratorMatrix(two_state()).row_major());
  for (double dt : {0.01, 0.05, 0.1}) {
    const auto a = exp_butcher_truncated(two_state(), g, x0, 0.0, dt, 6);
    const auto b = probes::taylor_sum(full, x0, dt, 6);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a[i], b[i], 1e-8) << dt;
  }
}

TEST(Poisson, MeanCount) {
  const int n = 1000000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    StreamRng r(8, static_cast<std::uint64_t>(k));
    const auto p = sample_poisson_realization(0.0, 1.0, r);
    ASSERT_EQ(p.count, p.times.size());
    sum += static_cast<double>(p.count);
  }
  EXPECT_NEAR(sum / n, 1.0, 3.0 / std::sqrt(n));
}

TEST(Poisson, ZeroHorizonAndOrdering) {
  StreamRng r(1, 0);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_poisson_realization(2.0, 2.0, r).count, 0u);
  for (int k = 0; k < 1000; ++k) {
    const auto p = sample_poisson_realization(1.0, 4.0, r);
    EXPECT_TRUE(std::is_sorted(p.times.begin(), p.times.end()));
    for (double s : p.times) {
      EXPECT_GT(s, 1.0);
      EXPECT_LE(s, 4.0);
    }
  }
}

TEST(Poisson, ConditionalFirstJumpIsBeta12) {
  const double dt = 1.5;
  std::vector<double> u;
  StreamRng r(12, 0);
  while (u.size() < 100000) {
    const auto p = sample_poisson_realization(0.0, dt, r);
    if (p.count == 2) u.push_back(p.times[0] / dt);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double cdf = 1.0 - (1.0 - u[i]) * (1.0 - u[i]);
    d = std::max({d, std::fabs(cdf - i / n), std::fabs(cdf - (i + 1) / n)});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(n));  // Kolmogorov-Smirnov, 99%
}

TEST(Ctmc, ConstantPath) {
  StreamRng r(2, 0);
  const GeneratorMatrix q(Matrix::Zero(3, 3));
  const auto p = simulate_ctmc(q, 2, 10.0, r);
  EXPECT_TRUE(p.jump_times.empty());
  EXPECT_EQ(p.final_state(), 2u);
  EXPECT_EQ(p.state_at(5.0), 2u);
}

TEST(Ctmc, TwoStateLaw) {
  const GeneratorMatrix q(two_state());
  const int n = 100000;
  int stay = 0;
  for (int k = 0; k < n; ++k) {
    StreamRng r(6, static_cast<std::uint64_t>(k));
    const auto p = simulate_ctmc(q, 0, 1.0, r);
    for (std::size_t j = 1; j < p.jump_times.size(); ++j) ASSERT_GT(p.jump_times[j], p.jump_times[j - 1]);
    if (p.final_state() == 0) ++stay;
  }
  const double prob = 0.5 * (1 + std::exp(-2.0));
  EXPECT_NEAR(static_cast<double>(stay) / n, prob, 3 * std::sqrt(prob * (1 - prob) / n));
}

TEST(Ctmc, SemigroupIdentity) {
  const GeneratorMatrix q(three_state());
  const Eigen::Vector3d x(0.7, -1.2, 2.5);
  const double dt = 0.8;
  const Eigen::Vector3d ref = (dt * three_state()).exp() * x;
  const int n = 100000;
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    double sq = 0.0;
    for (int k = 0; k < n; ++k) {
      StreamRng r(30 + i, static_cast<std::uint64_t>(k));
      const double v = x[static_cast<Eigen::Index>(simulate_ctmc(q, i, dt, r).final_state())];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / (n - 1));
    EXPECT_NEAR(mean, ref[static_cast<Eigen::Index>(i)], 3 * se) << i;
  }
}

TEST(SemilinearEstimator, LinearProblem) {
  const GeneratorMatrix a(two_state());
  const auto zero = VectorField::parse("0; 0", 2);
  const std::vector<double> x0{1.0, 0.0};
  const Eigen::Vector2d ref = two_state().exp() * Eigen::Vector2d(1.0, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto est = semilinear_mc_estimate(a, zero, x0, i, 0.0, 1.0, 100000, 40 + i);
    EXPECT_LE(std::fabs(est.mean[0] - ref[static_cast<Eigen::Index>(i)]), 3 * est.std_error[0]) << i;
  }
}

TEST(SemilinearEstimator, ZeroMatrixMatchesPoissonSizes) {
  const GeneratorMatrix a(Matrix::Zero(1, 1));
  const auto g = VectorField::parse("exp(x1)", 1);
  const std::vector<double> x0{1.0};
  const auto s = semilinear_mc_estimate(a, g, x0, 0, 0.0, 0.2, 100000, 3);
  const auto m = mc_estimate(g, x0, 0.0, 0.2, SizeDistribution::poisson(0.2), 100000, 4);
  const double joint = std::hypot(s.std_error[0], m.std_error[0]);
  EXPECT_LE(std::fabs(s.mean[0] - m.mean[0]), 3 * joint);
}

TEST(SemilinearEstimator, ZeroHorizon) {
  const GeneratorMatrix a(two_state());
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto est = semilinear_mc_estimate(a, g, x0, i, 0.3, 0.3, 100, 1);
    EXPECT_EQ(est.mean[0], x0[i]);
    EXPECT_EQ(est.std_error[0], 0.0);
  }
}

TEST(SemilinearEstimator, AgreesWithExponentialSeries) {
  const GeneratorMatrix a(two_state());
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  const auto ref = exp_butcher_truncated(two_state(), g, x0, 0.0, 0.8, 8);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto est = semilinear_mc_estimate(a, g, x0, i, 0.0, 0.8, 100000, 60 + i);
    EXPECT_LE(std::fabs(est.mean[0] - ref[i]), 3 * est.std_error[0]) << i;
  }
}

TEST(SemilinearEstimator, ExhaustiveOracle) {
  const GeneratorMatrix a(two_state());
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  for (double dt : {0.3, 1.0}) {
    const auto ref = exp_butcher_truncated(two_state(), g, x0, 0.0, dt, 4);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(semilinear_exhaustive_expectation(a, g, x0, i, 0.0, dt, 4), ref[i], 1e-8);
    }
  }
}

TEST(SemilinearEstimator, ReproducibleAcrossWorkers) {
  const GeneratorMatrix a(two_state());
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  const auto base = semilinear_mc_estimate(a, g, x0, 1, 0.0, 1.0, 9000, 5, {.workers = 1});
  for (std::size_t w : {2u, 8u}) {
    const auto other = semilinear_mc_estimate(a, g, x0, 1, 0.0, 1.0, 9000, 5, {.workers = w});
    EXPECT_EQ(other.mean, base.mean);
    EXPECT_EQ(other.std_error, base.std_error);
  }
}

TEST(WeightIdentity, Holds) {
  EXPECT_TRUE(payoff_weight_identity_check(0, 0.7));
  EXPECT_TRUE(payoff_weight_identity_check(3, 0.2));
  EXPECT_NEAR(semilinear_weight(3, 0.2) * std::exp(-0.2) * std::pow(0.2, 3) / 6, std::pow(0.2, 3) / 3, 1e-15);
  for (std::size_t n = 0; n <= 12; ++n) {
    for (double dt : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) EXPECT_TRUE(payoff_weight_identity_check(n, dt)) << n << " " << dt;
  }
}

}  // namespace
