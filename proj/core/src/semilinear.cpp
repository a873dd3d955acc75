#include "bseries/semilinear.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "bseries/elemdiff.hpp"
#include "bseries/errors.hpp"
#include "bseries/series.hpp"
#include "mc_driver.hpp"

namespace bseries {

namespace {

using Eigen::Index;

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Scaling and squaring around a Taylor polynomial.
Matrix expm(const Matrix& m) {
  const double norm = norm1(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = m / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int j = 1; j < 64; ++j) {
    term = (term * x) / static_cast<double>(j);
    sum += term;
    if (norm1(term) < 1e-16 * norm1(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// psi_k(z) = sum_j z^j / (j + k)! by direct summation; used when |z| <= 1.
Matrix psi_series(std::size_t k, const Matrix& z) {
  Matrix term = Matrix::Identity(z.rows(), z.cols()) / to_double(factorial(k));
  Matrix sum = term;
  for (std::size_t j = 1; j < 200; ++j) {
    term = (term * z) / static_cast<double>(j + k);
    if (norm1(term) < 1e-16 * norm1(sum)) break;
    sum += term;
  }
  return sum;
}

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v) {
  return {v.data(), static_cast<Index>(v.size())};
}

double poisson_pmf(std::size_t n, double mean) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  return std::exp(nd * std::log(mean) - mean - std::lgamma(nd + 1.0));
}

void check_problem(const GeneratorMatrix& a, const VectorField& g, std::span<const double> x0,
                   std::size_t component, double t0, double t) {
  const std::size_t d = a.dim();
  if (g.dim() != d || g.output_dim() != d) throw ConfigError("g must map R^d to R^d with d the generator size");
  if (x0.size() != d) throw ConfigError("x0 has the wrong dimension");
  if (component >= d) throw ConfigError("component index out of range");
  if (!(t >= t0)) throw ConfigError("t must not precede t0");
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(Matrix q) : q_(std::move(q)) {
  if (q_.rows() == 0 || q_.rows() != q_.cols()) throw ConfigError("generator must be a nonempty square matrix");
  for (Index i = 0; i < q_.rows(); ++i) {
    double sum = 0.0;
    double scale = 0.0;
    for (Index j = 0; j < q_.cols(); ++j) {
      const double v = q_(i, j);
      if (!std::isfinite(v)) throw ConfigError("generator entries must be finite");
      if (i != j && v < 0.0) throw ConfigError("generator off-diagonal entries must be nonnegative");
      sum += v;
      scale += std::fabs(v);
    }
    if (std::fabs(sum) > 1e-12 * std::max(1.0, scale)) throw ConfigError("generator rows must sum to zero");
  }
}

GeneratorMatrix GeneratorMatrix::parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ',' || line[i] == ';' || std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
      if (ec != std::errc()) throw ConfigError("unreadable generator entry in '" + std::string(line) + "'");
      row.push_back(v);
      i = static_cast<std::size_t>(ptr - line.data());
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto d = static_cast<Index>(rows.size());
  Matrix q(d, d);
  for (Index i = 0; i < d; ++i) {
    if (static_cast<Index>(rows[i].size()) != d) throw ConfigError("generator must be square");
    for (Index j = 0; j < d; ++j) q(i, j) = rows[i][j];
  }
  return GeneratorMatrix(std::move(q));
}

std::vector<double> GeneratorMatrix::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(q_.size()));
  for (Index i = 0; i < q_.rows(); ++i) {
    for (Index j = 0; j < q_.cols(); ++j) out.push_back(q_(i, j));
  }
  return out;
}

std::vector<Matrix> phi_all(std::size_t n, double dt, const Matrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("phi needs a square matrix");
  const Index d = a.rows();
  std::vector<Matrix> out;
  out.reserve(n + 1);
  if (dt == 0.0) {
    out.push_back(Matrix::Identity(d, d));
    for (std::size_t k = 1; k <= n; ++k) out.push_back(Matrix::Zero(d, d));
    return out;
  }
  const Matrix z = dt * a;
  if (norm1(z) <= 1.0) {
    for (std::size_t k = 0; k <= n; ++k) out.push_back(psi_series(k, z));
  } else {
    // exp of [[z, I, 0..], [0, 0, I, ..], ..] has e^z, psi_1(z), .., psi_n(z) along its top block row.
    const Index size = d * static_cast<Index>(n + 1);
    Matrix big = Matrix::Zero(size, size);
    big.topLeftCorner(d, d) = z;
    for (Index k = 0; k < static_cast<Index>(n); ++k) big.block(k * d, (k + 1) * d, d, d).setIdentity();
    const Matrix e = expm(big);
    for (Index k = 0; k <= static_cast<Index>(n); ++k) out.push_back(e.block(0, k * d, d, d));
  }
  for (std::size_t k = 1; k <= n; ++k) out[k] *= std::pow(dt, static_cast<double>(k));
  return out;
}

Matrix phi(std::size_t n, double dt, const Matrix& a) { return phi_all(n, dt, a).back(); }

Vector exp_butcher_truncated(const Matrix& a, const VectorField& g, std::span<const double> x0, double t0,
                             double t, std::size_t n) {
  const auto d = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols() || g.dim() != d || g.output_dim() != d || x0.size() != d) {
    throw ConfigError("dimensions of A, g and x0 disagree");
  }
  std::vector<double> rows(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) rows[i * d + j] = a(static_cast<Index>(i), static_cast<Index>(j));
  }
  const VectorField full = g.plus_linear(rows);
  if (n > full.max_order()) throw CapExceeded("series order exceeds the cap");
  const auto phis = phi_all(n, t - t0, a);
  Eigen::VectorXd result = phis[0] * as_eigen(x0);
  ElementaryDifferentials ed(full, Vector(x0.begin(), x0.end()));
  for (std::size_t k = 1; k <= n; ++k) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Index>(d));
    for (const auto& tree : enumerate_unlabelled(k, full.max_order())) {
      const Vector fg = ed.observable(g, tree);
      s += to_double(alpha(tree)) * as_eigen(fg);
    }
    result += phis[k] * s;
  }
  return Vector(result.data(), result.data() + result.size());
}

PoissonRealization sample_poisson_realization(double t0, double t, StreamRng& rng) {
  if (!(t >= t0)) throw ConfigError("t must not precede t0");
  PoissonRealization r;
  double s = t0;
  while (true) {
    s += rng.exponential();
    if (s > t) break;
    r.times.push_back(s);
  }
  r.count = r.times.size();
  return r;
}

std::size_t CtmcPath::state_at(double offset) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), offset);
  const auto idx = static_cast<std::size_t>(it - jump_times.begin());
  return idx == 0 ? initial : states[idx - 1];
}

CtmcPath simulate_ctmc(const GeneratorMatrix& q, std::size_t i0, double horizon, StreamRng& rng) {
  if (i0 >= q.dim()) throw ConfigError("initial state out of range");
  CtmcPath path;
  path.initial = i0;
  path.horizon = horizon;
  const Matrix& m = q.matrix();
  std::size_t state = i0;
  double clock = 0.0;
  while (true) {
    const double rate = q.exit_rate(state);
    if (!(rate > 0.0)) break;
    clock += rng.exponential() / rate;
    if (clock > horizon) break;
    const double u = rng.uniform() * rate;
    double cum = 0.0;
    std::size_t next = state;
    for (std::size_t j = 0; j < q.dim(); ++j) {
      if (j == state) continue;
      const double r = m(static_cast<Index>(state), static_cast<Index>(j));
      if (r <= 0.0) continue;
      next = j;
      cum += r;
      if (u < cum) break;
    }
    state = next;
    path.jump_times.push_back(clock);
    path.states.push_back(state);
  }
  return path;
}

double semilinear_weight(std::size_t n, double dt) {
  if (n == 0) return std::exp(dt);
  return std::exp(dt + std::lgamma(static_cast<double>(n)));
}

bool payoff_weight_identity_check(std::size_t n, double dt) {
  const double lhs = semilinear_weight(n, dt) * poisson_pmf(n, dt);
  const double rhs = std::pow(dt, static_cast<double>(n)) / static_cast<double>(std::max<std::size_t>(n, 1));
  return std::fabs(lhs - rhs) <= 1e-12 * std::max(std::fabs(lhs), std::fabs(rhs));
}

McEstimate semilinear_mc_estimate(const GeneratorMatrix& a, const VectorField& g, std::span<const double> x0,
                                  std::size_t component, double t0, double t, std::size_t samples,
                                  std::uint64_t seed, const McOptions& options) {
  check_problem(a, g, x0, component, t0, t);
  const VectorField full = g.plus_linear(a.row_major());
  const std::size_t cap = std::min(options.max_size, full.max_order());
  const double dt = t - t0;
  double retained = 0.0;
  for (std::size_t n = 0; n <= cap; ++n) retained += poisson_pmf(n, dt);
  retained = std::min(retained, 1.0);
  if (!(retained > 1e-300)) throw ConfigError("jump-count cap leaves no probability mass");

  std::vector<std::string> warnings;
  if (1.0 - retained > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", 1.0 - retained);
    warnings.push_back("jump count capped at " + std::to_string(cap) + " (discarded mass " + buf +
                       "); the estimate targets the order-" + std::to_string(cap) + " truncated series");
  }

  const Vector start(x0.begin(), x0.end());
  auto make_state = [&] { return ElementaryDifferentials(full, start); };
  auto draw = [&](std::uint64_t k, ElementaryDifferentials& ed, Vector& out) -> std::size_t {
    StreamRng rng(seed, k);
    PoissonRealization jumps = sample_poisson_realization(t0, t, rng);
    while (jumps.count > cap) jumps = sample_poisson_realization(t0, t, rng);
    const std::size_t n = jumps.count;
    LabelSequence seq(n > 0 ? n - 1 : 0);
    for (std::size_t i = 1; i < n; ++i) seq[i - 1] = static_cast<std::uint32_t>(rng.uniform_int(1, i));
    Vector value;
    if (n == 0) {
      value = start;
    } else {
      const RootedTree shape = forget(decode_labels(seq));
      try {
        value = ed.observable(g, shape);
      } catch (const DomainError& e) {
        throw DomainError("sample " + std::to_string(k) + ", tree " + shape.code() + " with labels [" +
                          format_labels(seq) + "]: " + e.what());
      }
    }
    const double duration = n == 0 ? dt : t - jumps.times.back();
    const CtmcPath path = simulate_ctmc(a, component, duration, rng);
    out[0] = semilinear_weight(n, dt) * retained * value[path.final_state()];
    return n;
  };
  McEstimate est = detail::run_chunked(samples, seed, options.workers, 1, cap + 1, make_state, draw);
  est.warnings = std::move(warnings);
  return est;
}

double semilinear_exhaustive_expectation(const GeneratorMatrix& a, const VectorField& g, std::span<const double> x0,
                                         std::size_t component, double t0, double t, std::size_t max_n) {
  check_problem(a, g, x0, component, t0, t);
  if (max_n > 8) throw CapExceeded("exhaustive expectation is limited to order 8");
  const double dt = t - t0;
  if (dt == 0.0) return x0[component];
  const VectorField full = g.plus_linear(a.row_major());
  ElementaryDifferentials ed(full, Vector(x0.begin(), x0.end()));
  const auto phis = phi_all(max_n, dt, a.matrix());
  const auto row = static_cast<Index>(component);
  double total = 0.0;
  for (std::size_t n = 0; n <= max_n; ++n) {
    // Conditional law of the chain after the last jump.
    const double nd = static_cast<double>(n);
    const Eigen::RowVectorXd law =
        phis[n].row(row) * (to_double(factorial(n)) / std::pow(dt, nd));
    double inner = 0.0;
    if (n == 0) {
      inner = law.dot(as_eigen(x0));
    } else {
      for_each_label_sequence(n, [&](std::span<const std::uint32_t> seq) {
        const Vector value = ed.observable(g, forget(decode_labels(seq)));
        inner += law.dot(as_eigen(value));
      });
    }
    const double fact = to_double(factorial(n == 0 ? 0 : n - 1));
    total += poisson_pmf(n, dt) * semilinear_weight(n, dt) / fact * inner;
  }
  return total;
}

}  // namespace bseries
