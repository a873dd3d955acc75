#pragma once

// Helpers shared by the series tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bseries/series.hpp"
#include "bseries/tree.hpp"

namespace probes {

// Scalar monomial of F(t) for d = 1: the sorted list of derivative orders used at the vertices,
// e.g. f f'^3 -> "0111".
inline void collect_orders(const bseries::RootedTree& t, std::string& out) {
  out.push_back(static_cast<char>('0' + t.children().size()));
  for (const auto& c : t.children()) collect_orders(c, out);
}

inline std::string monomial(const bseries::RootedTree& t) {
  std::string s;
  collect_orders(t, s);
  std::sort(s.begin(), s.end());
  return s;
}

// Exact weight of each scalar monomial in the order-n term of the series.
inline std::map<std::string, bseries::Rational> monomial_weights(std::size_t n) {
  std::map<std::string, bseries::Rational> out;
  for (const auto& t : bseries::enumerate_unlabelled(n)) out[monomial(t)] += bseries::butcher_weight(t);
  return out;
}

// Order-n contribution of the series at dt = 1 for the field, x0 = 0.
inline double order_contribution(const bseries::VectorField& f, std::size_t n) {
  const std::vector<double> x0{0.0};
  const double hi = bseries::truncated_butcher(f, x0, 0.0, 1.0, n).value[0];
  const double lo = bseries::truncated_butcher(f, x0, 0.0, 1.0, n - 1).value[0];
  return hi - lo;
}

inline double relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::fabs(a[i] - b[i]));
    den = std::max(den, std::fabs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

// Partial sum of the Taylor oracle at dt.
inline std::vector<double> taylor_sum(const bseries::VectorField& f, const std::vector<double>& x0, double dt,
                                      std::size_t n) {
  const auto c = bseries::taylor_coefficients(f, x0, n);
  std::vector<double> s(x0.size(), 0.0);
  double p = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += p * c[k][i];
    p *= dt;
  }
  return s;
}

}  // namespace probes
