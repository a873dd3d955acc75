#include "bseries/jet.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "bseries/errors.hpp"

namespace bseries {

namespace {

void append_degree(std::size_t dim, std::size_t remaining, MultiIndex& prefix, std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == dim) {
    prefix.push_back(static_cast<std::uint32_t>(remaining));
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t e = remaining + 1; e-- > 0;) {
    prefix.push_back(static_cast<std::uint32_t>(e));
    append_degree(dim, remaining - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

JetLayout::JetLayout(std::size_t dim, std::size_t degree) : dim_(dim), degree_(degree) {
  if (dim == 0) throw ConfigError("jet dimension must be positive");
  for (std::size_t k = 0; k <= degree; ++k) {
    offsets_.push_back(indices_.size());
    MultiIndex prefix;
    append_degree(dim, k, prefix, indices_);
  }
  offsets_.push_back(indices_.size());

  std::map<MultiIndex, std::size_t> lookup;
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup.emplace(indices_[i], i);

  const std::size_t n = indices_.size();
  sums_.assign(n * n, npos);
  MultiIndex s(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t total = 0;
      for (std::size_t v = 0; v < dim; ++v) {
        s[v] = indices_[i][v] + indices_[j][v];
        total += s[v];
      }
      if (total <= degree) sums_[i * n + j] = lookup.at(s);
    }
  }

  mfact_.reserve(n);
  for (const auto& beta : indices_) {
    double f = 1.0;
    for (auto b : beta) f *= std::tgamma(static_cast<double>(b) + 1.0);
    mfact_.push_back(f);
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(std::size_t dim, std::size_t degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const JetLayout>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[{dim, degree}];
  if (!slot) slot = std::make_shared<const JetLayout>(dim, degree);
  return slot;
}

std::size_t JetLayout::index_of(const MultiIndex& beta) const {
  if (beta.size() != dim_) throw std::invalid_argument("multi-index has the wrong dimension");
  std::size_t k = 0;
  for (auto b : beta) k += b;
  if (k > degree_) throw std::out_of_range("multi-index exceeds the jet degree");
  for (std::size_t i = offsets_[k]; i < offsets_[k + 1]; ++i) {
    if (indices_[i] == beta) return i;
  }
  throw std::logic_error("multi-index missing from layout");
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, double constant)
    : layout_(std::move(layout)), c_(layout_->size(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, std::size_t var, double value) {
  Jet j(std::move(layout), value);
  if (var >= j.dim()) throw std::out_of_range("variable index exceeds jet dimension");
  if (j.degree() >= 1) j.c_[j.layout_->unit_index(var)] = 1.0;
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

void Jet::accumulate_product(const Jet& a, std::size_t ja, const Jet& b, std::size_t jb, double scale) {
  const JetLayout& L = *layout_;
  for (std::size_t i = L.begin(ja); i < L.end(ja); ++i) {
    const double ai = a.c_[i] * scale;
    if (ai == 0.0) continue;
    for (std::size_t j = L.begin(jb); j < L.end(jb); ++j) {
      c_[L.sum_index(i, j)] += ai * b.c_[j];
    }
  }
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.layout_);
  const JetLayout& L = *a.layout_;
  const std::size_t n = L.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a.c_[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t s = L.sum_index(i, j);
      if (s != JetLayout::npos) out.c_[s] += ai * b.c_[j];
    }
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  const double b0 = b.value();
  if (b0 == 0.0) throw DomainError("division by a jet with zero value");
  Jet h(a.layout_);
  const JetLayout& L = *a.layout_;
  for (std::size_t k = 0; k <= L.degree(); ++k) {
    // h_k = (a_k - sum_{j>=1} b_j h_{k-j}) / b_0
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] = a[i];
    for (std::size_t j = 1; j <= k; ++j) h.accumulate_product(b, j, h, k - j, -1.0);
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] /= b0;
  }
  return h;
}

Jet exp(const Jet& u) {
  const JetLayout& L = u.layout();
  Jet h(u.layout_ptr(), std::exp(u.value()));
  // D h = h D u, with D the Euler operator: k h_k = sum_j j u_j h_{k-j}.
  for (std::size_t k = 1; k <= L.degree(); ++k) {
    for (std::size_t j = 1; j <= k; ++j) {
      h.accumulate_product(u, j, h, k - j, static_cast<double>(j) / static_cast<double>(k));
    }
  }
  return h;
}

Jet log(const Jet& u) {
  const double u0 = u.value();
  if (!(u0 > 0.0)) throw DomainError("log of nonpositive value " + std::to_string(u0));
  const JetLayout& L = u.layout();
  Jet h(u.layout_ptr(), std::log(u0));
  // u D h = D u: k u_0 h_k = k u_k - sum_{j=1}^{k-1} j h_j u_{k-j}.
  for (std::size_t k = 1; k <= L.degree(); ++k) {
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] = u[i];
    for (std::size_t j = 1; j < k; ++j) {
      h.accumulate_product(h, j, u, k - j, -static_cast<double>(j) / static_cast<double>(k));
    }
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] /= u0;
  }
  return h;
}

namespace {

std::pair<Jet, Jet> sin_cos(const Jet& u) {
  const JetLayout& L = u.layout();
  Jet s(u.layout_ptr(), std::sin(u.value()));
  Jet c(u.layout_ptr(), std::cos(u.value()));
  for (std::size_t k = 1; k <= L.degree(); ++k) {
    for (std::size_t j = 1; j <= k; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(k);
      s.accumulate_product(u, j, c, k - j, w);
      c.accumulate_product(u, j, s, k - j, -w);
    }
  }
  return {std::move(s), std::move(c)};
}

}  // namespace

Jet sin(const Jet& u) { return sin_cos(u).first; }
Jet cos(const Jet& u) { return sin_cos(u).second; }

Jet sqrt(const Jet& u) {
  const double u0 = u.value();
  const JetLayout& L = u.layout();
  if (u0 < 0.0 || (u0 == 0.0 && L.degree() > 0)) {
    throw DomainError("sqrt of nonpositive value " + std::to_string(u0));
  }
  const double h0 = std::sqrt(u0);
  Jet h(u.layout_ptr(), h0);
  // h^2 = u: 2 h_0 h_k = u_k - sum_{j=1}^{k-1} h_j h_{k-j}.
  for (std::size_t k = 1; k <= L.degree(); ++k) {
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] = u[i];
    for (std::size_t j = 1; j < k; ++j) h.accumulate_product(h, j, h, k - j, -1.0);
    for (std::size_t i = L.begin(k); i < L.end(k); ++i) h[i] /= 2.0 * h0;
  }
  return h;
}

Jet tanh(const Jet& u) {
  const JetLayout& L = u.layout();
  const double h0 = std::tanh(u.value());
  Jet h(u.layout_ptr(), h0);
  Jet w(u.layout_ptr(), 1.0 - h0 * h0);  // w = 1 - h^2
  // D h = w D u
  for (std::size_t k = 1; k <= L.degree(); ++k) {
    for (std::size_t j = 1; j <= k; ++j) {
      h.accumulate_product(u, j, w, k - j, static_cast<double>(j) / static_cast<double>(k));
    }
    for (std::size_t j = 0; j <= k; ++j) w.accumulate_product(h, j, h, k - j, -1.0);
  }
  return h;
}

Jet pow(const Jet& base, long long exponent) {
  if (exponent < 0) {
    if (exponent == std::numeric_limits<long long>::min()) throw ConfigError("exponent out of range");
    return Jet(base.layout_ptr(), 1.0) / pow(base, -exponent);
  }
  Jet result(base.layout_ptr(), 1.0);
  Jet square = base;
  auto e = static_cast<unsigned long long>(exponent);
  bool first = true;
  while (e > 0) {
    if (e & 1ULL) {
      result = first ? square : result * square;
      first = false;
    }
    e >>= 1;
    if (e > 0) square = square * square;
  }
  return result;
}

Jet pow(const Jet& base, const Jet& exponent) { return exp(exponent * log(base)); }

}  // namespace bseries
