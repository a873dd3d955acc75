#include "bseries/vecfield.hpp"

#include <bit>
#include <cmath>
#include <mutex>

#include "bseries/errors.hpp"

namespace bseries {

SymTensor::SymTensor(std::shared_ptr<const JetLayout> layout, std::size_t order)
    : layout_(std::move(layout)), order_(order) {
  if (order_ > layout_->degree()) throw std::invalid_argument("tensor order exceeds layout degree");
  values_.assign(layout_->end(order_) - layout_->begin(order_), 0.0);
}

double SymTensor::at(std::span<const std::size_t> indices) const {
  if (indices.size() != order_) throw std::invalid_argument("wrong number of tensor indices");
  MultiIndex beta(dim(), 0);
  for (auto i : indices) ++beta.at(i);
  return values_[layout_->index_of(beta) - layout_->begin(order_)];
}

double& SymTensor::entry(const MultiIndex& beta) { return values_[layout_->index_of(beta) - layout_->begin(order_)]; }

SymTensor SymTensor::contract(std::span<const double> a) const {
  if (order_ == 0) throw std::invalid_argument("cannot contract an order-0 tensor");
  if (a.size() != dim()) throw std::invalid_argument("contraction vector has the wrong dimension");
  SymTensor out(layout_, order_ - 1);
  const JetLayout& L = *layout_;
  const std::size_t lo = L.begin(order_ - 1);
  const std::size_t hi = L.begin(order_);
  for (std::size_t i = lo; i < L.end(order_ - 1); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += values_[L.sum_index(i, L.unit_index(j)) - hi] * a[j];
    out.values_[i - lo] = acc;
  }
  return out;
}

double SymTensor::apply(std::span<const Vector> args) const {
  if (args.size() != order_) throw std::invalid_argument("tensor applied to the wrong number of vectors");
  if (order_ == 0) return values_[0];
  const JetLayout& L = *layout_;
  const std::size_t d = dim();
  std::vector<double> cur(values_);
  std::vector<double> next;
  for (std::size_t k = order_; k >= 1; --k) {
    const auto& a = args[order_ - k];
    const std::size_t lo = L.begin(k - 1);
    const std::size_t hi = L.begin(k);
    next.assign(L.end(k - 1) - lo, 0.0);
    for (std::size_t i = lo; i < L.end(k - 1); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += cur[L.sum_index(i, L.unit_index(j)) - hi] * a[j];
      next[i - lo] = acc;
    }
    cur.swap(next);
  }
  return cur[0];
}

double SymTensor::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

VectorField VectorField::parse(std::string_view source, std::size_t dim) {
  auto exprs = parse_expression_list(source, dim);
  if (exprs.size() != dim) {
    throw ConfigError("expected " + std::to_string(dim) + " component expressions, got " +
                      std::to_string(exprs.size()));
  }
  return VectorField(std::move(exprs), dim);
}

VectorField VectorField::parse_map(std::string_view source, std::size_t input_dim) {
  auto exprs = parse_expression_list(source, input_dim);
  if (exprs.empty()) throw ConfigError("no component expressions given");
  return VectorField(std::move(exprs), input_dim);
}

VectorField::VectorField(std::vector<ExprPtr> components, std::size_t input_dim, std::size_t max_order)
    : exprs_(std::move(components)), dim_(input_dim), max_order_(max_order), cache_(std::make_shared<Cache>()) {
  if (dim_ == 0) throw ConfigError("dimension must be positive");
  for (const auto& e : exprs_) {
    if (!e) throw ConfigError("null component expression");
    if (max_variable(*e) > dim_) throw ConfigError("expression uses a variable beyond the declared dimension");
  }
}

VectorField VectorField::plus_linear(std::span<const double> a) const {
  if (output_dim() != dim_ || a.size() != dim_ * dim_) throw ConfigError("linear part must be a d x d matrix");
  std::vector<ExprPtr> out;
  for (std::size_t j = 0; j < dim_; ++j) {
    ExprPtr e = exprs_[j];
    for (std::size_t k = 0; k < dim_; ++k) {
      const double v = a[j * dim_ + k];
      if (v == 0.0) continue;
      ExprPtr term = std::fabs(v) == 1.0 ? make_variable(k)
                                          : make_binary(Expr::Kind::kMul, make_constant(std::fabs(v)), make_variable(k));
      e = make_binary(v > 0 ? Expr::Kind::kAdd : Expr::Kind::kSub, e, term);
    }
    out.push_back(std::move(e));
  }
  return VectorField(std::move(out), dim_, max_order_);
}

void VectorField::check_point(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw ConfigError("point has dimension " + std::to_string(x.size()) + ", field expects " + std::to_string(dim_));
  }
}

Vector VectorField::operator()(std::span<const double> x) const {
  check_point(x);
  Vector out;
  out.reserve(exprs_.size());
  for (const auto& e : exprs_) {
    const double v = evaluate<double>(*e, x);
    if (!std::isfinite(v)) throw DomainError("field value is not finite");
    out.push_back(v);
  }
  return out;
}

Jet VectorField::eval_jet(std::size_t component, std::span<const double> center, std::size_t degree) const {
  check_point(center);
  if (degree > max_order_) {
    throw CapExceeded("jet degree " + std::to_string(degree) + " exceeds the cap " + std::to_string(max_order_));
  }
  auto layout = JetLayout::get(dim_, degree);
  std::vector<Jet> vars;
  vars.reserve(dim_);
  for (std::size_t i = 0; i < dim_; ++i) vars.push_back(Jet::variable(layout, i, center[i]));
  Jet j = evaluate_jet(*exprs_.at(component), vars);
  for (double c : j.coefficients()) {
    if (!std::isfinite(c)) throw DomainError("non-finite jet coefficient for component " + std::to_string(component + 1));
  }
  return j;
}

std::vector<SymTensor> VectorField::compute_derivative_tensor(std::span<const double> x, std::size_t m) const {
  std::vector<SymTensor> out;
  out.reserve(exprs_.size());
  for (std::size_t c = 0; c < exprs_.size(); ++c) {
    const Jet j = eval_jet(c, x, m);
    const JetLayout& L = j.layout();
    SymTensor t(j.layout_ptr(), m);
    for (std::size_t i = L.begin(m); i < L.end(m); ++i) t.entry(L.multi_index(i)) = j[i] * L.multi_factorial(i);
    out.push_back(std::move(t));
  }
  return out;
}

std::shared_ptr<const std::vector<SymTensor>> VectorField::derivative_tensor(std::span<const double> x,
                                                                            std::size_t m) const {
  check_point(x);
  std::pair<std::vector<std::uint64_t>, std::size_t> key;
  key.first.reserve(x.size());
  for (double v : x) key.first.push_back(std::bit_cast<std::uint64_t>(v));
  key.second = m;
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  auto fresh = std::make_shared<const std::vector<SymTensor>>(compute_derivative_tensor(x, m));
  std::unique_lock lock(cache_->mutex);
  auto [it, inserted] = cache_->entries.emplace(std::move(key), fresh);
  return it->second;
}

std::vector<SymTensor> VectorField::finite_difference_tensor(std::span<const double> x, std::size_t m, double h) const {
  check_point(x);
  if (m > 4) throw CapExceeded("finite differences are limited to order 4");
  auto layout = JetLayout::get(dim_, m);
  const JetLayout& L = *layout;
  std::vector<SymTensor> out;
  for (const auto& e : exprs_) {
    SymTensor t(layout, m);
    for (std::size_t flat = L.begin(m); flat < L.end(m); ++flat) {
      const MultiIndex& beta = L.multi_index(flat);
      // Tensor product of 1-d central stencils sum_j (-1)^j C(k, j) f(x + (k/2 - j) h).
      std::vector<std::uint32_t> offs(dim_, 0);
      long double acc = 0.0L;
      while (true) {
        long double weight = 1.0L;
        std::vector<long double> p(x.begin(), x.end());
        for (std::size_t v = 0; v < dim_; ++v) {
          const std::uint32_t k = beta[v];
          const std::uint32_t j = offs[v];
          long double binom = 1.0L;
          for (std::uint32_t r = 0; r < j; ++r) binom = binom * static_cast<long double>(k - r) / (r + 1);
          weight *= (j % 2 == 0 ? binom : -binom);
          p[v] += (static_cast<long double>(k) / 2.0L - j) * h;
        }
        acc += weight * evaluate<long double>(*e, p);
        std::size_t v = 0;
        while (v < dim_ && offs[v] == beta[v]) offs[v++] = 0;
        if (v == dim_) break;
        ++offs[v];
      }
      t.entry(beta) = static_cast<double>(acc / std::pow(static_cast<long double>(h), static_cast<long double>(m)));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string VectorField::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < exprs_.size(); ++i) {
    if (i > 0) s += "; ";
    s += bseries::to_string(*exprs_[i]);
  }
  return s;
}

double estimate_derivative_bound(const VectorField& f, std::span<const double> x, std::size_t max_m) {
  double bound = 0.0;
  for (std::size_t m = 0; m <= std::min(max_m, f.max_order()); ++m) {
    for (const auto& t : *f.derivative_tensor(x, m)) bound = std::max(bound, t.max_abs());
  }
  return bound;
}

}  // namespace bseries
