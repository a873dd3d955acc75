#include "bseries/elemdiff.hpp"

#include "bseries/errors.hpp"

namespace bseries {

ElementaryDifferentials::ElementaryDifferentials(VectorField f, Vector x) : f_(std::move(f)), x_(std::move(x)) {
  if (f_.output_dim() != f_.dim()) throw ConfigError("elementary differentials need a field R^d -> R^d");
  if (x_.size() != f_.dim()) throw ConfigError("evaluation point has the wrong dimension");
}

std::shared_ptr<const std::vector<SymTensor>> ElementaryDifferentials::tensors(const VectorField& field,
                                                                               std::size_t m) {
  if (&field != &f_) return field.derivative_tensor(x_, m);
  if (f_tensors_.size() <= m) f_tensors_.resize(m + 1);
  if (!f_tensors_[m]) f_tensors_[m] = f_.derivative_tensor(x_, m);
  return f_tensors_[m];
}

Vector ElementaryDifferentials::contract_root(const VectorField& field, const RootedTree& t) {
  const auto& kids = t.children();
  std::vector<Vector> args;
  args.reserve(kids.size());
  for (const auto& c : kids) args.push_back(of(c));
  const auto handle = tensors(field, kids.size());
  const auto& ts = *handle;
  Vector out(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) out[j] = ts[j].apply(args);
  return out;
}

const Vector& ElementaryDifferentials::of(const RootedTree& t) {
  auto it = memo_.find(t.code());
  if (it != memo_.end()) return it->second;
  Vector value = t.is_empty() ? x_ : contract_root(f_, t);
  return memo_.emplace(t.code(), std::move(value)).first->second;
}

Vector ElementaryDifferentials::observable(const VectorField& g, const RootedTree& t) {
  if (g.dim() != f_.dim()) throw ConfigError("observable input dimension differs from the field dimension");
  if (t.is_empty()) {
    if (g.output_dim() != f_.dim()) {
      throw ConfigError("F_g of the empty tree is only defined when g maps R^d to R^d");
    }
    return x_;
  }
  return contract_root(g, t);
}

Vector elementary_differential(const VectorField& f, const RootedTree& t, std::span<const double> x) {
  ElementaryDifferentials ed(f, Vector(x.begin(), x.end()));
  return ed.of(t);
}

Vector elementary_differential(const VectorField& f, const LabelledTree& t, std::span<const double> x) {
  return elementary_differential(f, forget(t), x);
}

Vector observable_differential(const VectorField& f, const VectorField& g, const RootedTree& t,
                               std::span<const double> x) {
  ElementaryDifferentials ed(f, Vector(x.begin(), x.end()));
  return ed.observable(g, t);
}

}  // namespace bseries
