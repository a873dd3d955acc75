#pragma once

// Rooted trees (unlabelled, canonical) and increasing-labelled trees.
//
// Text format: `{}` is the empty tree, `.` the single node, and
// `[t1,t2,...]` the tree whose root carries the subtrees t1, t2, ...
// Children are always printed in canonical order: larger subtrees first,
// ties broken by comparing their own text.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bseries {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest tree order enumerated or evaluated unless the caller raises it.
inline constexpr std::size_t kDefaultOrderCap = 12;

class RootedTree {
 public:
  /// The empty tree.
  RootedTree();

  static RootedTree empty() { return RootedTree(); }
  static RootedTree node();

  /// B+ operation: a new root over `children`. Empty children are dropped.
  static RootedTree bplus(std::vector<RootedTree> children);

  /// Parses the bracket notation; any child order is accepted.
  static RootedTree parse(std::string_view text);

  std::size_t size() const noexcept { return size_; }
  bool is_empty() const noexcept { return size_ == 0; }
  const std::vector<RootedTree>& children() const noexcept { return children_; }

  /// Canonical text encoding; equal trees have identical encodings.
  const std::string& code() const noexcept { return code_; }

  friend bool operator==(const RootedTree& a, const RootedTree& b) { return a.code_ == b.code_; }

 private:
  std::vector<RootedTree> children_;
  std::size_t size_ = 0;
  std::string code_;
};

/// The fixed total order used for canonical child lists and enumeration.
bool canonical_less(const RootedTree& a, const RootedTree& b);

BigInt sigma(const RootedTree& t);
BigInt tree_factorial(const RootedTree& t);

/// Number of increasing labellings, |t|! / (t! sigma(t)). Refuses the empty tree.
BigInt alpha(const RootedTree& t);

/// Exact Butcher weight 1 / (t! sigma(t)).
Rational butcher_weight(const RootedTree& t);

struct TreeCoefficients {
  BigInt sigma;
  BigInt factorial;
  BigInt alpha;
  std::size_t size = 0;
};

TreeCoefficients coefficients(const RootedTree& t);

BigInt factorial(std::size_t n);

/// All canonical trees with exactly `n` vertices, sorted by canonical_less.
/// Throws CapExceeded when n > cap.
std::vector<RootedTree> enumerate_unlabelled(std::size_t n, std::size_t cap = kDefaultOrderCap);

/// A label sequence (l1, ..., l_{n-1}) with 1 <= l_i <= i.
using LabelSequence = std::vector<std::uint32_t>;

/// Increasing-labelled tree on vertices 1..n with root 1.
class LabelledTree {
 public:
  /// The empty tree.
  LabelledTree() = default;

  /// `parents[v - 2]` is the parent of vertex v for v = 2..n; `n` = parents.size() + 1.
  /// Throws ConfigError unless parents[v - 2] < v for every v.
  static LabelledTree from_parents(std::vector<std::uint32_t> parents);

  static LabelledTree single() { return from_parents({}); }

  std::size_t size() const noexcept { return size_; }
  bool is_empty() const noexcept { return size_ == 0; }

  /// Parent label of vertex `v`, 2 <= v <= size().
  std::uint32_t parent(std::size_t v) const { return parents_.at(v - 2); }
  std::span<const std::uint32_t> parents() const noexcept { return parents_; }

  friend bool operator==(const LabelledTree&, const LabelledTree&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint32_t> parents_;
};

/// The tree . *_{l1} . *_{l2} ... *_{l_{n-1}} . ; throws ConfigError on an
/// out-of-range label.
LabelledTree decode_labels(std::span<const std::uint32_t> seq);

/// Inverse of decode_labels. The empty tree has no sequence and is refused.
LabelSequence encode_labels(const LabelledTree& t);

/// Grafting product t1 *_l t2: t2's root becomes a child of vertex l of t1,
/// and t2's labels are shifted by |t1|.
LabelledTree graft(const LabelledTree& t1, std::uint32_t l, const LabelledTree& t2);

/// Forgetful map to the canonical unlabelled shape.
RootedTree forget(const LabelledTree& t);

/// Visits every sequence of Delta_{n-1} in lexicographic order. For n <= 1
/// the single empty sequence is visited (n = 1) or nothing (n = 0).
void for_each_label_sequence(std::size_t n, const std::function<void(std::span<const std::uint32_t>)>& visit);

std::string format_labels(std::span<const std::uint32_t> seq);

}  // namespace bseries
