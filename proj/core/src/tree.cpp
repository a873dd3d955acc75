#include "bseries/tree.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "bseries/errors.hpp"

namespace bseries {

RootedTree::RootedTree() : code_("{}") {}

RootedTree RootedTree::node() { return bplus({}); }

RootedTree RootedTree::bplus(std::vector<RootedTree> children) {
  std::erase_if(children, [](const RootedTree& c) { return c.is_empty(); });
  std::sort(children.begin(), children.end(), canonical_less);

  RootedTree t;
  t.size_ = 1;
  if (children.empty()) {
    t.code_ = ".";
  } else {
    t.code_ = "[";
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (i > 0) t.code_ += ',';
      t.code_ += children[i].code_;
      t.size_ += children[i].size_;
    }
    t.code_ += ']';
  }
  t.children_ = std::move(children);
  return t;
}

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  RootedTree parse_all() {
    skip_ws();
    if (text_.substr(pos_, 2) == "{}") {
      pos_ += 2;
      finish();
      return RootedTree::empty();
    }
    RootedTree t = parse_tree();
    finish();
    return t;
  }

 private:
  RootedTree parse_tree() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of tree", pos_);
    if (text_[pos_] == '.') {
      ++pos_;
      return RootedTree::node();
    }
    if (text_[pos_] != '[') throw ParseError("expected '.' or '['", pos_);
    ++pos_;
    std::vector<RootedTree> children;
    children.push_back(parse_tree());
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      children.push_back(parse_tree());
      skip_ws();
    }
    if (pos_ >= text_.size() || text_[pos_] != ']') throw ParseError("expected ',' or ']'", pos_);
    ++pos_;
    return RootedTree::bplus(std::move(children));
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RootedTree RootedTree::parse(std::string_view text) { return TreeParser(text).parse_all(); }

bool canonical_less(const RootedTree& a, const RootedTree& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a.code() < b.code();
}

BigInt factorial(std::size_t n) {
  BigInt r = 1;
  for (std::size_t k = 2; k <= n; ++k) r *= k;
  return r;
}

BigInt sigma(const RootedTree& t) {
  BigInt result = 1;
  const auto& ch = t.children();
  // Children are sorted, so equal subtrees are adjacent.
  for (std::size_t i = 0; i < ch.size();) {
    std::size_t j = i;
    while (j < ch.size() && ch[j] == ch[i]) ++j;
    const std::size_t k = j - i;
    result *= factorial(k) * boost::multiprecision::pow(sigma(ch[i]), static_cast<unsigned>(k));
    i = j;
  }
  return result;
}

BigInt tree_factorial(const RootedTree& t) {
  if (t.is_empty()) return 1;
  BigInt result = t.size();
  for (const auto& c : t.children()) result *= tree_factorial(c);
  return result;
}

BigInt alpha(const RootedTree& t) {
  if (t.is_empty()) throw ConfigError("alpha is undefined for the empty tree");
  const BigInt denom = tree_factorial(t) * sigma(t);
  const BigInt num = factorial(t.size());
  assert(num % denom == 0 && "alpha must be integral");
  return num / denom;
}

Rational butcher_weight(const RootedTree& t) {
  return Rational(BigInt(1), tree_factorial(t) * sigma(t));
}

TreeCoefficients coefficients(const RootedTree& t) {
  TreeCoefficients c;
  c.sigma = sigma(t);
  c.factorial = tree_factorial(t);
  c.size = t.size();
  if (!t.is_empty()) c.alpha = alpha(t);
  return c;
}

std::vector<RootedTree> enumerate_unlabelled(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw CapExceeded("tree order " + std::to_string(n) + " exceeds the enumeration cap " + std::to_string(cap));
  }
  if (n == 0) return {RootedTree::empty()};

  // pool holds every tree of order 1..s-1 in canonical order; the children of a
  // new root are chosen as a non-decreasing index sequence into it.
  std::vector<std::vector<RootedTree>> by_size(n + 1);
  by_size[1] = {RootedTree::node()};
  for (std::size_t s = 2; s <= n; ++s) {
    std::vector<RootedTree> pool;
    for (std::size_t k = s - 1; k >= 1; --k) pool.insert(pool.end(), by_size[k].begin(), by_size[k].end());

    std::vector<RootedTree> chosen;
    std::vector<RootedTree>& out = by_size[s];
    std::function<void(std::size_t, std::size_t)> pick = [&](std::size_t start, std::size_t remaining) {
      if (remaining == 0) {
        out.push_back(RootedTree::bplus(chosen));
        return;
      }
      for (std::size_t i = start; i < pool.size(); ++i) {
        if (pool[i].size() > remaining) continue;
        chosen.push_back(pool[i]);
        pick(i, remaining - pool[i].size());
        chosen.pop_back();
      }
    };
    pick(0, s - 1);
    std::sort(out.begin(), out.end(), canonical_less);
  }
  return by_size[n];
}

LabelledTree LabelledTree::from_parents(std::vector<std::uint32_t> parents) {
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const std::size_t vertex = i + 2;
    if (parents[i] < 1 || parents[i] >= vertex) {
      throw ConfigError("vertex " + std::to_string(vertex) + " has parent " + std::to_string(parents[i]) +
                        "; an increasing labelling needs 1 <= parent < vertex");
    }
  }
  LabelledTree t;
  t.size_ = parents.size() + 1;
  t.parents_ = std::move(parents);
  return t;
}

LabelledTree decode_labels(std::span<const std::uint32_t> seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] < 1 || seq[i] > i + 1) {
      throw ConfigError("label l_" + std::to_string(i + 1) + " = " + std::to_string(seq[i]) + " is outside 1.." +
                        std::to_string(i + 1));
    }
  }
  return LabelledTree::from_parents({seq.begin(), seq.end()});
}

LabelSequence encode_labels(const LabelledTree& t) {
  if (t.is_empty()) throw ConfigError("the empty tree has no label sequence");
  return {t.parents().begin(), t.parents().end()};
}

LabelledTree graft(const LabelledTree& t1, std::uint32_t l, const LabelledTree& t2) {
  if (t2.is_empty()) {
    if (l > t1.size()) throw ConfigError("graft label out of range");
    return t1;
  }
  if (t1.is_empty()) {
    if (l != 0) throw ConfigError("grafting onto the empty tree requires label 0");
    return t2;
  }
  if (l < 1 || l > t1.size()) {
    throw ConfigError("graft label " + std::to_string(l) + " outside 1.." + std::to_string(t1.size()));
  }
  const auto shift = static_cast<std::uint32_t>(t1.size());
  std::vector<std::uint32_t> parents(t1.parents().begin(), t1.parents().end());
  parents.push_back(l);
  for (std::uint32_t p : t2.parents()) parents.push_back(p + shift);
  return LabelledTree::from_parents(std::move(parents));
}

RootedTree forget(const LabelledTree& t) {
  const std::size_t n = t.size();
  if (n == 0) return RootedTree::empty();
  std::vector<std::vector<RootedTree>> kids(n + 1);
  std::vector<RootedTree> subtree(n + 1);
  // Children carry larger labels than their parent, so a reverse sweep
  // completes every subtree before its parent is built.
  for (std::size_t v = n; v >= 1; --v) {
    subtree[v] = RootedTree::bplus(std::move(kids[v]));
    if (v >= 2) kids[t.parent(v)].push_back(subtree[v]);
  }
  return subtree[1];
}

void for_each_label_sequence(std::size_t n, const std::function<void(std::span<const std::uint32_t>)>& visit) {
  if (n == 0) return;
  const std::size_t len = n - 1;
  std::vector<std::uint32_t> seq(len, 1);
  while (true) {
    visit(seq);
    // Odometer increment, last position fastest.
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (seq[i] < i + 1) {
        ++seq[i];
        std::fill(seq.begin() + static_cast<std::ptrdiff_t>(i) + 1, seq.end(), 1u);
        break;
      }
      if (i == 0) return;
    }
    if (len == 0) return;
  }
}

std::string format_labels(std::span<const std::uint32_t> seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(seq[i]);
  }
  return out;
}

}  // namespace bseries
