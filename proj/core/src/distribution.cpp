#include "bseries/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "bseries/errors.hpp"

namespace bseries {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t stop = s.find(sep, start);
    out.push_back(s.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start));
    if (stop == std::string_view::npos) return out;
    start = stop + 1;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SizeDistribution SizeDistribution::geometric(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("geometric parameter must lie in [0, 1)");
  SizeDistribution d;
  d.kind_ = Kind::kGeometric;
  d.a_ = p;
  return d;
}

SizeDistribution SizeDistribution::poisson(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 500.0)) throw ConfigError("Poisson mean must lie in [0, 500]");
  SizeDistribution d;
  d.kind_ = Kind::kPoisson;
  d.a_ = lambda;
  return d;
}

SizeDistribution SizeDistribution::optimal(double c, double dt, double s0) {
  if (!(c >= 0.0) || !(dt >= 0.0)) throw ConfigError("optimal distribution needs C >= 0 and dt >= 0");
  if (!(c * dt < 1.0)) throw ConfigError("optimal distribution needs C * dt < 1");
  if (!(s0 > 0.0)) throw ConfigError("optimal distribution needs s0 > 0");
  SizeDistribution d;
  d.kind_ = Kind::kOptimal;
  d.a_ = c;
  d.b_ = dt;
  d.s0_ = s0;
  d.c0_ = 1.0 / (s0 - std::log1p(-c * dt));
  return d;
}

SizeDistribution SizeDistribution::table(std::vector<double> probabilities) {
  if (probabilities.empty()) throw ConfigError("table distribution needs at least one probability");
  double total = 0.0;
  for (double q : probabilities) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("table probabilities must be nonnegative");
    total += q;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("table probabilities must sum to 1");
  SizeDistribution d;
  d.kind_ = Kind::kTable;
  d.table_ = std::move(probabilities);
  d.cdf_.reserve(d.table_.size());
  double cum = 0.0;
  for (double q : d.table_) d.cdf_.push_back(cum += q);
  return d;
}

SizeDistribution SizeDistribution::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("size law needs 'kind:parameters'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (kind == "geometric") return geometric(parse_number(rest, "geometric parameter"));
  if (kind == "poisson") return poisson(parse_number(rest, "Poisson mean"));
  if (kind == "table") {
    std::vector<double> q;
    for (auto part : split(rest, ',')) q.push_back(parse_number(part, "table probability"));
    return table(std::move(q));
  }
  if (kind == "optimal") {
    std::optional<double> c, dt, s0;
    for (auto part : split(rest, ',')) {
      const std::size_t eq = part.find('=');
      if (eq == std::string_view::npos) throw ConfigError("optimal parameters are key=value pairs");
      const std::string_view key = part.substr(0, eq);
      const double v = parse_number(part.substr(eq + 1), key);
      if (key == "C") {
        c = v;
      } else if (key == "dt") {
        dt = v;
      } else if (key == "s0") {
        s0 = v;
      } else {
        throw ConfigError("unknown optimal parameter '" + std::string(key) + "'");
      }
    }
    if (!c || !dt) throw ConfigError("optimal distribution needs C and dt");
    return optimal(*c, *dt, s0.value_or(1.0));
  }
  throw ConfigError("unknown distribution kind '" + std::string(kind) + "'");
}

std::string SizeDistribution::to_string() const {
  std::string s;
  switch (kind_) {
    case Kind::kGeometric:
      s = "geometric:" + fmt(a_);
      break;
    case Kind::kPoisson:
      s = "poisson:" + fmt(a_);
      break;
    case Kind::kOptimal:
      s = "optimal:C=" + fmt(a_) + ",dt=" + fmt(b_) + ",s0=" + fmt(s0_);
      break;
    case Kind::kTable:
      s = "table:";
      for (std::size_t i = 0; i < table_.size(); ++i) s += (i ? "," : "") + fmt(table_[i]);
      break;
  }
  if (cap_) s += "|cap=" + std::to_string(*cap_);
  return s;
}

std::optional<std::size_t> SizeDistribution::max_size() const noexcept {
  if (cap_) return cap_;
  if (kind_ == Kind::kTable) return table_.size() - 1;
  return std::nullopt;
}

double SizeDistribution::base_pmf(std::size_t n) const {
  const auto nd = static_cast<double>(n);
  switch (kind_) {
    case Kind::kGeometric:
      return (1.0 - a_) * std::pow(a_, nd);
    case Kind::kPoisson:
      if (a_ == 0.0) return n == 0 ? 1.0 : 0.0;
      return std::exp(nd * std::log(a_) - a_ - std::lgamma(nd + 1.0));
    case Kind::kOptimal:
      if (n == 0) return c0_ * s0_;
      return c0_ * std::pow(a_ * b_, nd) / nd;
    case Kind::kTable:
      return n < table_.size() ? table_[n] : 0.0;
  }
  return 0.0;
}

double SizeDistribution::pmf(std::size_t n) const {
  if (cap_) return n <= *cap_ ? base_pmf(n) / retained_ : 0.0;
  return base_pmf(n);
}

SizeDistribution SizeDistribution::capped(std::size_t max_size) const {
  if (kind_ == Kind::kTable && !cap_ && table_.size() <= max_size + 1) return *this;
  SizeDistribution d = *this;
  d.cap_ = max_size;
  d.retained_ = 0.0;
  for (std::size_t n = 0; n <= max_size; ++n) d.retained_ += base_pmf(n);
  if (!(d.retained_ > 0.0)) throw ConfigError("cap removes all probability mass");
  d.cdf_.clear();
  double cum = 0.0;
  for (std::size_t n = 0; n <= max_size; ++n) d.cdf_.push_back(cum += d.pmf(n));
  return d;
}

bool SizeDistribution::positive_on_support() const {
  const auto top = max_size();
  if (!top) return true;  // the infinite families are positive everywhere unless degenerate
  for (std::size_t n = 0; n <= *top; ++n) {
    if (!(pmf(n) > 0.0)) return false;
  }
  return true;
}

std::size_t SizeDistribution::sample(StreamRng& rng) const {
  if (!cdf_.empty()) {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto n = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(n, cdf_.size() - 1);
  }
  return sample_uncapped(rng);
}

std::size_t SizeDistribution::sample_uncapped(StreamRng& rng) const {
  constexpr std::size_t kMaxSearch = 100000;
  switch (kind_) {
    case Kind::kGeometric:
      if (a_ == 0.0) return 0;
      return static_cast<std::size_t>(std::floor(std::log(rng.uniform_open()) / std::log(a_)));
    case Kind::kPoisson: {
      const double u = rng.uniform();
      double p = std::exp(-a_);
      double cum = p;
      std::size_t n = 0;
      while (u >= cum && n < kMaxSearch) {
        ++n;
        p *= a_ / static_cast<double>(n);
        cum += p;
        if (p == 0.0 && static_cast<double>(n) > a_) break;
      }
      return n;
    }
    case Kind::kOptimal: {
      const double u = rng.uniform();
      double cum = base_pmf(0);
      std::size_t n = 0;
      while (u >= cum && n < kMaxSearch) {
        ++n;
        const double p = base_pmf(n);
        cum += p;
        if (p == 0.0) break;
      }
      return n;
    }
    case Kind::kTable:
      break;
  }
  return 0;
}

}  // namespace bseries
