#include "bseries/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bseries/errors.hpp"
#include "bseries/sampler.hpp"
#include "bseries/semilinear.hpp"
#include "bseries/series.hpp"

namespace bseries::cli {

namespace {

constexpr std::size_t kReferenceOrder = 8;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, const char* what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::optional<std::size_t> parse_count(std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_warning(std::vector<std::string>* warnings, const std::string& w) {
  if (!warnings) return;
  for (const auto& existing : *warnings) {
    if (existing == w) return;
  }
  warnings->push_back(w);
}

Matrix two_state_generator() {
  Matrix a(2, 2);
  a << -1, 1, 1, -1;
  return a;
}

struct Problem {
  VectorField field;
  std::optional<VectorField> nonlinear;
  std::optional<GeneratorMatrix> generator;
  Vector x0;
  double t0 = 0.0;
  std::function<std::vector<std::optional<double>>(double)> reference;
};

Problem resolve_problem(const RunConfig& c) {
  std::string id = c.problem;
  if (id.empty()) id = c.fx.empty() ? "exp" : "custom";
  if (!c.fx.empty() && id != "custom") throw ConfigError("--fx defines a custom problem; it cannot be combined with " + id);
  if (!c.a_path.empty() && id != "semilinear2" && id != "custom") {
    throw ConfigError("--A applies to semilinear2 or a custom problem, not " + id);
  }
  const double t0 = c.t0.value_or(0.0);
  auto pick_x0 = [&](Vector fallback) {
    Vector x0 = c.x0.empty() ? std::move(fallback) : c.x0;
    return x0;
  };
  auto load_generator = [&](Matrix fallback) {
    return c.a_path.empty() ? GeneratorMatrix(std::move(fallback)) : GeneratorMatrix::parse_csv(read_file(c.a_path));
  };
  auto semilinear_reference = [](const GeneratorMatrix& a, const VectorField& g, Vector x0, double t0) {
    return [a, g, x0, t0](double t) {
      const Vector v = exp_butcher_truncated(a.matrix(), g, x0, t0, t, kReferenceOrder);
      return std::vector<std::optional<double>>(v.begin(), v.end());
    };
  };

  if (id == "exp") {
    Vector x0 = pick_x0({1.0});
    if (x0.size() != 1) throw ConfigError("exp takes a scalar x0");
    return {VectorField::parse("exp(x1)", 1), std::nullopt, std::nullopt, x0, t0, [x0, t0](double t) {
              return std::vector<std::optional<double>>{exp_reference(x0[0], t - t0)};
            }};
  }
  if (id == "riccati") {
    Vector x0 = pick_x0({0.0, 0.5});
    if (x0.size() != 2) throw ConfigError("riccati takes x0 = (s0, y0)");
    return {VectorField::parse("1; x1*x2 + x2^2", 2), std::nullopt, std::nullopt, x0, t0, [x0, t0](double t) {
              return std::vector<std::optional<double>>{x0[0] + (t - t0), riccati_reference(x0[0], x0[1], t - t0)};
            }};
  }
  if (id == "semilinear2") {
    Vector x0 = pick_x0({0.5, 0.25});
    GeneratorMatrix a = load_generator(two_state_generator());
    if (x0.size() != 2 || a.dim() != 2) throw ConfigError("semilinear2 is two-dimensional");
    VectorField g = VectorField::parse("x1^2; x2^2", 2);
    VectorField full = g.plus_linear(a.row_major());
    auto ref = semilinear_reference(a, g, x0, t0);
    return {std::move(full), std::move(g), std::move(a), x0, t0, ref};
  }
  if (id == "custom") {
    if (c.fx.empty()) throw ConfigError("a custom problem needs --fx");
    if (c.x0.empty()) throw ConfigError("a custom problem needs --x0");
    const std::size_t dim = c.dim != 0 ? c.dim : c.x0.size();
    if (c.x0.size() != dim) throw ConfigError("x0 has " + std::to_string(c.x0.size()) + " entries, expected " +
                                              std::to_string(dim));
    VectorField g = VectorField::parse(c.fx, dim);
    if (c.a_path.empty()) {
      return {g, std::nullopt, std::nullopt, c.x0, t0,
              [dim](double) { return std::vector<std::optional<double>>(dim); }};
    }
    GeneratorMatrix a = GeneratorMatrix::parse_csv(read_file(c.a_path));
    if (a.dim() != dim) throw ConfigError("--A does not match the problem dimension");
    VectorField full = g.plus_linear(a.row_major());
    auto ref = semilinear_reference(a, g, c.x0, t0);
    return {std::move(full), std::move(g), std::move(a), c.x0, t0, ref};
  }
  throw ConfigError("unknown problem '" + id + "' (expected exp, riccati, semilinear2 or custom)");
}

struct Method {
  enum class Kind { kTruncate, kMonteCarlo, kSemilinear } kind = Kind::kTruncate;
  std::size_t order = 0;
  std::optional<SizeDistribution> dist;
  std::size_t samples = 0;
};

Method parse_method(const RunConfig& c) {
  const std::string_view text = trim(c.method);
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  Method m;
  if (head == "truncate") {
    const auto n = parse_count(rest);
    if (!n) throw ConfigError("method truncate needs an order, as in truncate:4");
    m.order = *n;
    return m;
  }
  if (head == "mc") {
    m.kind = Method::Kind::kMonteCarlo;
    m.samples = c.samples;
    if (rest.empty()) {
      m.dist = SizeDistribution::parse(c.dist);
      return m;
    }
    // mc:DIST,SAMPLES when the last comma field is a count and the rest is a law.
    if (const auto comma = rest.rfind(','); comma != std::string_view::npos) {
      if (const auto n = parse_count(rest.substr(comma + 1))) {
        try {
          m.dist = SizeDistribution::parse(rest.substr(0, comma));
          m.samples = *n;
          return m;
        } catch (const ConfigError&) {
        }
      }
    }
    m.dist = SizeDistribution::parse(rest);
    return m;
  }
  if (head == "semilinear") {
    m.kind = Method::Kind::kSemilinear;
    m.samples = c.samples;
    if (!rest.empty()) {
      const auto n = parse_count(rest);
      if (!n) throw ConfigError("method semilinear takes a sample count, as in semilinear:10000");
      m.samples = *n;
    }
    return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "' (expected truncate:n, mc:dist,samples or semilinear:samples)");
}

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << text;
  if (!file) throw ConfigError("failed writing '" + path + "'");
}

// Increasing labellings: the root takes label 1 and the children's label sets
// interleave freely, giving (|t| - 1)! / prod |c|! times each child's count.
BigInt count_labellings(const RootedTree& t) {
  BigInt out = factorial(t.size() - 1);
  std::map<std::string, std::size_t> repeats;
  for (const auto& c : t.children()) {
    out = out / factorial(c.size()) * count_labellings(c);
    ++repeats[c.code()];
  }
  // Swapping equal subtrees gives the same labelled tree.
  for (const auto& [code, m] : repeats) out /= factorial(m);
  return out;
}

}  // namespace

std::optional<double> exp_reference(double x0, double dt) {
  const double inner = std::exp(-x0) - dt;
  if (!(inner > 0.0)) return std::nullopt;
  return -std::log(inner);
}

std::optional<double> riccati_reference(double s0, double y0, double dt) {
  if (y0 == 0.0) return 0.0;
  const double s = s0 + dt;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double r) { return std::exp(r * r / 2.0); }, s0, s, 15, 1e-10);
  const double denom = std::exp(s0 * s0 / 2.0) / y0 - integral;
  if (!(denom * y0 > 0.0)) return std::nullopt;
  return std::exp(s * s / 2.0) / denom;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) throw ConfigError("grid must read a:b:step");
  const double a = parse_double(text.substr(0, first), "grid start");
  const double b = parse_double(text.substr(first + 1, second - first - 1), "grid end");
  const double step = parse_double(text.substr(second + 1), "grid step");
  if (!(step > 0.0) || !(b >= a) || !std::isfinite(b)) throw ConfigError("grid needs a <= b and step > 0");
  const double span = (b - a) / step;
  if (span > 1e6) throw ConfigError("grid has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = a + static_cast<double>(k) * step;
  return out;
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find_first_of(",; \t\r\n", pos);
    const auto token = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!trim(token).empty()) out.push_back(parse_double(token, "number"));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

std::vector<Row> execute_run(const RunConfig& config, std::vector<std::string>* warnings) {
  const Problem problem = resolve_problem(config);
  const Method method = parse_method(config);
  if (config.times.empty()) throw ConfigError("no evaluation time; pass --t or --t-grid");
  if (method.kind == Method::Kind::kSemilinear && !problem.generator) {
    throw ConfigError("method semilinear needs a semilinear problem (semilinear2 or --fx with --A)");
  }
  const McOptions options{.workers = config.workers};
  const std::size_t dim = problem.x0.size();

  std::vector<Row> rows;
  for (const double t : config.times) {
    if (!(t >= problem.t0)) throw ConfigError("evaluation time " + format_double(t) + " precedes t0");
    const auto refs = problem.reference(t);
    auto push = [&](std::size_t i, double est, double se, std::size_t samples, bool random, double ms) {
      Row r;
      r.t = t;
      r.component = i + 1;
      r.estimate = est;
      r.std_error = se;
      r.reference = refs[i];
      r.samples = samples;
      if (random) r.seed = config.seed;
      if (config.timing) r.wall_ms = ms;
      rows.push_back(r);
    };
    const auto start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };

    switch (method.kind) {
      case Method::Kind::kTruncate: {
        Vector value;
        if (problem.generator) {
          value = exp_butcher_truncated(problem.generator->matrix(), *problem.nonlinear, problem.x0, problem.t0, t,
                                        method.order);
        } else {
          const SeriesResult s = truncated_butcher(problem.field, problem.x0, problem.t0, t, method.order);
          if (s.diverging) add_warning(warnings, "truncated series terms grow at t = " + format_double(t));
          value = s.value;
        }
        const double ms = elapsed_ms();
        for (std::size_t i = 0; i < dim; ++i) push(i, value[i], 0.0, 0, false, ms);
        break;
      }
      case Method::Kind::kMonteCarlo: {
        const McEstimate est =
            mc_estimate(problem.field, problem.x0, problem.t0, t, *method.dist, method.samples, config.seed, options);
        for (const auto& w : est.warnings) add_warning(warnings, w);
        const double ms = elapsed_ms();
        for (std::size_t i = 0; i < dim; ++i) push(i, est.mean[i], est.std_error[i], est.samples, true, ms);
        break;
      }
      case Method::Kind::kSemilinear: {
        for (std::size_t i = 0; i < dim; ++i) {
          const auto t_start = std::chrono::steady_clock::now();
          const McEstimate est = semilinear_mc_estimate(*problem.generator, *problem.nonlinear, problem.x0, i,
                                                        problem.t0, t, method.samples, config.seed, options);
          for (const auto& w : est.warnings) add_warning(warnings, w);
          const double ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
          push(i, est.mean[0], est.std_error[0], est.samples, true, ms);
        }
        break;
      }
    }
  }
  return rows;
}

std::vector<SweepRow> execute_sweep(const SweepConfig& config, std::vector<std::string>* warnings) {
  const Problem problem = resolve_problem(config.run);
  if (config.run.times.size() > 1) throw ConfigError("sweep takes a single --t");
  const double t = config.run.times.empty() ? problem.t0 + 1.0 : config.run.times.front();
  const double dt = t - problem.t0;
  if (!(dt >= 0.0)) throw ConfigError("evaluation time precedes t0");
  if (config.c_values.empty()) throw ConfigError("sweep needs at least one C");
  const double s0 = norm(problem.x0);

  std::vector<std::string> tokens;
  {
    std::string_view rest = config.dists;
    while (true) {
      const auto semi = rest.find(';');
      const auto token = trim(rest.substr(0, semi));
      if (!token.empty()) tokens.emplace_back(token);
      if (semi == std::string_view::npos) break;
      rest.remove_prefix(semi + 1);
    }
  }
  if (tokens.empty()) throw ConfigError("sweep needs at least one size law");

  std::map<std::string, double> empirical_cache;
  auto empirical = [&](const SizeDistribution& d) {
    const std::string key = d.to_string();
    if (const auto it = empirical_cache.find(key); it != empirical_cache.end()) return it->second;
    const McEstimate est = mc_estimate(problem.field, problem.x0, problem.t0, t, d, config.run.samples,
                                       config.run.seed, {.workers = config.run.workers});
    for (const auto& w : est.warnings) add_warning(warnings, key + ": " + w);
    empirical_cache.emplace(key, est.mean_square);
    return est.mean_square;
  };

  std::vector<SweepRow> rows;
  for (const double c : config.c_values) {
    for (const auto& token : tokens) {
      SweepRow row;
      row.c = c;
      std::optional<SizeDistribution> dist;
      if (token == "optimal") {
        try {
          dist = optimal_distribution(c, dt, s0);
        } catch (const ConfigError&) {
          row.distribution = "optimal:C=" + format_double(c) + ",dt=" + format_double(dt) + ",s0=" + format_double(s0);
          rows.push_back(row);
          continue;
        }
      } else {
        dist = SizeDistribution::parse(token);
      }
      row.distribution = dist->to_string();
      const MomentBound b = second_moment_bound(*dist, c, dt, s0, config.q);
      if (!b.divergent) row.bound = b.value;
      row.empirical = empirical(*dist);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string enumerate_listing(std::size_t n) {
  if (n == 0) throw ConfigError("enumerate needs an order >= 1");
  if (n > kDefaultOrderCap) {
    throw CapExceeded("enumerate is limited to order " + std::to_string(kDefaultOrderCap));
  }
  std::ostringstream out;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto trees = enumerate_unlabelled(k);
    std::vector<BigInt> counts;
    BigInt labelled = 0;
    for (const auto& tree : trees) {
      counts.push_back(count_labellings(tree));
      labelled += counts.back();
    }
    out << "order " << k << ": " << trees.size() << " unlabelled, " << labelled << " labelled\n";
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const TreeCoefficients co = coefficients(trees[i]);
      out << "  " << trees[i].code() << "\tsigma=" << co.sigma << "\ttree_factorial=" << co.factorial
          << "\talpha=" << co.alpha << "\tlabellings=" << counts[i] << '\n';
    }
  }
  return out.str();
}

std::string format_rows(const std::vector<Row>& rows, std::string_view format) {
  std::ostringstream out;
  if (format == "json") {
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["t"] = r.t;
      j["component"] = r.component;
      j["estimate"] = r.estimate;
      j["std_error"] = r.std_error;
      j["reference"] = r.reference ? nlohmann::ordered_json(*r.reference) : nlohmann::ordered_json();
      j["abs_error"] = r.reference ? nlohmann::ordered_json(std::fabs(r.estimate - *r.reference)) : nlohmann::ordered_json();
      j["samples"] = r.samples;
      j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json();
      j["wall_ms"] = r.wall_ms ? nlohmann::ordered_json(*r.wall_ms) : nlohmann::ordered_json();
      out << j.dump() << '\n';
    }
    return out.str();
  }
  if (format != "csv") throw ConfigError("unknown format '" + std::string(format) + "'");
  out << "t,component,estimate,std_error,reference,abs_error,samples,seed,wall_ms\n";
  for (const auto& r : rows) {
    const std::optional<double> abs_error =
        r.reference ? std::optional<double>(std::fabs(r.estimate - *r.reference)) : std::nullopt;
    out << format_double(r.t) << ',' << r.component << ',' << format_double(r.estimate) << ','
        << format_double(r.std_error) << ',' << csv_optional(r.reference) << ',' << csv_optional(abs_error) << ','
        << r.samples << ',' << (r.seed ? std::to_string(*r.seed) : std::string()) << ',' << csv_optional(r.wall_ms)
        << '\n';
  }
  return out.str();
}

std::string format_sweep(const std::vector<SweepRow>& rows, std::string_view format) {
  std::ostringstream out;
  if (format == "json") {
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["distribution"] = r.distribution;
      j["C"] = r.c;
      j["divergent"] = !r.bound.has_value();
      j["bound"] = r.bound ? nlohmann::ordered_json(*r.bound) : nlohmann::ordered_json();
      j["empirical_second_moment"] = r.empirical ? nlohmann::ordered_json(*r.empirical) : nlohmann::ordered_json();
      out << j.dump() << '\n';
    }
    return out.str();
  }
  if (format != "csv") throw ConfigError("unknown format '" + std::string(format) + "'");
  out << "distribution,C,bound,empirical_second_moment\n";
  for (const auto& r : rows) {
    // Size-law strings may hold commas.
    out << '"' << r.distribution << "\"," << format_double(r.c) << ','
        << (r.bound ? format_double(*r.bound) : std::string("divergent")) << ',' << csv_optional(r.empirical)
        << '\n';
  }
  return out.str();
}

namespace {

struct RawOptions {
  std::string problem_flag;
  std::string problem_positional;
  std::vector<std::string> x0;
  std::vector<std::string> t;
  std::string t_grid;
  double t0 = 0.0;
  std::string config;
};

void add_problem_options(CLI::App* cmd, RunConfig& cfg, RawOptions& raw) {
  cmd->add_option("--config", raw.config, "key = value file; command-line flags take precedence");
  cmd->add_option("PROBLEM", raw.problem_positional, "exp, riccati, semilinear2 or custom");
  cmd->add_option("--problem", raw.problem_flag, "exp, riccati, semilinear2 or custom");
  cmd->add_option("--fx", cfg.fx, "custom right-hand side, components separated by ';'");
  cmd->add_option("--dim", cfg.dim, "dimension of a custom problem");
  cmd->add_option("--x0", raw.x0, "initial value, comma separated");
  cmd->add_option("--t0", raw.t0, "initial time");
  auto* t = cmd->add_option("-t,--t", raw.t, "evaluation time(s)");
  cmd->add_option("--t-grid", raw.t_grid, "evaluation grid a:b:step")->excludes(t);
  cmd->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  cmd->add_option("--dist", cfg.dist, "tree size law, e.g. geometric:0.5");
  cmd->add_option("--seed", cfg.seed, std::string("random seed (default from ") + kSeedEnv + ", else 1)");
  cmd->add_option("-A,--A", cfg.a_path, "CSV file with the generator matrix");
  cmd->add_option("--out", cfg.out, "output file (default stdout)");
  cmd->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--workers", cfg.workers, "worker threads, 0 = all cores");
}

// Fills options absent from the command line with `key = value` entries.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  for (const auto& item : items) {
    if (!item.parents.empty() || item.name == "config") {
      throw ConfigError("config file '" + path + "': unsupported key '" + item.fullname() + "'");
    }
    CLI::Option* opt = cmd->get_option_no_throw((item.name.size() == 1 ? "-" : "--") + item.name);
    if (opt == nullptr) throw ConfigError("config file '" + path + "': unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    std::string value;
    for (const auto& part : item.inputs) value += (value.empty() ? "" : ",") + part;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + item.name + "': " + e.what());
    }
  }
}

void finish_problem_options(CLI::App* cmd, RunConfig& cfg, const RawOptions& raw) {
  if (!raw.config.empty()) apply_config_file(cmd, raw.config);
  if (cmd->count("--seed") == 0) {
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
      const auto seed = parse_count(env);
      if (!seed) throw ConfigError(std::string(kSeedEnv) + " is not a nonnegative integer");
      cfg.seed = *seed;
    }
  }
  if (!raw.t_grid.empty() && !raw.t.empty()) throw ConfigError("--t and --t-grid are mutually exclusive");
  if (!raw.problem_flag.empty() && !raw.problem_positional.empty() && raw.problem_flag != raw.problem_positional) {
    throw ConfigError("problem given twice: " + raw.problem_positional + " and " + raw.problem_flag);
  }
  cfg.problem = raw.problem_flag.empty() ? raw.problem_positional : raw.problem_flag;
  std::string joined;
  for (const auto& part : raw.x0) joined += part + ",";
  cfg.x0 = parse_numbers(joined);
  if (cmd->count("--t0") > 0) cfg.t0 = raw.t0;
  if (!raw.t_grid.empty()) {
    cfg.times = parse_grid(raw.t_grid);
  } else {
    joined.clear();
    for (const auto& part : raw.t) joined += part + ",";
    cfg.times = parse_numbers(joined);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Butcher-series and random-tree solvers for autonomous ODEs", "bseries"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  RawOptions run_raw;
  auto* run = app.add_subcommand("run", "evaluate a problem at one or more times");
  add_problem_options(run, run_cfg, run_raw);
  run->add_option("--method", run_cfg.method, "truncate:n, mc:dist,samples or semilinear:samples");
  run->add_flag("--timing", run_cfg.timing, "fill the wall_ms column");

  SweepConfig sweep_cfg;
  RawOptions sweep_raw;
  std::string c_grid = "0.05:0.7:0.05";
  std::vector<std::string> c_list;
  auto* sweep = app.add_subcommand("sweep", "second-moment bounds against empirical second moments");
  add_problem_options(sweep, sweep_cfg.run, sweep_raw);
  auto* c_opt = sweep->add_option("-C,--C", c_list, "derivative-bound constants");
  sweep->add_option("--C-grid", c_grid, "constants as a:b:step")->excludes(c_opt);
  sweep->add_option("--dists", sweep_cfg.dists, "size laws separated by ';'");
  sweep->add_option("-q,--q", sweep_cfg.q, "moment order");

  std::size_t enum_order = 0;
  std::string enum_out;
  auto* enumerate = app.add_subcommand("enumerate", "list rooted trees with their coefficients");
  enumerate->add_option("n", enum_order, "largest order")->required();
  enumerate->add_option("--out", enum_out, "output file (default stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    std::vector<std::string> warnings;
    if (run->parsed()) {
      finish_problem_options(run, run_cfg, run_raw);
      const auto rows = execute_run(run_cfg, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      write_output(format_rows(rows, run_cfg.format), run_cfg.out, out);
    } else if (sweep->parsed()) {
      finish_problem_options(sweep, sweep_cfg.run, sweep_raw);
      if (!c_list.empty()) {
        std::string joined;
        for (const auto& part : c_list) joined += part + ",";
        sweep_cfg.c_values = parse_numbers(joined);
      } else {
        sweep_cfg.c_values = parse_grid(c_grid);
      }
      const auto rows = execute_sweep(sweep_cfg, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      write_output(format_sweep(rows, sweep_cfg.run.format), sweep_cfg.run.out, out);
    } else {
      write_output(enumerate_listing(enum_order), enum_out, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace bseries::cli
