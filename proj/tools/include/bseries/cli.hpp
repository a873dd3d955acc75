#pragma once

// Command-line front end: `run`, `sweep` and `enumerate`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bseries::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

inline constexpr const char* kSeedEnv = "BSERIES_SEED";

struct RunConfig {
  /// `exp`, `riccati`, `semilinear2` or `custom`. Empty selects `exp`, or
  /// `custom` when `fx` is set.
  std::string problem;
  std::string fx;
  std::size_t dim = 0;
  std::vector<double> x0;
  std::optional<double> t0;
  std::vector<double> times;
  std::string method = "truncate:8";
  std::size_t samples = 10000;
  std::string dist = "geometric:0.5";
  std::uint64_t seed = 1;
  std::string a_path;
  std::string out;
  std::string format = "csv";
  std::size_t workers = 1;
  bool timing = false;
};

struct SweepConfig {
  RunConfig run;
  std::vector<double> c_values;
  /// Size laws separated by ';'. `optimal` alone is tuned to each row's C.
  std::string dists = "geometric:0.5;geometric:0.75;optimal;poisson:1";
  double q = 2.0;
};

struct Row {
  double t = 0.0;
  /// 1-based component index.
  std::size_t component = 1;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> reference;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> wall_ms;
};

struct SweepRow {
  std::string distribution;
  double c = 0.0;
  std::optional<double> bound;  // empty when divergent
  std::optional<double> empirical;
};

/// Solution of x' = e^x from x0 after time dt; empty past the blow-up at dt = e^-x0.
std::optional<double> exp_reference(double x0, double dt);

/// Second component of the autonomized Riccati problem y' = s y + y^2 started
/// at (s0, y0), at time t0 + dt. Uses adaptive Gauss-Kronrod at tolerance 1e-10.
std::optional<double> riccati_reference(double s0, double y0, double dt);

/// `a:b:step`, inclusive of b up to rounding.
std::vector<double> parse_grid(std::string_view text);

/// Numbers separated by commas, semicolons or whitespace.
std::vector<double> parse_numbers(std::string_view text);

std::vector<Row> execute_run(const RunConfig& config, std::vector<std::string>* warnings = nullptr);
std::vector<SweepRow> execute_sweep(const SweepConfig& config, std::vector<std::string>* warnings = nullptr);
std::string enumerate_listing(std::size_t n);

/// Header `t,component,estimate,std_error,reference,abs_error,samples,seed,wall_ms`
/// for csv; one JSON object per line for json.
std::string format_rows(const std::vector<Row>& rows, std::string_view format);
std::string format_sweep(const std::vector<SweepRow>& rows, std::string_view format);

/// Full command line, args[0] being the program name. Results go to `out`
/// unless `--out` names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bseries::cli
