#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "guesswork/asymptotic_analyzer.hpp"
#include "guesswork/monte_carlo.hpp"
#include "guesswork/source_models.hpp"
#include "guesswork/strategy_engine.hpp"

namespace guesswork::cli {

using Json = nlohmann::json;

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailure = 1,
  kExitConfigError = 2,
  kExitNumericError = 3,
  kExitResourceCap = 4,
};

/// Parsed problem description.
///
///   {
///     "sources": [{"type": "bernoulli", "p": 0.25}, ...],
///     "U": 1, "V": 2, "k": 8,
///     "key_length": 168, "grid": 2048,
///     "alphas": [...], "betas": [...],
///     "trials": 100000, "seed": 1, "strategy": "g_opt"
///   }
///
/// Source types: "uniform" {m}, "bernoulli" {p}, "iid" {probs},
/// "markov" {a, b} or {transition[, initial]}. A single source with V > 1 is
/// replicated for every user.
struct ProblemConfig {
  MultiUserProblem problem;
  std::size_t key_length = 0;
  std::size_t grid = 2048;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  StrategySelector strategy = StrategySelector::g_opt;
};

/// Throws ConfigError listing every schema problem found.
ProblemConfig parse_config(const Json& doc);
ProblemConfig load_config(const std::filesystem::path& path);
CharacterSource source_from_json(const Json& doc);
Json source_to_json(const CharacterSource& source);

/// Counts are JSON numbers when they fit in 64 bits and decimal strings
/// otherwise.
Json count_to_json(const BigCount& n);
Json trace_to_json(const GuessTrace& trace);
Json summary_to_json(const EmpiricalSummary& summary, double scale);

/// Global options shared by every subcommand.
struct Options {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  bool bits = true;
  /// Enumeration and exhaustive caps; GUESSWORK_CAP overrides both.
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t exhaustive_cap = std::uint64_t{1} << 20;

  double scale() const;
  const char* unit() const { return bits ? "bits" : "nats"; }
};

/// Reads GUESSWORK_CAP into `options`. Throws ConfigError if it is malformed.
void apply_environment(Options& options);

int cmd_analyze(const ProblemConfig& config, const Options& options, std::ostream& log);
int cmd_exact(const ProblemConfig& config, const Options& options, std::ostream& log);
int cmd_simulate(const ProblemConfig& config, const Options& options, std::ostream& log);
int cmd_figures(const std::string& which, const Options& options, std::ostream& log);
int cmd_verify(const Options& options, std::ostream& log);

// ---------------------------------------------------------------------------
// Figure datasets. Values are natural-log based; writers convert units.

inline constexpr std::size_t kFig1RightKeyLength = 168;

struct ExponentRow {
  double p;
  std::size_t excess; // V - U
  double exponent;    // R((V-U+1)/(V-U+2))
};
/// p in {0.1, ..., 0.5}, V - U in {0, ..., 8}.
std::vector<ExponentRow> fig1_left_rows();
/// p = 0.25 with exponent * key length as the log of the approximate average
/// guesswork.
std::vector<ExponentRow> fig1_right_rows();

struct Fig2Data {
  RateCurve uniform_bits; // user 1: uniform over m = 8 ("bits")
  RateCurve bytes;        // user 2: skewed 8-symbol source
  RateCurve multi;        // I(1, 2, x)
};
Fig2Data fig2_data(std::size_t grid_points);
/// Probabilities of the skewed 8-symbol source of the second figure.
std::vector<double> fig2_byte_probs();

struct Fig3Row {
  double a;
  double b;
  double difference; // R(1/2) - R(1)
};
/// (a, b) on the grid i / (n + 1), i = 1..n.
std::vector<Fig3Row> fig3_rows(std::size_t n = 99);

void write_figure(const std::string& which, const Options& options, std::ostream& log);

// ---------------------------------------------------------------------------

struct VerifyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

/// Built-in fixtures with known answers for each analysis the tool implements.
std::vector<VerifyCheck> run_verification(std::uint64_t seed = 20240601);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace guesswork::cli
