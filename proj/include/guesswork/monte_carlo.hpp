#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "guesswork/big_count.hpp"
#include "guesswork/exact_oracle.hpp"
#include "guesswork/source_models.hpp"
#include "guesswork/strategy_engine.hpp"

namespace guesswork {

/// Default cap on the number of character-count classes a TypeClassRanker
/// may tabulate.
inline constexpr std::uint64_t kDefaultClassCap = std::uint64_t{1} << 18;

/// Optimal single-user ranks for an i.i.d. source without enumerating A^k.
///
/// Strings are grouped by their per-group character totals (a "class"); all
/// strings in a class share one probability. rank(w) counts the strings in
/// strictly more probable classes, plus the strings of equally probable
/// classes that precede w lexicographically, plus one. This is exactly the
/// rank of w under optimal_single_strategy on the enumerated distribution.
class TypeClassRanker final : public Ranker {
public:
  /// Throws UnsupportedModelError when the number of classes exceeds
  /// `class_cap`.
  TypeClassRanker(IidSource source, std::size_t k, std::uint64_t class_cap = kDefaultClassCap);

  std::size_t alphabet_size() const override { return source_.alphabet_size(); }
  std::size_t length() const override { return k_; }
  BigCount domain_size() const override { return domain_; }
  BigCount rank(std::span<const Symbol> w) const override;

  std::size_t class_count() const { return classes_.size(); }
  const IidSource& source() const { return source_; }

private:
  struct TypeClass {
    std::vector<std::uint64_t> totals;
    double log_probability;
    BigCount size;
  };

  IidSource source_;
  std::size_t k_;
  BigCount domain_;
  std::vector<TypeClass> classes_; // descending log-probability
  std::vector<BigCount> before_;   // before_[i] = strings in classes_[0..i)
  // less_[g * m + c]: symbols of group g with index < c.
  std::vector<std::uint32_t> less_;
};

/// One-shot convenience wrapper around TypeClassRanker.
BigCount rank_by_type_counting(const IidSource& source, std::span<const Symbol> w,
                               std::uint64_t class_cap = kDefaultClassCap);

/// Optimal ranker for any source: type counting for i.i.d. sources, explicit
/// enumeration otherwise (and for i.i.d. sources with too many classes).
/// Throws UnsupportedModelError when neither applies within the caps.
std::shared_ptr<const Ranker> make_optimal_ranker(const CharacterSource& source, std::size_t k,
                                                  std::uint64_t enumeration_cap = kDefaultEnumerationCap,
                                                  std::uint64_t class_cap = kDefaultClassCap);

/// Which guess count a simulation records per trial.
enum class StrategySelector {
  g_opt,       // U-th smallest optimal rank (the lower bound)
  round_robin, // total guesswork of the round-robin strategy
};

struct SimulationConfig {
  MultiUserProblem problem;
  StrategySelector strategy = StrategySelector::g_opt;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on this value.
  std::size_t threads = 1;
  std::vector<double> alphas = {1.0};
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t class_cap = kDefaultClassCap;
};

inline constexpr std::size_t kHistogramBins = 256;

/// Sample estimate of E[G^alpha]. Values are carried in log form so that
/// guess counts far beyond double range still yield finite exponents.
struct MomentEstimate {
  double alpha;
  double log_value;     // log of the sample mean of G^alpha
  double value;         // exp(log_value), possibly +inf
  double log_std_error; // log of sample sigma / sqrt(trials)
  double std_error;
  double relative_std_error;
};

struct EmpiricalSummary {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  StrategySelector strategy = StrategySelector::g_opt;
  std::size_t alphabet_size = 0;
  std::size_t length = 0;
  std::size_t users = 0;
  std::size_t targets = 0;

  /// Masses of (1/k) log G in kHistogramBins uniform bins over [0, log m];
  /// the last bin is closed.
  std::vector<double> histogram;
  std::vector<MomentEstimate> moments;
  /// (1/k) log G per trial, in trial order.
  std::vector<double> scaled_log_guesswork;
  /// G per trial when every value fits in 64 bits.
  std::optional<std::vector<std::uint64_t>> counts;
  /// Round-robin only: trials violating G_opt <= G_RR <= V G_opt.
  std::uint64_t sandwich_violations = 0;

  double bin_width() const;
  /// Empirical P(G <= n); requires counts.
  double empirical_cdf(std::uint64_t n) const;
};

/// Substream seed for one trial; distinct trials get decorrelated engines.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Throws ConfigError for trials == 0 and UnsupportedModelError when no
/// optimal ranker is available for a source at this length.
EmpiricalSummary estimate_distribution(const SimulationConfig& config);

/// sqrt(ln(2 / (1 - confidence)) / (2 trials)).
double dkw_epsilon(std::uint64_t trials, double confidence = 0.95);

/// sup_n |F_emp(n) - F(n)|. Throws ConfigError without exact counts.
double kolmogorov_distance(const EmpiricalSummary& summary, const GuessworkPmf& exact);

/// "bin,x_lo,x_hi,mass" preceded by "# seed=" and "# trials=" lines; x in
/// units of log / scale.
void write_histogram_csv(std::ostream& os, const EmpiricalSummary& summary, double scale = 1.0);
/// "alpha,log_value,value,std_error,relative_std_error", same metadata lines.
/// log_value is divided by `scale`.
void write_moments_csv(std::ostream& os, const EmpiricalSummary& summary, double scale = 1.0);
/// "n,mass,cdf" of the empirical guess counts; requires counts.
void write_empirical_pmf_csv(std::ostream& os, const EmpiricalSummary& summary);

} // namespace guesswork
