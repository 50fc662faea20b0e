#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "guesswork/source_models.hpp"
#include "guesswork/strategy_engine.hpp"

namespace guesswork {

/// Default cap on the number of joint outcomes m^{kV} for exhaustive
/// strategy evaluation.
inline constexpr std::uint64_t kDefaultExhaustiveCap = std::uint64_t{1} << 20;

/// Exact probability mass function of a guess count on {1, ..., N}.
class GuessworkPmf {
public:
  /// mass[n-1] = P(G = n). Throws NumericError unless masses are nonnegative
  /// and sum to one within 1e-9.
  explicit GuessworkPmf(std::vector<double> mass);

  std::size_t support_size() const { return mass_.size(); }
  /// P(G = n), zero outside the support.
  double mass(std::size_t n) const;
  /// P(G <= n); one beyond the support.
  double cdf(std::size_t n) const;
  std::span<const double> masses() const { return mass_; }
  std::span<const double> cdf_values() const { return cdf_; }

  /// Copy zero-padded to support size n (n >= support_size()).
  GuessworkPmf padded(std::size_t n) const;

private:
  std::vector<double> mass_;
  std::vector<double> cdf_;
};

/// mass[n] = probability of the n-th most likely string.
GuessworkPmf single_guesswork_pmf(const StringDistribution& dist);

/// Exact PMF of the U-th smallest of V independent guess counts, by the
/// Poisson-binomial recursion on the events {G_v <= n} and differencing in n.
GuessworkPmf order_stat_pmf(std::span<const GuessworkPmf> per_user, std::size_t targets);

/// Exact PMF of the multi-user guesswork of `strategy` over every joint outcome.
/// Throws ResourceError when m^{kV} exceeds `cap`.
GuessworkPmf strategy_pmf_exhaustive(const MultiUserStrategy& strategy, const MultiUserProblem& problem,
                                     std::uint64_t cap = kDefaultExhaustiveCap,
                                     std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// A dominates B when A's CDF is pointwise >= B's (A needs probabilistically
/// fewer guesses).
enum class Dominance { dominates, dominated_by, equal, incomparable };

struct DominanceVerdict {
  Dominance relation;
  /// n where F_a(n) > F_b(n): points that rule out "a dominated by b".
  std::vector<std::size_t> a_ahead;
  /// n where F_b(n) > F_a(n): points that rule out "a dominates b".
  std::vector<std::size_t> b_ahead;
};

inline constexpr double kDominanceTolerance = 1e-12;

DominanceVerdict stochastic_dominance(const GuessworkPmf& a, const GuessworkPmf& b,
                                      double tolerance = kDominanceTolerance);

/// E[G^alpha].
double moment(const GuessworkPmf& pmf, double alpha);

/// Distribution of a sum of independent counts.
GuessworkPmf convolve(const GuessworkPmf& a, const GuessworkPmf& b);

/// CSV with header "n,mass,cdf".
void write_pmf_csv(std::ostream& os, const GuessworkPmf& pmf);

} // namespace guesswork
