#include "guesswork/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "guesswork/csv.hpp"
#include "guesswork/errors.hpp"

namespace guesswork {

namespace {

constexpr double kMassTolerance = 1e-9;
// Differencing CDFs can leave masses a few ulps below zero.
constexpr double kNegativeRoundoff = 1e-14;

} // namespace

GuessworkPmf::GuessworkPmf(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) {
    throw NumericError("guesswork PMF needs a nonempty support");
  }
  double sum = 0.0;
  cdf_.reserve(mass_.size());
  for (double& p : mass_) {
    if (p < 0.0 && p > -kNegativeRoundoff) {
      p = 0.0;
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw NumericError("guesswork PMF has a negative or non-finite mass");
    }
    sum += p;
    cdf_.push_back(sum);
  }
  if (std::abs(sum - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os << "guesswork PMF sums to " << sum;
    throw NumericError(os.str());
  }
}

double GuessworkPmf::mass(std::size_t n) const {
  return n >= 1 && n <= mass_.size() ? mass_[n - 1] : 0.0;
}

double GuessworkPmf::cdf(std::size_t n) const {
  if (n < 1) {
    return 0.0;
  }
  return n <= cdf_.size() ? cdf_[n - 1] : cdf_.back();
}

GuessworkPmf GuessworkPmf::padded(std::size_t n) const {
  auto mass = mass_;
  if (n > mass.size()) {
    mass.resize(n, 0.0);
  }
  return GuessworkPmf(std::move(mass));
}

GuessworkPmf single_guesswork_pmf(const StringDistribution& dist) {
  const auto strategy = optimal_single_strategy(dist);
  std::vector<double> mass(dist.size());
  for (std::uint64_t r = 1; r <= dist.size(); ++r) {
    mass[r - 1] = dist.probability(strategy.index_at_rank(r));
  }
  return GuessworkPmf(std::move(mass));
}

GuessworkPmf order_stat_pmf(std::span<const GuessworkPmf> per_user, std::size_t targets) {
  const std::size_t users = per_user.size();
  if (targets < 1 || targets > users) {
    throw DomainError("order statistic needs 1 <= U <= V");
  }
  std::size_t support = 0;
  for (const auto& p : per_user) {
    support = std::max(support, p.support_size());
  }

  // at_least_u(n) = P(#{v : G_v <= n} >= U); counts[j] is the probability that
  // exactly j of the users processed so far satisfy G_v <= n.
  std::vector<double> counts(users + 1);
  std::vector<double> mass(support);
  double previous = 0.0;
  for (std::size_t n = 1; n <= support; ++n) {
    std::fill(counts.begin(), counts.end(), 0.0);
    counts[0] = 1.0;
    for (std::size_t v = 0; v < users; ++v) {
      const double q = per_user[v].cdf(n);
      for (std::size_t j = v + 1; j > 0; --j) {
        counts[j] = counts[j] * (1.0 - q) + counts[j - 1] * q;
      }
      counts[0] *= 1.0 - q;
    }
    double at_least = 0.0;
    for (std::size_t j = targets; j <= users; ++j) {
      at_least += counts[j];
    }
    mass[n - 1] = at_least - previous;
    previous = at_least;
  }
  return GuessworkPmf(std::move(mass));
}

GuessworkPmf strategy_pmf_exhaustive(const MultiUserStrategy& strategy, const MultiUserProblem& problem,
                                     std::uint64_t cap, std::uint64_t enumeration_cap) {
  problem.validate();
  const std::size_t users = problem.users();
  if (strategy.users() != users || strategy.alphabet_size() != problem.alphabet_size() ||
      strategy.length() != problem.length) {
    throw ConfigError("strategy and problem disagree on V, m or k");
  }
  const auto joint = checked_power(problem.alphabet_size(), problem.length * users);
  if (!joint || *joint > cap) {
    std::ostringstream os;
    os << "exhaustive evaluation over " << problem.alphabet_size() << "^" << problem.length * users
       << " joint outcomes exceeds the cap of " << cap;
    throw ResourceError(os.str());
  }

  std::vector<StringDistribution> dists;
  dists.reserve(users);
  for (const auto& src : problem.sources) {
    dists.push_back(enumerate_distribution(src, problem.length, enumeration_cap));
  }
  const std::uint64_t n = dists.front().size();

  // S(v, w) for every user and string index.
  std::vector<std::vector<BigCount>> index_of(users, std::vector<BigCount>(n));
  for (std::size_t v = 0; v < users; ++v) {
    for (std::uint64_t w = 0; w < n; ++w) {
      index_of[v][w] = strategy.query_index(v, dists[v].word(w));
    }
  }

  std::vector<double> mass(users * n, 0.0);
  std::vector<std::uint64_t> outcome(users, 0);
  std::vector<BigCount> indices(users);
  for (std::uint64_t j = 0; j < *joint; ++j) {
    double p = 1.0;
    for (std::size_t v = 0; v < users; ++v) {
      p *= dists[v].probability(outcome[v]);
    }
    if (p > 0.0) {
      for (std::size_t v = 0; v < users; ++v) {
        indices[v] = index_of[v][outcome[v]];
      }
      const auto trace = total_guesswork_from_indices(strategy, problem.targets, indices);
      mass[trace.total.convert_to<std::size_t>() - 1] += p;
    }
    for (std::size_t v = users; v-- > 0;) {
      if (++outcome[v] < n) {
        break;
      }
      outcome[v] = 0;
    }
  }
  return GuessworkPmf(std::move(mass));
}

DominanceVerdict stochastic_dominance(const GuessworkPmf& a, const GuessworkPmf& b, double tolerance) {
  const std::size_t n = std::max(a.support_size(), b.support_size());
  DominanceVerdict verdict{Dominance::equal, {}, {}};
  for (std::size_t i = 1; i <= n; ++i) {
    const double fa = a.cdf(i);
    const double fb = b.cdf(i);
    if (fa > fb + tolerance) {
      verdict.a_ahead.push_back(i);
    } else if (fb > fa + tolerance) {
      verdict.b_ahead.push_back(i);
    }
  }
  const bool a_ok = verdict.b_ahead.empty();
  const bool b_ok = verdict.a_ahead.empty();
  if (a_ok && b_ok) {
    verdict.relation = Dominance::equal;
  } else if (a_ok) {
    verdict.relation = Dominance::dominates;
  } else if (b_ok) {
    verdict.relation = Dominance::dominated_by;
  } else {
    verdict.relation = Dominance::incomparable;
  }
  return verdict;
}

double moment(const GuessworkPmf& pmf, double alpha) {
  double sum = 0.0;
  const auto mass = pmf.masses();
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) {
      sum += std::pow(static_cast<double>(i + 1), alpha) * mass[i];
    }
  }
  return sum;
}

GuessworkPmf convolve(const GuessworkPmf& a, const GuessworkPmf& b) {
  // Sum n of counts i + j lands at mass index (i + j) - 1.
  std::vector<double> mass(a.support_size() + b.support_size(), 0.0);
  for (std::size_t i = 1; i <= a.support_size(); ++i) {
    for (std::size_t j = 1; j <= b.support_size(); ++j) {
      mass[i + j - 1] += a.mass(i) * b.mass(j);
    }
  }
  return GuessworkPmf(std::move(mass));
}

void write_pmf_csv(std::ostream& os, const GuessworkPmf& pmf) {
  os << "n,mass,cdf\n";
  for (std::size_t n = 1; n <= pmf.support_size(); ++n) {
    os << n << ',' << format_number(pmf.mass(n)) << ',' << format_number(pmf.cdf(n)) << '\n';
  }
}

} // namespace guesswork
