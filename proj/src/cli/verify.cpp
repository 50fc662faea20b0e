#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "guesswork/cli.hpp"
#include "guesswork/csv.hpp"
#include "guesswork/exact_oracle.hpp"

namespace guesswork::cli {

namespace {

constexpr double kTol = 1e-12;

VerifyCheck check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

std::vector<double> random_probs(std::size_t m, Rng& rng) {
  std::vector<double> p(m);
  double sum = 0.0;
  for (auto& x : p) {
    x = 0.05 + uniform_unit(rng);
    sum += x;
  }
  for (auto& x : p) {
    x /= sum;
  }
  // Absorb rounding so the vector sums to one within the source tolerance.
  p.back() = 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0);
  return p;
}

bool dominates(const GuessworkPmf& a, const GuessworkPmf& b) {
  const auto v = stochastic_dominance(a, b, kTol).relation;
  return v == Dominance::dominates || v == Dominance::equal;
}

VerifyCheck single_user_optimal() {
  const auto dist = enumerate_distribution(IidSource::bernoulli(0.25), 2);
  const auto best = single_guesswork_pmf(dist);
  std::vector<std::uint64_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::size_t tried = 0;
  std::size_t failures = 0;
  do {
    std::vector<double> mass(dist.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      mass[r] = dist.probability(order[r]);
    }
    ++tried;
    if (!dominates(best, GuessworkPmf(mass))) {
      ++failures;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return check("single_user_most_likely_first", failures == 0,
               std::to_string(tried) + " orderings, " + std::to_string(failures) + " not dominated");
}

VerifyCheck all_targets_individual_optimal(std::uint64_t seed) {
  MultiUserProblem problem{{IidSource::bernoulli(0.25), IidSource::bernoulli(0.4)}, 2, 2};
  std::vector<GuessworkPmf> singles;
  std::vector<SingleUserStrategy> strategies;
  for (const auto& s : problem.sources) {
    const auto d = enumerate_distribution(s, problem.length);
    singles.push_back(single_guesswork_pmf(d));
    strategies.push_back(optimal_single_strategy(d));
  }
  const auto sum = convolve(singles[0], singles[1]);
  bool ok = true;
  for (const auto& order : {std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{1, 0}}) {
    const auto rr = strategy_pmf_exhaustive(round_robin_strategy(strategies, order), problem);
    const auto v = stochastic_dominance(rr, sum.padded(rr.support_size()), kTol);
    ok = ok && v.relation == Dominance::equal;
  }
  Rng rng(seed);
  const auto rr = strategy_pmf_exhaustive(round_robin_strategy(strategies), problem);
  std::size_t failures = 0;
  for (int i = 0; i < 20; ++i) {
    const auto pmf = strategy_pmf_exhaustive(random_strategy(2, 2, 2, rng), problem);
    if (!dominates(rr, pmf)) {
      ++failures;
    }
  }
  return check("all_targets_individual_optimal", ok && failures == 0,
               std::string("interleaved optimal orders ") + (ok ? "match" : "differ from") +
                   " the sum of ranks; " + std::to_string(failures) + " of 20 random strategies not dominated");
}

VerifyCheck no_dominant_strategy() {
  MultiUserProblem problem{{IidSource({0.6, 0.25, 0.15}), IidSource({0.5, 0.4, 0.1})}, 1, 1};
  const std::vector<Query> first = {{0, 0}, {0, 1}};
  const std::vector<Query> second = {{1, 0}, {1, 1}};
  const auto a = strategy_pmf_exhaustive(MultiUserStrategy::complete_prefix(2, 3, 1, first), problem);
  const auto b = strategy_pmf_exhaustive(MultiUserStrategy::complete_prefix(2, 3, 1, second), problem);
  const bool cdfs = std::abs(a.cdf(1) - 0.6) <= kTol && std::abs(a.cdf(2) - 0.85) <= kTol &&
                    std::abs(b.cdf(1) - 0.5) <= kTol && std::abs(b.cdf(2) - 0.9) <= kTol;
  const auto verdict = stochastic_dominance(a, b, kTol);
  std::ostringstream os;
  os << "CDFs (" << format_number(a.cdf(1)) << ", " << format_number(a.cdf(2)) << ") vs ("
     << format_number(b.cdf(1)) << ", " << format_number(b.cdf(2)) << ")";
  return check("no_dominant_strategy_counterexample", cdfs && verdict.relation == Dominance::incomparable,
               os.str());
}

MultiUserProblem random_instance(Rng& rng) {
  const std::size_t m = 2 + uniform_below(rng, 2);
  const std::size_t k = 1 + uniform_below(rng, 2);
  const std::size_t users = 1 + uniform_below(rng, 3);
  const std::size_t targets = 1 + uniform_below(rng, users);
  MultiUserProblem problem;
  for (std::size_t v = 0; v < users; ++v) {
    problem.sources.push_back(IidSource(random_probs(m, rng)));
  }
  problem.targets = targets;
  problem.length = k;
  return problem;
}

GuessworkPmf gopt_pmf(const MultiUserProblem& problem) {
  std::vector<GuessworkPmf> per_user;
  for (const auto& s : problem.sources) {
    per_user.push_back(single_guesswork_pmf(enumerate_distribution(s, problem.length)));
  }
  return order_stat_pmf(per_user, problem.targets);
}

VerifyCheck gopt_lower_bound(std::uint64_t seed) {
  Rng rng(seed);
  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i) {
    const auto problem = random_instance(rng);
    const auto lower = gopt_pmf(problem);
    const auto strategy = random_strategy(problem.users(), problem.alphabet_size(), problem.length, rng);
    if (!dominates(lower, strategy_pmf_exhaustive(strategy, problem))) {
      ++violations;
    }
  }
  return check("gopt_lower_bound", violations == 0,
               "100 random strategies, " + std::to_string(violations) + " violations");
}

VerifyCheck round_robin_sandwich(std::uint64_t seed) {
  Rng rng(seed + 1);
  std::size_t violations = 0;
  std::size_t outcomes = 0;
  for (int i = 0; i < 30; ++i) {
    const auto problem = random_instance(rng);
    std::vector<StringDistribution> dists;
    std::vector<SingleUserStrategy> strategies;
    for (const auto& s : problem.sources) {
      dists.push_back(enumerate_distribution(s, problem.length));
      strategies.push_back(optimal_single_strategy(dists.back()));
    }
    const auto rr = round_robin_strategy(strategies);
    const std::uint64_t n = dists.front().size();
    std::vector<std::uint64_t> idx(problem.users(), 0);
    while (true) {
      std::vector<Word> words;
      std::vector<BigCount> ranks;
      for (std::size_t v = 0; v < problem.users(); ++v) {
        words.push_back(dists[v].word(idx[v]));
        ranks.push_back(strategies[v].rank_of_index(idx[v]));
      }
      const auto opt = g_opt(ranks, problem.targets);
      const auto total = total_guesswork(rr, problem.targets, words).total;
      ++outcomes;
      if (!(opt <= total && total <= opt * problem.users())) {
        ++violations;
      }
      std::size_t v = problem.users();
      while (v > 0 && ++idx[v - 1] == n) {
        idx[--v] = 0;
      }
      if (v == 0) {
        break;
      }
    }
  }
  return check("round_robin_sandwich", violations == 0,
               std::to_string(outcomes) + " outcomes, " + std::to_string(violations) + " violations");
}

VerifyCheck two_bit_order_statistic() {
  const auto pmf = gopt_pmf({{IidSource::uniform(2), IidSource::uniform(2)}, 2, 1});
  const bool ok = pmf.support_size() == 2 && std::abs(pmf.mass(1) - 0.25) <= kTol &&
                  std::abs(pmf.mass(2) - 0.75) <= kTol;
  return check("two_bit_order_statistic", ok,
               "P(G_opt=1)=" + format_number(pmf.mass(1)) + ", P(G_opt=2)=" + format_number(pmf.mass(2)));
}

VerifyCheck homogeneous_rate_function() {
  const auto renyi = renyi_curve(IidSource::bernoulli(0.25));
  const auto single = rate_single(Scgf(renyi));
  double worst = 0.0;
  double worst_exponent = 0.0;
  for (auto [u, v] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 3}, {3, 3}}) {
    const std::vector<RateCurve> rates(v, single);
    const auto multi = rate_multi(rates, u);
    for (std::size_t i = 0; i < multi.size(); ++i) {
      const double x = multi.x(i);
      const double expected =
          (x <= renyi.shannon() ? static_cast<double>(u) : static_cast<double>(v - u + 1)) * single.value(i);
      if (std::isinf(expected) || std::isinf(multi.value(i))) {
        if (std::isinf(expected) != std::isinf(multi.value(i))) {
          worst = kInfinity;
        }
        continue;
      }
      worst = std::max(worst, std::abs(multi.value(i) - expected));
    }
    worst_exponent =
        std::max(worst_exponent, std::abs(scgf_multi(multi, 1.0) - avg_growth_exponent(renyi, u, v)));
  }
  return check("homogeneous_rate_function", worst <= 1e-9 && worst_exponent <= 1e-4,
               "max rate deviation " + format_number(worst) + ", max exponent deviation " +
                   format_number(worst_exponent));
}

VerifyCheck nonconvex_rate_user_switch() {
  const auto data = fig2_data(2048);
  const auto report = convexity_report(data.multi);
  const auto& a = data.multi.assignments();
  const bool bytes_first = !a.empty() && a.front().identified == std::vector<std::size_t>{1};
  std::size_t last_finite = 0;
  for (std::size_t i = 0; i < data.multi.size(); ++i) {
    if (std::isfinite(data.multi.value(i))) {
      last_finite = i;
    }
  }
  const bool bits_last = a[last_finite].identified == std::vector<std::size_t>{0};
  return check("nonconvex_rate_user_switch",
               !report.convex && report.witness && !report.switch_points.empty() && bytes_first && bits_last,
               std::string(report.convex ? "convex" : "nonconvex") + ", " +
                   std::to_string(report.switch_points.size()) + " switch point(s)");
}

VerifyCheck uniform_pmf_approximation() {
  bool ok = true;
  for (std::size_t m : {2, 4}) {
    const auto rate = rate_single(Scgf(renyi_curve(IidSource::uniform(m))));
    for (std::size_t k = 1; k <= 8; ++k) {
      const double expected = std::pow(static_cast<double>(m), -static_cast<double>(k));
      const auto n = *checked_power(m, k);
      for (std::uint64_t g = 1; g <= n; g += std::max<std::uint64_t>(1, n / 17)) {
        ok = ok && std::abs(pmf_approx(rate, k, g) - expected) <= 1e-12 * expected;
      }
    }
  }
  return check("uniform_pmf_approximation", ok, "approximation equals m^-k on uniform sources");
}

} // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
  std::vector<VerifyCheck> checks;
  checks.push_back(single_user_optimal());
  checks.push_back(all_targets_individual_optimal(seed));
  checks.push_back(no_dominant_strategy());
  checks.push_back(gopt_lower_bound(seed));
  checks.push_back(round_robin_sandwich(seed));
  checks.push_back(two_bit_order_statistic());
  checks.push_back(homogeneous_rate_function());
  checks.push_back(nonconvex_rate_user_switch());
  checks.push_back(uniform_pmf_approximation());
  return checks;
}

int cmd_verify(const Options& options, std::ostream& log) {
  const auto checks = run_verification(options.seed.value_or(20240601));
  std::size_t failed = 0;
  for (const auto& c : checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    if (!c.passed) {
      ++failed;
    }
  }
  log << checks.size() - failed << '/' << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerificationFailure;
}

} // namespace guesswork::cli
