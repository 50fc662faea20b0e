#include "guesswork/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <type_traits>

#include "guesswork/csv.hpp"
#include "guesswork/errors.hpp"

namespace guesswork {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

const char* selector_name(StrategySelector s) {
  return s == StrategySelector::round_robin ? "round_robin" : "g_opt";
}

void write_metadata(std::ostream& os, const EmpiricalSummary& summary) {
  os << "# seed=" << summary.seed << '\n'
     << "# trials=" << summary.trials << '\n'
     << "# strategy=" << selector_name(summary.strategy) << '\n';
}

struct TrialResult {
  double log_guesswork = 0.0;
  std::optional<std::uint64_t> count;
  bool sandwich_ok = true;
};

} // namespace

// ---------------------------------------------------------------------------
// TypeClassRanker

TypeClassRanker::TypeClassRanker(IidSource source, std::size_t k, std::uint64_t class_cap)
    : source_(std::move(source)), k_(k) {
  if (k_ < 1) {
    throw DomainError("string length must be at least 1");
  }
  const auto& groups = source_.groups();
  const std::size_t g_count = groups.size();
  const std::size_t m = source_.alphabet_size();

  domain_ = 1;
  for (std::size_t i = 0; i < k_; ++i) {
    domain_ *= m;
  }

  // Number of compositions of k into g_count parts, C(k + G - 1, G - 1).
  BigCount compositions = 1;
  for (std::size_t i = 1; i < g_count; ++i) {
    compositions = compositions * (k_ + i) / i;
  }
  if (compositions > class_cap) {
    std::ostringstream os;
    os << "type counting needs " << compositions << " character-count classes, over the cap of "
       << class_cap;
    throw UnsupportedModelError(os.str());
  }

  std::vector<std::uint64_t> totals(g_count, 0);
  std::function<void(std::size_t, std::uint64_t, const BigCount&)> visit =
      [&](std::size_t g, std::uint64_t remaining, const BigCount& size) {
        if (g + 1 == g_count) {
          totals[g] = remaining;
          BigCount s = size;
          for (std::uint64_t i = 0; i < remaining; ++i) {
            s *= groups[g].size;
          }
          classes_.push_back({totals, source_.class_log_probability(totals), std::move(s)});
          return;
        }
        BigCount choose = 1; // C(remaining, j)
        BigCount power = 1;  // s_g^j
        for (std::uint64_t j = 0; j <= remaining; ++j) {
          totals[g] = j;
          visit(g + 1, remaining - j, size * choose * power);
          choose = choose * (remaining - j) / (j + 1);
          power *= groups[g].size;
        }
      };
  visit(0, k_, BigCount(1));

  std::stable_sort(classes_.begin(), classes_.end(), [](const TypeClass& a, const TypeClass& b) {
    return a.log_probability > b.log_probability;
  });
  before_.reserve(classes_.size() + 1);
  BigCount running = 0;
  for (const auto& c : classes_) {
    before_.push_back(running);
    running += c.size;
  }
  before_.push_back(running);
  if (running != domain_) {
    throw NumericError("type classes do not partition A^k");
  }

  less_.assign(g_count * m, 0);
  for (std::size_t g = 0; g < g_count; ++g) {
    std::uint32_t n = 0;
    for (std::size_t c = 0; c < m; ++c) {
      less_[g * m + c] = n;
      if (source_.group_of(static_cast<Symbol>(c)) == g) {
        ++n;
      }
    }
  }
}

BigCount TypeClassRanker::rank(std::span<const Symbol> w) const {
  if (w.size() != k_) {
    throw DomainError("string length does not match the ranker");
  }
  const auto totals = source_.group_totals(w);
  const double lp = source_.class_log_probability(totals);
  const auto range = std::equal_range(
      classes_.begin(), classes_.end(), lp, [](const auto& a, const auto& b) {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, double>) {
          return a > b.log_probability;
        } else {
          return a.log_probability > b;
        }
      });
  const auto first = static_cast<std::size_t>(range.first - classes_.begin());

  const auto& groups = source_.groups();
  const std::size_t g_count = groups.size();
  const std::size_t m = source_.alphabet_size();

  // Strings of the tied classes that precede w lexicographically. For each
  // class, `count` is the number of completions of the current prefix of w
  // that land in the class, with `remaining` characters per group left.
  BigCount tied_before = 0;
  std::vector<std::uint64_t> remaining(g_count);
  for (auto it = range.first; it != range.second; ++it) {
    remaining = it->totals;
    BigCount count = it->size;
    std::uint64_t left = k_;
    for (Symbol c : w) {
      for (std::size_t g = 0; g < g_count; ++g) {
        const auto below = less_[g * m + c];
        if (below != 0 && remaining[g] != 0) {
          tied_before += count * remaining[g] * below / (left * groups[g].size);
        }
      }
      const auto own = source_.group_of(c);
      if (remaining[own] == 0) {
        break;
      }
      count = count * remaining[own] / (left * groups[own].size);
      --remaining[own];
      --left;
    }
  }
  return before_[first] + tied_before + 1;
}

BigCount rank_by_type_counting(const IidSource& source, std::span<const Symbol> w,
                               std::uint64_t class_cap) {
  return TypeClassRanker(source, w.size(), class_cap).rank(w);
}

std::shared_ptr<const Ranker> make_optimal_ranker(const CharacterSource& source, std::size_t k,
                                                  std::uint64_t enumeration_cap, std::uint64_t class_cap) {
  std::string reason;
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    try {
      return std::make_shared<TypeClassRanker>(*iid, k, class_cap);
    } catch (const UnsupportedModelError& e) {
      reason = e.what();
    }
  }
  const auto n = checked_power(alphabet_size(source), k);
  if (n && *n <= enumeration_cap) {
    return std::make_shared<SingleUserStrategy>(
        optimal_single_strategy(enumerate_distribution(source, k, enumeration_cap)));
  }
  std::ostringstream os;
  os << "no optimal ranker for this source at k=" << k << ": m^k exceeds the enumeration cap of "
     << enumeration_cap;
  if (!reason.empty()) {
    os << " and " << reason;
  }
  throw UnsupportedModelError(os.str());
}

// ---------------------------------------------------------------------------
// Simulation

double EmpiricalSummary::bin_width() const {
  return std::log(static_cast<double>(alphabet_size)) / static_cast<double>(kHistogramBins);
}

double EmpiricalSummary::empirical_cdf(std::uint64_t n) const {
  if (!counts) {
    throw ConfigError("empirical CDF needs exact guess counts");
  }
  const auto hits = std::count_if(counts->begin(), counts->end(), [n](std::uint64_t c) { return c <= n; });
  return static_cast<double>(hits) / static_cast<double>(counts->size());
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ trial);
}

EmpiricalSummary estimate_distribution(const SimulationConfig& config) {
  if (config.trials == 0) {
    throw ConfigError("simulation needs at least one trial");
  }
  const auto& problem = config.problem;
  problem.validate();
  const std::size_t users = problem.users();
  const std::size_t k = problem.length;

  std::vector<std::shared_ptr<const Ranker>> rankers;
  rankers.reserve(users);
  for (const auto& src : problem.sources) {
    rankers.push_back(make_optimal_ranker(src, k, config.enumeration_cap, config.class_cap));
  }
  const auto rr = MultiUserStrategy::round_robin(rankers);

  std::vector<TrialResult> results(config.trials);
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<Word> strings(users);
    std::vector<BigCount> ranks(users);
    for (std::uint64_t t = begin; t < end; ++t) {
      Rng rng(trial_seed(config.seed, t));
      for (std::size_t v = 0; v < users; ++v) {
        strings[v] = sample_string(problem.sources[v], k, rng);
        ranks[v] = rankers[v]->rank(strings[v]);
      }
      const BigCount opt = g_opt(ranks, problem.targets);
      BigCount g = opt;
      auto& r = results[t];
      if (config.strategy == StrategySelector::round_robin) {
        std::vector<BigCount> indices(users);
        for (std::size_t v = 0; v < users; ++v) {
          indices[v] = rr.round_robin_index(v, ranks[v]);
        }
        g = total_guesswork_from_indices(rr, problem.targets, std::move(indices)).total;
        r.sandwich_ok = opt <= g && g <= opt * users;
      }
      r.log_guesswork = log_of(g);
      r.count = to_u64(g);
    }
  };

  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : config.threads;
  threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, config.trials));
  if (threads <= 1) {
    run_range(0, config.trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (config.trials + threads - 1) / threads;
    for (std::size_t i = 0; i < threads; ++i) {
      const std::uint64_t begin = std::min<std::uint64_t>(config.trials, i * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(config.trials, begin + chunk);
      pool.emplace_back([&, i, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
    for (const auto& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  // Sequential reduction in trial order.
  EmpiricalSummary summary;
  summary.seed = config.seed;
  summary.trials = config.trials;
  summary.strategy = config.strategy;
  summary.alphabet_size = problem.alphabet_size();
  summary.length = k;
  summary.users = users;
  summary.targets = problem.targets;
  summary.histogram.assign(kHistogramBins, 0.0);

  const double n = static_cast<double>(config.trials);
  const double width = summary.bin_width();
  std::vector<std::uint64_t> bin_counts(kHistogramBins, 0);
  std::vector<std::uint64_t> counts;
  bool exact = true;
  summary.scaled_log_guesswork.reserve(config.trials);
  for (const auto& r : results) {
    const double x = r.log_guesswork / static_cast<double>(k);
    summary.scaled_log_guesswork.push_back(x);
    const auto bin = std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(std::max(0.0, x / width)));
    ++bin_counts[bin];
    if (!r.sandwich_ok) {
      ++summary.sandwich_violations;
    }
    if (exact && r.count) {
      counts.push_back(*r.count);
    } else {
      exact = false;
    }
  }
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    summary.histogram[b] = static_cast<double>(bin_counts[b]) / n;
  }
  if (exact) {
    summary.counts = std::move(counts);
  }

  for (double alpha : config.alphas) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      top = std::max(top, alpha * r.log_guesswork);
    }
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto& r : results) {
      const double e = std::exp(alpha * r.log_guesswork - top);
      s1 += e;
      s2 += e * e;
    }
    const double mean = s1 / n;
    const double var = config.trials > 1 ? std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0)) : 0.0;
    MomentEstimate est{};
    est.alpha = alpha;
    est.log_value = top + std::log(mean);
    est.value = std::exp(est.log_value);
    est.log_std_error = top + 0.5 * std::log(var / n);
    est.std_error = std::exp(est.log_std_error);
    est.relative_std_error = std::sqrt(var / n) / mean;
    summary.moments.push_back(est);
  }
  return summary;
}

double dkw_epsilon(std::uint64_t trials, double confidence) {
  if (trials == 0 || !(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("DKW bound needs trials >= 1 and confidence in (0, 1)");
  }
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(trials)));
}

double kolmogorov_distance(const EmpiricalSummary& summary, const GuessworkPmf& exact) {
  if (!summary.counts) {
    throw ConfigError("Kolmogorov distance needs exact guess counts");
  }
  auto sorted = *summary.counts;
  std::sort(sorted.begin(), sorted.end());
  const std::uint64_t top = std::max<std::uint64_t>(exact.support_size(), sorted.empty() ? 0 : sorted.back());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  std::size_t seen = 0;
  for (std::uint64_t g = 1; g <= top; ++g) {
    while (seen < sorted.size() && sorted[seen] <= g) {
      ++seen;
    }
    worst = std::max(worst, std::abs(static_cast<double>(seen) / n - exact.cdf(g)));
  }
  return worst;
}

void write_histogram_csv(std::ostream& os, const EmpiricalSummary& summary, double scale) {
  write_metadata(os, summary);
  os << "bin,x_lo,x_hi,mass\n";
  const double width = summary.bin_width();
  for (std::size_t b = 0; b < summary.histogram.size(); ++b) {
    os << b << ',' << format_number(static_cast<double>(b) * width / scale) << ','
       << format_number(static_cast<double>(b + 1) * width / scale) << ','
       << format_number(summary.histogram[b]) << '\n';
  }
}

void write_moments_csv(std::ostream& os, const EmpiricalSummary& summary, double scale) {
  write_metadata(os, summary);
  os << "alpha,log_value,value,std_error,relative_std_error\n";
  for (const auto& m : summary.moments) {
    os << format_number(m.alpha) << ',' << format_number(m.log_value / scale) << ','
       << format_number(m.value) << ',' << format_number(m.std_error) << ','
       << format_number(m.relative_std_error) << '\n';
  }
}

void write_empirical_pmf_csv(std::ostream& os, const EmpiricalSummary& summary) {
  if (!summary.counts) {
    throw ConfigError("empirical PMF needs exact guess counts");
  }
  auto sorted = *summary.counts;
  std::sort(sorted.begin(), sorted.end());
  write_metadata(os, summary);
  os << "n,mass,cdf\n";
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) {
      ++j;
    }
    os << sorted[i] << ',' << format_number(static_cast<double>(j - i) / n) << ','
       << format_number(static_cast<double>(j) / n) << '\n';
    i = j;
  }
}

} // namespace guesswork
