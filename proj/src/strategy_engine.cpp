#include "guesswork/strategy_engine.hpp"

#include <numeric>
#include <sstream>
#include <string>

namespace guesswork {

namespace {

std::uint64_t domain_or_throw(std::size_t m, std::size_t k) {
  const auto n = checked_power(m, k);
  if (!n) {
    throw ResourceError("explicit strategy domain m^k does not fit in 64 bits");
  }
  return *n;
}

} // namespace

// ---------------------------------------------------------------------------
// SingleUserStrategy

SingleUserStrategy::SingleUserStrategy(std::size_t m, std::size_t k, std::vector<std::uint64_t> order)
    : m_(m), k_(k), order_(std::move(order)) {
  const auto n = domain_or_throw(m, k);
  if (order_.size() != n) {
    throw ConfigError("single-user ordering must list all m^k strings");
  }
  rank_.assign(n, 0);
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto idx = order_[r];
    if (idx >= n || rank_[idx] != 0) {
      throw ConfigError("single-user ordering is not a bijection");
    }
    rank_[idx] = r + 1;
  }
}

std::uint64_t SingleUserStrategy::rank_of(std::span<const Symbol> w) const {
  return rank_[lexicographic_index(m_, k_, w)];
}

Word SingleUserStrategy::word_at_rank(std::uint64_t rank) const {
  return word_at_index(m_, k_, index_at_rank(rank));
}

SingleUserStrategy optimal_single_strategy(const StringDistribution& dist) {
  std::vector<std::uint64_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  const auto lp = dist.log_probabilities();
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (lp[a] != lp[b]) {
      return lp[a] > lp[b];
    }
    return a < b;
  });
  return SingleUserStrategy(dist.alphabet_size(), dist.length(), std::move(order));
}

// ---------------------------------------------------------------------------
// MultiUserStrategy

MultiUserStrategy MultiUserStrategy::explicit_table(std::size_t users, std::size_t m, std::size_t k,
                                                    std::vector<std::uint64_t> table) {
  if (users < 1) {
    throw ConfigError("strategy needs at least one user");
  }
  const auto n = domain_or_throw(m, k);
  const std::uint64_t total = n * users;
  if (table.size() != total) {
    throw ConfigError("explicit strategy table must have V * m^k entries");
  }
  std::vector<char> used(total, 0);
  for (auto idx : table) {
    if (idx < 1 || idx > total || used[idx - 1]) {
      throw ConfigError("explicit strategy is not injective onto {1, ..., V m^k}");
    }
    used[idx - 1] = 1;
  }

  MultiUserStrategy s;
  s.users_ = users;
  s.m_ = m;
  s.k_ = k;
  s.domain_ = n;
  s.sorted_by_user_.resize(users);
  for (std::size_t v = 0; v < users; ++v) {
    auto& sorted = s.sorted_by_user_[v];
    sorted.assign(table.begin() + static_cast<std::ptrdiff_t>(v * n),
                  table.begin() + static_cast<std::ptrdiff_t>((v + 1) * n));
    std::sort(sorted.begin(), sorted.end());
  }
  s.table_ = std::move(table);
  return s;
}

MultiUserStrategy MultiUserStrategy::from_sequence(std::size_t users, std::size_t m, std::size_t k,
                                                   std::span<const Query> sequence) {
  const auto n = domain_or_throw(m, k);
  std::vector<std::uint64_t> table(n * users, 0);
  if (sequence.size() != table.size()) {
    throw ConfigError("query sequence must list every (user, string) pair once");
  }
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& q = sequence[i];
    if (q.user >= users || q.string_index >= n || table[q.user * n + q.string_index] != 0) {
      throw ConfigError("query sequence repeats a pair or leaves the domain");
    }
    table[q.user * n + q.string_index] = i + 1;
  }
  return explicit_table(users, m, k, std::move(table));
}

MultiUserStrategy MultiUserStrategy::complete_prefix(std::size_t users, std::size_t m, std::size_t k,
                                                     std::span<const Query> prefix) {
  const auto n = domain_or_throw(m, k);
  std::vector<char> seen(n * users, 0);
  std::vector<Query> sequence(prefix.begin(), prefix.end());
  for (const auto& q : prefix) {
    if (q.user >= users || q.string_index >= n || seen[q.user * n + q.string_index]) {
      throw ConfigError("query prefix repeats a pair or leaves the domain");
    }
    seen[q.user * n + q.string_index] = 1;
  }
  for (std::size_t v = 0; v < users; ++v) {
    for (std::uint64_t w = 0; w < n; ++w) {
      if (!seen[v * n + w]) {
        sequence.push_back({v, w});
      }
    }
  }
  return from_sequence(users, m, k, sequence);
}

MultiUserStrategy MultiUserStrategy::round_robin(std::vector<std::shared_ptr<const Ranker>> rankers,
                                                 std::vector<std::size_t> user_order) {
  if (rankers.empty()) {
    throw ConfigError("round-robin needs at least one user");
  }
  const std::size_t users = rankers.size();
  const std::size_t m = rankers.front()->alphabet_size();
  const std::size_t k = rankers.front()->length();
  for (const auto& r : rankers) {
    if (!r || r->alphabet_size() != m || r->length() != k) {
      throw ConfigError("round-robin strategies must share one domain A^k");
    }
  }
  if (user_order.empty()) {
    user_order.resize(users);
    std::iota(user_order.begin(), user_order.end(), std::size_t{0});
  }
  if (user_order.size() != users) {
    throw ConfigError("round-robin user order must be a permutation of the users");
  }
  MultiUserStrategy s;
  s.position_of_user_.assign(users, users);
  for (std::size_t p = 0; p < users; ++p) {
    const auto v = user_order[p];
    if (v >= users || s.position_of_user_[v] != users) {
      throw ConfigError("round-robin user order must be a permutation of the users");
    }
    s.position_of_user_[v] = p;
  }
  s.users_ = users;
  s.m_ = m;
  s.k_ = k;
  s.domain_ = rankers.front()->domain_size();
  s.rankers_ = std::move(rankers);
  return s;
}

BigCount MultiUserStrategy::round_robin_index(std::size_t user, const BigCount& rank) const {
  if (!is_round_robin()) {
    throw ConfigError("round_robin_index called on an explicit strategy");
  }
  return (rank - 1) * users_ + position_of_user_.at(user) + 1;
}

BigCount MultiUserStrategy::query_index(std::size_t user, std::span<const Symbol> w) const {
  if (user >= users_) {
    throw DomainError("user index out of range");
  }
  if (is_round_robin()) {
    return round_robin_index(user, rankers_[user]->rank(w));
  }
  const auto n = domain_.convert_to<std::uint64_t>();
  return BigCount(table_[user * n + lexicographic_index(m_, k_, w)]);
}

BigCount MultiUserStrategy::queries_to_user(std::size_t user, const BigCount& n) const {
  if (user >= users_) {
    throw DomainError("user index out of range");
  }
  if (n <= 0) {
    return 0;
  }
  if (is_round_robin()) {
    // User at position p owns indices p+1, p+1+V, p+1+2V, ...
    const BigCount first = position_of_user_[user] + 1;
    if (n < first) {
      return 0;
    }
    BigCount count = (n - first) / users_ + 1;
    return count > domain_ ? domain_ : count;
  }
  const auto& sorted = sorted_by_user_[user];
  const auto bound = to_u64(n);
  if (!bound) {
    return BigCount(sorted.size());
  }
  return BigCount(std::upper_bound(sorted.begin(), sorted.end(), *bound) - sorted.begin());
}

MultiUserStrategy round_robin_strategy(const std::vector<SingleUserStrategy>& strategies,
                                       std::vector<std::size_t> user_order) {
  std::vector<std::shared_ptr<const Ranker>> rankers;
  rankers.reserve(strategies.size());
  for (const auto& s : strategies) {
    rankers.push_back(std::make_shared<SingleUserStrategy>(s));
  }
  return MultiUserStrategy::round_robin(std::move(rankers), std::move(user_order));
}

MultiUserStrategy random_strategy(std::size_t users, std::size_t m, std::size_t k, Rng& rng) {
  const auto n = domain_or_throw(m, k);
  const std::uint64_t total = n * users;
  std::vector<std::uint64_t> table(total);
  std::iota(table.begin(), table.end(), std::uint64_t{1});
  for (std::uint64_t i = total; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::swap(table[i - 1], table[j]);
  }
  return MultiUserStrategy::explicit_table(users, m, k, std::move(table));
}

// ---------------------------------------------------------------------------

GuessTrace total_guesswork_from_indices(const MultiUserStrategy& strategy, std::size_t targets,
                                        std::vector<BigCount> query_indices) {
  if (query_indices.size() != strategy.users()) {
    throw DomainError("need one realized string per user");
  }
  GuessTrace trace;
  trace.stopping_index = u_min(std::span<const BigCount>(query_indices), targets);
  trace.total = 0;
  trace.queries_per_user.reserve(query_indices.size());
  for (std::size_t v = 0; v < query_indices.size(); ++v) {
    const BigCount& s = query_indices[v];
    const BigCount& stop = s < trace.stopping_index ? s : trace.stopping_index;
    trace.queries_per_user.push_back(strategy.queries_to_user(v, stop));
    trace.total += trace.queries_per_user.back();
  }
  trace.query_indices = std::move(query_indices);
  return trace;
}

GuessTrace total_guesswork(const MultiUserStrategy& strategy, std::size_t targets,
                           std::span<const Word> strings) {
  if (strings.size() != strategy.users()) {
    throw DomainError("need one realized string per user");
  }
  std::vector<BigCount> indices;
  indices.reserve(strings.size());
  for (std::size_t v = 0; v < strings.size(); ++v) {
    indices.push_back(strategy.query_index(v, strings[v]));
  }
  auto trace = total_guesswork_from_indices(strategy, targets, std::move(indices));
  trace.strings.assign(strings.begin(), strings.end());
  return trace;
}

BigCount g_opt(std::span<const BigCount> ranks, std::size_t targets) {
  return u_min(ranks, targets);
}

} // namespace guesswork
