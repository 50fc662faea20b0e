#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "guesswork/big_count.hpp"
#include "guesswork/errors.hpp"
#include "guesswork/source_models.hpp"

namespace guesswork {

/// A single-user guessing order over A^k: rank(w) is the number of guesses
/// made up to and including w. Ranks are 1-based.
class Ranker {
public:
  virtual ~Ranker() = default;
  virtual std::size_t alphabet_size() const = 0;
  virtual std::size_t length() const = 0;
  /// m^k.
  virtual BigCount domain_size() const = 0;
  virtual BigCount rank(std::span<const Symbol> w) const = 0;
};

/// Explicit bijection between A^k (lexicographic string indices) and ranks.
class SingleUserStrategy final : public Ranker {
public:
  /// order[r-1] is the string index guessed r-th. Throws ConfigError unless
  /// `order` is a permutation of {0, ..., m^k - 1}.
  SingleUserStrategy(std::size_t m, std::size_t k, std::vector<std::uint64_t> order);

  std::size_t alphabet_size() const override { return m_; }
  std::size_t length() const override { return k_; }
  BigCount domain_size() const override { return BigCount(order_.size()); }
  BigCount rank(std::span<const Symbol> w) const override { return BigCount(rank_of(w)); }

  std::uint64_t size() const { return order_.size(); }
  /// Throws DomainError for a string outside A^k.
  std::uint64_t rank_of(std::span<const Symbol> w) const;
  std::uint64_t rank_of_index(std::uint64_t string_index) const { return rank_[string_index]; }
  std::uint64_t index_at_rank(std::uint64_t rank) const { return order_.at(rank - 1); }
  Word word_at_rank(std::uint64_t rank) const;

  friend bool operator==(const SingleUserStrategy& a, const SingleUserStrategy& b) {
    return a.m_ == b.m_ && a.k_ == b.k_ && a.order_ == b.order_;
  }

private:
  std::size_t m_;
  std::size_t k_;
  std::vector<std::uint64_t> order_;
  std::vector<std::uint64_t> rank_;
};

/// Guess from most to least likely. Ties (equal log-probability) are broken by
/// ascending lexicographic string order.
SingleUserStrategy optimal_single_strategy(const StringDistribution& dist);

/// One (user, string) query. Users are 0-based.
struct Query {
  std::size_t user;
  std::uint64_t string_index;
};

/// Injective ordering of (user, string) queries. Query indices are 1-based,
/// users 0-based.
///
/// Two representations: an explicit table (small k) or the implicit
/// round-robin formula S(v, w) = (rank_v(w) - 1) V + pos(v) + 1, which works
/// at any string length a Ranker supports.
class MultiUserStrategy {
public:
  /// table[v * m^k + string_index] = S(v, w). Throws ConfigError unless the
  /// table is a bijection onto {1, ..., V m^k}.
  static MultiUserStrategy explicit_table(std::size_t users, std::size_t m, std::size_t k,
                                          std::vector<std::uint64_t> table);

  /// Queries are issued in `sequence` order; the sequence must list every
  /// (user, string) pair exactly once.
  static MultiUserStrategy from_sequence(std::size_t users, std::size_t m, std::size_t k,
                                         std::span<const Query> sequence);

  /// Issues `prefix` first, then every remaining pair in (user, string index)
  /// order.
  static MultiUserStrategy complete_prefix(std::size_t users, std::size_t m, std::size_t k,
                                           std::span<const Query> prefix);

  /// `user_order[p]` is the user queried p-th in every round; empty means
  /// 0, 1, ..., V-1. Throws ConfigError on mismatched domains or a bad order.
  static MultiUserStrategy round_robin(std::vector<std::shared_ptr<const Ranker>> rankers,
                                       std::vector<std::size_t> user_order = {});

  std::size_t users() const { return users_; }
  std::size_t alphabet_size() const { return m_; }
  std::size_t length() const { return k_; }
  /// m^k.
  const BigCount& domain_size() const { return domain_; }
  bool is_round_robin() const { return !rankers_.empty(); }

  /// S(v, w).
  BigCount query_index(std::size_t user, std::span<const Symbol> w) const;
  /// N_S(v, n): queries addressed to user v among the first n.
  BigCount queries_to_user(std::size_t user, const BigCount& n) const;

  /// Round-robin only: S(v, w) for a string of the given single-user rank.
  BigCount round_robin_index(std::size_t user, const BigCount& rank) const;
  const Ranker& ranker(std::size_t user) const { return *rankers_.at(user); }

private:
  MultiUserStrategy() = default;

  std::size_t users_ = 0;
  std::size_t m_ = 0;
  std::size_t k_ = 0;
  BigCount domain_;

  // Explicit representation.
  std::vector<std::uint64_t> table_;
  std::vector<std::vector<std::uint64_t>> sorted_by_user_;

  // Round-robin representation.
  std::vector<std::shared_ptr<const Ranker>> rankers_;
  std::vector<std::size_t> position_of_user_;
};

MultiUserStrategy round_robin_strategy(const std::vector<SingleUserStrategy>& strategies,
                                       std::vector<std::size_t> user_order = {});

/// Uniformly random explicit strategy via Fisher-Yates over the V m^k pairs.
MultiUserStrategy random_strategy(std::size_t users, std::size_t m, std::size_t k, Rng& rng);

/// U-th smallest component (ascending, ties counted with multiplicity).
template <class T>
T u_min(std::span<const T> values, std::size_t targets) {
  if (targets < 1 || targets > values.size()) {
    throw DomainError("U-min needs 1 <= U <= V");
  }
  std::vector<T> copy(values.begin(), values.end());
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(targets - 1), copy.end());
  return copy[targets - 1];
}

template <class T>
T u_min(const std::vector<T>& values, std::size_t targets) {
  return u_min(std::span<const T>(values), targets);
}

/// Evaluation of one realized string vector.
struct GuessTrace {
  std::vector<Word> strings;
  std::vector<BigCount> query_indices;    // S(v, w_v)
  std::vector<BigCount> queries_per_user; // N_S(v, min(S(v, w_v), T))
  BigCount stopping_index;                // T
  BigCount total;                         // G_S
};

/// G_S(U, V, w) = sum_v N_S(v, min(S(v, w_v), T)), T = U-min_v S(v, w_v).
GuessTrace total_guesswork(const MultiUserStrategy& strategy, std::size_t targets,
                           std::span<const Word> strings);

/// Same evaluation from precomputed query indices S(v, w_v).
GuessTrace total_guesswork_from_indices(const MultiUserStrategy& strategy, std::size_t targets,
                                        std::vector<BigCount> query_indices);

/// G_opt: U-th smallest of the per-user optimal ranks.
BigCount g_opt(std::span<const BigCount> ranks, std::size_t targets);

} // namespace guesswork
