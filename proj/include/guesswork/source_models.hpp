#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace guesswork {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

/// Engine used for every stochastic path. Its output sequence is fixed by the
/// standard, so seeded runs are reproducible across toolchains.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform_unit(Rng& rng);

/// Unbiased integer in [0, n) by rejection; n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Default cap on m^k for full enumeration of a string distribution.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// Characters are {0, ..., m-1}.
class Alphabet {
public:
  explicit Alphabet(std::size_t m);
  std::size_t size() const { return m_; }
  bool contains(Symbol c) const { return c < m_; }

private:
  std::size_t m_;
};

/// Independent, identically distributed characters.
///
/// Symbols with bit-identical probabilities are collected into groups. All
/// string probabilities are computed from per-group character totals, so two
/// strings that are permutations of each other (or that differ only by swapping
/// equiprobable symbols) always receive bit-identical probabilities. The
/// explicit enumeration and the type-counting ranker both rely on this.
class IidSource {
public:
  struct SymbolGroup {
    double probability;
    double log_probability; // -inf for zero-probability symbols
    std::size_t size;
  };

  explicit IidSource(std::vector<double> probs);

  static IidSource uniform(std::size_t m);
  /// Binary source with P(1) = p_one.
  static IidSource bernoulli(double p_one);

  Alphabet alphabet() const { return Alphabet(probs_.size()); }
  std::size_t alphabet_size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double max_probability() const;

  const std::vector<SymbolGroup>& groups() const { return groups_; }
  std::size_t group_of(Symbol c) const { return group_of_[c]; }

  /// Probability of any single string whose per-group character totals are
  /// `totals` (indexed like groups()).
  double class_probability(std::span<const std::uint64_t> totals) const;
  double class_log_probability(std::span<const std::uint64_t> totals) const;

  /// Per-group character totals of w. Throws DomainError on a bad character.
  std::vector<std::uint64_t> group_totals(std::span<const Symbol> w) const;

private:
  std::vector<double> probs_;
  std::vector<SymbolGroup> groups_;
  std::vector<std::size_t> group_of_;
};

/// Finite-state Markov chain over the alphabet, one state per character.
class MarkovSource {
public:
  /// `transition` must be square and row-stochastic. Without `initial` the
  /// stationary distribution is used, which requires an irreducible chain.
  explicit MarkovSource(std::vector<std::vector<double>> transition,
                        std::optional<std::vector<double>> initial = std::nullopt);

  /// Two-state chain [[1-a, a], [b, 1-b]] with a, b in (0, 1).
  static MarkovSource two_state(double a, double b,
                                std::optional<std::vector<double>> initial = std::nullopt);

  Alphabet alphabet() const { return Alphabet(initial_.size()); }
  std::size_t alphabet_size() const { return initial_.size(); }
  std::span<const double> initial() const { return initial_; }
  double transition(Symbol from, Symbol to) const { return transition_[from][to]; }
  const std::vector<std::vector<double>>& transition_matrix() const { return transition_; }

  bool is_irreducible() const;
  /// Throws DomainError for a reducible chain.
  std::vector<double> stationary() const;

private:
  std::vector<std::vector<double>> transition_;
  std::vector<double> initial_;
};

using CharacterSource = std::variant<IidSource, MarkovSource>;

std::size_t alphabet_size(const CharacterSource& source);
bool is_iid(const CharacterSource& source);

/// P(W_k = w). Throws DomainError if a character lies outside the alphabet.
double string_probability(const CharacterSource& source, std::span<const Symbol> w);
double string_log_probability(const CharacterSource& source, std::span<const Symbol> w);

/// All m^k strings of length k with their probabilities, indexed in
/// lexicographic order (first character most significant). Zero-probability
/// strings are kept.
class StringDistribution {
public:
  StringDistribution(std::size_t m, std::size_t k, std::vector<double> probabilities,
                     std::vector<double> log_probabilities);

  std::size_t alphabet_size() const { return m_; }
  std::size_t length() const { return k_; }
  std::uint64_t size() const { return probs_.size(); }

  double probability(std::uint64_t index) const { return probs_[index]; }
  double log_probability(std::uint64_t index) const { return log_probs_[index]; }
  std::span<const double> probabilities() const { return probs_; }
  std::span<const double> log_probabilities() const { return log_probs_; }

  Word word(std::uint64_t index) const;
  /// Throws DomainError for a wrong length or an out-of-alphabet character.
  std::uint64_t index_of(std::span<const Symbol> w) const;

private:
  std::size_t m_;
  std::size_t k_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// Lexicographic index of w in A^k, first character most significant. Throws
/// DomainError for a wrong length or an out-of-alphabet character.
std::uint64_t lexicographic_index(std::size_t m, std::size_t k, std::span<const Symbol> w);
Word word_at_index(std::size_t m, std::size_t k, std::uint64_t index);

/// m^k, or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> checked_power(std::uint64_t base, std::size_t exponent);

/// Throws ResourceError naming the cap when m^k exceeds it.
StringDistribution enumerate_distribution(const CharacterSource& source, std::size_t k,
                                          std::uint64_t cap = kDefaultEnumerationCap);

Word sample_string(const CharacterSource& source, std::size_t k, Rng& rng);

/// V independent users, each with its own source over a shared alphabet.
struct MultiUserProblem {
  std::vector<CharacterSource> sources;
  std::size_t targets = 1; // U
  std::size_t length = 1;  // k

  std::size_t users() const { return sources.size(); }
  std::size_t alphabet_size() const;
  /// Throws DomainError unless 1 <= U <= V, k >= 1 and alphabets agree.
  void validate() const;
};

} // namespace guesswork
