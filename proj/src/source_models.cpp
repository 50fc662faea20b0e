#include "guesswork/source_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "guesswork/errors.hpp"

namespace guesswork {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kNormalizationTolerance = 1e-9;

void check_probability_vector(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string(what) + ": entries must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    std::ostringstream os;
    os << what << ": entries sum to " << sum << ", expected 1";
    throw DomainError(os.str());
  }
}

// Repeated multiplication in a fixed order; every caller computes string
// probabilities through this so equal classes give equal doubles.
double int_power(double base, std::uint64_t exponent) {
  double r = 1.0;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    r *= base;
  }
  return r;
}

double log_term(std::uint64_t count, double log_p) {
  if (count == 0) {
    return 0.0;
  }
  return static_cast<double>(count) * log_p;
}

void check_word(std::size_t m, std::span<const Symbol> w) {
  for (Symbol c : w) {
    if (c >= m) {
      std::ostringstream os;
      os << "character " << c << " outside alphabet of size " << m;
      throw DomainError(os.str());
    }
  }
}

// Transition counts n_ij of w in row-major order.
std::vector<std::uint64_t> transition_counts(std::size_t m, std::span<const Symbol> w) {
  std::vector<std::uint64_t> counts(m * m, 0);
  for (std::size_t i = 1; i < w.size(); ++i) {
    ++counts[w[i - 1] * m + w[i]];
  }
  return counts;
}

double markov_log_probability(const MarkovSource& src, std::span<const Symbol> w) {
  if (w.empty()) {
    return 0.0;
  }
  const std::size_t m = src.alphabet_size();
  const auto counts = transition_counts(m, w);
  double lp = std::log(src.initial()[w[0]]);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto n = counts[i * m + j];
      if (n > 0) {
        lp += log_term(n, std::log(src.transition(i, j)));
      }
    }
  }
  return lp;
}

// Reversible chains give mathematically equal probabilities to strings with
// different transition counts (a string and its reversal). Deriving the
// probability from the log-probability keeps the two orderings consistent.
double markov_probability(const MarkovSource& src, std::span<const Symbol> w) {
  return std::exp(markov_log_probability(src, w));
}

Symbol sample_symbol(std::span<const double> probs, Rng& rng) {
  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  Symbol last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) {
      continue;
    }
    cumulative += probs[i];
    last_positive = static_cast<Symbol>(i);
    if (u < cumulative) {
      return last_positive;
    }
  }
  // Rounding left the cumulative sum a hair below one.
  return last_positive;
}

} // namespace

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t x = rng();
  while (x > limit) {
    x = rng();
  }
  return x % n;
}

Alphabet::Alphabet(std::size_t m) : m_(m) {
  if (m < 2) {
    throw DomainError("alphabet size must be at least 2");
  }
}

// ---------------------------------------------------------------------------
// IidSource

IidSource::IidSource(std::vector<double> probs) : probs_(std::move(probs)) {
  Alphabet{probs_.size()};
  check_probability_vector(probs_, "i.i.d. source probabilities");

  group_of_.resize(probs_.size());
  for (std::size_t c = 0; c < probs_.size(); ++c) {
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const SymbolGroup& g) { return g.probability == probs_[c]; });
    if (it == groups_.end()) {
      groups_.push_back({probs_[c], std::log(probs_[c]), 0});
      it = std::prev(groups_.end());
    }
    ++it->size;
    group_of_[c] = static_cast<std::size_t>(it - groups_.begin());
  }
}

IidSource IidSource::uniform(std::size_t m) {
  Alphabet{m};
  return IidSource(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

IidSource IidSource::bernoulli(double p_one) {
  if (!(p_one >= 0.0 && p_one <= 1.0)) {
    throw DomainError("Bernoulli parameter must lie in [0, 1]");
  }
  return IidSource({1.0 - p_one, p_one});
}

double IidSource::max_probability() const {
  return *std::max_element(probs_.begin(), probs_.end());
}

double IidSource::class_probability(std::span<const std::uint64_t> totals) const {
  double p = 1.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    p *= int_power(groups_[g].probability, totals[g]);
  }
  return p;
}

double IidSource::class_log_probability(std::span<const std::uint64_t> totals) const {
  double lp = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    lp += log_term(totals[g], groups_[g].log_probability);
  }
  return lp;
}

std::vector<std::uint64_t> IidSource::group_totals(std::span<const Symbol> w) const {
  check_word(probs_.size(), w);
  std::vector<std::uint64_t> totals(groups_.size(), 0);
  for (Symbol c : w) {
    ++totals[group_of_[c]];
  }
  return totals;
}

// ---------------------------------------------------------------------------
// MarkovSource

MarkovSource::MarkovSource(std::vector<std::vector<double>> transition,
                           std::optional<std::vector<double>> initial)
    : transition_(std::move(transition)) {
  const std::size_t m = transition_.size();
  Alphabet{m};
  for (const auto& row : transition_) {
    if (row.size() != m) {
      throw DomainError("Markov transition matrix must be square");
    }
    check_probability_vector(row, "Markov transition row");
  }
  if (initial) {
    if (initial->size() != m) {
      throw DomainError("Markov initial distribution has wrong length");
    }
    check_probability_vector(*initial, "Markov initial distribution");
    initial_ = std::move(*initial);
  } else {
    initial_ = stationary();
  }
}

MarkovSource MarkovSource::two_state(double a, double b, std::optional<std::vector<double>> initial) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw DomainError("two-state Markov parameters a, b must lie in (0, 1)");
  }
  return MarkovSource({{1.0 - a, a}, {b, 1.0 - b}}, std::move(initial));
}

bool MarkovSource::is_irreducible() const {
  const std::size_t m = transition_.size();
  // Every state reachable from 0 along positive transitions, and 0 reachable
  // from every state.
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(m, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto s = stack.back();
      stack.pop_back();
      for (std::size_t t = 0; t < m; ++t) {
        const double p = forward ? transition_[s][t] : transition_[t][s];
        if (p > 0.0 && !seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach_all(true) && reach_all(false);
}

std::vector<double> MarkovSource::stationary() const {
  if (!is_irreducible()) {
    throw DomainError("Markov chain is reducible; stationary distribution is not unique "
                      "(supply an explicit initial distribution)");
  }
  const std::size_t m = transition_.size();
  // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = transition_[j][i] - (i == j ? 1.0 : 0.0);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    a[m - 1][j] = 1.0;
  }
  a[m - 1][m] = 1.0;

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
        pivot = r;
      }
    }
    if (std::abs(a[pivot][col]) < 1e-300) {
      throw NumericError("singular system while solving for the stationary distribution");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) {
        continue;
      }
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) {
        a[r][c] -= f * a[col][c];
      }
    }
  }
  std::vector<double> pi(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    pi[i] = std::max(0.0, a[i][m] / a[i][i]);
    sum += pi[i];
  }
  for (double& x : pi) {
    x /= sum;
  }
  return pi;
}

// ---------------------------------------------------------------------------

std::size_t alphabet_size(const CharacterSource& source) {
  return std::visit([](const auto& s) { return s.alphabet_size(); }, source);
}

bool is_iid(const CharacterSource& source) {
  return std::holds_alternative<IidSource>(source);
}

double string_probability(const CharacterSource& source, std::span<const Symbol> w) {
  check_word(alphabet_size(source), w);
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    return iid->class_probability(iid->group_totals(w));
  }
  return markov_probability(std::get<MarkovSource>(source), w);
}

double string_log_probability(const CharacterSource& source, std::span<const Symbol> w) {
  check_word(alphabet_size(source), w);
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    return iid->class_log_probability(iid->group_totals(w));
  }
  return markov_log_probability(std::get<MarkovSource>(source), w);
}

// ---------------------------------------------------------------------------
// StringDistribution

StringDistribution::StringDistribution(std::size_t m, std::size_t k, std::vector<double> probabilities,
                                       std::vector<double> log_probabilities)
    : m_(m), k_(k), probs_(std::move(probabilities)), log_probs_(std::move(log_probabilities)) {
  Alphabet{m};
  const auto expected = checked_power(m, k);
  if (!expected || *expected != probs_.size() || probs_.size() != log_probs_.size()) {
    throw ConfigError("string distribution must hold exactly m^k entries");
  }
  double sum = 0.0;
  for (double p : probs_) {
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os << "string distribution sums to " << sum;
    throw NumericError(os.str());
  }
}

Word StringDistribution::word(std::uint64_t index) const { return word_at_index(m_, k_, index); }

std::uint64_t StringDistribution::index_of(std::span<const Symbol> w) const {
  return lexicographic_index(m_, k_, w);
}

std::uint64_t lexicographic_index(std::size_t m, std::size_t k, std::span<const Symbol> w) {
  if (w.size() != k) {
    throw DomainError("string has length " + std::to_string(w.size()) + ", expected " +
                      std::to_string(k));
  }
  check_word(m, w);
  std::uint64_t index = 0;
  for (Symbol c : w) {
    index = index * m + c;
  }
  return index;
}

Word word_at_index(std::size_t m, std::size_t k, std::uint64_t index) {
  Word w(k);
  for (std::size_t i = k; i-- > 0;) {
    w[i] = static_cast<Symbol>(index % m);
    index /= m;
  }
  return w;
}

std::optional<std::uint64_t> checked_power(std::uint64_t base, std::size_t exponent) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::nullopt;
    }
    r *= base;
  }
  return r;
}

StringDistribution enumerate_distribution(const CharacterSource& source, std::size_t k,
                                          std::uint64_t cap) {
  const std::size_t m = alphabet_size(source);
  const auto n = checked_power(m, k);
  if (!n || *n > cap) {
    std::ostringstream os;
    os << "enumerating " << m << "^" << k << " strings exceeds the enumeration cap of " << cap
       << " entries";
    throw ResourceError(os.str());
  }
  std::vector<double> probs(*n);
  std::vector<double> log_probs(*n);
  Word w(k, 0);
  for (std::uint64_t index = 0; index < *n; ++index) {
    probs[index] = string_probability(source, w);
    log_probs[index] = string_log_probability(source, w);
    // Odometer increment, last character fastest.
    for (std::size_t i = k; i-- > 0;) {
      if (++w[i] < m) {
        break;
      }
      w[i] = 0;
    }
  }
  return StringDistribution(m, k, std::move(probs), std::move(log_probs));
}

Word sample_string(const CharacterSource& source, std::size_t k, Rng& rng) {
  Word w(k);
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    for (auto& c : w) {
      c = sample_symbol(iid->probs(), rng);
    }
    return w;
  }
  const auto& markov = std::get<MarkovSource>(source);
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = i == 0 ? sample_symbol(markov.initial(), rng)
                  : sample_symbol(markov.transition_matrix()[w[i - 1]], rng);
  }
  return w;
}

// ---------------------------------------------------------------------------

std::size_t MultiUserProblem::alphabet_size() const {
  return sources.empty() ? 0 : guesswork::alphabet_size(sources.front());
}

void MultiUserProblem::validate() const {
  if (sources.empty()) {
    throw DomainError("problem needs at least one user");
  }
  if (targets < 1 || targets > sources.size()) {
    throw DomainError("target count U must satisfy 1 <= U <= V (U=" + std::to_string(targets) +
                      ", V=" + std::to_string(sources.size()) + ")");
  }
  if (length < 1) {
    throw DomainError("string length k must be at least 1");
  }
  const std::size_t m = alphabet_size();
  for (const auto& s : sources) {
    if (guesswork::alphabet_size(s) != m) {
      throw DomainError("all users must share one alphabet");
    }
  }
}

} // namespace guesswork
