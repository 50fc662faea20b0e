#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "guesswork/errors.hpp"
#include "guesswork/source_models.hpp"

using namespace guesswork;

namespace {

Word parse(const std::string& s) {
  Word w;
  for (char c : s) {
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

} // namespace

TEST(Alphabet, RejectsFewerThanTwoSymbols) {
  EXPECT_THROW(Alphabet(1), DomainError);
  EXPECT_EQ(Alphabet(2).size(), 2u);
  EXPECT_TRUE(Alphabet(3).contains(2));
  EXPECT_FALSE(Alphabet(3).contains(3));
}

TEST(IidSource, ValidatesProbabilities) {
  EXPECT_THROW(IidSource({0.5, 0.6}), DomainError);
  EXPECT_THROW(IidSource({1.2, -0.2}), DomainError);
  EXPECT_THROW(IidSource({1.0}), DomainError);
  EXPECT_NO_THROW(IidSource({1.0, 0.0}));
}

TEST(IidSource, GroupsEquiprobableSymbols) {
  const IidSource s({0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05});
  ASSERT_EQ(s.groups().size(), 3u);
  EXPECT_EQ(s.group_of(1), s.group_of(2));
  EXPECT_EQ(s.group_of(3), s.group_of(7));
  EXPECT_NE(s.group_of(0), s.group_of(1));
  std::size_t total = 0;
  for (const auto& g : s.groups()) {
    total += g.size;
  }
  EXPECT_EQ(total, 8u);
}

TEST(StringProbability, UniformBits) {
  const CharacterSource s = IidSource::uniform(2);
  EXPECT_DOUBLE_EQ(string_probability(s, parse("010")), 0.125);
}

TEST(StringProbability, MarkovHalfIsUniform) {
  const CharacterSource s = MarkovSource::two_state(0.5, 0.5);
  for (const char* w : {"0", "01", "1101", "000000"}) {
    const auto word = parse(w);
    EXPECT_DOUBLE_EQ(string_probability(s, word), std::pow(2.0, -static_cast<double>(word.size())));
  }
}

TEST(StringProbability, ByteSourcePair) {
  const CharacterSource s = IidSource({0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05});
  EXPECT_NEAR(string_probability(s, parse("00")), 0.3025, 1e-15);
}

TEST(StringProbability, RejectsOutOfAlphabet) {
  const CharacterSource s = IidSource::uniform(2);
  EXPECT_THROW(string_probability(s, parse("012")), DomainError);
  EXPECT_THROW(string_log_probability(MarkovSource::two_state(0.2, 0.3), parse("2")), DomainError);
}

TEST(StringProbability, MarkovProductForm) {
  const MarkovSource mk({{0.9, 0.1}, {0.3, 0.7}}, std::vector<double>{0.2, 0.8});
  // initial(1) * T(1,0) * T(0,0) * T(0,1)
  const double expected = 0.8 * 0.3 * 0.9 * 0.1;
  EXPECT_NEAR(string_probability(mk, parse("1001")), expected, 1e-16);
  EXPECT_NEAR(string_log_probability(mk, parse("1001")), std::log(expected), 1e-14);
}

TEST(StringProbability, PermutationsTieExactly) {
  const CharacterSource s = IidSource({0.3, 0.2, 0.2, 0.15, 0.15});
  EXPECT_EQ(string_probability(s, parse("01234")), string_probability(s, parse("43210")));
  EXPECT_EQ(string_log_probability(s, parse("0112")), string_log_probability(s, parse("2101")));
  // Swapping equiprobable symbols 1 and 2.
  EXPECT_EQ(string_log_probability(s, parse("0111")), string_log_probability(s, parse("0222")));
}

TEST(EnumerateDistribution, UniformBits) {
  const auto d = enumerate_distribution(IidSource::uniform(2), 2);
  ASSERT_EQ(d.size(), 4u);
  for (std::uint64_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(d.probability(i), 0.25);
  }
}

TEST(EnumerateDistribution, BernoulliThreeQuarters) {
  const CharacterSource src = IidSource::bernoulli(0.75);
  const auto d = enumerate_distribution(src, 2);
  EXPECT_DOUBLE_EQ(d.probability(d.index_of(parse("11"))), 0.5625);
  EXPECT_DOUBLE_EQ(d.probability(d.index_of(parse("01"))), 0.1875);
  EXPECT_DOUBLE_EQ(d.probability(d.index_of(parse("10"))), 0.1875);
  EXPECT_DOUBLE_EQ(d.probability(d.index_of(parse("00"))), 0.0625);
}

TEST(EnumerateDistribution, MarkovStationaryInitial) {
  const auto d = enumerate_distribution(MarkovSource::two_state(0.1, 0.3), 1);
  EXPECT_NEAR(d.probability(0), 0.75, 1e-15);
  EXPECT_NEAR(d.probability(1), 0.25, 1e-15);
}

TEST(EnumerateDistribution, MatchesStringProbabilityExactly) {
  const CharacterSource src = IidSource({0.5, 0.3, 0.2});
  const auto d = enumerate_distribution(src, 4);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(d.probability(i), string_probability(src, d.word(i)));
    EXPECT_EQ(d.log_probability(i), string_log_probability(src, d.word(i)));
    sum += d.probability(i);
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(EnumerateDistribution, KeepsZeroProbabilityStrings) {
  const auto d = enumerate_distribution(IidSource({0.5, 0.5, 0.0}), 2);
  EXPECT_EQ(d.size(), 9u);
  EXPECT_EQ(d.probability(d.index_of(parse("02"))), 0.0);
  EXPECT_EQ(d.log_probability(d.index_of(parse("02"))), -std::numeric_limits<double>::infinity());
}

TEST(EnumerateDistribution, CapRaisesResourceErrorNamingCap) {
  try {
    enumerate_distribution(IidSource::uniform(2), 30, 1000);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("1000"), std::string::npos);
  }
}

TEST(EnumerateDistribution, NormalizesForMarkovWithCustomInitial) {
  const MarkovSource mk({{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}}, std::vector<double>{0.1, 0.2, 0.7});
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto d = enumerate_distribution(mk, k);
    const double sum = std::accumulate(d.probabilities().begin(), d.probabilities().end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

// A symmetric two-state chain with uniform start is the XOR-differenced image
// of a uniform first bit followed by i.i.d. Bernoulli(p) flips: the string
// probability of w equals 1/2 * prod p^{[w_i != w_{i+1}]} (1-p)^{[w_i == w_{i+1}]}.
TEST(MarkovSource, SymmetricChainIsFlipProcess) {
  for (double p : {0.1, 0.25, 0.4}) {
    const MarkovSource mk = MarkovSource::two_state(p, p, std::vector<double>{0.5, 0.5});
    const IidSource flips = IidSource::bernoulli(p);
    for (std::size_t k = 1; k <= 6; ++k) {
      const auto d = enumerate_distribution(mk, k);
      for (std::uint64_t i = 0; i < d.size(); ++i) {
        const auto w = d.word(i);
        Word diff;
        for (std::size_t j = 1; j < w.size(); ++j) {
          diff.push_back(w[j] ^ w[j - 1]);
        }
        const double expected = 0.5 * (diff.empty() ? 1.0 : string_probability(flips, diff));
        EXPECT_NEAR(d.probability(i), expected, 1e-15);
      }
    }
  }
}

TEST(MarkovSource, Validation) {
  EXPECT_THROW(MarkovSource::two_state(0.0, 0.5), DomainError);
  EXPECT_THROW(MarkovSource::two_state(0.5, 1.0), DomainError);
  EXPECT_THROW(MarkovSource({{0.5, 0.6}, {0.5, 0.5}}), DomainError);
  EXPECT_THROW(MarkovSource({{0.5, 0.5}}), DomainError);
  // Reducible chain without an explicit initial distribution.
  EXPECT_THROW(MarkovSource({{1.0, 0.0}, {0.5, 0.5}}), DomainError);
  const MarkovSource reducible({{1.0, 0.0}, {0.5, 0.5}}, std::vector<double>{0.5, 0.5});
  EXPECT_FALSE(reducible.is_irreducible());
  EXPECT_THROW(reducible.stationary(), DomainError);
}

TEST(MarkovSource, StationaryVector) {
  const auto mk = MarkovSource::two_state(0.1, 0.3);
  const auto pi = mk.stationary();
  EXPECT_NEAR(pi[0], 0.75, 1e-15);
  EXPECT_NEAR(pi[1], 0.25, 1e-15);
  const MarkovSource three({{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}});
  const auto p3 = three.stationary();
  for (std::size_t j = 0; j < 3; ++j) {
    double next = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      next += p3[i] * three.transition(i, j);
    }
    EXPECT_NEAR(next, p3[j], 1e-14);
  }
}

TEST(LexicographicIndex, RoundTrip) {
  for (std::uint64_t i = 0; i < 81; ++i) {
    EXPECT_EQ(lexicographic_index(3, 4, word_at_index(3, 4, i)), i);
  }
  EXPECT_EQ(lexicographic_index(2, 3, parse("110")), 6u);
  EXPECT_THROW(lexicographic_index(2, 3, parse("11")), DomainError);
}

TEST(CheckedPower, Overflow) {
  EXPECT_EQ(checked_power(2, 10), std::optional<std::uint64_t>(1024));
  EXPECT_EQ(checked_power(2, 63), std::optional<std::uint64_t>(std::uint64_t{1} << 63));
  EXPECT_FALSE(checked_power(2, 64));
  EXPECT_FALSE(checked_power(3, 1000));
}

TEST(SampleString, Deterministic) {
  const CharacterSource s = IidSource::uniform(2);
  Rng a(12345);
  Rng b(12345);
  EXPECT_EQ(sample_string(s, 4, a), sample_string(s, 4, b));
}

TEST(SampleString, DegenerateSource) {
  const CharacterSource s = IidSource({1.0, 0.0, 0.0});
  Rng rng(1);
  EXPECT_EQ(sample_string(s, 7, rng), Word(7, 0));
}

TEST(SampleString, NeverEmitsZeroProbabilitySymbol) {
  const CharacterSource s = IidSource({0.5, 0.0, 0.5});
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_NE(sample_string(s, 1, rng)[0], 1u);
  }
}

TEST(SampleString, BernoulliFrequency) {
  const CharacterSource s = IidSource::bernoulli(0.75);
  Rng rng(99);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    ones += static_cast<int>(sample_string(s, 1, rng)[0]);
  }
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.75, 3 * sigma);
}

TEST(SampleString, MarkovTransitionFrequency) {
  const CharacterSource s = MarkovSource::two_state(0.1, 0.3);
  Rng rng(5);
  const auto w = sample_string(s, 200000, rng);
  double from0 = 0;
  double flips0 = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i - 1] == 0) {
      ++from0;
      flips0 += w[i] == 1 ? 1 : 0;
    }
  }
  const double sigma = std::sqrt(0.1 * 0.9 / from0);
  EXPECT_NEAR(flips0 / from0, 0.1, 4 * sigma);
}

TEST(MultiUserProblem, Validate) {
  MultiUserProblem ok{{IidSource::uniform(2), IidSource::bernoulli(0.3)}, 2, 3};
  EXPECT_NO_THROW(ok.validate());
  MultiUserProblem too_many{{IidSource::uniform(2)}, 2, 1};
  EXPECT_THROW(too_many.validate(), DomainError);
  MultiUserProblem mixed{{IidSource::uniform(2), IidSource::uniform(3)}, 1, 1};
  EXPECT_THROW(mixed.validate(), DomainError);
}
