#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "guesswork/asymptotic_analyzer.hpp"
#include "guesswork/errors.hpp"

using namespace guesswork;

namespace {

const double kLn2 = std::log(2.0);

// Reference values below were computed independently with 30-digit mpmath:
// Renyi entropies from the closed-form power sums, rate values by bisection on
// the derivative of alpha -> (1+alpha) log sum p^(1/(1+alpha)). All in bits.
constexpr double kBernR_half = 0.899968626952992;
constexpr double kBernR_one = 0.811278124459133;
constexpr double kBernR_twoThirds = 0.868908841191443;
constexpr double kBernR_threeQuarters = 0.853915917993120;
constexpr double kBernR_fourFifths = 0.845102237758898;
constexpr double kBernR_inf = 0.415037499278844;

std::vector<double> byte_probs() { return {0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05}; }

RateCurve rate_of(const CharacterSource& src, std::size_t grid = 2048) {
  LegendreOptions o;
  o.grid_points = grid;
  return rate_single(Scgf(renyi_curve(src)), o);
}

double bits(double nats) { return nats / kLn2; }

} // namespace

TEST(RenyiIid, ReferenceValues) {
  const auto b = IidSource::bernoulli(0.25);
  EXPECT_NEAR(bits(renyi_iid(b, 0.5)), kBernR_half, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(b, 1.0)), kBernR_one, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(b, 2.0 / 3.0)), kBernR_twoThirds, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(b, 0.75)), kBernR_threeQuarters, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(b, 0.8)), kBernR_fourFifths, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(b, kInfinity)), kBernR_inf, 1e-12);
  const IidSource bytes(byte_probs());
  EXPECT_NEAR(bits(renyi_iid(bytes, 1.0)), 2.219240704636849, 1e-12);
  EXPECT_NEAR(bits(renyi_iid(bytes, kInfinity)), 0.862496476250065, 1e-12);
}

TEST(RenyiIid, UniformIsFlat) {
  const auto u = IidSource::uniform(5);
  for (double beta : {0.1, 0.5, 1.0, 1.0 + 1e-7, 3.0, kInfinity}) {
    EXPECT_NEAR(renyi_iid(u, beta), std::log(5.0), 1e-12);
  }
}

TEST(RenyiIid, ContinuousThroughShannonBand) {
  const auto b = IidSource::bernoulli(0.3);
  const double h = renyi_iid(b, 1.0);
  EXPECT_NEAR(renyi_iid(b, 1.0 - 2e-6), h, 1e-5);
  EXPECT_NEAR(renyi_iid(b, 1.0 + 2e-6), h, 1e-5);
  EXPECT_NEAR(renyi_iid(b, 1.0 + 5e-7), h, 1e-6);
}

TEST(RenyiIid, RejectsNonPositiveBeta) {
  const auto b = IidSource::bernoulli(0.3);
  EXPECT_THROW(renyi_iid(b, 0.0), DomainError);
  EXPECT_THROW(renyi_iid(b, -1.0), DomainError);
  EXPECT_THROW(renyi_iid(b, std::nan("")), DomainError);
}

TEST(RenyiCurve, NonincreasingInBeta) {
  for (const CharacterSource& src : {CharacterSource(IidSource(byte_probs())),
                                     CharacterSource(MarkovSource::two_state(0.2, 0.45))}) {
    const auto r = renyi_curve(src);
    double prev = r.zero_limit();
    for (double beta = 0.05; beta < 20.0; beta *= 1.3) {
      const double v = r(beta);
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
    EXPECT_LE(r.min_entropy(), prev + 1e-12);
    EXPECT_LE(r.zero_limit(), r.log_alphabet() + 1e-12);
  }
}

TEST(RenyiMarkov, ReferenceValues) {
  const auto src = MarkovSource::two_state(0.1, 0.3);
  EXPECT_NEAR(bits(renyi_markov(src, 1.0)), 0.572069419999634, 1e-10);
  EXPECT_NEAR(bits(renyi_markov(src, 0.5)), 0.784861416903026, 1e-10);
  EXPECT_NEAR(bits(renyi_markov(src, 2.0)), 0.299048626986230, 1e-10);
}

TEST(RenyiMarkov, TwoStateClosedFormMatchesSpectral) {
  for (auto [a, b] : {std::pair{0.1, 0.3}, std::pair{0.3, 0.1}, std::pair{0.5, 0.5}, std::pair{0.85, 0.6},
                      std::pair{0.02, 0.97}}) {
    const auto src = MarkovSource::two_state(a, b);
    for (double beta : {0.2, 0.5, 0.75, 1.5, 2.0, 7.0}) {
      EXPECT_NEAR(renyi_markov(src, beta), renyi_markov_two_state(a, b, beta), 1e-9)
          << "a=" << a << " b=" << b << " beta=" << beta;
    }
  }
  EXPECT_THROW(renyi_markov_two_state(0.3, 0.3, 1.0), DomainError);
  EXPECT_THROW(renyi_markov_two_state(0.3, 0.3, kInfinity), DomainError);
  EXPECT_THROW(renyi_markov_two_state(0.0, 0.3, 2.0), DomainError);
}

TEST(RenyiMarkov, SymmetricChainMatchesBernoulli) {
  for (double p : {0.1, 0.25, 0.4}) {
    const auto chain = MarkovSource::two_state(p, p);
    const auto iid = IidSource::bernoulli(p);
    for (double beta : {0.25, 0.5, 2.0 / 3.0, 1.0, 2.0, kInfinity}) {
      EXPECT_NEAR(renyi_markov(chain, beta), renyi_iid(iid, beta), 1e-9) << "p=" << p << " beta=" << beta;
    }
  }
}

TEST(RenyiMarkov, IidRowsMatchIidSource) {
  const std::vector<double> row = {0.5, 0.3, 0.2};
  const MarkovSource chain({row, row, row});
  const IidSource iid(row);
  for (double beta : {0.3, 1.0, 2.5, kInfinity}) {
    EXPECT_NEAR(renyi_markov(chain, beta), renyi_iid(iid, beta), 1e-9);
  }
}

TEST(RenyiMarkov, ZeroLimitIsTopologicalEntropy) {
  // Golden-mean shift: no two consecutive ones.
  const MarkovSource chain({{0.5, 0.5}, {1.0, 0.0}});
  const double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_NEAR(renyi_curve(chain).zero_limit(), golden, 1e-9);
  EXPECT_NEAR(renyi_markov(chain, 1e-4), golden, 1e-3);
}

TEST(RenyiMarkov, ReducibleChainRejected) {
  const MarkovSource chain({{1.0, 0.0}, {0.5, 0.5}}, std::vector<double>{0.0, 1.0});
  EXPECT_THROW(renyi_markov(chain, 0.5), DomainError);
}

TEST(Scgf, Values) {
  const auto r = renyi_curve(IidSource::bernoulli(0.25));
  EXPECT_DOUBLE_EQ(scgf_single(r, 0.0), 0.0);
  EXPECT_NEAR(bits(scgf_single(r, 1.0)), kBernR_half, 1e-12);
  EXPECT_NEAR(bits(scgf_single(r, 0.5)), 0.5 * kBernR_twoThirds, 1e-12);
  EXPECT_NEAR(bits(scgf_single(r, -1.0)), -kBernR_inf, 1e-12);
  EXPECT_NEAR(bits(scgf_single(r, -3.0)), -kBernR_inf, 1e-12);
  const Scgf u(renyi_curve(IidSource::uniform(4)));
  for (double a : {-0.5, 0.5, 2.0}) {
    EXPECT_NEAR(u(a), a * std::log(4.0), 1e-12);
  }
}

TEST(RateSingle, UniformIsLinear) {
  for (std::size_t m : {2u, 3u, 10u, 256u}) {
    const auto rate = rate_of(IidSource::uniform(m));
    for (std::size_t i = 0; i < rate.size(); ++i) {
      EXPECT_NEAR(rate.value(i), std::log(static_cast<double>(m)) - rate.x(i), 1e-8);
    }
  }
}

TEST(RateSingle, BernoulliReferenceValues) {
  // 2001 points put 0.5, 0.7 and 0.9 bits exactly on the grid.
  const auto rate = rate_of(IidSource::bernoulli(0.25), 2001);
  EXPECT_NEAR(bits(rate.value(1000)), 0.089427538448074543, 1e-8);
  EXPECT_NEAR(bits(rate.value(1400)), 0.015067263763847622, 1e-8);
  EXPECT_NEAR(bits(rate.value(1800)), 0.015916312704174146, 1e-8);
  EXPECT_NEAR(bits(rate.zero_point()), kBernR_one, 1e-12);
  EXPECT_NEAR(rate.value_at(rate.zero_point()), 0.0, 1e-6);
  // Finite below min-entropy, reaching R(inf) at x = 0.
  EXPECT_NEAR(bits(rate.value(0)), kBernR_inf, 1e-9);
  EXPECT_NEAR(bits(rate.value(200)), 0.33562118863887798, 1e-8);
  EXPECT_NEAR(bits(rate.value(400)), 0.26436860171711916, 1e-8);
  // At x = log m the supremum is approached only as alpha grows; the bracket
  // ends at alpha = 64.
  EXPECT_NEAR(bits(rate.value(2000)), 0.2041702139570804, 1e-9);
}

TEST(RateSingle, ByteSourceReferenceValues) {
  const auto rate = rate_of(IidSource(byte_probs()), 3001);
  EXPECT_NEAR(bits(rate.value(500)), 0.54386401006113002, 1e-8);
  EXPECT_NEAR(bits(rate.value(1000)), 0.29992860707339203, 1e-8);
  EXPECT_NEAR(bits(rate.value(2500)), 0.028813460619196706, 1e-8);
}

TEST(RateSingle, NonnegativeAndConvex) {
  for (const CharacterSource& src : {CharacterSource(IidSource::bernoulli(0.1)),
                                     CharacterSource(IidSource(byte_probs())),
                                     CharacterSource(MarkovSource::two_state(0.1, 0.3)),
                                     CharacterSource(MarkovSource({{0.5, 0.5}, {1.0, 0.0}}))}) {
    const auto rate = rate_of(src, 512);
    for (double v : rate.values()) {
      EXPECT_GE(v, 0.0);
    }
    EXPECT_TRUE(rate.is_convex());
    EXPECT_TRUE(convexity_report(rate).convex);
  }
}

TEST(RateSingle, ZeroEntropyUserAboveLimitIsInfinite) {
  // Two live symbols out of eight: finite only up to log 2.
  const auto rate = rate_of(IidSource({0.5, 0.5, 0, 0, 0, 0, 0, 0}), 301);
  EXPECT_NEAR(rate.finite_limit(), kLn2, 1e-12);
  EXPECT_NEAR(rate.value(100), 0.0, 1e-8);
  EXPECT_TRUE(std::isinf(rate.value(101)));
  EXPECT_TRUE(std::isinf(rate.value_at(1.5 * kLn2)));
}

TEST(RateSingle, TransformRecoversScgf) {
  const auto renyi = renyi_curve(MarkovSource::two_state(0.1, 0.3));
  const auto rate = rate_single(Scgf(renyi));
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(scgf_multi(rate, a), scgf_single(renyi, a), 1e-5);
  }
}

TEST(DeltaGamma, SplitAtShannon) {
  const auto rate = rate_of(IidSource::bernoulli(0.25), 1001);
  const double h = rate.zero_point();
  const auto [delta, gamma] = delta_gamma(rate, h);
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const double x = rate.x(i);
    if (x <= h) {
      EXPECT_EQ(delta.value(i), rate.value(i));
      EXPECT_EQ(gamma.value(i), 0.0);
    } else {
      EXPECT_EQ(delta.value(i), 0.0);
      EXPECT_EQ(gamma.value(i), rate.value(i));
    }
  }
}

TEST(RateMulti, SingleUserIsIdentity) {
  const auto rate = rate_of(IidSource::bernoulli(0.25), 257);
  const std::vector<RateCurve> one = {rate};
  const auto multi = rate_multi(one, 1);
  for (std::size_t i = 0; i < rate.size(); ++i) {
    EXPECT_EQ(multi.value(i), rate.value(i));
  }
}

TEST(RateMulti, HomogeneousBranchFormula) {
  const auto rate = rate_of(IidSource::bernoulli(0.25), 1025);
  const double h = rate.zero_point();
  const std::vector<RateCurve> three = {rate, rate, rate};
  for (std::size_t u = 1; u <= 3; ++u) {
    const auto multi = rate_multi(three, u);
    for (std::size_t i = 0; i < rate.size(); ++i) {
      const double single = rate.value(i);
      const double expected = rate.x(i) <= h ? static_cast<double>(u) * single : static_cast<double>(3 - u + 1) * single;
      if (std::isinf(expected)) {
        EXPECT_TRUE(std::isinf(multi.value(i)));
      } else {
        EXPECT_NEAR(multi.value(i), expected, 1e-9) << "U=" << u << " i=" << i;
      }
    }
    EXPECT_TRUE(multi.is_convex());
  }
}

TEST(RateMulti, AverageExponentMatchesClosedForm) {
  const auto renyi = renyi_curve(IidSource::bernoulli(0.25));
  const auto rate = rate_single(Scgf(renyi));
  const std::vector<std::pair<std::size_t, std::size_t>> cases = {{1, 1}, {1, 2}, {2, 3}, {3, 3}, {1, 3}};
  for (auto [u, v] : cases) {
    const std::vector<RateCurve> users(v, rate);
    const double closed = avg_growth_exponent(renyi, u, v);
    EXPECT_NEAR(scgf_multi(rate_multi(users, u), 1.0), closed, 1e-4) << "U=" << u << " V=" << v;
  }
  EXPECT_NEAR(bits(avg_growth_exponent(renyi, 1, 1)), kBernR_half, 1e-12);
  EXPECT_NEAR(bits(avg_growth_exponent(renyi, 1, 2)), kBernR_twoThirds, 1e-12);
  EXPECT_NEAR(bits(avg_growth_exponent(renyi, 1, 3)), kBernR_threeQuarters, 1e-12);
  EXPECT_NEAR(bits(avg_growth_exponent(renyi, 1, 4)), kBernR_fourFifths, 1e-12);
}

TEST(RateMulti, UniformScgfIsLinear) {
  const auto rate = rate_of(IidSource::uniform(3));
  const std::vector<RateCurve> users(3, rate);
  for (std::size_t u = 1; u <= 3; ++u) {
    const auto multi = rate_multi(users, u);
    for (double a : {0.0, 0.5, 1.0, 3.0}) {
      EXPECT_NEAR(scgf_multi(multi, a), a * std::log(3.0), 1e-9);
    }
  }
}

TEST(RateMulti, Errors) {
  const auto a = rate_of(IidSource::bernoulli(0.25), 128);
  const auto b = rate_of(IidSource::bernoulli(0.25), 256);
  const auto c = rate_of(IidSource::uniform(3), 128);
  const std::vector<RateCurve> grids = {a, b};
  EXPECT_THROW(rate_multi(grids, 1), ConfigError);
  const std::vector<RateCurve> alphabets = {a, c};
  EXPECT_THROW(rate_multi(alphabets, 1), ConfigError);
  const std::vector<RateCurve> two = {a, a};
  EXPECT_THROW(rate_multi(two, 0), DomainError);
  EXPECT_THROW(rate_multi(two, 3), DomainError);
  EXPECT_THROW(avg_growth_exponent(renyi_curve(IidSource::bernoulli(0.25)), 3, 2), DomainError);
}

TEST(RateMulti, MixedUsersNonconvexWithSwitch) {
  LegendreOptions o;
  o.grid_points = 2048;
  const auto bits_user = rate_single(Scgf(renyi_curve(IidSource({0.5, 0.5, 0, 0, 0, 0, 0, 0}))), o);
  const auto byte_user = rate_single(Scgf(renyi_curve(IidSource(byte_probs()))), o);
  const std::vector<RateCurve> users = {bits_user, byte_user};
  const auto multi = rate_multi(users, 1);
  for (std::size_t i = 0; i < multi.size(); ++i) {
    const double x = multi.x(i);
    if (x <= kLn2 * (1.0 + 1e-12)) {
      EXPECT_NEAR(multi.value(i), std::min(bits_user.value(i), byte_user.value(i)), 1e-6);
    } else {
      EXPECT_TRUE(std::isinf(multi.value(i)));
    }
  }
  const auto report = convexity_report(multi);
  EXPECT_FALSE(report.convex);
  EXPECT_FALSE(multi.is_convex());
  ASSERT_TRUE(report.witness.has_value());
  EXPECT_LT(report.worst_second_difference, -kConvexityTolerance);
  ASSERT_FALSE(report.switch_points.empty());
  bool pivot_changes = false;
  for (std::size_t s : report.switch_points) {
    ASSERT_GT(s, 0u);
    pivot_changes = pivot_changes || report.assignments[s].pivot != report.assignments[s - 1].pivot;
  }
  EXPECT_TRUE(pivot_changes);
}

TEST(RateMulti, TransformOfTransformIsBelowRate) {
  const auto bits_user = rate_of(IidSource({0.5, 0.5, 0, 0, 0, 0, 0, 0}), 1024);
  const auto byte_user = rate_of(IidSource(byte_probs()), 1024);
  const std::vector<RateCurve> users = {bits_user, byte_user};
  const auto multi = rate_multi(users, 1);
  std::vector<double> alphas;
  for (double a = -1.0; a <= 64.0; a += 0.01) {
    alphas.push_back(a);
  }
  std::vector<double> lambda;
  for (double a : alphas) {
    lambda.push_back(scgf_multi(multi, a));
  }
  for (std::size_t i = 0; i < multi.size(); i += 7) {
    if (std::isinf(multi.value(i))) {
      continue;
    }
    double hull = -kInfinity;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      hull = std::max(hull, alphas[j] * multi.x(i) - lambda[j]);
    }
    EXPECT_LE(hull, multi.value(i) + 1e-9);
  }
}

TEST(RateMulti, LiteralMaxIsNotBelowInfimum) {
  const auto a = rate_of(IidSource::bernoulli(0.1), 257);
  const auto b = rate_of(IidSource::bernoulli(0.4), 257);
  const std::vector<RateCurve> users = {a, b, a};
  const auto inf_form = rate_multi(users, 2);
  const auto max_form = rate_multi(users, 2, AssignmentRule::literal_max);
  for (std::size_t i = 0; i < inf_form.size(); ++i) {
    EXPECT_GE(max_form.value(i), inf_form.value(i));
  }
}

TEST(AvgGrowthExponent, DiminishingReturns) {
  for (double p : {0.1, 0.2, 0.3, 0.4}) {
    const auto renyi = renyi_curve(IidSource::bernoulli(p));
    std::vector<double> e;
    for (std::size_t n = 0; n <= 8; ++n) {
      e.push_back(avg_growth_exponent(renyi, 1, n + 1));
      EXPECT_GE(e.back(), renyi.shannon());
    }
    for (std::size_t n = 1; n < e.size(); ++n) {
      EXPECT_LT(e[n], e[n - 1]);
    }
    for (std::size_t n = 2; n < e.size(); ++n) {
      EXPECT_LE(e[n - 1] - e[n], e[n - 2] - e[n - 1]);
    }
  }
}

TEST(PmfApprox, UniformIsExact) {
  const auto rate = rate_of(IidSource::uniform(2), 2048);
  for (std::size_t k = 1; k <= 20; ++k) {
    const double expected = std::ldexp(1.0, -static_cast<int>(k));
    const std::uint64_t top = std::uint64_t{1} << k;
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2}, top / 3 + 1, top - 1, top}) {
      EXPECT_NEAR(pmf_approx(rate, k, n), expected, expected * 1e-12) << "k=" << k << " n=" << n;
    }
    EXPECT_EQ(pmf_approx(rate, k, top + 1), 0.0);
  }
}

TEST(PmfApprox, BernoulliMassIsOrderOne) {
  const auto rate = rate_of(IidSource::bernoulli(0.25), 2048);
  double total = 0.0;
  for (std::uint64_t n = 1; n <= 1024; ++n) {
    total += pmf_approx(rate, 10, n);
  }
  EXPECT_GT(total, 0.2);
  EXPECT_LT(total, 5.0);
  EXPECT_THROW(pmf_approx(rate, 10, 0), DomainError);
  EXPECT_NEAR(std::exp(log_pmf_approx(rate, 10, std::log(300.0))), pmf_approx(rate, 10, 300), 1e-15);
}

TEST(WriteRateCsv, Format) {
  const RateCurve rate(2.0, {1.0, 0.5, kInfinity}, 0.5, 1.0);
  std::ostringstream os;
  write_rate_csv(os, rate);
  EXPECT_EQ(os.str(), "x,value\n0,1\n1,0.5\n2,inf\n");
}
