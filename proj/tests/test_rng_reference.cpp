#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "richkde/reference.hpp"
#include "richkde/rng.hpp"

using richkde::NormalStream;
using richkde::ReferenceDistribution;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

ReferenceDistribution two_bump() {
  ReferenceDistribution::Component a{0.5, vec1(-1.0), 1.0};
  ReferenceDistribution::Component b{0.5, vec1(1.0), 1.0};
  return ReferenceDistribution::gaussian_mixture({a, b});
}

}  // namespace

TEST_CASE("stream seed derivation separates streams") {
  CHECK(richkde::derive_stream_seed(42, 0) != richkde::derive_stream_seed(42, 1));
  CHECK(richkde::derive_stream_seed(1, 0) != richkde::derive_stream_seed(2, 0));
  CHECK(richkde::derive_stream_seed(42, 7) == richkde::derive_stream_seed(42, 7));
  // the finalizer never collapses to the identity on small inputs
  CHECK(richkde::mix64(1) != 1);
}

TEST_CASE("uniform01 stays in [0, 1) with 53-bit resolution") {
  NormalStream s(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal stream is the pinned Box-Muller transform") {
  // Frozen algorithm identity: top-53-bit uniforms, u1 mapped to (0,1],
  // cosine deviate returned first, sine deviate cached as the spare.
  std::mt19937_64 engine(777);
  auto top53 = [&engine]() {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  };
  const double u1 = 1.0 - top53();
  const double u2 = top53();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double expected_first = radius * std::cos(2.0 * std::numbers::pi * u2);
  const double expected_spare = radius * std::sin(2.0 * std::numbers::pi * u2);

  NormalStream s(777);
  CHECK(s.next_normal() == expected_first);
  CHECK(s.next_normal() == expected_spare);
}

TEST_CASE("reset_spare discards the cached deviate") {
  NormalStream a(9);
  (void)a.next_normal();
  a.reset_spare();
  const double after_reset = a.next_normal();

  NormalStream c(9);
  (void)c.next_normal();  // pair 1, cosine
  (void)c.next_normal();  // pair 1, cached sine
  const double pair2_first = c.next_normal();
  CHECK(after_reset == pair2_first);
}

TEST_CASE("true_density closed forms") {
  const auto std1 = ReferenceDistribution::standard_normal(1);
  CHECK(std1.true_density(vec1(0.0)) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-14));

  const auto std2 = ReferenceDistribution::standard_normal(2);
  Eigen::VectorXd x2(2);
  x2 << 1.0, 0.0;
  CHECK(std2.true_density(x2) == doctest::Approx(0.09653235263005391).epsilon(1e-14));

  CHECK(two_bump().true_density(vec1(0.0)) ==
        doctest::Approx(0.24197072451914337).epsilon(1e-14));

  CHECK_THROWS_AS(std1.true_density(x2), std::invalid_argument);
}

TEST_CASE("density symmetry and normalization") {
  const auto std1 = ReferenceDistribution::standard_normal(1);
  for (double x : {0.1, 0.7, 2.3}) {
    CHECK(std1.true_density(vec1(x)) == std1.true_density(vec1(-x)));
  }
  const double total = oracles::trapezoid(
      [&](double x) { return std1.true_density(vec1(x)); }, -10.0, 10.0, 4000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  const auto mix = two_bump();
  const double mix_total = oracles::trapezoid(
      [&](double x) { return mix.true_density(vec1(x)); }, -11.0, 11.0, 4400);
  CHECK(mix_total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("distribution construction validates") {
  ReferenceDistribution::Component ok{1.0, vec1(0.0), 1.0};
  ReferenceDistribution::Component half{0.5, vec1(0.0), 1.0};
  ReferenceDistribution::Component negw{-0.5, vec1(0.0), 1.0};
  ReferenceDistribution::Component zerosd{1.0, vec1(0.0), 0.0};
  CHECK_THROWS_AS(ReferenceDistribution::gaussian_mixture({half}), std::invalid_argument);
  CHECK_THROWS_AS(ReferenceDistribution::gaussian_mixture({ok, half}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ReferenceDistribution::gaussian_mixture({negw, ok, half}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ReferenceDistribution::gaussian_mixture({zerosd}),
                  std::invalid_argument);
  Eigen::VectorXd m2(2);
  m2 << 0.0, 0.0;
  ReferenceDistribution::Component wrongdim{0.5, m2, 1.0};
  CHECK_THROWS_AS(ReferenceDistribution::gaussian_mixture({half, wrongdim}),
                  std::invalid_argument);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto dist = ReferenceDistribution::standard_normal(1);
  const auto a = dist.sample(64, 42);
  const auto b = dist.sample(64, 42);
  CHECK(a.data() == b.data());
  const auto c = dist.sample(64, 43);
  CHECK(a.data() != c.data());
}

TEST_CASE("sampler moments obey CLT bounds") {
  const long long n = 100000;
  const auto dist = ReferenceDistribution::standard_normal(1);
  const auto s = dist.sample(n, 2026);
  const double mean = s.data().col(0).mean();
  const double var =
      (s.data().col(0).array() - mean).square().sum() / static_cast<double>(n - 1);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) <= 0.05);

  const auto dist2 = ReferenceDistribution::standard_normal(2);
  const auto s2 = dist2.sample(n, 77);
  REQUIRE(s2.dim() == 2);
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(s2.data().col(j).mean()) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("degenerate mixture matches its live component in distribution") {
  ReferenceDistribution::Component live{1.0, vec1(0.0), 1.0};
  ReferenceDistribution::Component dead{0.0, vec1(50.0), 1.0};
  const auto mix = ReferenceDistribution::gaussian_mixture({live, dead});
  const auto std1 = ReferenceDistribution::standard_normal(1);
  for (double x : {-2.0, 0.0, 1.3})
    CHECK(mix.true_density(vec1(x)) == std1.true_density(vec1(x)));

  const long long n = 100000;
  const auto s = mix.sample(n, 4);
  CHECK(s.data().cwiseAbs().maxCoeff() < 10.0);  // the dead bump never fires
  CHECK(std::abs(s.data().col(0).mean()) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mixture sampling covers both components") {
  const auto s = two_bump().sample(20000, 8);
  int negative_side = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s.data()(i, 0) < 0.0) ++negative_side;
  // each bump owns half the mass; 4-sigma binomial window
  const double half = 10000.0;
  const double sigma = std::sqrt(20000.0 * 0.25);
  CHECK(std::abs(negative_side - half) <= 4.0 * sigma);
}
