#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "test_support.hpp"
#include "topodist/datagen.hpp"
#include "topodist/metrics.hpp"

using namespace topodist;

namespace {

Eigen::MatrixXd line_points(std::initializer_list<double> xs) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return pts;
}

PersistenceDiagram make_diagram(const std::vector<std::array<double, 2>>& pairs, int dim) {
  PersistenceDiagram d;
  d.n_points = pairs.size();
  for (const std::array<double, 2>& p : pairs) d.pairs.push_back({p[0], p[1], dim});
  return d;
}

}  // namespace

TEST_CASE("td: identity, hand value, errors") {
  const FeatureMatrix x(line_points({0, 1, 3}));
  CHECK(td(x, x) == 0.0);

  const FeatureMatrix y(line_points({0, 1, 2}));
  CHECK(td(x, y) == 1.0);  // longevities [1,2,inf] vs [1,1,inf]

  const FeatureMatrix shorter(line_points({0, 1}));
  try {
    td(x, shorter);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sample_count_mismatch);
  }

  Eigen::MatrixXd wide(3, 2);
  wide << 0, 0, 1, 0, 3, 0;
  try {
    td(x, FeatureMatrix(wide));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("td: symmetry, permutation invariance, scaling") {
  const FeatureMatrix a = testsupport::random_cloud(20, 3, 51);
  const FeatureMatrix b = testsupport::random_cloud(20, 3, 52);
  CHECK(td(a, b) == td(b, a));

  Eigen::MatrixXd shuffled = a.values().colwise().reverse();
  CHECK(td(FeatureMatrix(shuffled), b) == td(a, b));

  const double base = td(a, b);
  CHECK(td(FeatureMatrix(2.0 * a.values()), FeatureMatrix(2.0 * b.values())) == 2.0 * base);
  CHECK(td(FeatureMatrix(1.3 * a.values()), FeatureMatrix(1.3 * b.values())) ==
        doctest::Approx(1.3 * base).epsilon(1e-12));
}

TEST_CASE("td: infinity policy substitutes the configured gap") {
  LongevityVector a;
  a.values = {1.0, kInfiniteDeath};
  LongevityVector b;
  b.values = {1.0, 1.0};
  // max finite longevity is 1.0, so the gap is 1.05 by default
  CHECK(td_from_longevity(a, b) == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(td_from_longevity(a, b, InfinityPolicy{2.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(td_from_longevity(a, a) == 0.0);  // inf aligned with inf
}

TEST_CASE("fid: closed forms") {
  GaussianStats a{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 4.0)};
  GaussianStats b{Eigen::VectorXd::Constant(1, 3.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  CHECK(fid(a, b) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(fid(a, a) <= 1e-9);

  GaussianStats c{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  CHECK_THROWS_AS(fid(a, c), Error);
}

TEST_CASE("fid: rejects bad covariance matrices") {
  GaussianStats good{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};

  Eigen::MatrixXd skew(2, 2);
  skew << 1, 2, -2, 1;
  try {
    fid(good, GaussianStats{Eigen::VectorXd::Zero(2), skew});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::asymmetric_matrix);
  }

  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Zero(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -1.0;
  try {
    fid(GaussianStats{Eigen::VectorXd::Zero(2), indefinite}, good);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_positive_semidefinite);
  }
}

TEST_CASE("fid: symmetry and nonnegativity on seeded stats") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GaussianStats a = estimate_gaussian(testsupport::random_cloud(40, 4, 600 + seed));
    const GaussianStats b = estimate_gaussian(testsupport::random_cloud(40, 4, 700 + seed));
    const double ab = fid(a, b);
    const double ba = fid(b, a);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) < 1e-9 * std::max(1.0, ab));
    CHECK(fid(a, a) <= 1e-9);
  }
}

TEST_CASE("kid: hand values") {
  Eigen::MatrixXd x(2, 1), y(2, 1);
  x << 1, 1;
  y << 0, 0;
  CHECK(kid(FeatureMatrix(x), FeatureMatrix(y)) == 7.0);  // 8 + 1 - 2
  CHECK(kid(FeatureMatrix(y), FeatureMatrix(y)) == 0.0);

  Eigen::MatrixXd one(1, 1);
  one << 0;
  try {
    kid(FeatureMatrix(one), FeatureMatrix(y));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_samples);
  }

  Eigen::MatrixXd wide(2, 2);
  wide << 0, 0, 1, 1;
  try {
    kid(FeatureMatrix(x), FeatureMatrix(wide));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("inception_score: closed forms and bounds") {
  Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(10, 4, 0.25);
  CHECK(inception_score(ProbabilityMatrix(uniform)) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) onehot(i, i) = 1.0;
  CHECK(inception_score(ProbabilityMatrix(onehot)) == doctest::Approx(5.0).epsilon(1e-9));

  Eigen::MatrixXd single(1, 3);
  single << 0.2, 0.5, 0.3;
  CHECK(inception_score(ProbabilityMatrix(single)) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd probs(6, 5);
    for (Eigen::Index i = 0; i < 6; ++i) {
      double total = 0;
      for (Eigen::Index j = 0; j < 5; ++j) {
        probs(i, j) = -std::log(1.0 - rng.next_double());
        total += probs(i, j);
      }
      probs.row(i) /= total;
    }
    const double score = inception_score(ProbabilityMatrix(probs));
    CHECK(score >= 1.0);
    CHECK(score <= 5.0);
  }
}

TEST_CASE("inception_score: validation and splits") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 0.3);
  try {
    ProbabilityMatrix probs(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_probability_rows);
  }

  Eigen::MatrixXd rows(4, 2);
  rows << 1, 0, 0, 1, 1, 0, 0, 1;
  const ProbabilityMatrix probs(rows);
  const SplitScore per_row = inception_score_splits(probs, 4);
  CHECK(per_row.mean == doctest::Approx(1.0).epsilon(1e-12));  // single rows score 1
  CHECK(per_row.stddev == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inception_score_splits(probs, 1).mean == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(inception_score_splits(probs, 5), Error);
}

TEST_CASE("rlt: unit square puts (sqrt(2)-1)/sqrt(2) at rank one") {
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 1, 0, 1, 1, 0, 1;
  const RLTVector v = rlt(pairwise_distances(FeatureMatrix(pts)), 10);
  const double expected = (std::sqrt(2.0) - 1.0) / std::sqrt(2.0);
  CHECK(v.values[0] == doctest::Approx(expected).epsilon(1e-9));
  for (std::size_t k = 1; k < v.values.size(); ++k) CHECK(v.values[k] == 0.0);
  CHECK(v.residual_rank0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(v.residual_overflow == 0.0);
}

TEST_CASE("rlt: collinear points give the zero vector") {
  const RLTVector v = rlt(pairwise_distances(FeatureMatrix(line_points({0, 1, 2}))), 5);
  for (double x : v.values) CHECK(x == 0.0);
  CHECK(v.residual_rank0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rlt: scale invariance and total mass") {
  const FeatureMatrix cloud = testsupport::random_cloud(12, 2, 90);
  const RLTVector base = rlt(pairwise_distances(cloud), 20);
  const RLTVector doubled = rlt(pairwise_distances(FeatureMatrix(2.0 * cloud.values())), 20);
  const RLTVector scaled = rlt(pairwise_distances(FeatureMatrix(0.7 * cloud.values())), 20);
  double total = base.residual_rank0 + base.residual_overflow;
  for (std::size_t k = 0; k < base.values.size(); ++k) {
    CHECK(doubled.values[k] == base.values[k]);
    CHECK(scaled.values[k] == doctest::Approx(base.values[k]).epsilon(1e-12));
    total += base.values[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::accumulate(base.values.begin(), base.values.end(), 0.0) <= 1.0 + 1e-9);
}

TEST_CASE("gs: hand values") {
  Eigen::MatrixXd square(4, 2);
  square << 0, 0, 1, 0, 1, 1, 0, 1;
  Eigen::MatrixXd triangle(3, 2);
  triangle << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;

  const DistanceMatrix ds = pairwise_distances(FeatureMatrix(square));
  const DistanceMatrix dt = pairwise_distances(FeatureMatrix(triangle));
  CHECK(gs({ds}, {ds}) == 0.0);

  const double expected = (std::sqrt(2.0) - 1.0) / std::sqrt(2.0);
  CHECK(gs({ds}, {dt}) == doctest::Approx(expected).epsilon(1e-9));

  // averaging two identical clouds equals using one copy
  CHECK(gs({ds, ds}, {dt}) == gs({ds}, {dt}));
  CHECK_THROWS_AS(gs({}, {ds}), Error);
}

TEST_CASE("diagram distances: hand values") {
  const PersistenceDiagram d02 = make_diagram({{0, 2}}, 0);
  const PersistenceDiagram d03 = make_diagram({{0, 3}}, 0);
  const PersistenceDiagram empty = make_diagram({}, 0);

  CHECK(diagram_bottleneck(d02, d02) == 0.0);
  CHECK(diagram_bottleneck(d02, empty) == 1.0);
  CHECK(diagram_bottleneck(d02, d03) == 1.0);

  CHECK(diagram_wasserstein(d02, d02, 1.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(diagram_wasserstein(d02, empty, 1.0, std::numeric_limits<double>::infinity()) == 1.0);
  const PersistenceDiagram d24 = make_diagram({{0, 2}, {0, 4}}, 0);
  CHECK(diagram_wasserstein(d24, d02, 1.0, std::numeric_limits<double>::infinity()) == 2.0);
}

TEST_CASE("diagram distances: infinite bars and dimension checks") {
  const PersistenceDiagram with_inf = make_diagram({{0, 1}, {0, kInfiniteDeath}}, 0);
  const PersistenceDiagram no_inf = make_diagram({{0, 1}}, 0);
  CHECK(std::isinf(diagram_bottleneck(with_inf, no_inf)));
  CHECK(std::isinf(diagram_wasserstein(with_inf, no_inf, 2.0, 2.0)));
  CHECK(diagram_bottleneck(with_inf, with_inf) == 0.0);

  const PersistenceDiagram dim1 = make_diagram({{0, 1}}, 1);
  CHECK_THROWS_AS(diagram_bottleneck(no_inf, dim1), Error);
  CHECK_THROWS_AS(diagram_wasserstein(no_inf, dim1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(
      diagram_wasserstein(no_inf, no_inf, std::numeric_limits<double>::infinity(), 1.0), Error);
  CHECK_THROWS_AS(diagram_wasserstein(no_inf, no_inf, 1.0, 0.5), Error);
}

TEST_CASE("diagram distances: brute-force equivalence on seeded small diagrams") {
  Rng rng(321);
  auto random_diagram = [&](std::size_t max_points) {
    std::vector<std::array<double, 2>> pairs;
    const std::size_t k = rng.next_below(max_points + 1);
    for (std::size_t i = 0; i < k; ++i) {
      const double birth = rng.next_double() * 2.0;
      pairs.push_back({birth, birth + rng.next_double() * 3.0});
    }
    return pairs;
  };

  for (int trial = 0; trial < 25; ++trial) {
    const std::vector<std::array<double, 2>> a = random_diagram(5);
    const std::vector<std::array<double, 2>> b = random_diagram(5);
    const PersistenceDiagram da = make_diagram(a, 0);
    const PersistenceDiagram db = make_diagram(b, 0);

    CHECK(diagram_bottleneck(da, db) ==
          doctest::Approx(oracles::brute_bottleneck(a, b)).epsilon(1e-9));

    const double p = 1.0 + static_cast<double>(trial % 3);
    const double q = (trial % 2 == 0) ? std::numeric_limits<double>::infinity() : 2.0;
    CHECK(diagram_wasserstein(da, db, p, q) ==
          doctest::Approx(oracles::brute_wasserstein(a, b, p, q)).epsilon(1e-9));

    // sanity: bottleneck never exceeds the 1-Wasserstein cost
    CHECK(diagram_bottleneck(da, db) <=
          diagram_wasserstein(da, db, 1.0, std::numeric_limits<double>::infinity()) + 1e-12);
  }
}
