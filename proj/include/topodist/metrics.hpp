#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "topodist/geometry.hpp"
#include "topodist/persistence.hpp"

namespace topodist {

// How a finite-vs-infinite longevity difference is scored: it is replaced by
// factor * (largest finite longevity across both inputs). Infinite-vs-infinite
// differences are zero.
struct InfinityPolicy {
  double factor = 1.05;
};

// Topology distance: L2 distance between the sorted dimension-0 longevity
// vectors of the two clouds. Requires equal sample counts and dimensions.
double td(const FeatureMatrix& features_real, const FeatureMatrix& features_gen,
          const InfinityPolicy& policy = {});
double td_from_longevity(const LongevityVector& a, const LongevityVector& b,
                         const InfinityPolicy& policy = {});

// Frechet distance between the Gaussian fits:
// |mu_r - mu_g|^2 + tr(S_r + S_g - 2 (S_r S_g)^(1/2)), evaluated through the
// symmetric form (S_r^(1/2) S_g S_r^(1/2))^(1/2) and clamped at zero.
double fid(const GaussianStats& stats_real, const GaussianStats& stats_gen);

// Unbiased squared MMD under the cubic polynomial kernel
// k(x, y) = (x.y / d + 1)^3. Within-set terms average over ordered pairs with
// i != j; the cross term averages over all pairs.
double kid(const FeatureMatrix& features_real, const FeatureMatrix& features_gen);

// n x c matrix of per-sample class probabilities; rows sum to 1.
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(Eigen::MatrixXd rows);

  Eigen::Index count() const { return rows_.rows(); }
  Eigen::Index classes() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// exp(mean KL(p(y|x) || mean_x p(y|x))), single split.
double inception_score(const ProbabilityMatrix& probs);

struct SplitScore {
  double mean = 0.0;
  double stddev = 0.0;  // population std over splits
};

// Splits rows into `splits` consecutive chunks and averages their scores.
SplitScore inception_score_splits(const ProbabilityMatrix& probs, std::size_t splits);

// Relative living times: values[k] is the fraction of the filtration (by
// length, normalized by the largest pairwise distance) during which the
// dimension-1 homology rank equals k+1. Mass at rank 0 and at ranks beyond
// the truncation length is kept out of the vector.
struct RLTVector {
  std::vector<double> values;
  double residual_rank0 = 0.0;
  double residual_overflow = 0.0;
};

RLTVector rlt(const DistanceMatrix& dist, std::size_t i_max = 100,
              std::size_t max_points = kDefaultDim1Cap);

// Geometry score: L2 distance between the per-side means of the RLT vectors.
double gs(const std::vector<DistanceMatrix>& clouds_real,
          const std::vector<DistanceMatrix>& clouds_gen, std::size_t i_max = 100,
          std::size_t max_points = kDefaultDim1Cap);

// Bottleneck distance (min over partial matchings of the max L-inf
// displacement, diagonal projections allowed), exact via binary search over
// candidate costs plus bipartite matching. Diagrams whose infinite-bar counts
// differ are at distance +inf; matching infinite bars costs nothing.
double diagram_bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2);

// q-norm, p-power Wasserstein distance between diagrams with diagonal
// projections, exact via the Hungarian algorithm on the augmented cost
// matrix. p must be finite and >= 1; q may be +inf.
double diagram_wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                           double p, double q);

// One scored comparison, ready for serialization. wall_time_seconds stays
// outside the reproducible payload when written to disk.
struct ScoreReport {
  std::string metric;
  double value = 0.0;
  nlohmann::json metadata;
  double wall_time_seconds = 0.0;
};

}  // namespace topodist
