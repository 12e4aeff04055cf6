#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topodist/geometry.hpp"
#include "topodist/metrics.hpp"

namespace topodist {

enum class Metric { td, fid, kid, gs, bottleneck, wasserstein };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

struct HarnessOptions {
  InfinityPolicy inf_policy{};
  std::size_t i_max = 100;
  std::size_t dim1_cap = kDefaultDim1Cap;
  double wasserstein_p = 1.0;
  double wasserstein_q = std::numeric_limits<double>::infinity();
  int workers = 0;  // 0: TOPODIST_WORKERS env var, else hardware concurrency
};

// Full pairwise score matrix over the concatenated groups A_1..A_k, B_1..B_l,
// plus block summary medians. Per-group representations (longevity vectors,
// Gaussian stats, ...) are computed once; pair evaluation runs in parallel
// and is gathered in index order, so results do not depend on scheduling.
struct MatrixResult {
  std::vector<std::string> labels;
  Eigen::MatrixXd scores;
  std::size_t group_count_a = 0;
  double within_a_median = 0.0;
  double within_b_median = 0.0;
  double within_median = 0.0;  // pooled within-A and within-B pairs
  double cross_median = 0.0;
};

MatrixResult score_matrix(Metric metric, const std::vector<FeatureMatrix>& groups_a,
                          const std::vector<FeatureMatrix>& groups_b,
                          const HarnessOptions& options = {});

// Severity sweep: per severity level, each of `groups` seeded base clouds of
// `group_size` N(0, I_dim) samples is compared against a perturbed copy of
// itself and the scores are averaged.
enum class Perturbation {
  gaussian_noise,  // additive N(0, severity^2 I)
  constant_noise,  // additive N(0, 0.25^2 I) regardless of severity (control)
};

struct SweepPoint {
  double severity = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std over groups
};

std::vector<SweepPoint> noise_sweep(Metric metric, const std::vector<double>& severities,
                                    std::size_t groups, std::size_t group_size, std::size_t dim,
                                    std::uint64_t seed,
                                    Perturbation perturbation = Perturbation::gaussian_noise,
                                    const HarnessOptions& options = {});

}  // namespace topodist
