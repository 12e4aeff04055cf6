#include "topodist/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "topodist/datagen.hpp"
#include "topodist/persistence.hpp"

namespace topodist {

namespace {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TOPODIST_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(0..count-1) on a small thread pool. Tasks must be independent;
// outputs are indexed, so scheduling cannot change results.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

// Per-group representation reused across pairs; only the fields the chosen
// metric needs are filled in.
struct GroupRep {
  LongevityVector longs;
  GaussianStats stats;
  double kid_within = 0.0;
  Eigen::VectorXd rlt_values;
  PersistenceDiagram diagram;
};

class PairScorer {
 public:
  PairScorer(Metric metric, std::vector<const FeatureMatrix*> groups, const HarnessOptions& options)
      : metric_(metric), groups_(std::move(groups)), options_(options), reps_(groups_.size()) {
    const int workers = resolve_workers(options_.workers);
    parallel_for(groups_.size(), workers, [&](std::size_t g) { prepare(g); });
  }

  double score(std::size_t i, std::size_t j) const {
    switch (metric_) {
      case Metric::td:
        return td_from_longevity(reps_[i].longs, reps_[j].longs, options_.inf_policy);
      case Metric::fid:
        return fid(reps_[i].stats, reps_[j].stats);
      case Metric::kid:
        return reps_[i].kid_within + reps_[j].kid_within -
               2.0 * kid_cross(groups_[i]->values(), groups_[j]->values());
      case Metric::gs:
        return (reps_[i].rlt_values - reps_[j].rlt_values).norm();
      case Metric::bottleneck:
        return diagram_bottleneck(reps_[i].diagram, reps_[j].diagram);
      case Metric::wasserstein:
        return diagram_wasserstein(reps_[i].diagram, reps_[j].diagram, options_.wasserstein_p,
                                   options_.wasserstein_q);
    }
    throw Error(ErrorCode::invalid_argument, "unknown metric");
  }

 private:
  void prepare(std::size_t g) {
    const FeatureMatrix& features = *groups_[g];
    switch (metric_) {
      case Metric::td:
        reps_[g].longs = longevity(persistence_dim0(build_filtration(pairwise_distances(features))));
        break;
      case Metric::fid:
        reps_[g].stats = estimate_gaussian(features);
        break;
      case Metric::kid: {
        if (features.count() < 2) {
          throw Error(ErrorCode::insufficient_samples, "KID needs at least two samples per group");
        }
        const Eigen::MatrixXd& x = features.values();
        const double d = static_cast<double>(x.cols());
        Eigen::ArrayXXd k = ((x * x.transpose()).array() / d + 1.0).cube();
        const double n = static_cast<double>(x.rows());
        reps_[g].kid_within = (k.sum() - k.matrix().diagonal().sum()) / (n * (n - 1.0));
        break;
      }
      case Metric::gs: {
        const RLTVector v = rlt(pairwise_distances(features), options_.i_max, options_.dim1_cap);
        reps_[g].rlt_values =
            Eigen::Map<const Eigen::VectorXd>(v.values.data(), static_cast<Eigen::Index>(v.values.size()));
        break;
      }
      case Metric::bottleneck:
      case Metric::wasserstein:
        reps_[g].diagram = persistence_dim0(build_filtration(pairwise_distances(features)));
        break;
    }
  }

  double kid_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
    const double d = static_cast<double>(x.cols());
    Eigen::ArrayXXd k = ((x * y.transpose()).array() / d + 1.0).cube();
    return k.sum() / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
  }

  Metric metric_;
  std::vector<const FeatureMatrix*> groups_;
  HarnessOptions options_;
  std::vector<GroupRep> reps_;
};

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "td") return Metric::td;
  if (name == "fid") return Metric::fid;
  if (name == "kid") return Metric::kid;
  if (name == "gs") return Metric::gs;
  if (name == "bottleneck") return Metric::bottleneck;
  if (name == "wasserstein") return Metric::wasserstein;
  throw Error(ErrorCode::invalid_argument, "unknown metric: " + name);
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::td: return "td";
    case Metric::fid: return "fid";
    case Metric::kid: return "kid";
    case Metric::gs: return "gs";
    case Metric::bottleneck: return "bottleneck";
    case Metric::wasserstein: return "wasserstein";
  }
  return "unknown";
}

MatrixResult score_matrix(Metric metric, const std::vector<FeatureMatrix>& groups_a,
                          const std::vector<FeatureMatrix>& groups_b,
                          const HarnessOptions& options) {
  if (groups_a.size() < 2 || groups_b.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "score matrices need at least two groups per side");
  }
  std::vector<const FeatureMatrix*> groups;
  for (const FeatureMatrix& g : groups_a) groups.push_back(&g);
  for (const FeatureMatrix& g : groups_b) groups.push_back(&g);

  auto group_label = [&](std::size_t g) {
    return g < groups_a.size() ? "A" + std::to_string(g + 1)
                               : "B" + std::to_string(g - groups_a.size() + 1);
  };
  const Eigen::Index m0 = groups.front()->dim();
  for (std::size_t g = 1; g < groups.size(); ++g) {
    if (groups[g]->dim() != m0) {
      throw Error(ErrorCode::dimension_mismatch,
                  "groups must share a feature dimension; group " + group_label(g) + " has " +
                      std::to_string(groups[g]->dim()) + " instead of " + std::to_string(m0));
    }
  }
  if (metric == Metric::td) {
    const Eigen::Index n0 = groups.front()->count();
    for (std::size_t g = 1; g < groups.size(); ++g) {
      if (groups[g]->count() != n0) {
        throw Error(ErrorCode::sample_count_mismatch,
                    "td needs equal sample counts across groups; group " + group_label(g) +
                        " has " + std::to_string(groups[g]->count()) + " instead of " +
                        std::to_string(n0));
      }
    }
  }

  PairScorer scorer(metric, groups, options);
  const std::size_t k = groups.size();

  std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) index_pairs.emplace_back(i, j);
  }
  std::vector<double> pair_scores(index_pairs.size());
  parallel_for(index_pairs.size(), resolve_workers(options.workers), [&](std::size_t t) {
    pair_scores[t] = scorer.score(index_pairs[t].first, index_pairs[t].second);
  });

  MatrixResult result;
  result.group_count_a = groups_a.size();
  result.scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t t = 0; t < index_pairs.size(); ++t) {
    const auto [i, j] = index_pairs[t];
    result.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pair_scores[t];
    result.scores(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = pair_scores[t];
  }
  for (std::size_t g = 0; g < k; ++g) {
    result.labels.push_back(g < groups_a.size() ? "A" + std::to_string(g + 1)
                                                : "B" + std::to_string(g - groups_a.size() + 1));
  }

  std::vector<double> within_a, within_b, cross;
  const std::size_t ka = groups_a.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double s = result.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (j < ka) {
        within_a.push_back(s);
      } else if (i >= ka) {
        within_b.push_back(s);
      } else {
        cross.push_back(s);
      }
    }
  }
  std::vector<double> within = within_a;
  within.insert(within.end(), within_b.begin(), within_b.end());
  result.within_a_median = median(std::move(within_a));
  result.within_b_median = median(std::move(within_b));
  result.within_median = median(std::move(within));
  result.cross_median = median(std::move(cross));
  return result;
}

std::vector<SweepPoint> noise_sweep(Metric metric, const std::vector<double>& severities,
                                    std::size_t groups, std::size_t group_size, std::size_t dim,
                                    std::uint64_t seed, Perturbation perturbation,
                                    const HarnessOptions& options) {
  if (severities.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "sweeps need at least two severity levels");
  }
  if (groups < 1 || group_size < 2 || dim < 1) {
    throw Error(ErrorCode::invalid_argument, "sweep group shape is degenerate");
  }

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

  std::vector<FeatureMatrix> bases;
  bases.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    bases.push_back(sample_gaussian(zero, identity, group_size, derive_seed(seed, 0, g)));
  }

  const std::size_t tasks = severities.size() * groups;
  std::vector<double> scores(tasks, 0.0);
  parallel_for(tasks, resolve_workers(options.workers), [&](std::size_t t) {
    const std::size_t s = t / groups;
    const std::size_t g = t % groups;
    const double sigma =
        perturbation == Perturbation::constant_noise ? 0.25 : severities[s];
    const FeatureMatrix noise =
        sample_gaussian(zero, identity, group_size, derive_seed(seed, s + 1, g));
    FeatureMatrix perturbed(bases[g].values() + sigma * noise.values());

    double value = 0.0;
    switch (metric) {
      case Metric::td:
        value = td(bases[g], perturbed, options.inf_policy);
        break;
      case Metric::fid:
        value = fid(estimate_gaussian(bases[g]), estimate_gaussian(perturbed));
        break;
      case Metric::kid:
        value = kid(bases[g], perturbed);
        break;
      case Metric::gs:
        value = gs({pairwise_distances(bases[g])}, {pairwise_distances(perturbed)}, options.i_max,
                   options.dim1_cap);
        break;
      case Metric::bottleneck:
        value = diagram_bottleneck(persistence_dim0(build_filtration(pairwise_distances(bases[g]))),
                                   persistence_dim0(build_filtration(pairwise_distances(perturbed))));
        break;
      case Metric::wasserstein:
        value = diagram_wasserstein(
            persistence_dim0(build_filtration(pairwise_distances(bases[g]))),
            persistence_dim0(build_filtration(pairwise_distances(perturbed))),
            options.wasserstein_p, options.wasserstein_q);
        break;
    }
    scores[t] = value;
  });

  std::vector<SweepPoint> out;
  out.reserve(severities.size());
  for (std::size_t s = 0; s < severities.size(); ++s) {
    double mean = 0.0;
    for (std::size_t g = 0; g < groups; ++g) mean += scores[s * groups + g];
    mean /= static_cast<double>(groups);
    double var = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      const double d = scores[s * groups + g] - mean;
      var += d * d;
    }
    const double stddev = groups > 1 ? std::sqrt(var / static_cast<double>(groups - 1)) : 0.0;
    out.push_back({severities[s], mean, stddev});
  }
  return out;
}

}  // namespace topodist
