#include "topodist/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "matching.hpp"

namespace topodist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DiagramPoint {
  double birth;
  double death;
};

struct SplitDiagram {
  std::vector<DiagramPoint> finite;
  std::size_t infinite_count = 0;
};

void require_same_dimension(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
  int dim = -1;
  for (const PersistenceDiagram* d : {&d1, &d2}) {
    for (const PersistencePair& p : d->pairs) {
      if (dim == -1) dim = p.dim;
      if (p.dim != dim) {
        throw Error(ErrorCode::mixed_dimension_diagram,
                    "diagram distances require a single common homology dimension");
      }
    }
  }
}

SplitDiagram split_finite(const PersistenceDiagram& d) {
  SplitDiagram out;
  for (const PersistencePair& p : d.pairs) {
    if (std::isinf(p.death)) {
      ++out.infinite_count;
    } else {
      out.finite.push_back({p.birth, p.death});
    }
  }
  return out;
}

double linf_cost(const DiagramPoint& a, const DiagramPoint& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_cost_linf(const DiagramPoint& a) { return 0.5 * (a.death - a.birth); }

// Feasibility of bottleneck cost c: every point farther than c from the
// diagonal must be matched to a point of the other diagram within c. Points
// near the diagonal are absorbed by it for free, so alternating paths may
// also end by dropping such a matched point back onto the diagonal.
class BottleneckMatcher {
 public:
  BottleneckMatcher(const std::vector<DiagramPoint>& a, const std::vector<DiagramPoint>& b)
      : a_(a), b_(b) {}

  bool feasible(double c) {
    match_a_.assign(a_.size(), -1);
    match_b_.assign(b_.size(), -1);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (diagonal_cost_linf(a_[i]) <= c) continue;
      seen_b_.assign(b_.size(), 0);
      if (!augment_left(static_cast<int>(i), c)) return false;
    }
    for (std::size_t j = 0; j < b_.size(); ++j) {
      if (diagonal_cost_linf(b_[j]) <= c || match_b_[j] != -1) continue;
      seen_a_.assign(a_.size(), 0);
      if (!augment_right(static_cast<int>(j), c)) return false;
    }
    return true;
  }

 private:
  bool augment_left(int i, double c) {
    for (std::size_t j = 0; j < b_.size(); ++j) {
      if (seen_b_[j] || linf_cost(a_[i], b_[j]) > c) continue;
      seen_b_[j] = 1;
      const int prev = match_b_[j];
      if (prev == -1 || diagonal_cost_linf(a_[prev]) <= c || augment_left(prev, c)) {
        if (prev != -1 && match_a_[prev] == static_cast<int>(j)) match_a_[prev] = -1;
        match_b_[j] = i;
        match_a_[i] = static_cast<int>(j);
        return true;
      }
    }
    return false;
  }

  bool augment_right(int j, double c) {
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (seen_a_[i] || linf_cost(a_[i], b_[j]) > c) continue;
      seen_a_[i] = 1;
      const int prev = match_a_[i];
      if (prev == -1 || diagonal_cost_linf(b_[prev]) <= c || augment_right(prev, c)) {
        if (prev != -1 && match_b_[prev] == static_cast<int>(i)) match_b_[prev] = -1;
        match_a_[i] = j;
        match_b_[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  }

  const std::vector<DiagramPoint>& a_;
  const std::vector<DiagramPoint>& b_;
  std::vector<int> match_a_, match_b_;
  std::vector<char> seen_a_, seen_b_;
};

// Mean kernel value over ordered within-set pairs with i != j.
double kernel_mean_offdiagonal(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  Eigen::ArrayXXd k = ((x * x.transpose()).array() / d + 1.0).cube();
  const double off_sum = k.sum() - k.matrix().diagonal().sum();
  return off_sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double kernel_mean_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const double d = static_cast<double>(x.cols());
  Eigen::ArrayXXd k = ((x * y.transpose()).array() / d + 1.0).cube();
  return k.sum() / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

}  // namespace

double td_from_longevity(const LongevityVector& a, const LongevityVector& b,
                         const InfinityPolicy& policy) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::sample_count_mismatch,
                "longevity vectors have different lengths (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (!(policy.factor > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "infinity policy factor must be positive");
  }
  double max_finite = 0.0;
  for (const std::vector<double>* v : {&a.values, &b.values}) {
    for (double t : *v) {
      if (std::isfinite(t)) max_finite = std::max(max_finite, t);
    }
  }
  const double infinite_gap = policy.factor * max_finite;

  double sum_sq = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double x = a.values[i];
    const double y = b.values[i];
    double diff;
    if (std::isinf(x) && std::isinf(y)) {
      diff = 0.0;
    } else if (std::isinf(x) || std::isinf(y)) {
      diff = infinite_gap;
    } else {
      diff = x - y;
    }
    sum_sq += diff * diff;
  }
  return std::sqrt(sum_sq);
}

double td(const FeatureMatrix& features_real, const FeatureMatrix& features_gen,
          const InfinityPolicy& policy) {
  if (features_real.count() != features_gen.count()) {
    throw Error(ErrorCode::sample_count_mismatch,
                "topology distance requires equal sample counts (" +
                    std::to_string(features_real.count()) + " vs " +
                    std::to_string(features_gen.count()) + ")");
  }
  if (features_real.dim() != features_gen.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "topology distance requires equal feature dimensions");
  }
  const LongevityVector lr = longevity(persistence_dim0(build_filtration(pairwise_distances(features_real))));
  const LongevityVector lg = longevity(persistence_dim0(build_filtration(pairwise_distances(features_gen))));
  return td_from_longevity(lr, lg, policy);
}

double fid(const GaussianStats& stats_real, const GaussianStats& stats_gen) {
  const Eigen::Index m = stats_real.mean.size();
  if (stats_gen.mean.size() != m || stats_real.cov.rows() != m || stats_real.cov.cols() != m ||
      stats_gen.cov.rows() != m || stats_gen.cov.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch, "Gaussian stats dimensions do not match");
  }
  {
    const double scale = std::max(1.0, stats_gen.cov.cwiseAbs().maxCoeff());
    if ((stats_gen.cov - stats_gen.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw Error(ErrorCode::asymmetric_matrix, "covariance matrix is not symmetric");
    }
  }
  const Eigen::MatrixXd root_real = spd_sqrt(stats_real.cov);
  Eigen::MatrixXd inner = root_real * stats_gen.cov * root_real;
  inner = 0.5 * (inner + inner.transpose().eval());
  const Eigen::MatrixXd cross_root = spd_sqrt(inner);

  const double value = (stats_real.mean - stats_gen.mean).squaredNorm() + stats_real.cov.trace() +
                       stats_gen.cov.trace() - 2.0 * cross_root.trace();
  return std::max(value, 0.0);
}

double kid(const FeatureMatrix& features_real, const FeatureMatrix& features_gen) {
  if (features_real.dim() != features_gen.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "KID requires equal feature dimensions");
  }
  if (features_real.count() < 2 || features_gen.count() < 2) {
    throw Error(ErrorCode::insufficient_samples, "KID needs at least two samples per set");
  }
  const double within_real = kernel_mean_offdiagonal(features_real.values());
  const double within_gen = kernel_mean_offdiagonal(features_gen.values());
  const double cross = kernel_mean_cross(features_real.values(), features_gen.values());
  return within_real + within_gen - 2.0 * cross;
}

ProbabilityMatrix::ProbabilityMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) {
    throw Error(ErrorCode::invalid_probability_rows, "probability matrix must be nonempty");
  }
  if (!rows_.allFinite()) {
    throw Error(ErrorCode::invalid_probability_rows, "probability matrix has non-finite entries");
  }
  if ((rows_.array() < 0.0).any() || (rows_.array() > 1.0).any()) {
    throw Error(ErrorCode::invalid_probability_rows, "probabilities must lie in [0, 1]");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (std::abs(rows_.row(i).sum() - 1.0) > 1e-9) {
      throw Error(ErrorCode::invalid_probability_rows,
                  "probability row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

double inception_score(const ProbabilityMatrix& probs) {
  const Eigen::MatrixXd& p = probs.rows();
  const Eigen::Index n = p.rows();
  const Eigen::Index c = p.cols();
  const Eigen::VectorXd marginal = p.colwise().mean();

  double total_kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double kl = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) {
      const double pij = p(i, j);
      if (pij > 0.0) kl += pij * std::log(pij / marginal(j));  // 0 log 0 := 0
    }
    total_kl += kl;
  }
  // KL is nonnegative and the mean is bounded by log(c); clamp roundoff so
  // the score stays in [1, c].
  const double mean_kl =
      std::clamp(total_kl / static_cast<double>(n), 0.0, std::log(static_cast<double>(c)));
  return std::exp(mean_kl);
}

SplitScore inception_score_splits(const ProbabilityMatrix& probs, std::size_t splits) {
  const Eigen::Index n = probs.count();
  if (splits < 1 || static_cast<Eigen::Index>(splits) > n) {
    throw Error(ErrorCode::invalid_argument, "split count must be between 1 and the sample count");
  }
  std::vector<double> scores;
  scores.reserve(splits);
  const Eigen::Index base = n / static_cast<Eigen::Index>(splits);
  Eigen::Index remainder = n % static_cast<Eigen::Index>(splits);
  Eigen::Index start = 0;
  for (std::size_t s = 0; s < splits; ++s) {
    const Eigen::Index len = base + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
    scores.push_back(inception_score(ProbabilityMatrix(probs.rows().middleRows(start, len))));
    start += len;
  }
  SplitScore out;
  out.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(splits);
  double var = 0.0;
  for (double s : scores) var += (s - out.mean) * (s - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(splits));
  return out;
}

RLTVector rlt(const DistanceMatrix& dist, std::size_t i_max, std::size_t max_points) {
  if (i_max < 1) {
    throw Error(ErrorCode::invalid_argument, "RLT truncation length must be at least 1");
  }
  const Eigen::Index n = dist.count();
  if (n < 2) {
    throw Error(ErrorCode::degenerate_input, "RLT needs at least two points");
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) values.push_back(dist(i, j));
  }
  std::sort(values.begin(), values.end());
  const double d_max = values.back();

  RLTVector out;
  out.values.assign(i_max, 0.0);
  if (d_max == 0.0) return out;  // all points coincide; the filtration has no extent

  const PersistenceDiagram diagram = persistence_dim1(dist, d_max, max_points);
  std::vector<double> births, deaths;
  for (const PersistencePair& p : diagram.pairs) {
    births.push_back(p.birth);
    if (!std::isinf(p.death)) deaths.push_back(p.death);
  }
  std::sort(births.begin(), births.end());
  std::sort(deaths.begin(), deaths.end());

  // Sweep the intervals between consecutive filtration values, keeping a
  // running count of classes alive on [prev, v).
  std::size_t b_idx = 0, d_idx = 0;
  double prev = 0.0;
  for (double v : values) {
    if (v > prev) {
      while (b_idx < births.size() && births[b_idx] <= prev) ++b_idx;
      while (d_idx < deaths.size() && deaths[d_idx] <= prev) ++d_idx;
      const std::size_t rank = b_idx - d_idx;
      const double mass = (v - prev) / d_max;
      if (rank == 0) {
        out.residual_rank0 += mass;
      } else if (rank <= i_max) {
        out.values[rank - 1] += mass;
      } else {
        out.residual_overflow += mass;
      }
    }
    prev = v;
  }
  return out;
}

double gs(const std::vector<DistanceMatrix>& clouds_real,
          const std::vector<DistanceMatrix>& clouds_gen, std::size_t i_max,
          std::size_t max_points) {
  if (clouds_real.empty() || clouds_gen.empty()) {
    throw Error(ErrorCode::invalid_argument, "geometry score needs at least one cloud per side");
  }
  auto mean_rlt = [&](const std::vector<DistanceMatrix>& clouds) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(i_max));
    for (const DistanceMatrix& cloud : clouds) {
      const RLTVector v = rlt(cloud, i_max, max_points);
      for (std::size_t k = 0; k < i_max; ++k) mean(static_cast<Eigen::Index>(k)) += v.values[k];
    }
    return Eigen::VectorXd(mean / static_cast<double>(clouds.size()));
  };
  return (mean_rlt(clouds_real) - mean_rlt(clouds_gen)).norm();
}

double diagram_bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2) {
  require_same_dimension(d1, d2);
  const SplitDiagram a = split_finite(d1);
  const SplitDiagram b = split_finite(d2);
  if (a.infinite_count != b.infinite_count) return kInf;
  if (a.finite.empty() && b.finite.empty()) return 0.0;

  std::vector<double> candidates = {0.0};
  for (const DiagramPoint& p : a.finite) candidates.push_back(diagonal_cost_linf(p));
  for (const DiagramPoint& p : b.finite) candidates.push_back(diagonal_cost_linf(p));
  for (const DiagramPoint& p : a.finite) {
    for (const DiagramPoint& q : b.finite) candidates.push_back(linf_cost(p, q));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  BottleneckMatcher matcher(a.finite, b.finite);
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (matcher.feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

double diagram_wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double p,
                           double q) {
  if (!(p >= 1.0) || std::isinf(p)) {
    throw Error(ErrorCode::invalid_argument,
                "Wasserstein power p must be finite and >= 1 (use the bottleneck distance for p = inf)");
  }
  if (!(q >= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "inner norm q must be >= 1");
  }
  require_same_dimension(d1, d2);
  const SplitDiagram a = split_finite(d1);
  const SplitDiagram b = split_finite(d2);
  if (a.infinite_count != b.infinite_count) return kInf;

  const Eigen::Index k1 = static_cast<Eigen::Index>(a.finite.size());
  const Eigen::Index k2 = static_cast<Eigen::Index>(b.finite.size());
  const Eigen::Index total = k1 + k2;
  if (total == 0) return 0.0;

  auto qnorm = [q](const DiagramPoint& u, const DiagramPoint& v) {
    const double db = std::abs(u.birth - v.birth);
    const double dd = std::abs(u.death - v.death);
    if (std::isinf(q)) return std::max(db, dd);
    return std::pow(std::pow(db, q) + std::pow(dd, q), 1.0 / q);
  };
  // Closest diagonal point is the orthogonal projection; its q-distance is
  // (death - birth)/2 times 2^(1/q).
  auto diag_qnorm = [q](const DiagramPoint& u) {
    const double half = 0.5 * (u.death - u.birth);
    if (std::isinf(q)) return half;
    return half * std::pow(2.0, 1.0 / q);
  };

  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(total, total);
  for (Eigen::Index i = 0; i < k1; ++i) {
    const double to_diag = std::pow(diag_qnorm(a.finite[i]), p);
    for (Eigen::Index j = 0; j < k2; ++j) {
      cost(i, j) = std::pow(qnorm(a.finite[i], b.finite[j]), p);
    }
    for (Eigen::Index j = k2; j < total; ++j) cost(i, j) = to_diag;
  }
  for (Eigen::Index i = k1; i < total; ++i) {
    for (Eigen::Index j = 0; j < k2; ++j) {
      cost(i, j) = std::pow(diag_qnorm(b.finite[j]), p);
    }
  }
  const double best = std::max(detail::solve_assignment(cost), 0.0);
  return std::pow(best, 1.0 / p);
}

}  // namespace topodist
