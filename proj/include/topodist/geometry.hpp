#pragma once

#include <Eigen/Dense>

#include "topodist/errors.hpp"

namespace topodist {

// n x m matrix of feature vectors, one sample per row.
// All entries must be finite; n >= 1 and m >= 1.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd values);

  Eigen::Index count() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

// Symmetric nonnegative n x n matrix with an exactly zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Eigen::MatrixXd entries);

  Eigen::Index count() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

// Mean vector and covariance matrix of a point cloud.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Euclidean distances between all row pairs. Each distance is computed once
// and mirrored, so the result is exactly symmetric.
DistanceMatrix pairwise_distances(const FeatureMatrix& points);

// Column means and unbiased (n-1 divisor) sample covariance. Needs n >= 2.
GaussianStats estimate_gaussian(const FeatureMatrix& points);

// Symmetric square root of a symmetric positive semidefinite matrix via
// eigendecomposition. Eigenvalues below zero (within roundoff of the largest
// one) are clamped to zero; strongly indefinite input is rejected.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& matrix);

}  // namespace topodist
