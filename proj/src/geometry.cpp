#include "topodist/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace topodist {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, double tolerance, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + " must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double max_skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (max_skew > tolerance * scale) {
    throw Error(ErrorCode::asymmetric_matrix, std::string(what) + " is not symmetric");
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::invalid_argument, "feature matrix must have at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "feature matrix contains non-finite entries");
  }
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  if (n < 1 || entries_.cols() != n) {
    throw Error(ErrorCode::dimension_mismatch, "distance matrix must be square and nonempty");
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "distance matrix contains non-finite entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) {
      throw Error(ErrorCode::invalid_argument, "distance matrix diagonal must be exactly zero");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw Error(ErrorCode::asymmetric_matrix, "distance matrix must be exactly symmetric");
      }
      if (entries_(i, j) < 0.0) {
        throw Error(ErrorCode::invalid_argument, "distance matrix entries must be nonnegative");
      }
    }
  }
}

DistanceMatrix pairwise_distances(const FeatureMatrix& points) {
  const Eigen::Index n = points.count();
  const Eigen::MatrixXd& x = points.values();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (x.row(i) - x.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return DistanceMatrix(std::move(d));
}

GaussianStats estimate_gaussian(const FeatureMatrix& points) {
  const Eigen::Index n = points.count();
  if (n < 2) {
    throw Error(ErrorCode::insufficient_samples, "covariance estimation needs at least two samples");
  }
  const Eigen::MatrixXd& x = points.values();
  Eigen::VectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose().eval());
  return GaussianStats{std::move(mean), std::move(cov)};
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& matrix) {
  require_symmetric(matrix, 1e-9, "spd_sqrt input");
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::invalid_argument, "eigendecomposition failed");
  }
  Eigen::VectorXd eigenvalues = solver.eigenvalues();
  const double largest = std::max(eigenvalues.maxCoeff(), 0.0);
  if (eigenvalues.minCoeff() < -1e-8 * largest) {
    throw Error(ErrorCode::not_positive_semidefinite, "matrix has significantly negative eigenvalues");
  }
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    eigenvalues(i) = std::sqrt(std::max(eigenvalues(i), 0.0));
  }
  Eigen::MatrixXd root = solver.eigenvectors() * eigenvalues.asDiagonal() * solver.eigenvectors().transpose();
  return 0.5 * (root + root.transpose().eval());
}

}  // namespace topodist
