#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "topodist/datagen.hpp"
#include "topodist/geometry.hpp"
#include "topodist/io.hpp"
#include "topodist/metrics.hpp"
#include "topodist/persistence.hpp"

namespace py = pybind11;
using namespace topodist;

namespace {

// Diagrams cross the boundary as (k, 2) arrays of [birth, death] rows with
// inf for never-dying classes, plus the homology dimension.
Eigen::MatrixXd diagram_to_array(const PersistenceDiagram& diagram) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(diagram.pairs.size()), 2);
  for (std::size_t i = 0; i < diagram.pairs.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = diagram.pairs[i].birth;
    out(static_cast<Eigen::Index>(i), 1) = diagram.pairs[i].death;
  }
  return out;
}

PersistenceDiagram diagram_from_array(const Eigen::MatrixXd& pairs, int dim, std::size_t n_points) {
  if (pairs.size() > 0 && pairs.cols() != 2) {
    throw Error(ErrorCode::invalid_argument, "diagram arrays must have two columns");
  }
  PersistenceDiagram diagram;
  diagram.n_points = n_points;
  for (Eigen::Index i = 0; i < pairs.rows(); ++i) {
    diagram.pairs.push_back({pairs(i, 0), pairs(i, 1), dim});
  }
  return diagram;
}

}  // namespace

PYBIND11_MODULE(_topodist, m) {
  m.doc() = "Topology distance and related metrics between feature point clouds";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "TopodistError");

  m.def(
      "pairwise_distances",
      [](const Eigen::MatrixXd& points) {
        return pairwise_distances(FeatureMatrix(points)).entries();
      },
      py::arg("points"), "Euclidean distance matrix between rows.");

  m.def(
      "persistence_dim0",
      [](const Eigen::MatrixXd& dist) {
        return diagram_to_array(persistence_dim0(build_filtration(DistanceMatrix(dist))));
      },
      py::arg("dist"), "Dimension-0 persistence pairs of the Rips filtration.");

  m.def(
      "persistence_dim1",
      [](const Eigen::MatrixXd& dist, double max_scale, std::size_t max_points) {
        return diagram_to_array(persistence_dim1(DistanceMatrix(dist), max_scale, max_points));
      },
      py::arg("dist"), py::arg("max_scale"), py::arg("max_points") = kDefaultDim1Cap,
      "Dimension-1 persistence pairs up to max_scale.");

  m.def(
      "longevity_vector",
      [](const Eigen::MatrixXd& points) {
        const LongevityVector v =
            longevity(persistence_dim0(build_filtration(pairwise_distances(FeatureMatrix(points)))));
        return v.values;
      },
      py::arg("points"), "Sorted dimension-0 living times of a point cloud.");

  m.def(
      "connect_threshold",
      [](const Eigen::MatrixXd& dist) {
        return build_filtration(DistanceMatrix(dist)).connect_threshold();
      },
      py::arg("dist"), "Scale at which the Rips 1-skeleton becomes connected.");

  m.def(
      "td",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double inf_factor) {
        return td(FeatureMatrix(a), FeatureMatrix(b), InfinityPolicy{inf_factor});
      },
      py::arg("a"), py::arg("b"), py::arg("inf_factor") = 1.05,
      "Topology distance between two feature clouds.");

  m.def(
      "fid",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return fid(estimate_gaussian(FeatureMatrix(a)), estimate_gaussian(FeatureMatrix(b)));
      },
      py::arg("a"), py::arg("b"), "Frechet distance between Gaussian fits of two clouds.");

  m.def(
      "fid_from_stats",
      [](const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a, const Eigen::VectorXd& mean_b,
         const Eigen::MatrixXd& cov_b) {
        return fid(GaussianStats{mean_a, cov_a}, GaussianStats{mean_b, cov_b});
      },
      py::arg("mean_a"), py::arg("cov_a"), py::arg("mean_b"), py::arg("cov_b"));

  m.def(
      "kid",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return kid(FeatureMatrix(a), FeatureMatrix(b));
      },
      py::arg("a"), py::arg("b"), "Unbiased squared MMD under the cubic polynomial kernel.");

  m.def(
      "inception_score",
      [](const Eigen::MatrixXd& probs) { return inception_score(ProbabilityMatrix(probs)); },
      py::arg("probs"));

  m.def(
      "inception_score_splits",
      [](const Eigen::MatrixXd& probs, std::size_t splits) {
        const SplitScore s = inception_score_splits(ProbabilityMatrix(probs), splits);
        return py::make_tuple(s.mean, s.stddev);
      },
      py::arg("probs"), py::arg("splits"));

  m.def(
      "rlt",
      [](const Eigen::MatrixXd& dist, std::size_t i_max, std::size_t max_points) {
        const RLTVector v = rlt(DistanceMatrix(dist), i_max, max_points);
        py::dict out;
        out["values"] = v.values;
        out["residual_rank0"] = v.residual_rank0;
        out["residual_overflow"] = v.residual_overflow;
        return out;
      },
      py::arg("dist"), py::arg("i_max") = 100, py::arg("max_points") = kDefaultDim1Cap,
      "Relative living-times histogram over dimension-1 ranks.");

  m.def(
      "gs",
      [](const std::vector<Eigen::MatrixXd>& dists_a, const std::vector<Eigen::MatrixXd>& dists_b,
         std::size_t i_max) {
        std::vector<DistanceMatrix> a, b;
        for (const Eigen::MatrixXd& d : dists_a) a.emplace_back(d);
        for (const Eigen::MatrixXd& d : dists_b) b.emplace_back(d);
        return gs(a, b, i_max);
      },
      py::arg("dists_a"), py::arg("dists_b"), py::arg("i_max") = 100,
      "Geometry score between two lists of distance matrices.");

  m.def(
      "bottleneck_distance",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int dim) {
        return diagram_bottleneck(diagram_from_array(a, dim, 0), diagram_from_array(b, dim, 0));
      },
      py::arg("a"), py::arg("b"), py::arg("dim") = 0,
      "Bottleneck distance between diagrams given as (k, 2) arrays.");

  m.def(
      "wasserstein_distance",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double p, double q, int dim) {
        return diagram_wasserstein(diagram_from_array(a, dim, 0), diagram_from_array(b, dim, 0), p,
                                   q);
      },
      py::arg("a"), py::arg("b"), py::arg("p") = 1.0,
      py::arg("q") = std::numeric_limits<double>::infinity(), py::arg("dim") = 0);

  m.def(
      "sample_gaussian",
      [](const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t n,
         std::uint64_t seed) { return sample_gaussian(mean, cov, n, seed).values(); },
      py::arg("mean"), py::arg("cov"), py::arg("n"), py::arg("seed"));

  m.def(
      "sample_matched_mixture",
      [](const Eigen::VectorXd& offset, const Eigen::MatrixXd& component_cov, std::size_t n,
         std::uint64_t seed) {
        return sample_matched_mixture(MixtureSpec{offset, component_cov}, n, seed).values();
      },
      py::arg("offset"), py::arg("component_cov"), py::arg("n"), py::arg("seed"),
      "Balanced mixture at +/- offset whose overall moments match a single Gaussian.");

  m.def(
      "read_features",
      [](const std::string& path, const std::string& format) {
        return io::read_features(path, io::parse_format(format)).values();
      },
      py::arg("path"), py::arg("format") = "binary");

  m.def(
      "write_features",
      [](const Eigen::MatrixXd& values, const std::string& path, const std::string& format) {
        io::write_features(FeatureMatrix(values), path, io::parse_format(format));
      },
      py::arg("values"), py::arg("path"), py::arg("format") = "binary");
}
