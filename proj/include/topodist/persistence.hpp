#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "topodist/geometry.hpp"

namespace topodist {

constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

struct FiltrationEdge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  double weight = 0.0;
};

// Edge filtration of the complete graph on a point cloud: all n(n-1)/2 edges
// sorted by (weight, u, v). connect_threshold is the scale at which the
// 1-skeleton first becomes connected, i.e. the largest MST edge weight.
class Filtration {
 public:
  Filtration(std::size_t vertex_count, std::vector<FiltrationEdge> edges, double connect_threshold)
      : vertex_count_(vertex_count), edges_(std::move(edges)), connect_threshold_(connect_threshold) {}

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<FiltrationEdge>& edges() const { return edges_; }
  double connect_threshold() const { return connect_threshold_; }

 private:
  std::size_t vertex_count_;
  std::vector<FiltrationEdge> edges_;
  double connect_threshold_;
};

Filtration build_filtration(const DistanceMatrix& dist);

struct PersistencePair {
  double birth = 0.0;
  double death = kInfiniteDeath;
  int dim = 0;
};

struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  std::size_t n_points = 0;
};

// The dimension-1 computation walks all O(n^3) triangles, so the input size
// is capped; callers are told to subsample past this.
inline constexpr std::size_t kDefaultDim1Cap = 256;

// Dimension-0 persistence of the Vietoris-Rips filtration. All classes are
// born at 0; the finite deaths are the MST edge weights (one merge per edge
// accepted by the elder rule) and exactly one class survives forever.
PersistenceDiagram persistence_dim0(const Filtration& filt);

// Dimension-1 persistence of the Vietoris-Rips filtration restricted to
// scales <= max_scale, by boundary-matrix column reduction over Z/2 with
// simplices ordered by (value, dimension, lexicographic vertices). Classes
// still alive at max_scale get death = +inf.
PersistenceDiagram persistence_dim1(const DistanceMatrix& dist, double max_scale,
                                    std::size_t max_points = kDefaultDim1Cap);

// Living times (death - birth) sorted ascending, infinite entries last.
struct LongevityVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

LongevityVector longevity(const PersistenceDiagram& diagram);

}  // namespace topodist
