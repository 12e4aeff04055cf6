#include "topodist/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>

namespace topodist {

namespace {

// Union-find with path halving. Each root tracks the smallest original
// vertex index in its component so merges can apply the elder rule
// deterministically (all classes are born at 0, so ties break by index).
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), eldest_(n) {
    std::iota(parent_.begin(), parent_.end(), 0u);
    std::iota(eldest_.begin(), eldest_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false when both vertices already share a component. Otherwise
  // merges and keeps the smaller eldest index as the surviving class.
  bool merge(std::uint32_t a, std::uint32_t b) {
    std::uint32_t ra = find(a);
    std::uint32_t rb = find(b);
    if (ra == rb) return false;
    if (eldest_[rb] < eldest_[ra]) std::swap(ra, rb);
    parent_[rb] = ra;
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> eldest_;
};

// Symmetric difference of two ascending index vectors (Z/2 column addition).
std::vector<std::uint32_t> xor_merge(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + i, a.end());
  out.insert(out.end(), b.begin() + j, b.end());
  return out;
}

}  // namespace

Filtration build_filtration(const DistanceMatrix& dist) {
  const std::size_t n = static_cast<std::size_t>(dist.count());
  if (n < 2) {
    throw Error(ErrorCode::degenerate_input, "filtration needs at least two points");
  }
  std::vector<FiltrationEdge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      edges.push_back({i, j, dist(i, j)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const FiltrationEdge& a, const FiltrationEdge& b) {
    return std::tie(a.weight, a.u, a.v) < std::tie(b.weight, b.u, b.v);
  });

  DisjointSets components(n);
  std::size_t merges = 0;
  double connect_threshold = 0.0;
  for (const FiltrationEdge& e : edges) {
    if (components.merge(e.u, e.v)) {
      connect_threshold = e.weight;
      if (++merges == n - 1) break;
    }
  }
  return Filtration(n, std::move(edges), connect_threshold);
}

PersistenceDiagram persistence_dim0(const Filtration& filt) {
  const std::size_t n = filt.vertex_count();
  PersistenceDiagram diagram;
  diagram.n_points = n;
  diagram.pairs.reserve(n);

  DisjointSets components(n);
  std::size_t merges = 0;
  for (const FiltrationEdge& e : filt.edges()) {
    if (components.merge(e.u, e.v)) {
      diagram.pairs.push_back({0.0, e.weight, 0});
      if (++merges == n - 1) break;  // fully connected; later edges cannot kill anything
    }
  }
  diagram.pairs.push_back({0.0, kInfiniteDeath, 0});
  return diagram;
}

PersistenceDiagram persistence_dim1(const DistanceMatrix& dist, double max_scale,
                                    std::size_t max_points) {
  const std::size_t n = static_cast<std::size_t>(dist.count());
  if (n > max_points) {
    throw Error(ErrorCode::capacity_exceeded,
                "dimension-1 persistence is capped at " + std::to_string(max_points) +
                    " points; subsample the cloud first");
  }
  if (!(max_scale > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "max_scale must be positive");
  }

  struct Edge {
    double weight;
    std::uint32_t u, v;
  };
  std::vector<Edge> edges;
  std::vector<std::int64_t> edge_index(n * n, -1);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double w = dist(i, j);
      if (w <= max_scale) edges.push_back({w, i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.weight, a.u, a.v) < std::tie(b.weight, b.u, b.v);
  });
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_index[edges[e].u * n + edges[e].v] = static_cast<std::int64_t>(e);
  }

  // Edges that do not merge two components create 1-cycles; only these can
  // give birth to dimension-1 classes.
  std::vector<char> creates_cycle(edges.size(), 0);
  {
    DisjointSets components(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!components.merge(edges[e].u, edges[e].v)) creates_cycle[e] = 1;
    }
  }

  struct Triangle {
    double weight;
    std::uint32_t a, b, c;
  };
  std::vector<Triangle> triangles;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double wab = dist(a, b);
      if (wab > max_scale) continue;
      for (std::uint32_t c = b + 1; c < n; ++c) {
        const double w = std::max({wab, dist(a, c), dist(b, c)});
        if (w <= max_scale) triangles.push_back({w, a, b, c});
      }
    }
  }
  std::sort(triangles.begin(), triangles.end(), [](const Triangle& x, const Triangle& y) {
    return std::tie(x.weight, x.a, x.b, x.c) < std::tie(y.weight, y.a, y.b, y.c);
  });

  // Column reduction of the triangle boundary matrix. The dimension-0 pairing
  // is done by union-find above, so no edge column is ever reduced (the twist
  // shortcut: columns killed by dimension-1 pivots are skipped wholesale).
  PersistenceDiagram diagram;
  diagram.n_points = n;
  std::unordered_map<std::uint32_t, std::uint32_t> pivot_owner;
  std::vector<std::vector<std::uint32_t>> reduced_columns;
  pivot_owner.reserve(triangles.size());

  for (const Triangle& t : triangles) {
    std::vector<std::uint32_t> column = {
        static_cast<std::uint32_t>(edge_index[t.a * n + t.b]),
        static_cast<std::uint32_t>(edge_index[t.a * n + t.c]),
        static_cast<std::uint32_t>(edge_index[t.b * n + t.c])};
    std::sort(column.begin(), column.end());
    while (!column.empty()) {
      auto it = pivot_owner.find(column.back());
      if (it == pivot_owner.end()) break;
      column = xor_merge(column, reduced_columns[it->second]);
    }
    if (column.empty()) continue;  // creates a 2-cycle; irrelevant for H1
    const std::uint32_t pivot = column.back();
    pivot_owner.emplace(pivot, static_cast<std::uint32_t>(reduced_columns.size()));
    reduced_columns.push_back(std::move(column));
    const double birth = edges[pivot].weight;
    if (t.weight > birth) {
      diagram.pairs.push_back({birth, t.weight, 1});
    }
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (creates_cycle[e] && pivot_owner.find(static_cast<std::uint32_t>(e)) == pivot_owner.end()) {
      diagram.pairs.push_back({edges[e].weight, kInfiniteDeath, 1});
    }
  }

  std::sort(diagram.pairs.begin(), diagram.pairs.end(),
            [](const PersistencePair& x, const PersistencePair& y) {
              return std::tie(x.birth, x.death) < std::tie(y.birth, y.death);
            });
  return diagram;
}

LongevityVector longevity(const PersistenceDiagram& diagram) {
  LongevityVector out;
  out.values.reserve(diagram.pairs.size());
  for (const PersistencePair& p : diagram.pairs) {
    if (p.dim != 0) {
      throw Error(ErrorCode::mixed_dimension_diagram,
                  "longevity vectors are defined for dimension-0 diagrams only");
    }
    out.values.push_back(std::isinf(p.death) ? kInfiniteDeath : p.death - p.birth);
  }
  std::sort(out.values.begin(), out.values.end());  // +inf sorts last
  return out;
}

}  // namespace topodist
