#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace oracles {

std::vector<double> prim_mst_weights(const Eigen::MatrixXd& dist) {
  const Eigen::Index n = dist.rows();
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<double> weights;
  in_tree[0] = 1;
  for (Eigen::Index j = 1; j < n; ++j) best[j] = dist(0, j);
  for (Eigen::Index step = 1; step < n; ++step) {
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_tree[j] && (pick == -1 || best[j] < best[pick])) pick = j;
    }
    weights.push_back(best[pick]);
    in_tree[pick] = 1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_tree[j] && dist(pick, j) < best[j]) best[j] = dist(pick, j);
    }
  }
  std::sort(weights.begin(), weights.end());
  return weights;
}

namespace {

// Rank of a GF(2) matrix given as columns of dynamic bitsets.
int gf2_rank(std::vector<std::vector<std::uint64_t>> columns) {
  auto highest_bit = [](const std::vector<std::uint64_t>& col) -> int {
    for (int w = static_cast<int>(col.size()) - 1; w >= 0; --w) {
      if (col[static_cast<std::size_t>(w)] != 0) {
        return w * 64 + 63 - std::countl_zero(col[static_cast<std::size_t>(w)]);
      }
    }
    return -1;
  };
  std::vector<std::vector<std::uint64_t>> pivots;
  std::vector<int> pivot_bits;
  int rank = 0;
  for (std::vector<std::uint64_t>& col : columns) {
    int bit = highest_bit(col);
    while (bit >= 0) {
      auto it = std::find(pivot_bits.begin(), pivot_bits.end(), bit);
      if (it == pivot_bits.end()) break;
      const std::vector<std::uint64_t>& pivot = pivots[static_cast<std::size_t>(it - pivot_bits.begin())];
      for (std::size_t w = 0; w < col.size(); ++w) col[w] ^= pivot[w];
      bit = highest_bit(col);
    }
    if (bit >= 0) {
      pivots.push_back(col);
      pivot_bits.push_back(bit);
      ++rank;
    }
  }
  return rank;
}

}  // namespace

int h1_rank_at(const Eigen::MatrixXd& dist, double t) {
  const Eigen::Index n = dist.rows();
  std::vector<std::array<int, 2>> edges;
  std::vector<int> edge_id(static_cast<std::size_t>(n * n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (dist(i, j) <= t) {
        edge_id[static_cast<std::size_t>(i * n + j)] = static_cast<int>(edges.size());
        edges.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }

  const std::size_t vertex_words = static_cast<std::size_t>((n + 63) / 64);
  std::vector<std::vector<std::uint64_t>> d1;
  for (const std::array<int, 2>& e : edges) {
    std::vector<std::uint64_t> col(vertex_words, 0);
    col[static_cast<std::size_t>(e[0] / 64)] ^= std::uint64_t{1} << (e[0] % 64);
    col[static_cast<std::size_t>(e[1] / 64)] ^= std::uint64_t{1} << (e[1] % 64);
    d1.push_back(std::move(col));
  }

  const std::size_t edge_words = (edges.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> d2;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      for (Eigen::Index c = b + 1; c < n; ++c) {
        const double w = std::max({dist(a, b), dist(a, c), dist(b, c)});
        if (w > t) continue;
        std::vector<std::uint64_t> col(edge_words, 0);
        for (int e : {edge_id[static_cast<std::size_t>(a * n + b)],
                      edge_id[static_cast<std::size_t>(a * n + c)],
                      edge_id[static_cast<std::size_t>(b * n + c)]}) {
          col[static_cast<std::size_t>(e / 64)] ^= std::uint64_t{1} << (e % 64);
        }
        d2.push_back(std::move(col));
      }
    }
  }

  const int cycles = static_cast<int>(edges.size()) - gf2_rank(std::move(d1));
  const int boundaries = gf2_rank(std::move(d2));
  return cycles - boundaries;
}

namespace {

double linf(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

double qnorm(const std::array<double, 2>& a, const std::array<double, 2>& b, double q) {
  if (std::isinf(q)) return linf(a, b);
  return std::pow(std::pow(std::abs(a[0] - b[0]), q) + std::pow(std::abs(a[1] - b[1]), q), 1.0 / q);
}

double diag_dist(const std::array<double, 2>& a, double q) {
  const double half = 0.5 * (a[1] - a[0]);
  if (std::isinf(q)) return half;
  return half * std::pow(2.0, 1.0 / q);
}

// Enumerates diagonal subsets on both sides and all bijections of the rest.
template <typename Combine>
double enumerate_matchings(const std::vector<std::array<double, 2>>& a,
                           const std::vector<std::array<double, 2>>& b, const Combine& combine) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask_a = 0; mask_a < (1u << na); ++mask_a) {
    for (std::uint32_t mask_b = 0; mask_b < (1u << nb); ++mask_b) {
      std::vector<std::size_t> keep_a, keep_b;
      for (std::size_t i = 0; i < na; ++i) {
        if (!(mask_a & (1u << i))) keep_a.push_back(i);
      }
      for (std::size_t j = 0; j < nb; ++j) {
        if (!(mask_b & (1u << j))) keep_b.push_back(j);
      }
      if (keep_a.size() != keep_b.size()) continue;
      std::vector<std::size_t> perm = keep_b;
      std::sort(perm.begin(), perm.end());
      do {
        best = std::min(best, combine(mask_a, mask_b, keep_a, perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  return best;
}

}  // namespace

double brute_bottleneck(const std::vector<std::array<double, 2>>& a,
                        const std::vector<std::array<double, 2>>& b) {
  return enumerate_matchings(
      a, b,
      [&](std::uint32_t mask_a, std::uint32_t mask_b, const std::vector<std::size_t>& keep_a,
          const std::vector<std::size_t>& perm) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (mask_a & (1u << i)) worst = std::max(worst, diag_dist(a[i], std::numeric_limits<double>::infinity()));
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (mask_b & (1u << j)) worst = std::max(worst, diag_dist(b[j], std::numeric_limits<double>::infinity()));
        }
        for (std::size_t k = 0; k < keep_a.size(); ++k) {
          worst = std::max(worst, linf(a[keep_a[k]], b[perm[k]]));
        }
        return worst;
      });
}

double brute_wasserstein(const std::vector<std::array<double, 2>>& a,
                         const std::vector<std::array<double, 2>>& b, double p, double q) {
  const double total = enumerate_matchings(
      a, b,
      [&](std::uint32_t mask_a, std::uint32_t mask_b, const std::vector<std::size_t>& keep_a,
          const std::vector<std::size_t>& perm) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (mask_a & (1u << i)) sum += std::pow(diag_dist(a[i], q), p);
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (mask_b & (1u << j)) sum += std::pow(diag_dist(b[j], q), p);
        }
        for (std::size_t k = 0; k < keep_a.size(); ++k) {
          sum += std::pow(qnorm(a[keep_a[k]], b[perm[k]], q), p);
        }
        return sum;
      });
  return std::pow(total, 1.0 / p);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto midranks = [](const std::vector<double>& v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::size_t less = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++less;
        if (v[j] == v[i]) ++equal;
      }
      ranks[i] = static_cast<double>(less) + 0.5 * static_cast<double>(equal - 1) + 1.0;
    }
    return ranks;
  };
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracles
