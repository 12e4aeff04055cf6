#pragma once

#include <cstdint>

#include "topodist/datagen.hpp"
#include "topodist/geometry.hpp"

namespace testsupport {

inline topodist::FeatureMatrix random_cloud(std::size_t n, std::size_t m, std::uint64_t seed) {
  return topodist::sample_gaussian(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)),
                                   Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                             static_cast<Eigen::Index>(m)),
                                   n, seed);
}

}  // namespace testsupport
