#include "topodist/datagen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace topodist {

double Rng::next_normal() {
  // (0, 1] for the radius term so log() stays finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) {
    throw Error(ErrorCode::invalid_argument, "bound must be positive");
  }
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  Rng mixer(base ^ (0x9e3779b97f4a7c15ULL * (stream + 1)) ^ (0xbf58476d1ce4e5b9ULL * (index + 1)));
  return mixer.next_u64();
}

namespace {

// Linear transform turning standard normals into N(0, cov) draws.
Eigen::MatrixXd covariance_transform(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "covariance must be square");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(ErrorCode::asymmetric_matrix, "covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  return spd_sqrt(cov);  // positive semidefinite boundary (throws if indefinite)
}

}  // namespace

FeatureMatrix sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                              std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::insufficient_samples, "sample count must be at least 1");
  }
  if (mean.size() != cov.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "mean and covariance dimensions do not match");
  }
  const Eigen::MatrixXd transform = covariance_transform(cov);
  const Eigen::Index m = mean.size();

  Rng rng(seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), m);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(j) = rng.next_normal();
    out.row(i) = (mean + transform * z).transpose();
  }
  return FeatureMatrix(std::move(out));
}

FeatureMatrix sample_matched_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::insufficient_samples, "sample count must be at least 1");
  }
  if (spec.component_offset.size() != spec.component_cov.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "offset and covariance dimensions do not match");
  }
  const Eigen::MatrixXd transform = covariance_transform(spec.component_cov);
  const Eigen::Index m = spec.component_offset.size();

  Rng rng(seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), m);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double sign = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < m; ++j) z(j) = rng.next_normal();
    out.row(i) = (sign * spec.component_offset + transform * z).transpose();
  }
  return FeatureMatrix(std::move(out));
}

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height_ < 1 || width_ < 1 || channels_ < 1) {
    throw Error(ErrorCode::invalid_argument, "image dimensions must be positive");
  }
  if (data_.size() != height_ * width_ * channels_) {
    throw Error(ErrorCode::dimension_mismatch, "image buffer size does not match dimensions");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "image intensities must lie in [0, 1]");
    }
  }
}

double ImageTensor::max_intensity() const {
  return *std::max_element(data_.begin(), data_.end());
}

ImageTensor pixel_noise(const ImageTensor& img, std::uint64_t seed) {
  const double m = img.max_intensity();
  const double lo = 0.87 * m;
  const double width = 0.26 * m;
  Rng rng(seed);
  std::vector<double> data = img.data();
  for (double& v : data) {
    v = std::clamp(v + lo + rng.next_double() * width, 0.0, 1.0);
  }
  return ImageTensor(img.height(), img.width(), img.channels(), std::move(data));
}

namespace {

struct Grid {
  std::size_t cell_h, cell_w, per_side;
};

Grid make_grid(const ImageTensor& img, std::size_t per_side) {
  if (img.height() % per_side != 0 || img.width() % per_side != 0) {
    throw Error(ErrorCode::invalid_argument,
                "image height and width must be divisible by " + std::to_string(per_side));
  }
  return {img.height() / per_side, img.width() / per_side, per_side};
}

}  // namespace

ImageTensor patch_mask(const ImageTensor& img, std::uint64_t seed) {
  const Grid grid = make_grid(img, 8);
  Rng rng(seed);

  // Partial Fisher-Yates draw of 7 distinct cells out of 64.
  std::vector<std::uint32_t> cells(64);
  for (std::uint32_t i = 0; i < 64; ++i) cells[i] = i;
  ImageTensor out = img;
  for (std::size_t k = 0; k < 7; ++k) {
    const std::uint64_t pick = k + rng.next_below(64 - k);
    std::swap(cells[k], cells[pick]);
    const std::size_t cell = cells[k];
    const std::size_t src_h = rng.next_below(img.height());
    const std::size_t src_w = rng.next_below(img.width());
    const std::size_t h0 = (cell / 8) * grid.cell_h;
    const std::size_t w0 = (cell % 8) * grid.cell_w;
    for (std::size_t h = h0; h < h0 + grid.cell_h; ++h) {
      for (std::size_t w = w0; w < w0 + grid.cell_w; ++w) {
        for (std::size_t c = 0; c < img.channels(); ++c) {
          out.at(h, w, c) = img.at(src_h, src_w, c);
        }
      }
    }
  }
  return out;
}

ImageTensor patch_exchange(const ImageTensor& img, std::uint64_t seed) {
  const Grid grid = make_grid(img, 4);
  Rng rng(seed);
  ImageTensor out = img;
  for (int swap_round = 0; swap_round < 2; ++swap_round) {
    const std::size_t a = rng.next_below(16);
    std::size_t b = rng.next_below(15);
    if (b >= a) ++b;
    const std::size_t ah0 = (a / 4) * grid.cell_h, aw0 = (a % 4) * grid.cell_w;
    const std::size_t bh0 = (b / 4) * grid.cell_h, bw0 = (b % 4) * grid.cell_w;
    for (std::size_t h = 0; h < grid.cell_h; ++h) {
      for (std::size_t w = 0; w < grid.cell_w; ++w) {
        for (std::size_t c = 0; c < img.channels(); ++c) {
          std::swap(out.at(ah0 + h, aw0 + w, c), out.at(bh0 + h, bw0 + w, c));
        }
      }
    }
  }
  return out;
}

std::vector<ImageTensor> random_images(std::size_t count, std::size_t height, std::size_t width,
                                       std::size_t channels, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ImageTensor> images;
  images.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> data(height * width * channels);
    for (double& v : data) v = rng.next_double();
    images.emplace_back(height, width, channels, std::move(data));
  }
  return images;
}

FeatureMatrix flatten_images(const std::vector<ImageTensor>& images) {
  if (images.empty()) {
    throw Error(ErrorCode::invalid_argument, "need at least one image");
  }
  const std::size_t pixels = images.front().data().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(pixels));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].data().size() != pixels) {
      throw Error(ErrorCode::dimension_mismatch, "images must share dimensions");
    }
    for (std::size_t k = 0; k < pixels; ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = images[i].data()[k];
    }
  }
  return FeatureMatrix(std::move(out));
}

}  // namespace topodist
