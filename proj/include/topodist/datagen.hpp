#pragma once

#include <cstdint>
#include <vector>

#include "topodist/geometry.hpp"

namespace topodist {

// Counter-based splitmix64 generator. All sampling in this module goes
// through it, so a fixed seed reproduces the same bits on every platform.
// Normals come from an explicit Box-Muller transform of the uniform stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_normal();

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Mixes a base seed with a stream tag and an index, so harness code can hand
// out independent deterministic substreams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

// n i.i.d. draws from N(mean, cov). cov must be positive semidefinite; the
// transform is the Cholesky factor when cov is positive definite and the
// symmetric eigenvalue square root otherwise (e.g. a zero covariance).
FeatureMatrix sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                              std::size_t n, std::uint64_t seed);

// Balanced two-component Gaussian mixture with components at +/- offset.
// Its overall mean is zero and its overall covariance is
// component_cov + offset offset^T, so matched_cov() gives the parameters of
// the single Gaussian with identical first and second moments.
struct MixtureSpec {
  Eigen::VectorXd component_offset;
  Eigen::MatrixXd component_cov;

  Eigen::MatrixXd matched_cov() const {
    return component_cov + component_offset * component_offset.transpose();
  }
};

FeatureMatrix sample_matched_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed);

// H x W x C image with intensities in [0, 1].
class ImageTensor {
 public:
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  double at(std::size_t h, std::size_t w, std::size_t c) const {
    return data_[(h * width_ + w) * channels_ + c];
  }
  double& at(std::size_t h, std::size_t w, std::size_t c) {
    return data_[(h * width_ + w) * channels_ + c];
  }
  const std::vector<double>& data() const { return data_; }
  double max_intensity() const;

 private:
  std::size_t height_, width_, channels_;
  std::vector<double> data_;
};

// Adds an independent uniform draw from [0.87 M, 1.13 M] to every channel
// value, M being the image's maximum intensity, then clips to [0, 1].
ImageTensor pixel_noise(const ImageTensor& img, std::uint64_t seed);

// Splits the image into an 8x8 grid and fills 7 distinct cells, each with the
// value of one pixel sampled uniformly from the whole image.
ImageTensor patch_mask(const ImageTensor& img, std::uint64_t seed);

// Splits the image into a 4x4 grid and swaps two distinct cells, twice (the
// second swap is drawn independently and may undo the first).
ImageTensor patch_exchange(const ImageTensor& img, std::uint64_t seed);

// Uniform-noise test images.
std::vector<ImageTensor> random_images(std::size_t count, std::size_t height, std::size_t width,
                                       std::size_t channels, std::uint64_t seed);

// Row-major (h, w, c) flattening of equally sized images into features.
FeatureMatrix flatten_images(const std::vector<ImageTensor>& images);

}  // namespace topodist
