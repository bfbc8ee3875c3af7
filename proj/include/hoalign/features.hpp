#pragma once

#include <span>

#include <Eigen/Dense>

#include "hoalign/image.hpp"

namespace hoalign {

/// Mean-centered projection onto the top three principal directions of a feature pool.
struct PCABasis {
  Eigen::VectorXd mean;
  Eigen::Matrix<double, 3, Eigen::Dynamic> components;  // orthonormal rows
  Eigen::Vector3d variances = Eigen::Vector3d::Zero();   // eigenvalues of the kept directions
  double total_variance = 0.0;                           // trace of the pooled covariance

  Eigen::Vector3d project(std::span<const float> feature) const;
};

/// Pools the masked-in pixels of every map and keeps the top-3 covariance eigenvectors, each
/// signed so its largest-magnitude component is positive. Throws InsufficientSamples for fewer
/// than 3 pixels or fewer than 3 channels.
PCABasis pca_basis(std::span<const FeatureMap> maps);

inline constexpr double kDinoEpsilon = 1e-8;

/// 1 - (cos + 1) / 2 between the flattened projections of both maps over the pixels set in both
/// masks. 0 means identical directions, 1 anti-aligned. Throws EmptyOverlap.
double dino_similarity(const FeatureMap& rendered, const FeatureMap& image, const PCABasis& basis,
                       double epsilon = kDinoEpsilon);

}  // namespace hoalign
