#pragma once

#include "hsi/core.hpp"

namespace hsi::pca {

// Orthonormal projection onto the top-variance directions of the B x (MN)
// reconstructed data.
struct PcaModel {
  Vector mean;         // per-band mean spectrum (zero when fitted uncentered)
  Matrix projection;   // B x d, orthonormal columns, variance-sorted
  Vector eigenvalues;  // top-d scatter eigenvalues, nonincreasing, >= 0
  bool centered = true;

  Eigen::Index input_dim() const { return projection.rows(); }
  Eigen::Index output_dim() const { return projection.cols(); }
};

// Eigendecomposition of the B x B scatter matrix of R (centered by default;
// the uncentered variant keeps the literal trace objective). Eigenvector
// signs are fixed so the largest-magnitude entry of each column is positive,
// making fits bit-for-bit reproducible.
PcaModel fit_pca(const Matrix& data, Eigen::Index dims, bool center = true);

// D = W^T (R - mean), column order preserved.
Matrix transform(const PcaModel& model, const Matrix& data);

}  // namespace hsi::pca
