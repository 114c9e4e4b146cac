#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "hsi/errors.hpp"

namespace hsi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Map2d = Eigen::ArrayXXd;                                    // one M x N image plane
using Labels2d = Eigen::ArrayXXi;                                 // M x N class ids
using Mask2d = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Counts2d = Eigen::ArrayXXi;

// Pixel linearization is row-major everywhere: pixel (i,j) of an M x N image
// maps to column i*N + j. All stages (NSW, PCA, SVC, STV) share this order.
inline Eigen::Index pixel_index(Eigen::Index i, Eigen::Index j, Eigen::Index cols) {
  return i * cols + j;
}

// An M x N x B reflectance cube. Stored pixel-major: data() is B x (M*N) with
// one spectrum per column, columns ordered by pixel_index. This matches the
// on-disk payload order (pixel by pixel, bands contiguous) and makes the
// B x (MN) matrix view of the cube a no-op.
class HsiCube {
 public:
  HsiCube(Eigen::Index rows, Eigen::Index cols, Eigen::Index bands)
      : rows_(rows), cols_(cols), bands_(bands) {
    if (rows < 1 || cols < 1 || bands < 1)
      throw ValidationError("HsiCube: rows, cols and bands must all be >= 1");
    data_ = Matrix::Zero(bands, rows * cols);
  }

  HsiCube(Eigen::Index rows, Eigen::Index cols, Matrix spectra)
      : rows_(rows), cols_(cols), bands_(spectra.rows()), data_(std::move(spectra)) {
    if (rows < 1 || cols < 1 || bands_ < 1)
      throw ValidationError("HsiCube: rows, cols and bands must all be >= 1");
    if (data_.cols() != rows * cols)
      throw ValidationError("HsiCube: spectra matrix must have rows*cols columns");
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index bands() const { return bands_; }
  Eigen::Index pixels() const { return rows_ * cols_; }

  double at(Eigen::Index i, Eigen::Index j, Eigen::Index b) const {
    return data_(b, pixel_index(i, j, cols_));
  }
  double& at(Eigen::Index i, Eigen::Index j, Eigen::Index b) {
    return data_(b, pixel_index(i, j, cols_));
  }

  Eigen::Ref<const Vector> spectrum(Eigen::Index i, Eigen::Index j) const {
    return data_.col(pixel_index(i, j, cols_));
  }

  // B x (MN) view in the fixed linearization order.
  const Matrix& data() const { return data_; }
  Matrix& data() { return data_; }

  bool all_finite() const { return data_.allFinite(); }

 private:
  Eigen::Index rows_, cols_, bands_;
  Matrix data_;
};

// M x N class map. 0 is background (never classified, never scored); classes
// are 1..c.
class LabelRaster {
 public:
  LabelRaster(Eigen::Index rows, Eigen::Index cols) {
    if (rows < 1 || cols < 1) throw ValidationError("LabelRaster: empty raster");
    labels_ = Labels2d::Zero(rows, cols);
  }

  explicit LabelRaster(Labels2d labels) : labels_(std::move(labels)) {
    if (labels_.rows() < 1 || labels_.cols() < 1)
      throw ValidationError("LabelRaster: empty raster");
  }

  Eigen::Index rows() const { return labels_.rows(); }
  Eigen::Index cols() const { return labels_.cols(); }

  int at(Eigen::Index i, Eigen::Index j) const { return labels_(i, j); }
  int& at(Eigen::Index i, Eigen::Index j) { return labels_(i, j); }

  const Labels2d& labels() const { return labels_; }

  // Highest class id present (0 if the raster is all background).
  int num_classes() const { return labels_.maxCoeff(); }

  bool is_background(Eigen::Index i, Eigen::Index j) const { return labels_(i, j) == 0; }

 private:
  Labels2d labels_;
};

struct TrainingPixel {
  int row = 0;
  int col = 0;
  int cls = 0;

  friend bool operator==(const TrainingPixel&, const TrainingPixel&) = default;
};

// A class that had fewer ground-truth pixels than requested; all of them were
// taken and the gap is recorded here.
struct ClassShortfall {
  int cls = 0;
  int requested = 0;
  int available = 0;

  friend bool operator==(const ClassShortfall&, const ClassShortfall&) = default;
};

// The labeled pixel set Omega handed to the classifier and pinned by the
// smoothing stage.
class TrainingSet {
 public:
  TrainingSet(Eigen::Index rows, Eigen::Index cols,
              std::vector<TrainingPixel> entries,
              std::vector<ClassShortfall> shortfalls = {});

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const std::vector<TrainingPixel>& entries() const { return entries_; }
  const std::vector<ClassShortfall>& shortfalls() const { return shortfalls_; }
  const Mask2d& mask() const { return mask_; }

  bool contains(Eigen::Index i, Eigen::Index j) const { return mask_(i, j); }
  int size() const { return static_cast<int>(entries_.size()); }

  friend bool operator==(const TrainingSet& a, const TrainingSet& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_ &&
           a.shortfalls_ == b.shortfalls_;
  }

 private:
  Eigen::Index rows_, cols_;
  std::vector<TrainingPixel> entries_;
  std::vector<ClassShortfall> shortfalls_;
  Mask2d mask_;
};

// M x N x c stack of per-class probability maps. Stored as a c x (MN) matrix
// (one class vector per pixel column) plus an explicit background mask:
// background pixels carry an all-zero vector and are excluded from
// classification and scoring. Post-smoothing tensors reuse this type but are
// not required to stay on the simplex.
class ProbabilityTensor {
 public:
  ProbabilityTensor(Eigen::Index rows, Eigen::Index cols, Eigen::Index classes)
      : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1 || classes < 1)
      throw ValidationError("ProbabilityTensor: empty tensor");
    values_ = Matrix::Zero(classes, rows * cols);
    background_ = Mask2d::Constant(rows, cols, false);
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index classes() const { return values_.rows(); }

  double at(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return values_(k, pixel_index(i, j, cols_));
  }
  double& at(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return values_(k, pixel_index(i, j, cols_));
  }

  Eigen::Ref<const Vector> pixel(Eigen::Index i, Eigen::Index j) const {
    return values_.col(pixel_index(i, j, cols_));
  }
  Eigen::Ref<Vector> pixel(Eigen::Index i, Eigen::Index j) {
    return values_.col(pixel_index(i, j, cols_));
  }

  // Class-k map as an M x N plane (copy).
  Map2d channel(Eigen::Index k) const {
    Map2d plane(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i)
      for (Eigen::Index j = 0; j < cols_; ++j) plane(i, j) = values_(k, pixel_index(i, j, cols_));
    return plane;
  }

  void set_channel(Eigen::Index k, const Map2d& plane) {
    for (Eigen::Index i = 0; i < rows_; ++i)
      for (Eigen::Index j = 0; j < cols_; ++j) values_(k, pixel_index(i, j, cols_)) = plane(i, j);
  }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  const Mask2d& background() const { return background_; }
  Mask2d& background() { return background_; }
  bool is_background(Eigen::Index i, Eigen::Index j) const { return background_(i, j); }

 private:
  Eigen::Index rows_, cols_;
  Matrix values_;
  Mask2d background_;
};

// Checks that a cube and its ground truth agree: matching dimensions, finite
// reflectances, labels in 0..c with at least two classes present.
void validate_pair(const HsiCube& cube, const LabelRaster& gt);

// Uniform per-class sample without replacement; reproducible for a fixed
// seed. Classes with fewer than per_class pixels contribute everything they
// have and the shortfall is recorded. A class with zero ground-truth pixels
// is an error.
TrainingSet sample_training_set(const LabelRaster& gt, int per_class, std::uint64_t seed);

}  // namespace hsi
