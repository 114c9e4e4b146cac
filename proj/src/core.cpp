#include "hsi/core.hpp"

#include <algorithm>
#include <string>

#include "hsi/rng.hpp"

namespace hsi {

TrainingSet::TrainingSet(Eigen::Index rows, Eigen::Index cols,
                         std::vector<TrainingPixel> entries,
                         std::vector<ClassShortfall> shortfalls)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), shortfalls_(std::move(shortfalls)) {
  if (rows < 1 || cols < 1) throw ValidationError("TrainingSet: empty raster shape");
  mask_ = Mask2d::Constant(rows, cols, false);
  for (const auto& e : entries_) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw ValidationError("TrainingSet: entry outside the raster");
    if (e.cls < 1) throw ValidationError("TrainingSet: entry with non-positive class id");
    if (mask_(e.row, e.col)) throw ValidationError("TrainingSet: duplicate entry");
    mask_(e.row, e.col) = true;
  }
}

void validate_pair(const HsiCube& cube, const LabelRaster& gt) {
  if (cube.rows() != gt.rows() || cube.cols() != gt.cols())
    throw ValidationError("validate_pair: cube is " + std::to_string(cube.rows()) + "x" +
                          std::to_string(cube.cols()) + " but labels are " +
                          std::to_string(gt.rows()) + "x" + std::to_string(gt.cols()));
  if (!cube.all_finite())
    throw ValidationError("validate_pair: cube contains non-finite values");
  if ((gt.labels() < 0).any())
    throw ValidationError("validate_pair: negative label found");
  if (gt.num_classes() < 2)
    throw ValidationError("validate_pair: fewer than two classes in ground truth");
}

TrainingSet sample_training_set(const LabelRaster& gt, int per_class, std::uint64_t seed) {
  if (per_class < 1) throw ValidationError("sample_training_set: per_class must be >= 1");
  const int c = gt.num_classes();
  if (c < 1) throw ValidationError("sample_training_set: ground truth has no labeled pixels");

  std::vector<TrainingPixel> entries;
  std::vector<ClassShortfall> shortfalls;
  for (int cls = 1; cls <= c; ++cls) {
    // Candidate pixels in row-major scan order; the sample is then a partial
    // Fisher-Yates shuffle driven by a per-class seed stream, so one class's
    // pixel count never perturbs another class's draw.
    std::vector<TrainingPixel> candidates;
    for (Eigen::Index i = 0; i < gt.rows(); ++i)
      for (Eigen::Index j = 0; j < gt.cols(); ++j)
        if (gt.at(i, j) == cls)
          candidates.push_back({static_cast<int>(i), static_cast<int>(j), cls});
    if (candidates.empty())
      throw ValidationError("sample_training_set: class " + std::to_string(cls) +
                            " has no ground-truth pixels");

    const int take = std::min<int>(per_class, static_cast<int>(candidates.size()));
    if (take < per_class)
      shortfalls.push_back({cls, per_class, static_cast<int>(candidates.size())});

    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    for (int k = 0; k < take; ++k) {
      const auto swap_with =
          k + static_cast<int>(rng.next_below(candidates.size() - static_cast<std::size_t>(k)));
      std::swap(candidates[k], candidates[swap_with]);
    }
    // Canonical order within a class: by linear pixel index.
    std::sort(candidates.begin(), candidates.begin() + take,
              [&](const TrainingPixel& a, const TrainingPixel& b) {
                return pixel_index(a.row, a.col, gt.cols()) < pixel_index(b.row, b.col, gt.cols());
              });
    entries.insert(entries.end(), candidates.begin(), candidates.begin() + take);
  }
  return TrainingSet(gt.rows(), gt.cols(), std::move(entries), std::move(shortfalls));
}

}  // namespace hsi
