#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsi/core.hpp"
#include "hsi/eval.hpp"

namespace hsi::io {

// On-disk containers (bit-exact, little-endian):
//   cube    "HSIC v1 <rows> <cols> <bands> f32 le row-major\n" + M*N*B float32
//   labels  "HSIL v1 <rows> <cols> u16 le row-major\n"         + M*N   uint16
//   tensor  "HSIP v1 <rows> <cols> <classes> f64 le row-major\n"
//           + M*N*c float64 + M*N background-mask bytes (0/1)
//   training "HSIT v1 <rows> <cols> <entries> <shortfalls>\n"
//           + one "row col class" line per entry
//           + one "class requested available" line per shortfall
// Cube/tensor payloads are pixel-major in the fixed linearization order with
// the band/class index fastest, i.e. exactly the column-major bytes of the
// in-memory B x (MN) matrix. Cube values are quantized to float32 by design;
// write-then-read is the identity on anything that was ever read or generated.

void write_cube(const HsiCube& cube, const std::string& path);
HsiCube read_cube(const std::string& path);

void write_labels(const LabelRaster& labels, const std::string& path);
LabelRaster read_labels(const std::string& path);

void write_probability_tensor(const ProbabilityTensor& tensor, const std::string& path);
ProbabilityTensor read_probability_tensor(const std::string& path);

void write_training_set(const TrainingSet& training, const std::string& path);
TrainingSet read_training_set(const std::string& path);

// Plain PGM (P2) raster of per-pixel misclassification counts; maxval is the
// actual maximum so the export is lossless.
void export_error_map(const Counts2d& counts, int trials, const std::string& path);
Counts2d read_error_map(const std::string& path);

// CSV report: one row per class then OA/AA/kappa rows; columns are
// label, mean, std, trial_1..trial_T. Accuracies are fractions printed with
// 17 significant digits so the file parses back bit-exact.
void export_report(const eval::TrialReport& report, const std::string& path);
eval::TrialReport read_report(const std::string& path);

// Synthetic scene: piecewise-constant labels from Voronoi cells seeded on a
// jittered grid, one spectrum per class plus additive Gaussian noise. Stands
// in for the benchmark scenes at desk scale; nearby pixels share a class by
// construction.
struct SyntheticSceneSpec {
  Eigen::Index rows = 64;
  Eigen::Index cols = 64;
  Eigen::Index bands = 20;
  int classes = 4;
  double patch_side = 12.0;       // mean homogeneous-patch side length, pixels
  double class_mean_scale = 1.0;  // spread of the per-class mean spectra
  double noise_sigma = 0.0;       // additive Gaussian sigma per band
  std::uint64_t seed = 1;
  std::vector<Vector> class_means;  // optional; drawn from the seed when empty
};

struct SyntheticScene {
  HsiCube cube;
  LabelRaster labels;
  std::vector<Vector> class_means;  // the means actually used
};

SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec);

// Raw import helper: packs a headerless little-endian array into the cube
// container. order is "bip" (band index fastest, our native order) or "bsq"
// (band-sequential planes); dtype is "f32", "f64" or "u16".
HsiCube convert_raw_cube(const std::string& raw_path, Eigen::Index rows, Eigen::Index cols,
                         Eigen::Index bands, const std::string& dtype, const std::string& order);
LabelRaster convert_raw_labels(const std::string& raw_path, Eigen::Index rows, Eigen::Index cols,
                               const std::string& dtype);

}  // namespace hsi::io
