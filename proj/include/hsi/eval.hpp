#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsi/core.hpp"

namespace hsi::eval {

// c x c confusion counts; rows index the true class, columns the predicted
// class (both 1-based class ids shifted down by one).
using Confusion = Eigen::MatrixXi;

// Counts over evaluated pixels only: background and training pixels are
// excluded (training pixels are constrained correct by construction).
Confusion confusion(const LabelRaster& gt, const LabelRaster& pred, const TrainingSet& training);

// Overall accuracy: trace / total.
double oa(const Confusion& cm);

// Mean per-class recall. Classes with zero evaluated pixels are excluded from
// the mean; the count of such classes is reported through excluded_classes
// when non-null.
double aa(const Confusion& cm, int* excluded_classes = nullptr);

// Cohen's kappa: (p_o - p_e) / (1 - p_e) with p_e from the marginal products.
// Returns NaN when p_e = 1 (agreement by chance is total and kappa is
// undefined).
double kappa(const Confusion& cm);

struct TrialMetrics {
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  Vector per_class;  // recall of class k at index k-1; NaN when not evaluated
};

TrialMetrics metrics_from_confusion(const Confusion& cm);

// Per-trial and aggregated results of the randomized protocol, plus the
// per-pixel misclassification counts accumulated over all trials.
struct TrialReport {
  int trials = 0;
  std::vector<TrialMetrics> per_trial;
  TrialMetrics mean;
  TrialMetrics stddev;  // sample standard deviation (0 for a single trial)
  Counts2d misclassification;
};

// A full classification pipeline: given the scene, its ground truth and the
// trial's training set, produce a predicted label raster. The harness stays
// agnostic of the stage wiring.
using PipelineFn =
    std::function<LabelRaster(const HsiCube&, const LabelRaster&, const TrainingSet&)>;

// Runs the randomized protocol: for each trial a fresh training set is drawn
// with seed derive_seed(master_seed, trial), the pipeline runs, and metrics
// are computed on the remaining non-background pixels. Identical seeds give
// identical reports.
TrialReport run_trials(const HsiCube& cube, const LabelRaster& gt, const PipelineFn& pipeline,
                       int trials, int per_class, std::uint64_t master_seed);

}  // namespace hsi::eval
