#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsi/core.hpp"

namespace hsi::svc {

struct SvcParams {
  double nu = 0.3;
  double gamma = 1.0;
  double tol = 1e-3;  // KKT violation tolerance of the dual solve
  std::uint64_t max_kernel_evals = 10'000'000;  // per binary problem
  std::size_t cache_bytes = 32u << 20;          // LRU kernel-column cache budget
  int coupling_max_iters = 200;
  double coupling_tol = 1e-10;
  int cv_folds = 5;
};

template <typename DerivedA, typename DerivedB>
double rbf_kernel(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v,
                  double gamma) {
  if (u.size() != v.size()) throw ValidationError("rbf_kernel: dimension mismatch");
  return std::exp(-gamma * (u - v).squaredNorm());
}

// One trained nu-SVC binary problem. Self-contained: the support vectors are
// stored with the model. Decision values are rescaled so free support vectors
// sit at -1/+1; predict class +1 when the decision value is positive.
struct BinaryModel {
  Matrix support_vectors;  // d x n_sv
  Vector coef;             // alpha_i * y_i / r per support vector
  double bias = 0.0;
  double gamma = 0.0;
  double margin = 0.0;          // scaled margin r of the dual solution
  double dual_objective = 0.0;  // 0.5 a^T Q a at the solution (scaled dual)
  double platt_a = 0.0, platt_b = 1.0;
  bool converged = true;
  bool degenerate = false;  // margin collapsed below the numeric floor
  double kkt_violation = 0.0;

  // Full raw dual solution (all training points of the binary problem), kept
  // for feasibility checks.
  Vector alpha;
  std::vector<int> labels;  // the +-1 labels the problem was trained with
};

// Solves the scaled nu-SVC dual
//   min 0.5 a^T Q a   s.t. 0 <= a_i <= 1,
//                          sum_{y=+1} a_i = sum_{y=-1} a_i = nu*t/2
// by sequential minimal optimization restricted to same-label pairs (both
// per-class equality constraints stay intact), maximal-violating-pair
// selection, stopping when the per-class KKT gap drops below tol.
BinaryModel train_binary(const Matrix& features, const std::vector<int>& labels,
                         const SvcParams& params);

// Decision value of one point.
double decision_value(const BinaryModel& model, Eigen::Ref<const Vector> x);

// Regularized maximum-likelihood sigmoid fit P(y=+1|f) = 1/(1+exp(A f + B))
// with prior-count target smoothing, Newton iterations with backtracking.
std::pair<double, double> fit_platt(const Vector& decisions, const std::vector<int>& labels);

double sigmoid_predict(double decision, double a, double b);

// Couples the pairwise class probabilities r(k,l) = P(class k | k or l) of
// one pixel into a posterior on the simplex (fixed-point iteration on the
// quadratic coupling objective). r must be entrywise in (0,1) off the
// diagonal with r(k,l)+r(l,k) = 1.
Vector pairwise_coupling(const Matrix& pairwise, const SvcParams& params = {});

struct PairModel {
  int class_a = 0;  // mapped to label +1 (class_a < class_b)
  int class_b = 0;  // mapped to label -1
  BinaryModel model;
};

// One-against-one multiclass model: c(c-1)/2 binary problems over classes
// 1..c, each with its own probability calibration.
struct MulticlassModel {
  int classes = 0;
  Eigen::Index feature_dim = 0;
  double nu = 0.0, gamma = 0.0;
  std::vector<PairModel> pairs;  // (1,2),(1,3),...,(1,c),(2,3),...
};

MulticlassModel train_multiclass(const Matrix& features, const std::vector<int>& labels,
                                 const SvcParams& params);

// Coupled class posterior for one feature vector.
Vector predict_posterior(const MulticlassModel& model, Eigen::Ref<const Vector> x,
                         const SvcParams& params = {});

// Stratified k-fold search over the (nu, gamma) grid; picks the highest mean
// fold accuracy, breaking ties toward smaller gamma then smaller nu. Grid
// points infeasible for any fold's pair problem are skipped; throws when
// nothing remains. Deterministic under seed.
SvcParams cross_validate(const Matrix& features, const std::vector<int>& labels,
                         const std::vector<double>& grid_nu, const std::vector<double>& grid_gamma,
                         const SvcParams& base, std::uint64_t seed);

// Per-pixel coupled posteriors over the whole feature matrix: training pixels
// are overridden to the one-hot vector of their class, background pixels get
// an all-zero vector and are flagged excluded.
ProbabilityTensor predict_probability_tensor(const MulticlassModel& model, const Matrix& features,
                                             const LabelRaster& gt, const TrainingSet& training,
                                             const SvcParams& params = {});

// Binary model dump (support vectors + coefficients + calibration), enough to
// reproduce predictions exactly.
void save_model(const MulticlassModel& model, const std::string& path);
MulticlassModel load_model(const std::string& path);

}  // namespace hsi::svc
