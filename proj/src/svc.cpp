#include "hsi/svc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

#include "hsi/rng.hpp"

namespace hsi::svc {

namespace {

constexpr double kTau = 1e-12;       // curvature and margin floor
constexpr double kMinPairProb = 1e-7;  // clamp for pairwise probabilities

// RBF kernel columns with least-recently-used eviction. Column loads count as
// kernel evaluations whether or not they hit the cache, which keeps the
// solver's evaluation budget independent of the cache size.
class KernelCache {
 public:
  KernelCache(const Matrix& points, double gamma, std::size_t capacity_bytes)
      : points_(points), gamma_(gamma) {
    const std::size_t col_bytes = sizeof(double) * static_cast<std::size_t>(points.cols());
    capacity_cols_ = std::max<std::size_t>(2, capacity_bytes / std::max<std::size_t>(1, col_bytes));
    sqnorms_ = points.colwise().squaredNorm();
  }

  const Vector& column(Eigen::Index i) {
    evals_ += static_cast<std::uint64_t>(points_.cols());
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    Vector col = (-gamma_ * (sqnorms_.array() + sqnorms_(i) -
                             2.0 * (points_.transpose() * points_.col(i)).array()))
                     .exp()
                     .matrix();
    lru_.emplace_front(i, std::move(col));
    index_[i] = lru_.begin();
    while (lru_.size() > capacity_cols_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    return lru_.front().second;
  }

  std::uint64_t evals() const { return evals_; }

 private:
  const Matrix& points_;
  double gamma_;
  Vector sqnorms_;
  std::size_t capacity_cols_ = 2;
  std::uint64_t evals_ = 0;
  std::list<std::pair<Eigen::Index, Vector>> lru_;
  std::unordered_map<Eigen::Index, std::list<std::pair<Eigen::Index, Vector>>::iterator> index_;
};

struct DualSolution {
  Vector alpha;
  double rho_scaled = 0.0;
  double r = 0.0;
  double objective = 0.0;
  bool converged = true;
  bool degenerate = false;
  double kkt_violation = 0.0;
};

// SMO on the scaled nu-SVC dual
//   min 0.5 a^T Q a  s.t. 0 <= a_i <= 1, sum_{y=+1} a = sum_{y=-1} a = nu*t/2.
// Working pairs share a label, so both per-class equality constraints are
// preserved by every two-variable update.
DualSolution solve_nu_dual(const Matrix& points, const std::vector<int>& labels, double nu,
                           const SvcParams& params) {
  const Eigen::Index n = points.cols();
  Eigen::Index n_pos = 0, n_neg = 0;
  for (int y : labels) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) throw SolverError("nu-svc: both classes must be present");
  const double per_class_sum = nu * static_cast<double>(n) / 2.0;
  if (per_class_sum > static_cast<double>(std::min(n_pos, n_neg)) + 1e-12)
    throw SolverError("nu-svc: nu=" + std::to_string(nu) + " infeasible for class sizes " +
                      std::to_string(n_pos) + "/" + std::to_string(n_neg));

  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;

  DualSolution out;
  out.alpha = Vector::Zero(n);
  for (const double sign : {+1.0, -1.0}) {
    double remaining = per_class_sum;
    for (Eigen::Index i = 0; i < n && remaining > 0.0; ++i)
      if (y(i) == sign) {
        out.alpha(i) = std::min(1.0, remaining);
        remaining -= out.alpha(i);
      }
  }

  KernelCache cache(points, params.gamma, params.cache_bytes);
  Vector grad = Vector::Zero(n);  // G = Q alpha
  for (Eigen::Index j = 0; j < n; ++j)
    if (out.alpha(j) > 0.0)
      grad += out.alpha(j) * y(j) * (y.array() * cache.column(j).array()).matrix();

  const std::uint64_t max_iters =
      std::max<std::uint64_t>(1000, params.max_kernel_evals / (2 * static_cast<std::uint64_t>(n)));

  // Maximal violating pair within one class.
  auto select = [&](double sign, Eigen::Index& up, Eigen::Index& low) {
    double g_up = std::numeric_limits<double>::infinity();
    double g_low = -std::numeric_limits<double>::infinity();
    up = low = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i) != sign) continue;
      if (out.alpha(i) < 1.0 && grad(i) < g_up) {
        g_up = grad(i);
        up = i;
      }
      if (out.alpha(i) > 0.0 && grad(i) > g_low) {
        g_low = grad(i);
        low = i;
      }
    }
    return (up >= 0 && low >= 0) ? g_low - g_up : -std::numeric_limits<double>::infinity();
  };

  out.converged = false;
  for (std::uint64_t it = 0; it < max_iters; ++it) {
    Eigen::Index up_p, low_p, up_n, low_n;
    const double gap_p = select(+1.0, up_p, low_p);
    const double gap_n = select(-1.0, up_n, low_n);
    out.kkt_violation = std::max(gap_p, gap_n);
    if (out.kkt_violation < params.tol) {
      out.converged = true;
      break;
    }
    const double sign = gap_p >= gap_n ? 1.0 : -1.0;
    const Eigen::Index i = gap_p >= gap_n ? up_p : up_n;
    const Eigen::Index j = gap_p >= gap_n ? low_p : low_n;

    const Vector ki = cache.column(i);  // copies: the j-lookup may evict i
    const Vector& kj = cache.column(j);
    const double quad = std::max(ki(i) + kj(j) - 2.0 * ki(j), kTau);
    double delta = (grad(j) - grad(i)) / quad;
    delta = std::min(delta, std::min(1.0 - out.alpha(i), out.alpha(j)));
    out.alpha(i) += delta;
    out.alpha(j) -= delta;
    grad += delta * sign * (y.array() * (ki - kj).array()).matrix();
    if (cache.evals() >= params.max_kernel_evals) break;
  }

  // Free-vector gradient level per class; midpoint of the bound gradients
  // when a class has no free vectors.
  double level[2];
  for (int s = 0; s < 2; ++s) {
    const double sign = s == 0 ? 1.0 : -1.0;
    double sum_free = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    int free_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i) != sign) continue;
      if (out.alpha(i) >= 1.0)
        lb = std::max(lb, grad(i));
      else if (out.alpha(i) <= 0.0)
        ub = std::min(ub, grad(i));
      else {
        ++free_count;
        sum_free += grad(i);
      }
    }
    level[s] = free_count > 0 ? sum_free / free_count : (ub + lb) / 2.0;
  }
  out.rho_scaled = (level[0] - level[1]) / 2.0;
  out.r = (level[0] + level[1]) / 2.0;
  if (out.r < kTau) {
    out.degenerate = true;
    out.r = kTau;
  }
  out.objective = 0.5 * out.alpha.dot(grad);
  return out;
}

}  // namespace

BinaryModel train_binary(const Matrix& features, const std::vector<int>& labels,
                         const SvcParams& params) {
  if (features.cols() != static_cast<Eigen::Index>(labels.size()))
    throw ValidationError("train_binary: feature/label count mismatch");
  if (features.cols() < 2) throw ValidationError("train_binary: need at least two points");
  if (!(params.nu > 0.0 && params.nu <= 1.0))
    throw ValidationError("train_binary: nu must be in (0,1]");
  if (!(params.gamma > 0.0)) throw ValidationError("train_binary: gamma must be positive");

  const DualSolution sol = solve_nu_dual(features, labels, params.nu, params);

  BinaryModel model;
  model.gamma = params.gamma;
  model.margin = sol.r;
  model.dual_objective = sol.objective;
  model.converged = sol.converged;
  model.degenerate = sol.degenerate;
  model.kkt_violation = sol.kkt_violation;
  model.bias = -sol.rho_scaled / sol.r;
  model.alpha = sol.alpha;
  model.labels = labels;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
    if (sol.alpha(i) > 0.0) sv.push_back(i);
  model.support_vectors = Matrix(features.rows(), static_cast<Eigen::Index>(sv.size()));
  model.coef = Vector(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.col(static_cast<Eigen::Index>(k)) = features.col(sv[k]);
    const double yk = labels[static_cast<std::size_t>(sv[k])] > 0 ? 1.0 : -1.0;
    model.coef(static_cast<Eigen::Index>(k)) = sol.alpha(sv[k]) * yk / sol.r;
  }
  return model;
}

double decision_value(const BinaryModel& model, Eigen::Ref<const Vector> x) {
  if (x.size() != model.support_vectors.rows())
    throw ValidationError("decision_value: feature dimension mismatch");
  if (model.coef.size() == 0) return model.bias;
  const Vector k = (-model.gamma *
                    (model.support_vectors.colwise() - x).colwise().squaredNorm().transpose())
                       .array()
                       .exp()
                       .matrix();
  return model.coef.dot(k) + model.bias;
}

std::pair<double, double> fit_platt(const Vector& decisions, const std::vector<int>& labels) {
  const Eigen::Index n = decisions.size();
  if (n != static_cast<Eigen::Index>(labels.size()))
    throw ValidationError("fit_platt: decision/label count mismatch");
  if (n < 2) throw ValidationError("fit_platt: need at least two points");
  double prior1 = 0, prior0 = 0;
  for (int y : labels) (y > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0 || prior0 == 0)
    throw ValidationError("fit_platt: both labels must be present");

  const int max_iter = 100;
  const double min_step = 1e-10;
  const double sigma = 1e-12;  // keeps the Hessian strictly positive definite
  const double eps = 1e-5;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);

  Vector t(n);
  for (Eigen::Index i = 0; i < n; ++i)
    t(i) = labels[static_cast<std::size_t>(i)] > 0 ? hi_target : lo_target;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto nll = [&](double aa, double bb) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double fApB = decisions(i) * aa + bb;
      f += fApB >= 0 ? t(i) * fApB + std::log1p(std::exp(-fApB))
                     : (t(i) - 1.0) * fApB + std::log1p(std::exp(fApB));
    }
    return f;
  };
  double fval = nll(a, b);

  for (int iter = 0; iter < max_iter; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double fApB = decisions(i) * a + b;
      double p, q;
      if (fApB >= 0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += decisions(i) * decisions(i) * d2;
      h22 += d2;
      h21 += decisions(i) * d2;
      const double d1 = t(i) - p;
      g1 += decisions(i) * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= min_step) {
      const double new_a = a + step * da;
      const double new_b = b + step * db;
      const double new_f = nll(new_a, new_b);
      if (new_f < fval + 1e-4 * step * gd) {
        a = new_a;
        b = new_b;
        fval = new_f;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;  // line search failed: accept current point
  }
  return {a, b};
}

double sigmoid_predict(double decision, double a, double b) {
  const double fApB = decision * a + b;
  return fApB >= 0 ? std::exp(-fApB) / (1.0 + std::exp(-fApB)) : 1.0 / (1.0 + std::exp(fApB));
}

Vector pairwise_coupling(const Matrix& pairwise, const SvcParams& params) {
  const Eigen::Index c = pairwise.rows();
  if (pairwise.cols() != c || c < 2)
    throw ValidationError("pairwise_coupling: need a square matrix, c >= 2");
  for (Eigen::Index k = 0; k < c; ++k)
    for (Eigen::Index l = 0; l < c; ++l)
      if (k != l && !(pairwise(k, l) > 0.0 && pairwise(k, l) < 1.0))
        throw ValidationError("pairwise_coupling: probabilities must lie strictly in (0,1)");

  // Fixed-point iteration on min_p sum_{k<l} (r_lk p_k - r_kl p_l)^2 over the
  // simplex; at the optimum Qp is a constant vector.
  Matrix q(c, c);
  for (Eigen::Index t = 0; t < c; ++t) {
    q(t, t) = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) {
      if (j == t) continue;
      q(t, t) += pairwise(j, t) * pairwise(j, t);
      q(t, j) = -pairwise(j, t) * pairwise(t, j);
    }
  }

  Vector p = Vector::Constant(c, 1.0 / static_cast<double>(c));
  Vector qp(c);
  for (int iter = 0; iter < params.coupling_max_iters; ++iter) {
    qp = q * p;
    const double pqp = p.dot(qp);
    double max_error = 0.0;
    for (Eigen::Index t = 0; t < c; ++t)
      max_error = std::max(max_error, std::abs(qp(t) - pqp));
    if (max_error < params.coupling_tol) {
      // Roundoff can leave harmless negative dust; clamp and renormalize.
      p = p.cwiseMax(0.0);
      return p / p.sum();
    }
    double pqp_run = pqp;
    for (Eigen::Index t = 0; t < c; ++t) {
      const double diff = (-qp(t) + pqp_run) / q(t, t);
      p(t) += diff;
      pqp_run = (pqp_run + diff * (diff * q(t, t) + 2.0 * qp(t))) / ((1.0 + diff) * (1.0 + diff));
      qp = (qp + diff * q.col(t)) / (1.0 + diff);
      p /= (1.0 + diff);
    }
  }
  throw SolverError("pairwise_coupling: no convergence within " +
                    std::to_string(params.coupling_max_iters) + " iterations");
}

MulticlassModel train_multiclass(const Matrix& features, const std::vector<int>& labels,
                                 const SvcParams& params) {
  if (features.cols() != static_cast<Eigen::Index>(labels.size()))
    throw ValidationError("train_multiclass: feature/label count mismatch");
  int c = 0;
  for (int l : labels) {
    if (l < 1) throw ValidationError("train_multiclass: class ids must be >= 1");
    c = std::max(c, l);
  }
  if (c < 2) throw ValidationError("train_multiclass: need at least two classes");

  MulticlassModel model;
  model.classes = c;
  model.feature_dim = features.rows();
  model.nu = params.nu;
  model.gamma = params.gamma;

  for (int a = 1; a <= c; ++a)
    for (int b = a + 1; b <= c; ++b) {
      std::vector<Eigen::Index> subset;
      std::vector<int> pm1;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == a || labels[i] == b) {
          subset.push_back(static_cast<Eigen::Index>(i));
          pm1.push_back(labels[i] == a ? +1 : -1);
        }
      Matrix sub(features.rows(), static_cast<Eigen::Index>(subset.size()));
      for (std::size_t k = 0; k < subset.size(); ++k)
        sub.col(static_cast<Eigen::Index>(k)) = features.col(subset[k]);

      PairModel pair;
      pair.class_a = a;
      pair.class_b = b;
      pair.model = train_binary(sub, pm1, params);

      Vector decisions(sub.cols());
      for (Eigen::Index k = 0; k < sub.cols(); ++k)
        decisions(k) = decision_value(pair.model, sub.col(k));
      std::tie(pair.model.platt_a, pair.model.platt_b) = fit_platt(decisions, pm1);
      model.pairs.push_back(std::move(pair));
    }
  return model;
}

Vector predict_posterior(const MulticlassModel& model, Eigen::Ref<const Vector> x,
                         const SvcParams& params) {
  if (x.size() != model.feature_dim)
    throw ValidationError("predict_posterior: feature dimension mismatch");
  const Eigen::Index c = model.classes;
  if (c == 2) {
    // Binary coupling is the identity on (r, 1-r).
    const auto& pair = model.pairs.front();
    const double r = std::clamp(
        sigmoid_predict(decision_value(pair.model, x), pair.model.platt_a, pair.model.platt_b),
        kMinPairProb, 1.0 - kMinPairProb);
    Vector p(2);
    p << r, 1.0 - r;
    return p;
  }
  Matrix pairwise = Matrix::Zero(c, c);
  for (const auto& pair : model.pairs) {
    const double r = std::clamp(
        sigmoid_predict(decision_value(pair.model, x), pair.model.platt_a, pair.model.platt_b),
        kMinPairProb, 1.0 - kMinPairProb);
    pairwise(pair.class_a - 1, pair.class_b - 1) = r;
    pairwise(pair.class_b - 1, pair.class_a - 1) = 1.0 - r;
  }
  return pairwise_coupling(pairwise, params);
}

SvcParams cross_validate(const Matrix& features, const std::vector<int>& labels,
                         const std::vector<double>& grid_nu, const std::vector<double>& grid_gamma,
                         const SvcParams& base, std::uint64_t seed) {
  if (grid_nu.empty() || grid_gamma.empty())
    throw ValidationError("cross_validate: empty parameter grid");
  const int folds = base.cv_folds;
  if (folds < 2) throw ValidationError("cross_validate: need at least 2 folds");
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (features.cols() != n) throw ValidationError("cross_validate: feature/label count mismatch");
  if (n < folds) throw ValidationError("cross_validate: fewer points than folds");

  // Stratified fold assignment: shuffle within each class, deal round-robin.
  int c = 0;
  for (int l : labels) c = std::max(c, l);
  std::vector<int> fold_of(static_cast<std::size_t>(n), -1);
  for (int cls = 1; cls <= c; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    for (std::size_t s = members.size(); s > 1; --s)
      std::swap(members[s - 1], members[rng.next_below(s)]);
    for (std::size_t k = 0; k < members.size(); ++k)
      fold_of[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }

  // Candidates ordered by (gamma, nu) ascending; strict improvement keeps the
  // first best, which implements the tie rule (smaller gamma, then smaller
  // nu) and makes duplicated grid points harmless.
  std::vector<std::pair<double, double>> candidates;  // (gamma, nu)
  for (double g : grid_gamma)
    for (double v : grid_nu) candidates.emplace_back(g, v);
  std::sort(candidates.begin(), candidates.end());

  double best_accuracy = -1.0;
  SvcParams best = base;
  bool any_feasible = false;
  for (const auto& [gamma, nu] : candidates) {
    SvcParams trial = base;
    trial.gamma = gamma;
    trial.nu = nu;
    double accuracy_sum = 0.0;
    int scored_folds = 0;
    bool feasible = true;
    for (int f = 0; f < folds && feasible; ++f) {
      std::vector<Eigen::Index> train_idx, test_idx;
      for (std::size_t i = 0; i < fold_of.size(); ++i)
        (fold_of[i] == f ? test_idx : train_idx).push_back(static_cast<Eigen::Index>(i));
      if (test_idx.empty()) continue;
      Matrix train(features.rows(), static_cast<Eigen::Index>(train_idx.size()));
      std::vector<int> train_labels(train_idx.size());
      for (std::size_t k = 0; k < train_idx.size(); ++k) {
        train.col(static_cast<Eigen::Index>(k)) = features.col(train_idx[k]);
        train_labels[k] = labels[static_cast<std::size_t>(train_idx[k])];
      }
      try {
        const MulticlassModel m = train_multiclass(train, train_labels, trial);
        int correct = 0;
        for (const Eigen::Index i : test_idx) {
          Eigen::Index argmax = 0;
          predict_posterior(m, features.col(i), trial).maxCoeff(&argmax);
          if (static_cast<int>(argmax) + 1 == labels[static_cast<std::size_t>(i)]) ++correct;
        }
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(test_idx.size());
        ++scored_folds;
      } catch (const SolverError&) {
        feasible = false;  // infeasible nu for this fold's class sizes
      }
    }
    if (!feasible || scored_folds == 0) continue;
    any_feasible = true;
    const double mean_accuracy = accuracy_sum / scored_folds;
    if (mean_accuracy > best_accuracy) {
      best_accuracy = mean_accuracy;
      best = trial;
    }
  }
  if (!any_feasible) throw SolverError("cross_validate: every grid point was infeasible");
  return best;
}

ProbabilityTensor predict_probability_tensor(const MulticlassModel& model, const Matrix& features,
                                             const LabelRaster& gt, const TrainingSet& training,
                                             const SvcParams& params) {
  const Eigen::Index rows = gt.rows(), cols = gt.cols();
  if (features.cols() != rows * cols)
    throw ValidationError("predict_probability_tensor: feature column count mismatch");
  if (features.rows() != model.feature_dim)
    throw ValidationError("predict_probability_tensor: feature dimension mismatch");

  ProbabilityTensor tensor(rows, cols, model.classes);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (gt.is_background(i, j)) {
        tensor.background()(i, j) = true;  // all-zero vector, flagged excluded
        continue;
      }
      const Eigen::Index px = pixel_index(i, j, cols);
      if (training.contains(i, j)) {
        tensor.values()(gt.at(i, j) - 1, px) = 1.0;  // one-hot override
        continue;
      }
      tensor.values().col(px) = predict_posterior(model, features.col(px), params);
    }
  return tensor;
}

namespace {

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xFF);
  out.write(buf, 8);
}

void put_i64(std::ostream& out, std::int64_t v) { put_f64(out, 0), void();  // never used
}

double get_f64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | buf[k];
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void save_model(const MulticlassModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "HSIM v1 " << model.classes << " " << model.feature_dim << " " << model.pairs.size()
      << "\n";
  put_f64(out, model.nu);
  put_f64(out, model.gamma);
  for (const auto& pair : model.pairs) {
    out << pair.class_a << " " << pair.class_b << " " << pair.model.support_vectors.cols() << "\n";
    put_f64(out, pair.model.bias);
    put_f64(out, pair.model.gamma);
    put_f64(out, pair.model.margin);
    put_f64(out, pair.model.platt_a);
    put_f64(out, pair.model.platt_b);
    for (Eigen::Index s = 0; s < pair.model.support_vectors.cols(); ++s) {
      for (Eigen::Index r = 0; r < pair.model.support_vectors.rows(); ++r)
        put_f64(out, pair.model.support_vectors(r, s));
      put_f64(out, pair.model.coef(s));
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

MulticlassModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic, version;
  std::size_t n_pairs = 0;
  MulticlassModel model;
  in >> magic >> version >> model.classes >> model.feature_dim >> n_pairs;
  if (!in || magic != "HSIM") throw IoError("bad magic, not a model file: " + path);
  if (version != "v1") throw IoError("unsupported model version: " + path);
  in.ignore(1);  // newline before binary block
  model.nu = get_f64(in);
  model.gamma = get_f64(in);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    PairModel pair;
    Eigen::Index n_sv = 0;
    in >> pair.class_a >> pair.class_b >> n_sv;
    in.ignore(1);
    pair.model.bias = get_f64(in);
    pair.model.gamma = get_f64(in);
    pair.model.margin = get_f64(in);
    pair.model.platt_a = get_f64(in);
    pair.model.platt_b = get_f64(in);
    pair.model.support_vectors = Matrix(model.feature_dim, n_sv);
    pair.model.coef = Vector(n_sv);
    for (Eigen::Index s = 0; s < n_sv; ++s) {
      for (Eigen::Index r = 0; r < model.feature_dim; ++r)
        pair.model.support_vectors(r, s) = get_f64(in);
      pair.model.coef(s) = get_f64(in);
    }
    model.pairs.push_back(std::move(pair));
  }
  if (!in) throw IoError("truncated model file: " + path);
  return model;
}

}  // namespace hsi::svc
