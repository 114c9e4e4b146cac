#include "hsi/stv.hpp"

#include <cmath>

namespace hsi::stv {

void StvParams::validate() const {
  if (beta1 < 0.0) throw ValidationError("stv: beta1 must be >= 0");
  if (beta2 < 0.0) throw ValidationError("stv: beta2 must be >= 0");
  if (!(mu > 0.0)) throw ValidationError("stv: ADMM penalty mu must be > 0");
  if (!(tol > 0.0)) throw ValidationError("stv: tolerance must be > 0");
  if (max_iters < 1) throw ValidationError("stv: max_iters must be >= 1");
}

GradientField gradient(const Map2d& u) {
  const Eigen::Index m = u.rows(), n = u.cols();
  GradientField g{Map2d::Zero(m, n), Map2d::Zero(m, n)};
  if (n > 1) g.horizontal.leftCols(n - 1) = u.rightCols(n - 1) - u.leftCols(n - 1);
  if (m > 1) g.vertical.topRows(m - 1) = u.bottomRows(m - 1) - u.topRows(m - 1);
  return g;
}

namespace {

// gradT(G) = -divergence(G); kept separate so the normal-equation operator
// reads the way it is written.
Map2d gradient_adjoint(const GradientField& g) {
  const Eigen::Index m = g.horizontal.rows(), n = g.horizontal.cols();
  Map2d out = Map2d::Zero(m, n);
  if (n > 1) {
    out.leftCols(n - 1) -= g.horizontal.leftCols(n - 1);
    out.rightCols(n - 1) += g.horizontal.leftCols(n - 1);
  }
  if (m > 1) {
    out.topRows(m - 1) -= g.vertical.topRows(m - 1);
    out.bottomRows(m - 1) += g.vertical.topRows(m - 1);
  }
  return out;
}

// (I + mu * gradT grad) u
Map2d normal_op(const Map2d& u, double mu) { return u + mu * gradient_adjoint(gradient(u)); }

// Jacobi-preconditioned CG on the normal operator, warm-started at x0.
Map2d solve_normal(const Map2d& rhs, const Map2d& x0, double mu, double tol, int max_iters) {
  const Eigen::Index m = rhs.rows(), n = rhs.cols();

  // Diagonal of I + mu*gradT*grad: each pixel appears in one forward
  // difference per in-bounds neighbor.
  Map2d diag = Map2d::Constant(m, n, 1.0);
  if (n > 1) {
    diag.leftCols(n - 1) += mu;
    diag.rightCols(n - 1) += mu;
  }
  if (m > 1) {
    diag.topRows(m - 1) += mu;
    diag.bottomRows(m - 1) += mu;
  }

  Map2d x = x0;
  Map2d r = rhs - normal_op(x, mu);
  const double rhs_norm = std::sqrt((rhs * rhs).sum());
  const double stop = tol * std::max(rhs_norm, 1e-300);
  if (std::sqrt((r * r).sum()) <= stop) return x;

  Map2d z = r / diag;
  Map2d p = z;
  double rz = (r * z).sum();
  for (int it = 0; it < max_iters; ++it) {
    const Map2d ap = normal_op(p, mu);
    const double alpha = rz / (p * ap).sum();
    x += alpha * p;
    r -= alpha * ap;
    if (std::sqrt((r * r).sum()) <= stop) break;
    z = r / diag;
    const double rz_next = (r * z).sum();
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return x;
}

void shrink(GradientField& z, double threshold, bool isotropic) {
  if (threshold <= 0.0) return;
  if (!isotropic) {
    z.horizontal = z.horizontal.sign() * (z.horizontal.abs() - threshold).max(0.0);
    z.vertical = z.vertical.sign() * (z.vertical.abs() - threshold).max(0.0);
    return;
  }
  const Map2d mag = (z.horizontal.square() + z.vertical.square()).sqrt();
  const Map2d scale = (mag > 0.0).select((mag - threshold).max(0.0) / mag, Map2d::Zero(mag.rows(), mag.cols()));
  z.horizontal *= scale;
  z.vertical *= scale;
}

}  // namespace

Map2d divergence(const GradientField& g) { return -gradient_adjoint(g); }

double objective(const Map2d& u, const Map2d& v, double beta1, double beta2, bool isotropic) {
  const GradientField g = gradient(u);
  const double fidelity = 0.5 * (u - v).square().sum();
  const double quad = 0.5 * beta2 * (g.horizontal.square().sum() + g.vertical.square().sum());
  const double tv = isotropic ? (g.horizontal.square() + g.vertical.square()).sqrt().sum()
                              : g.horizontal.abs().sum() + g.vertical.abs().sum();
  return fidelity + beta1 * tv + quad;
}

DenoiseResult stv_denoise(const Map2d& v, const Mask2d& pinned_mask, const Map2d& pinned_values,
                          const StvParams& params) {
  params.validate();
  if (!v.allFinite()) throw ValidationError("stv_denoise: non-finite input map");
  if (pinned_mask.rows() != v.rows() || pinned_mask.cols() != v.cols())
    throw ValidationError("stv_denoise: mask shape mismatch");
  if (pinned_values.rows() != v.rows() || pinned_values.cols() != v.cols())
    throw ValidationError("stv_denoise: pinned-value shape mismatch");

  const double mu = params.mu;
  const double threshold = params.beta1 / (params.beta2 + mu);
  const double merge = mu / (params.beta2 + mu);

  DenoiseResult res;
  res.u = pinned_mask.select(pinned_values, v);
  GradientField z = gradient(res.u);
  GradientField lambda{Map2d::Zero(v.rows(), v.cols()), Map2d::Zero(v.rows(), v.cols())};

  res.converged = false;
  for (int it = 1; it <= params.max_iters; ++it) {
    const GradientField gu = gradient(res.u);
    const GradientField z_prev = z;
    z.horizontal = merge * (gu.horizontal + lambda.horizontal);
    z.vertical = merge * (gu.vertical + lambda.vertical);
    shrink(z, threshold, params.isotropic);

    const GradientField rhs_field{z.horizontal - lambda.horizontal,
                                  z.vertical - lambda.vertical};
    const Map2d rhs = v + mu * gradient_adjoint(rhs_field);
    const Map2d u_prev = res.u;
    res.u = solve_normal(rhs, res.u, mu, params.cg_tol, params.cg_max_iters);
    res.u = pinned_mask.select(pinned_values, res.u);

    const GradientField gu_new = gradient(res.u);
    lambda.horizontal += gu_new.horizontal - z.horizontal;
    lambda.vertical += gu_new.vertical - z.vertical;

    res.iterations = it;
    res.relative_change =
        std::sqrt((res.u - u_prev).square().sum()) / std::max(std::sqrt(u_prev.square().sum()), 1e-300);
    res.primal_residual = std::sqrt((gu_new.horizontal - z.horizontal).square().sum() +
                                    (gu_new.vertical - z.vertical).square().sum());
    const GradientField dz{z.horizontal - z_prev.horizontal, z.vertical - z_prev.vertical};
    res.dual_residual = mu * std::sqrt(gradient_adjoint(dz).square().sum());
    if (res.relative_change < params.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

ProbabilityTensor smooth_tensor(const ProbabilityTensor& v, const TrainingSet& training,
                                const StvParams& params, bool* all_converged) {
  if (training.rows() != v.rows() || training.cols() != v.cols())
    throw ValidationError("smooth_tensor: training mask shape mismatch");
  ProbabilityTensor u(v.rows(), v.cols(), v.classes());
  u.background() = v.background();
  bool ok = true;
  for (Eigen::Index k = 0; k < v.classes(); ++k) {
    const Map2d vk = v.channel(k);
    const DenoiseResult res = stv_denoise(vk, training.mask(), vk, params);
    ok = ok && res.converged;
    u.set_channel(k, res.u);
  }
  if (all_converged) *all_converged = ok;
  return u;
}

LabelRaster classify(const ProbabilityTensor& u) {
  LabelRaster out(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (u.is_background(i, j)) continue;
      Eigen::Index best = 0;
      double best_val = u.at(i, j, 0);
      for (Eigen::Index k = 1; k < u.classes(); ++k)
        if (u.at(i, j, k) > best_val) {
          best_val = u.at(i, j, k);
          best = k;
        }
      out.at(i, j) = static_cast<int>(best) + 1;
    }
  return out;
}

}  // namespace hsi::stv
