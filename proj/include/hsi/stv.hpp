#pragma once

#include "hsi/core.hpp"

namespace hsi::stv {

struct StvParams {
  double beta1 = 0.2;     // TV weight, > 0 in the full model (0 allowed: no TV)
  double beta2 = 4.0;     // quadratic gradient weight, >= 0
  double mu = 5.0;        // ADMM penalty
  double tol = 1e-5;      // relative-change stopping tolerance
  int max_iters = 500;
  bool isotropic = false;  // vector shrinkage instead of componentwise
  double cg_tol = 1e-10;   // inner linear-solve relative tolerance
  int cg_max_iters = 1000;

  void validate() const;
};

// Forward differences with replicate (Neumann) boundary: the last row of the
// vertical component and the last column of the horizontal component are 0.
struct GradientField {
  Map2d horizontal;  // U(i,j+1) - U(i,j)
  Map2d vertical;    // U(i+1,j) - U(i,j)
};

GradientField gradient(const Map2d& u);

// Negative adjoint of gradient: <grad U, G> = -<U, divergence(G)> exactly.
Map2d divergence(const GradientField& g);

// The denoising objective 0.5|U-V|^2 + beta1*|grad U|_1 + beta2/2*|grad U|^2
// (anisotropic l1 by default, per-pixel vector magnitudes when isotropic).
double objective(const Map2d& u, const Map2d& v, double beta1, double beta2,
                 bool isotropic = false);

struct DenoiseResult {
  Map2d u;
  int iterations = 0;
  bool converged = true;      // false: iteration cap hit, best iterate returned
  double relative_change = 0.0;
  double primal_residual = 0.0;  // |grad U - Z|_F at termination
  double dual_residual = 0.0;    // mu * |gradT (Z - Z_prev)|_F at termination
};

// Minimizes the objective subject to U = pinned on the mask, by ADMM on the
// splitting Z = grad U. The Z-step is (vector) soft-thresholding at
// beta1/(beta2+mu); the U-step solves (I + mu*gradT*grad) U = V + mu*gradT(Z-L)
// with Jacobi-preconditioned conjugate gradient; pinning is re-imposed after
// every U-step. Stops when the relative change of U drops below tol.
DenoiseResult stv_denoise(const Map2d& v, const Mask2d& pinned_mask, const Map2d& pinned_values,
                          const StvParams& params);

// Channelwise denoising of the probability tensor, each channel pinned at the
// training pixels to its own value. Post-smoothing channels are not
// renormalized; the final argmax does not need it.
ProbabilityTensor smooth_tensor(const ProbabilityTensor& v, const TrainingSet& training,
                                const StvParams& params, bool* all_converged = nullptr);

// Argmax labeling over non-background pixels; ties take the smallest class
// id, background stays 0.
LabelRaster classify(const ProbabilityTensor& u);

}  // namespace hsi::stv
