#pragma once

#include "hsi/core.hpp"

namespace hsi::nsw {

struct NswParams {
  int window = 3;      // omega: odd, >= 3
  int offset_min = 0;  // smallest window offset p,q (0 default, 1 literal variant)
  double eps = 1e-12;  // variance floor for degenerate spectra

  int half_width() const { return (window - 1) / 2; }
  void validate() const;
};

// Pearson correlation of two spectra with population normalization; returns 0
// when either variance falls below the floor (constant or zero-padded
// spectra).
double pearson(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y, double eps);

// The omega x omega neighborhood of (i,j) as a B x (omega*omega) matrix,
// members in row-major window order; out-of-image positions are zero spectra.
Matrix padded_neighborhood(const HsiCube& cube, Eigen::Index i, Eigen::Index j, int window);

// The winning nested window for one target pixel.
struct WindowSelection {
  Eigen::Index target_row = 0;
  Eigen::Index target_col = 0;
  int offset_row = 0;        // chosen k
  int offset_col = 0;        // chosen l
  double mean_correlation = 0.0;
  Matrix member_spectra;     // (a+1)^2 x B, window row-major order
  Vector correlations;       // raw target-to-member correlations
  Vector weights;            // correlations / sum; weights sum to 1
  bool fallback = false;     // |sum| < eps: weight 1 on the target itself
};

// Enumerates all candidate windows containing the target, scores each by the
// mean correlation between the target spectrum and every member (the target's
// self-correlation included), and returns the argmax; ties break
// lexicographically by (k,l).
WindowSelection select_best_window(const HsiCube& cube, Eigen::Index i, Eigen::Index j,
                                   const NswParams& params);

// Correlation-weighted average of the selected window's member spectra.
Vector reconstruct_pixel(const WindowSelection& selection);

// Applies the per-pixel reconstruction everywhere; the result is cube-shaped
// and doubles as the B x (MN) matrix fed to PCA.
HsiCube reconstruct_cube(const HsiCube& cube, const NswParams& params);

}  // namespace hsi::nsw
