#include "hsi/nsw.hpp"

#include <cmath>
#include <string>

namespace hsi::nsw {

void NswParams::validate() const {
  if (window < 3 || window % 2 == 0)
    throw ValidationError("nsw: window size must be odd and >= 3, got " + std::to_string(window));
  if (offset_min != 0 && offset_min != 1)
    throw ValidationError("nsw: offset_min must be 0 or 1");
  if (!(eps > 0.0)) throw ValidationError("nsw: variance floor must be positive");
}

double pearson(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> y, double eps) {
  if (x.size() != y.size())
    throw ValidationError("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  if (x.size() < 2) throw ValidationError("pearson: need spectra of length >= 2");
  const auto n = static_cast<double>(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  const double var_x = (x.array() - mx).square().sum() / n;
  const double var_y = (y.array() - my).square().sum() / n;
  if (var_x < eps || var_y < eps) return 0.0;
  const double cov = ((x.array() - mx) * (y.array() - my)).sum() / n;
  return cov / std::sqrt(var_x * var_y);
}

Matrix padded_neighborhood(const HsiCube& cube, Eigen::Index i, Eigen::Index j, int window) {
  if (i < 0 || i >= cube.rows() || j < 0 || j >= cube.cols())
    throw ValidationError("padded_neighborhood: pixel outside the image");
  const int a = (window - 1) / 2;
  Matrix block = Matrix::Zero(cube.bands(), static_cast<Eigen::Index>(window) * window);
  for (int du = 0; du < window; ++du)
    for (int dv = 0; dv < window; ++dv) {
      const Eigen::Index r = i - a + du;
      const Eigen::Index c = j - a + dv;
      if (r >= 0 && r < cube.rows() && c >= 0 && c < cube.cols())
        block.col(static_cast<Eigen::Index>(du) * window + dv) = cube.spectrum(r, c);
    }
  return block;
}

namespace {

// Correlations between the target spectrum and every neighborhood member,
// laid out like the padded neighborhood (omega x omega, row-major).
Vector neighborhood_correlations(const Matrix& block, Eigen::Index target_pos, double eps) {
  const auto n = static_cast<double>(block.rows());
  const Vector target = block.col(target_pos);
  const double mt = target.mean();
  const double var_t = (target.array() - mt).square().sum() / n;

  Vector corr = Vector::Zero(block.cols());
  if (var_t < eps) return corr;
  const Vector centered_t = target.array() - mt;
  for (Eigen::Index m = 0; m < block.cols(); ++m) {
    const double mm = block.col(m).mean();
    const double var_m = (block.col(m).array() - mm).square().sum() / n;
    if (var_m < eps) continue;
    const double cov = (centered_t.array() * (block.col(m).array() - mm)).sum() / n;
    corr(m) = cov / std::sqrt(var_t * var_m);
  }
  return corr;
}

}  // namespace

WindowSelection select_best_window(const HsiCube& cube, Eigen::Index i, Eigen::Index j,
                                   const NswParams& params) {
  params.validate();
  const int a = params.half_width();
  const int w = params.window;
  const int side = a + 1;

  const Matrix block = padded_neighborhood(cube, i, j, w);
  const Eigen::Index target_pos = static_cast<Eigen::Index>(a) * w + a;
  const Vector corr = neighborhood_correlations(block, target_pos, params.eps);

  // Window (p,q) covers neighborhood rows [p, p+a] and cols [q, q+a]; all of
  // them contain the target at (a,a).
  int best_p = params.offset_min, best_q = params.offset_min;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int p = params.offset_min; p <= a; ++p)
    for (int q = params.offset_min; q <= a; ++q) {
      double sum = 0.0;
      for (int du = 0; du < side; ++du)
        for (int dv = 0; dv < side; ++dv)
          sum += corr(static_cast<Eigen::Index>(p + du) * w + (q + dv));
      const double mean = sum / (static_cast<double>(side) * side);
      if (mean > best_mean) {
        best_mean = mean;
        best_p = p;
        best_q = q;
      }
    }

  WindowSelection sel;
  sel.target_row = i;
  sel.target_col = j;
  sel.offset_row = best_p;
  sel.offset_col = best_q;
  sel.mean_correlation = best_mean;
  sel.member_spectra = Matrix(static_cast<Eigen::Index>(side) * side, cube.bands());
  sel.correlations = Vector(static_cast<Eigen::Index>(side) * side);
  for (int du = 0; du < side; ++du)
    for (int dv = 0; dv < side; ++dv) {
      const Eigen::Index member = static_cast<Eigen::Index>(du) * side + dv;
      const Eigen::Index pos = static_cast<Eigen::Index>(best_p + du) * w + (best_q + dv);
      sel.member_spectra.row(member) = block.col(pos).transpose();
      sel.correlations(member) = corr(pos);
    }

  const double sum = sel.correlations.sum();
  if (std::abs(sum) < params.eps) {
    // Degenerate window (constant image, all-padding, or cancelling signs):
    // keep the pixel as is.
    sel.fallback = true;
    sel.weights = Vector::Zero(sel.correlations.size());
    const Eigen::Index target_member =
        static_cast<Eigen::Index>(a - best_p) * side + (a - best_q);
    sel.weights(target_member) = 1.0;
  } else {
    sel.weights = sel.correlations / sum;
  }
  return sel;
}

Vector reconstruct_pixel(const WindowSelection& selection) {
  return selection.member_spectra.transpose() * selection.weights;
}

HsiCube reconstruct_cube(const HsiCube& cube, const NswParams& params) {
  params.validate();
  HsiCube out(cube.rows(), cube.cols(), cube.bands());
  for (Eigen::Index i = 0; i < cube.rows(); ++i)
    for (Eigen::Index j = 0; j < cube.cols(); ++j)
      out.data().col(pixel_index(i, j, cube.cols())) =
          reconstruct_pixel(select_best_window(cube, i, j, params));
  return out;
}

}  // namespace hsi::nsw
