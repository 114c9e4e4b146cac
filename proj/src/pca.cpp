#include "hsi/pca.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace hsi::pca {

PcaModel fit_pca(const Matrix& data, Eigen::Index dims, bool center) {
  const Eigen::Index bands = data.rows();
  const Eigen::Index samples = data.cols();
  if (dims < 1 || dims > std::min(bands, samples))
    throw ValidationError("fit_pca: dims must be in 1..min(bands, samples), got " +
                          std::to_string(dims));
  if (!data.allFinite()) throw ValidationError("fit_pca: non-finite input");

  PcaModel model;
  model.centered = center;
  model.mean = center ? Vector(data.rowwise().mean()) : Vector(Vector::Zero(bands));

  const Matrix centered = data.colwise() - model.mean;
  const Matrix scatter = centered * centered.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(scatter);
  if (solver.info() != Eigen::Success) throw SolverError("fit_pca: eigensolver did not converge");

  // Eigen returns ascending order; take the top block reversed.
  model.projection = Matrix(bands, dims);
  model.eigenvalues = Vector(dims);
  for (Eigen::Index k = 0; k < dims; ++k) {
    const Eigen::Index src = bands - 1 - k;
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v(argmax) < 0.0) v = -v;
    model.projection.col(k) = v;
    model.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(src));
  }
  return model;
}

Matrix transform(const PcaModel& model, const Matrix& data) {
  if (data.rows() != model.input_dim())
    throw ValidationError("pca transform: band count " + std::to_string(data.rows()) +
                          " does not match model (" + std::to_string(model.input_dim()) + ")");
  return model.projection.transpose() * (data.colwise() - model.mean);
}

}  // namespace hsi::pca
