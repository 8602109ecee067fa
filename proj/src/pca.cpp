#include "openset/pca.hpp"

#include <algorithm>
#include <string>

#include "openset/error.hpp"

namespace openset {

PcaModel pca_fit(const Matrix& X, int m) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 2) throw DataError("pca: need at least 2 rows, got " + std::to_string(n));
  if (m < 1 || m > std::min<Eigen::Index>(n, d)) {
    throw DataError("pca: component count " + std::to_string(m) + " outside [1, min(n=" + std::to_string(n) +
                    ", D=" + std::to_string(d) + ")]");
  }
  if (!X.allFinite()) throw DataError("pca: non-finite input");

  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(m).transpose();
  model.singular_values = svd.singularValues().head(m);

  for (int j = 0; j < m; ++j) {
    Eigen::Index arg;
    model.components.row(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(j, arg) < 0.0) model.components.row(j) *= -1.0;
  }
  return model;
}

double pca_score(const PcaModel& model, const VectorRef& x) {
  if (x.size() != model.dim()) {
    throw DataError("pca: dimension mismatch (model " + std::to_string(model.dim()) + ", input " +
                    std::to_string(x.size()) + ")");
  }
  const Vector c = x - model.mean;
  const Vector residual = c - model.components.transpose() * (model.components * c);
  return -residual.squaredNorm();
}

}  // namespace openset
