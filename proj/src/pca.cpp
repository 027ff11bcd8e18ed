#include "cogsense/pca.hpp"

#include <Eigen/Eigenvalues>

namespace cogsense {

namespace {

// Full eigenbasis, descending; recomputed for reconstruction queries.
void eigen_basis(const Matrix& centered, Vector& values, Matrix& vectors) {
  const auto n = static_cast<double>(centered.rows());
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / std::max(1.0, n - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
  values = solver.eigenvalues().reverse().cwiseMax(0.0);
  vectors = solver.eigenvectors().rowwise().reverse();
}

}  // namespace

double PcaResult::explained_by_retained() const {
  return explained_ratio.head(static_cast<Eigen::Index>(retained)).sum();
}

PcaResult pca_embed(const Matrix& data, double variance_target) {
  if (data.rows() < 2 || data.cols() == 0) throw Error("PCA needs at least two rows");
  PcaResult r;
  r.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - r.mean.transpose();
  Matrix vectors;
  eigen_basis(centered, r.eigenvalues, vectors);
  const double total = r.eigenvalues.sum();
  r.explained_ratio = total > 0.0 ? Vector(r.eigenvalues / total) : Vector::Zero(r.eigenvalues.size());
  double cumulative = 0.0;
  r.retained = static_cast<std::size_t>(r.eigenvalues.size());
  for (Eigen::Index k = 0; k < r.explained_ratio.size(); ++k) {
    cumulative += r.explained_ratio[k];
    if (cumulative >= variance_target - 1e-12) {
      r.retained = static_cast<std::size_t>(k + 1);
      break;
    }
  }
  if (total == 0.0) r.retained = 1;
  r.components = vectors.leftCols(static_cast<Eigen::Index>(r.retained));
  r.projections = centered * r.components;
  return r;
}

double pca_reconstruction_error(const Matrix& data, const PcaResult& pca, std::size_t k) {
  const Matrix centered = data.rowwise() - pca.mean.transpose();
  Vector values;
  Matrix vectors;
  eigen_basis(centered, values, vectors);
  const Matrix basis = vectors.leftCols(static_cast<Eigen::Index>(k));
  const Matrix recon = centered * basis * basis.transpose();
  return (centered - recon).squaredNorm() / static_cast<double>(data.rows());
}

}  // namespace cogsense
