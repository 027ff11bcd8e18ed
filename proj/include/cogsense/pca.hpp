#pragma once

#include "cogsense/sequence.hpp"

namespace cogsense {

struct PcaResult {
  Vector mean;                  // column means of the input
  Vector eigenvalues;           // all, descending
  Vector explained_ratio;       // eigenvalues / total variance
  Matrix components;            // d x k, retained eigenvectors as columns
  std::size_t retained = 0;     // smallest k reaching the variance target
  Matrix projections;           // n x k

  double explained_by_retained() const;
};

/// Eigendecomposition of the sample covariance; keeps the smallest k whose
/// cumulative explained variance reaches `variance_target`.
PcaResult pca_embed(const Matrix& data, double variance_target = 0.95);

/// Mean squared reconstruction error using the first k eigenvectors.
double pca_reconstruction_error(const Matrix& data, const PcaResult& pca, std::size_t k);

}  // namespace cogsense
