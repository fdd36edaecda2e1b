#pragma once

// Nearest-point map onto the Stiefel manifold St(p, m) = {X in R^{m x p} : X'X = I_p}
// under the Frobenius inner product trace(A'B).

#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"

#include <optional>
#include <string>

namespace postproj {

struct SVDResult {
  Matrix U;      // m x p, orthonormal columns
  Vector sigma;  // p values, nonincreasing
  Matrix V;      // p x p orthogonal
};

struct StiefelPoint {
  Matrix matrix;
  Eigen::Index p() const { return matrix.cols(); }
  Eigen::Index m() const { return matrix.rows(); }
};

inline SVDResult svd_thin(const Matrix& theta) {
  if (theta.size() == 0) throw ShapeError("svd_thin: empty matrix");
  if (!theta.allFinite()) throw InvalidInput("svd_thin: non-finite entries");
  if (theta.cols() > theta.rows()) throw ShapeError("svd_thin: expects m x p with p <= m");
  Eigen::JacobiSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SVDResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline double spectral_norm(const Matrix& theta) {
  if (theta.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(theta);
  return svd.singularValues()[0];
}

inline bool is_on_stiefel(const Matrix& theta, double tol) {
  if (theta.size() == 0 || theta.cols() > theta.rows()) return false;
  const Matrix gram = theta.transpose() * theta - Matrix::Identity(theta.cols(), theta.cols());
  return gram.cwiseAbs().maxCoeff() <= tol;
}

// Polar factor U V' of the thin SVD. Inputs with smallest singular value at or
// below `rank_tol` (default 1e-10 * sigma_max) have no unique nearest point and
// are rejected.
inline StiefelPoint project_stiefel(const Matrix& theta, std::optional<double> rank_tol = std::nullopt) {
  const SVDResult svd = svd_thin(theta);
  const double smax = svd.sigma[0];
  const double smin = svd.sigma[svd.sigma.size() - 1];
  const double tol = rank_tol.value_or(1e-10 * smax);
  if (!(smin > tol))
    throw NonUniqueProjection("project_stiefel: rank-deficient input, sigma_min = " + std::to_string(smin), smin);
  return StiefelPoint{svd.U * svd.V.transpose()};
}

struct SpectralRescaled {
  Matrix U_bar;
  Vector lambda_bar;
};

// U / ||U||_sp and lambda * ||U||_sp^2, which leaves every bilinear form
// u_j' diag(lambda) u_k between rows of U unchanged.
inline SpectralRescaled spectral_rescale(const Matrix& U, const Vector& lambda) {
  if (U.cols() != lambda.size()) throw ShapeError("spectral_rescale: lambda length must equal U columns");
  if (!U.allFinite() || !lambda.allFinite()) throw InvalidInput("spectral_rescale: non-finite input");
  const double s = spectral_norm(U);
  if (!(s > 0.0)) throw InvalidInput("spectral_rescale: zero matrix");
  return SpectralRescaled{U / s, lambda * (s * s)};
}

}  // namespace postproj
