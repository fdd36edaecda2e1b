#include "postproj/samplers.hpp"
#include "postproj/stiefel.hpp"

#include <gtest/gtest.h>

using namespace postproj;

namespace {

Matrix gaussian(Eigen::Index m, Eigen::Index p, Engine& eng) {
  Matrix g(m, p);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng::standard_normal(eng);
  return g;
}

const Matrix kTheta3 = (Matrix(2, 2) << 0.25, 0.75, 0.75, 0.25).finished();
const Matrix kAnti = (Matrix(2, 2) << 0, 1, 1, 0).finished();

}  // namespace

TEST(SvdThin, Examples) {
  const auto d = svd_thin((Matrix(2, 2) << 3, 0, 0, 2).finished());
  EXPECT_NEAR(d.sigma[0], 3.0, 1e-14);
  EXPECT_NEAR(d.sigma[1], 2.0, 1e-14);
  const auto t = svd_thin(kTheta3);
  EXPECT_NEAR(t.sigma[0], 1.0, 1e-12);
  EXPECT_NEAR(t.sigma[1], 0.5, 1e-12);
  const auto o = svd_thin(Matrix::Identity(4, 2));
  EXPECT_NEAR(o.sigma[0], 1.0, 1e-14);
  EXPECT_NEAR(o.sigma[1], 1.0, 1e-14);
}

TEST(SvdThin, ReconstructsAndSorts) {
  Engine eng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix th = gaussian(5, 3, eng);
    const auto s = svd_thin(th);
    EXPECT_LE((s.U * s.sigma.asDiagonal() * s.V.transpose() - th).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(is_on_stiefel(s.U, 1e-10));
    for (Eigen::Index k = 1; k < s.sigma.size(); ++k) EXPECT_GE(s.sigma[k - 1], s.sigma[k]);
  }
}

TEST(SvdThin, RejectsBadInput) {
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(svd_thin(bad), InvalidInput);
  EXPECT_THROW(svd_thin(Matrix::Ones(2, 3)), ShapeError);
}

TEST(ProjectStiefel, Examples) {
  EXPECT_LE((project_stiefel(Matrix::Identity(2, 2)).matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((project_stiefel(kTheta3).matrix - kAnti).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix spd = (Matrix(2, 2) << 2, 0, 0, 3).finished();
  EXPECT_LE((project_stiefel(spd).matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProjectStiefel, RankDeficientInputIsRefused) {
  const Matrix r1 = (Matrix(3, 2) << 1, 2, 2, 4, 3, 6).finished();
  try {
    project_stiefel(r1);
    FAIL() << "expected NonUniqueProjection";
  } catch (const NonUniqueProjection& e) {
    EXPECT_LT(e.sigma_min(), 1e-10);
  }
  EXPECT_THROW(project_stiefel(Matrix::Zero(2, 2)), NonUniqueProjection);
}

TEST(ProjectStiefel, OutputIsOrthonormalAndScaleInvariant) {
  Engine eng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix th = gaussian(4, 2, eng);
    const Matrix t = project_stiefel(th).matrix;
    EXPECT_TRUE(is_on_stiefel(t, 1e-10));
    for (double c : {0.1, 1.0, 7.0}) EXPECT_LE((project_stiefel(c * th).matrix - t).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ProjectStiefel, BeatsRandomStiefelPoints) {
  Engine eng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix th = gaussian(4, 3, eng);
    const double best = (project_stiefel(th).matrix - th).norm();
    for (int k = 0; k < 50; ++k) {
      const Matrix other = project_stiefel(gaussian(4, 3, eng)).matrix;
      EXPECT_LE(best, (other - th).norm() + 1e-12);
    }
  }
}

TEST(ProjectStiefel, TwoLipschitzTowardsStiefelPoints) {
  Engine eng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix th = 2.0 * gaussian(3, 2, eng);
    const Matrix tilde = project_stiefel(gaussian(3, 2, eng)).matrix;
    EXPECT_LE((project_stiefel(th).matrix - tilde).norm(), 2.0 * (th - tilde).norm() + 1e-12);
  }
}

TEST(ProjectStiefel, CounterexampleDistances) {
  const Matrix t1 = Matrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ((kAnti - t1).norm(), 2.0);
  EXPECT_DOUBLE_EQ((kTheta3 - t1).norm(), 1.5);
  EXPECT_NEAR((project_stiefel(kTheta3).matrix - project_stiefel(t1).matrix).norm(), 2.0, 1e-12);
}

TEST(ProjectStiefel, GaussianMatricesAreFullRank) {
  Engine eng(5);
  for (int trial = 0; trial < 10000; ++trial) EXPECT_NO_THROW(project_stiefel(gaussian(3, 2, eng)));
}

TEST(ProjectStiefel, SingleColumnIsNormalisation) {
  Engine eng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix v = gaussian(5, 1, eng);
    EXPECT_LE((project_stiefel(v).matrix - v / v.norm()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(IsOnStiefel, Examples) {
  EXPECT_TRUE(is_on_stiefel(Matrix::Identity(3, 2), 1e-14));
  EXPECT_FALSE(is_on_stiefel(2.0 * Matrix::Identity(2, 2), 1e-6));
  EXPECT_FALSE(is_on_stiefel(Matrix::Identity(2, 3), 1e-6));
}

TEST(SpectralRescale, Examples) {
  const Matrix U = 2.0 * Matrix::Identity(3, 2);
  const auto r = spectral_rescale(U, Vector::Ones(2));
  EXPECT_LE((r.U_bar - Matrix::Identity(3, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((r.lambda_bar - Vector::Constant(2, 4.0)).cwiseAbs().maxCoeff(), 1e-14);

  const Matrix Q = Matrix::Identity(3, 2);
  const auto same = spectral_rescale(Q, Vector{{1.5, -0.5}});
  EXPECT_LE((same.U_bar - Q).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((same.lambda_bar - Vector{{1.5, -0.5}}).cwiseAbs().maxCoeff(), 1e-15);

  EXPECT_THROW(spectral_rescale(Matrix::Zero(3, 2), Vector::Ones(2)), InvalidInput);
  EXPECT_THROW(spectral_rescale(Q, Vector::Ones(3)), ShapeError);
}

TEST(SpectralRescale, PreservesBilinearForms) {
  Engine eng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix U = 3.0 * gaussian(6, 3, eng);
    Vector lambda(3);
    for (auto& x : lambda) x = rng::standard_normal(eng);
    const auto r = spectral_rescale(U, lambda);
    EXPECT_NEAR(spectral_norm(r.U_bar), 1.0, 1e-12);
    const Matrix before = U * lambda.asDiagonal() * U.transpose();
    const Matrix after = r.U_bar * r.lambda_bar.asDiagonal() * r.U_bar.transpose();
    EXPECT_LE((before - after).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, before.cwiseAbs().maxCoeff()));
  }
}
