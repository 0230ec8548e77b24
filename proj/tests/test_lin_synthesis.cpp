#include <gtest/gtest.h>

#include "kcontract/lin_synthesis.hpp"
#include "support.hpp"

using namespace kc;
using kc::test::diag;

namespace {

struct Pair {
  Matrix a, b;
};

// (A, B) with a planted uncontrollable block au, hidden by a random change of basis.
// The controllable part is kept well away from losing rank.
Pair planted(std::mt19937_64& rng, const Matrix& au, int nc, int m) {
  const int nu = static_cast<int>(au.rows());
  const int n = nc + nu;
  Matrix az = Matrix::Zero(n, n);
  Matrix bz = Matrix::Zero(n, m);
  do {
    az.topLeftCorner(nc, nc) = test::gaussian(rng, nc, nc);
    bz.topRows(nc) = test::gaussian(rng, nc, m);
  } while (test::controllability_conditioning(az.topLeftCorner(nc, nc), bz.topRows(nc)) < 1e-3);
  az.topRightCorner(nc, nu) = test::gaussian(rng, nc, nu);
  az.bottomRightCorner(nu, nu) = au;
  const Matrix s = test::random_nonsingular(rng, n);
  const Matrix si = s.inverse();
  return {si * az * s, si * bz};
}

Matrix random_au(std::mt19937_64& rng, int nu, int k, bool stabilizable) {
  // diagonalizable with chosen real parts so the k-sum test is clear-cut
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Vector d(nu);
  for (int i = 0; i < nu; ++i) d(i) = u(rng);
  std::sort(d.data(), d.data() + nu, std::greater<>());
  const double top = d.head(std::min(k, nu)).sum();
  if (stabilizable && nu >= k && top >= -0.2) d.array() -= (top + 0.5) / k;
  if (!stabilizable && top <= 0.2) d(0) += -top + 0.5;
  std::sort(d.data(), d.data() + nu, std::greater<>());
  const Matrix t = test::random_nonsingular(rng, nu);
  return t * d.asDiagonal() * t.inverse();
}

}  // namespace

TEST(Kalman, Examples) {
  std::mt19937_64 rng(41);
  const Matrix a = test::gaussian(rng, 4, 4);
  const Matrix b = test::gaussian(rng, 4, 2);
  EXPECT_EQ(kalman_decompose(a, b).nu, 0);

  const KalmanDecomposition zero = kalman_decompose(a, Matrix::Zero(4, 1));
  EXPECT_EQ(zero.nu, 4);
  auto ev = eigenvalues(zero.Au).real_parts();
  auto ea = eigenvalues(a).real_parts();
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], ea[i], 1e-9);

  Matrix ab(2, 2);
  ab << -1, 1, 0, 2;
  Matrix bb(2, 1);
  bb << 1, 0;
  const KalmanDecomposition kd = kalman_decompose(ab, bb);
  EXPECT_EQ(kd.nc, 1);
  EXPECT_EQ(kd.nu, 1);
  EXPECT_NEAR(kd.Au(0, 0), 2.0, 1e-12);
}

TEST(Kalman, StaircaseSoundness) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const int nc = 1 + trial % 4;
    const int nu = trial % 3;
    const Pair p = planted(rng, test::gaussian(rng, nu, nu), nc, 1 + trial % 2);
    const KalmanDecomposition kd = kalman_decompose(p.a, p.b);
    ASSERT_EQ(kd.nu, nu) << trial;
    const Matrix az = kd.T * p.a * kd.T.inverse();
    const double lower = az.bottomLeftCorner(kd.nu, kd.nc).norm();
    EXPECT_LE(lower, 1e-8 * p.a.norm());
    Matrix ctrb(kd.nc, kd.nc * kd.Bc.cols());
    Matrix blk = kd.Bc;
    for (int i = 0; i < kd.nc; ++i) {
      ctrb.middleCols(i * kd.Bc.cols(), kd.Bc.cols()) = blk;
      blk = kd.Ac * blk;
    }
    Eigen::JacobiSVD<Matrix> svd(ctrb);
    const auto sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-10 * sv(0);
    EXPECT_EQ(rank, kd.nc);
  }
}

TEST(Stabilizable, Examples) {
  std::mt19937_64 rng(43);
  const Matrix a = test::gaussian(rng, 4, 4);
  const Matrix b = test::gaussian(rng, 4, 1);
  for (int k = 1; k <= 4; ++k) EXPECT_TRUE(k_order_stabilizable(a, b, k).holds);
  const Pair good = planted(rng, diag({1.0, -3.0}), 2, 1);
  EXPECT_TRUE(k_order_stabilizable(good.a, good.b, 2).holds);
  const Pair bad = planted(rng, diag({1.0, 1.0}), 2, 1);
  const StabilizabilityTest t = k_order_stabilizable(bad.a, bad.b, 2);
  EXPECT_FALSE(t.holds);
  EXPECT_EQ(t.nu, 2);
}

TEST(ConstructW, Examples) {
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  Matrix b(2, 1);
  b << 0, 1;
  const Matrix w = construct_W(a, b, 0.0, kalman_decompose(a, b));
  EXPECT_EQ(inertia_symmetric(w), (InertiaTriple{0, 0, 2}));
  EXPECT_LT(max_eig_sym(symmetrize(w * a.transpose() + a * w - b * b.transpose())), 0.0);

  std::mt19937_64 rng(44);
  const Pair p = planted(rng, diag({1.0, -3.0}), 2, 1);
  const KalmanDecomposition kd = kalman_decompose(p.a, p.b);
  const Matrix w2 = construct_W(p.a, p.b, 0.0, kd);
  EXPECT_EQ(inertia_symmetric(w2), (InertiaTriple{1, 0, 3}));
  EXPECT_LT(max_eig_sym(symmetrize(w2 * p.a.transpose() + p.a * w2 - p.b * p.b.transpose())), 0.0);
}

TEST(ConstructW, SpectrumSeparation) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 100; ++trial) {
    const int nu = 1 + trial % 3;
    const Pair p = planted(rng, test::gaussian(rng, nu, nu), 2, 1);
    const KalmanDecomposition kd = kalman_decompose(p.a, p.b);
    const double mu = 0.3 * (trial % 5) - 0.6;
    Matrix w;
    try {
      w = construct_W(p.a, p.b, mu, kd);
    } catch (const NumericError&) {
      continue;
    }
    int above = 0;
    for (double r : eigenvalues(kd.Au).real_parts()) above += r > mu;
    EXPECT_GE(inertia_symmetric(w).neg, above);
    const Matrix s = w * p.a.transpose() + p.a * w - p.b * p.b.transpose() - 2.0 * mu * w;
    EXPECT_LT(max_eig_sym(symmetrize(s)), 0.0);
  }
}

TEST(StabilizabilityCertificate, Examples) {
  std::mt19937_64 rng(46);
  const Matrix a = test::gaussian(rng, 3, 3);
  const Matrix b = test::gaussian(rng, 3, 1);
  const StabilizabilityCertificate c1 = stabilizability_certificate(a, b, 1);
  EXPECT_EQ(c1.ell, 1);
  EXPECT_LE(c1.mus[0], 0.0);
  EXPECT_EQ(inertia_symmetric(c1.mats[0]), (InertiaTriple{0, 0, 3}));

  const Pair p = planted(rng, diag({1.0, -3.0}), 2, 1);
  const StabilizabilityCertificate c2 = stabilizability_certificate(p.a, p.b, 2);
  EXPECT_EQ(c2.ell, 2);
  EXPECT_EQ(c2.ds, (std::vector<int>{0, 1, 2}));
  EXPECT_LE(c2.rate_sum(), 0.0);
  EXPECT_TRUE(verify_stabilizability_certificate(p.a, p.b, 2, c2).accept);

  const Pair q = planted(rng, diag({5.0}), 3, 1);
  const StabilizabilityCertificate c3 = stabilizability_certificate(q.a, q.b, 2);
  EXPECT_GT(c3.mus[0], 5.0);
  EXPECT_TRUE(c3.colinear);
  EXPECT_TRUE(verify_stabilizability_certificate(q.a, q.b, 2, c3).accept);

  const Pair bad = planted(rng, diag({1.0, 1.0}), 2, 1);
  EXPECT_THROW(stabilizability_certificate(bad.a, bad.b, 2), ConditionViolation);
}

TEST(SynthesizeGain, InfiniteGainMargin) {
  std::mt19937_64 rng(47);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 3;
    const int nu = trial % 4;
    const int nc = 1 + trial % 3;
    const Pair p = planted(rng, nu ? random_au(rng, nu, k, true) : Matrix(0, 0), nc, 1 + trial % 2);
    ASSERT_TRUE(k_order_stabilizable(p.a, p.b, k).holds) << trial;
    const StabilizabilityCertificate c = stabilizability_certificate(p.a, p.b, k);
    for (const Matrix& w : c.mats) {
      const Matrix lhs = p.b.transpose() * w.inverse();
      const Matrix ref = p.b.transpose() * c.mats[0].inverse();
      EXPECT_LE((lhs - ref).norm(), 1e-6 * ref.norm());
    }
    for (double rho : {1.0, 10.0, 100.0}) {
      const Matrix K = synthesize_gain(c, p.b, rho);
      EXPECT_LT(eigen_sum_max(p.a - p.b * K, k), 0.0) << "trial " << trial << " rho " << rho;
    }
    ++tested;
  }
  EXPECT_EQ(tested, 200);
}

TEST(SynthesizeGain, UnactuatedAndBadRho) {
  const Matrix a = diag({1.0, -3.0});
  const Matrix b = Matrix::Zero(2, 1);
  const StabilizabilityCertificate c = stabilizability_certificate(a, b, 2);
  const Matrix K = synthesize_gain(c, b, 1.0);
  EXPECT_LT(K.norm(), 1e-14);
  EXPECT_TRUE(k_contractive_lti(a - b * K, 2).holds);
  EXPECT_THROW(synthesize_gain(c, b, 0.5), std::invalid_argument);
}

TEST(SynthesizeGain, NegativeControl) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 3;
    const int nu = k + trial % 2;
    const Pair p = planted(rng, random_au(rng, nu, k, false), 2, 1);
    ASSERT_FALSE(k_order_stabilizable(p.a, p.b, k).holds) << trial;
    for (int g = 0; g < 20; ++g) {
      const Matrix K = 5.0 * test::gaussian(rng, 1, p.a.rows());
      EXPECT_GE(eigen_sum_max(p.a - p.b * K, k), 0.0);
    }
  }
}
