#include <gtest/gtest.h>

#include <cmath>

#include "kcontract/kernels.hpp"
#include "support.hpp"

using namespace kc;

TEST(Kernels, CompoundSerialMatchesParallel) {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 8; ++n)
    for (int k = 1; k <= n; ++k) {
      const Matrix q = test::gaussian(rng, n, n);
      const Matrix s = kernels::serial::multiplicative_compound(q, k);
      const Matrix p = kernels::omp::multiplicative_compound(q, k);
      ASSERT_EQ(s.rows(), p.rows());
      EXPECT_EQ((s - p).cwiseAbs().maxCoeff(), 0.0) << n << " " << k;
    }
}

TEST(Kernels, VertexMarginsSerialMatchesParallel) {
  std::mt19937_64 rng(22);
  std::vector<Matrix> verts;
  for (int i = 0; i < 64; ++i) verts.push_back(test::gaussian(rng, 5, 5));
  const Matrix p = test::random_symmetric(rng, 5);
  const auto s = kernels::serial::vertex_margins(verts, p, 0.3);
  const auto o = kernels::omp::vertex_margins(verts, p, 0.3);
  ASSERT_EQ(s.size(), o.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], o[i]);
  const Matrix s0 = verts[3].transpose() * p + p * verts[3] - 0.6 * p;
  EXPECT_NEAR(s[3], max_eig_sym(symmetrize(s0)), 1e-12);
}

TEST(Kernels, FlowPointsSerialMatchesParallel) {
  const VectorField f = [](const Vector& x) {
    Vector d(2);
    d << x(1), -std::sin(x(0));
    return d;
  };
  std::vector<Vector> x0;
  for (int i = 0; i < 40; ++i) x0.push_back(Vector::Constant(2, 0.05 * i));
  const auto s = kernels::serial::flow_points(f, x0, 1.3, 1e-2);
  const auto o = kernels::omp::flow_points(f, x0, 1.3, 1e-2);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ((s[i] - o[i]).norm(), 0.0);
}

TEST(Kernels, FlowPointsBlowUpIsNaN) {
  const VectorField f = [](const Vector& x) { return Vector(x.array().square()); };
  const auto out = kernels::serial::flow_points(f, {Vector::Constant(1, 10.0)}, 5.0, 1e-2);
  EXPECT_TRUE(std::isnan(out[0](0)));
}

TEST(Kernels, StepCountShortensLastStep) {
  EXPECT_EQ(step_count(1.0, 1e-3), 1000);
  EXPECT_EQ(step_count(1.0005, 1e-3), 1001);
  const VectorField f = [](const Vector& x) { return Vector(-x); };
  const auto out = kernels::serial::flow_points(f, {Vector::Ones(1)}, 1.0005, 1e-3);
  EXPECT_NEAR(out[0](0), std::exp(-1.0005), 1e-10);
}
