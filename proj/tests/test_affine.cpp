#include <gtest/gtest.h>

#include <random>

#include "ifs/affine.hpp"
#include "oracles.hpp"

using namespace ifs;

namespace {

void expect_mat_near(const Mat2& a, const Mat2& b, double tol) {
  EXPECT_NEAR(a.a11, b.a11, tol);
  EXPECT_NEAR(a.a12, b.a12, tol);
  EXPECT_NEAR(a.a21, b.a21, tol);
  EXPECT_NEAR(a.a22, b.a22, tol);
}

}  // namespace

TEST(Affine, ApplyMapsTriangleVertices) {
  EXPECT_EQ(apply(oracle::triangle_f1(), {0, 1}), (Vec2{0.5, 0.5}));
  EXPECT_EQ(apply(oracle::triangle_f2(), {0, 0}), (Vec2{0, 1}));
  EXPECT_EQ(apply(AffineMap::identity(), {0.3, 0.7}), (Vec2{0.3, 0.7}));
}

TEST(Affine, ComposeExamples) {
  const auto f1 = oracle::triangle_f1(), f2 = oracle::triangle_f2();
  expect_mat_near(compose(f2, f2).linear, {-0.5, -0.25, 0.5, -0.25}, 0.0);
  expect_mat_near(compose(f1, f1).linear, {1.0, 0.75, 0.0, 0.25}, 0.0);
  EXPECT_EQ(compose(AffineMap::identity(), f1), f1);
}

TEST(Affine, LipschitzExamples) {
  const auto a1 = oracle::triangle_f1().linear, a2 = oracle::triangle_f2().linear;
  EXPECT_NEAR(spectral_norm(a1), std::sqrt((1.5 + std::sqrt(1.25)) / 2.0), 1e-15);
  EXPECT_NEAR(spectral_norm(a1 * a2), oracle::kInvSqrt2, 1e-15);
  EXPECT_NEAR(spectral_norm(a1 * a1), oracle::kLipEndingF1, 1e-15);
  EXPECT_NEAR(spectral_norm(a1), oracle::power_iteration_norm(a1), 1e-12);
}

TEST(Affine, DeterminantExamples) {
  EXPECT_EQ(determinant(oracle::triangle_f1().linear), 0.5);
  EXPECT_EQ(determinant(oracle::triangle_f2().linear), 0.5);
  EXPECT_EQ(determinant(Mat2::identity()), 1.0);
}

TEST(Affine, FixedPoints) {
  const auto p = fixed_point(oracle::triangle_f2());
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->x, 0.25, 1e-15);
  EXPECT_NEAR(p->y, 0.5, 1e-15);
  EXPECT_FALSE(fixed_point(AffineMap{{0.5, 0.0, 0.0, 1.0}, {0.5, 0.0}}));
  EXPECT_FALSE(fixed_point(AffineMap::identity()));
}

TEST(Affine, MatrixPowerClosedForm) {
  expect_mat_near(matrix_power(oracle::triangle_f1().linear, 3), {1.0, 7.0 / 8.0, 0.0, 1.0 / 8.0}, 0.0);
  const Mat2 m{0.3, -1.2, 2.0, 0.7};
  EXPECT_EQ(matrix_power(m, 1), m);
  expect_mat_near(matrix_power(oracle::triangle_f2().linear, 2), {-0.5, -0.25, 0.5, -0.25}, 0.0);
  for (unsigned n = 1; n <= 40; ++n) {
    const double t = std::ldexp(1.0, -int(n));
    expect_mat_near(matrix_power(oracle::triangle_f1().linear, n), {1.0, 1.0 - t, 0.0, t}, 1e-12);
  }
}

TEST(AffineProperty, NormAgreesWithThreeOracles) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Mat2 a = oracle::random_matrix(rng, 2.0);
    const double n = spectral_norm(a);
    EXPECT_NEAR(n, oracle::sampled_norm(a, 10000, rng), 1e-10 * n);
    EXPECT_NEAR(n, oracle::power_iteration_norm(a), 1e-10 * n);
    EXPECT_NEAR(n, oracle::eigen_norm(a), 1e-12 * n);
  }
}

TEST(AffineProperty, NormOfSingularAndDegenerateMatrices) {
  EXPECT_EQ(spectral_norm({0, 0, 0, 0}), 0.0);
  EXPECT_NEAR(spectral_norm({1, 2, 2, 4}), 5.0, 1e-14);  // rank one: |(1,2)| * |(1,2)|
  EXPECT_NEAR(spectral_norm({3, 0, 0, 3}), 3.0, 1e-15);  // repeated singular value
  EXPECT_NEAR(spectral_norm({1e-9, 0, 0, 1e-9}), 1e-9, 1e-24);
}

TEST(AffineProperty, CompositionHomomorphisms) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const auto f = oracle::random_map(rng), g = oracle::random_map(rng);
    const auto fg = compose(f, g);
    EXPECT_LE(lipschitz(fg), lipschitz(f) * lipschitz(g) + 1e-12);
    EXPECT_NEAR(determinant(fg.linear), determinant(f.linear) * determinant(g.linear), 1e-12);
    const Vec2 v{u(rng), u(rng)};
    EXPECT_LE(distance(fg(v), f(g(v))), 1e-12);
  }
}

TEST(AffineProperty, FixedPointIsFixed) {
  std::mt19937_64 rng(13);
  int found = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto f = oracle::random_map(rng);
    if (const auto p = fixed_point(f)) {
      ++found;
      EXPECT_LE(distance(f(*p), *p), 1e-10 * std::max(1.0, norm(*p)));
    }
  }
  EXPECT_GT(found, 900);
}

TEST(Affine, DiffOfProductsIsExactlyRounded) {
  // 1 + 2^-30 squared minus 1 + 2^-29 cancels to 2^-60, lost by the naive formula.
  const double a = 1.0 + std::ldexp(1.0, -30), b = 1.0 + std::ldexp(1.0, -29);
  EXPECT_EQ(diff_of_products(a, a, b, 1.0), std::ldexp(1.0, -60));
}
