#include "test_util.hpp"

#include "gaussep/models.hpp"
#include "gaussep/sampling.hpp"

using namespace gaussep;
using namespace gaussep::testing;

TEST(GaugeChannel, Attenuator) {
  const GaussianChannel ch{Matrix(std::sqrt(0.5) * Matrix::Identity(2, 2)),
                           Matrix(0.25 * Matrix::Identity(2, 2)), Vector::Zero(2)};
  const GaugingResult g = gauge_channel(ch);
  EXPECT_TRUE(near(g.S.S, Matrix(0.5 * Matrix::Identity(2, 2)), 1e-15));
  EXPECT_TRUE(near(g.gauged.Y, Matrix(Matrix::Zero(2, 2)), 1e-15));
  EXPECT_LE(g.residual_Y, g.tolerance);
}

TEST(GaugeChannel, NoiselessIsUnchanged) {
  const GaussianChannel ch{mat2(0.3, 0.1, -0.2, 0.4), Matrix::Zero(2, 2), vec2(0.1, 0.2)};
  const GaugingResult g = gauge_channel(ch);
  EXPECT_TRUE(near(g.S.S, Matrix(Matrix::Zero(2, 2)), 0.0));
  EXPECT_TRUE(near(g.gauged.X, ch.X, 0.0));
  EXPECT_TRUE(near(g.gauged.Y, ch.Y, 0.0));
  EXPECT_TRUE(near(g.gauged.delta, ch.delta, 0.0));
}

TEST(GaugeChannel, JordanChannel) {
  const GaussianChannel ch{mat2(0.5, 0.3, 0, 0.5), Matrix::Identity(2, 2), Vector::Zero(2)};
  const GaugingResult g = gauge_channel(ch);
  EXPECT_TRUE(near(g.S.S, mat2(8.0 / 5, 4.0 / 15, 4.0 / 15, 4.0 / 3), 1e-14));
  EXPECT_LE(g.residual_Y, 1e-14);
  EXPECT_TRUE((g.gauged.X.array() == ch.X.array()).all());
}

TEST(GaugeChannel, RandomResidualAndBitwiseInvariants) {
  Sampler rng(31);
  for (int k = 0; k < 1000; ++k) {
    const GaussianChannel ch = rng.stable_channel(rng.integer(1, 3));
    const GaugingResult g = gauge_channel(ch);
    ASSERT_LE(g.residual_Y, 1e-9 * (1 + max_abs(ch.Y)));
    ASSERT_TRUE((g.gauged.X.array() == ch.X.array()).all());
    ASSERT_TRUE((g.gauged.delta.array() == ch.delta.array()).all());
  }
}

TEST(SmoothingMap, InverseIsNotCp) {
  Sampler rng(32);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 * rng.integer(1, 3);
    const Matrix S = rng.psd(n) + 0.05 * Matrix::Identity(n, n);
    const SmoothingMap m{S};
    EXPECT_TRUE(cp_check(m.forward()).passes);
    EXPECT_FALSE(cp_check(m.inverse()).passes);
  }
}

TEST(GaugeSemigroup, ThermalDamping) {
  const double kappa = 1.2, nbar = 0.7;
  const GaussianGenerator g{Matrix(-0.5 * kappa * Matrix::Identity(2, 2)),
                            Matrix(0.5 * kappa * (2 * nbar + 1) * Matrix::Identity(2, 2)), Vector::Zero(2)};
  const SemigroupGauging r = gauge_semigroup(g, {0.0, 0.1, 1.0, 10.0});
  EXPECT_TRUE(near(r.S.S, Matrix(0.5 * (2 * nbar + 1) * Matrix::Identity(2, 2)), 1e-14));
  EXPECT_LE(r.max_residual, 1e-10);
  EXPECT_EQ(r.residuals.size(), 4u);
}

TEST(GaugeSemigroup, NoiselessGenerator) {
  const GaussianGenerator g{mat2(-0.5, 1.0, -1.0, -0.5), Matrix::Zero(2, 2), Vector::Zero(2)};
  const SemigroupGauging r = gauge_semigroup(g, {0.0, 0.5, 3.0});
  EXPECT_TRUE(near(r.S.S, Matrix(Matrix::Zero(2, 2)), 0.0));
  EXPECT_EQ(r.max_residual, 0.0);
}

TEST(GaugeSemigroup, SqueezedEpDefaultTimes) {
  SqueezedReservoirParams p;
  const GaussianGenerator g = squeezed_generator(p);
  const SemigroupGauging r = gauge_semigroup(g);
  EXPECT_EQ(r.times.size(), 20u);
  EXPECT_NEAR(r.times.front(), 1e-3, 1e-15);
  EXPECT_NEAR(r.times.back(), 10.0, 1e-12);
  EXPECT_TRUE(near(r.S.S, mat2(0.5, -0.5, -0.5, 1.5), 1e-14));
  EXPECT_LE(r.max_residual, 1e-9);
}

TEST(GaugeSemigroup, RandomGenerators) {
  Sampler rng(33);
  for (int k = 0; k < 40; ++k) {
    const GaussianGenerator g = rng.hurwitz_generator(rng.integer(1, 3));
    const SemigroupGauging r = gauge_semigroup(g);
    ASSERT_LE(r.max_residual, 1e-8);
  }
}

TEST(GaugeSemigroup, Errors) {
  const GaussianGenerator g{Matrix(Matrix::Identity(2, 2)), Matrix::Zero(2, 2), Vector::Zero(2)};
  EXPECT_ERROR_KIND(gauge_semigroup(g), ErrorKind::NonHurwitz);
  const GaussianGenerator h{Matrix(-Matrix::Identity(2, 2)), Matrix::Zero(2, 2), Vector::Zero(2)};
  EXPECT_ERROR_KIND(gauge_semigroup(h, {1.0, -1.0}), ErrorKind::InvalidParameter);
}

TEST(GaugeSemigroup, DiffusionIsInitialSlopeOfY) {
  // dY/dt at 0 equals D; check by a central difference on the doubling Y.
  Sampler rng(34);
  const GaussianGenerator g = rng.hurwitz_generator(1);
  const double h = 1e-4;
  const Matrix Yp = semigroup_channel(g, h, {YMethod::Doubling}).Y;
  const Matrix Y2 = semigroup_channel(g, 2 * h, {YMethod::Doubling}).Y;
  const Matrix slope = (4 * Yp - Y2) / (2 * h);  // second order one-sided
  EXPECT_TRUE(near(slope, g.D, 1e-6 * (1 + max_abs(g.D))));
}

TEST(Similarity, StableChannels) {
  Sampler rng(35);
  for (int k = 0; k < 100; ++k) {
    const SimilarityReport r = similarity_spectrum_check(rng.stable_channel(rng.integer(1, 3)));
    ASSERT_TRUE(r.drift_identical);
    ASSERT_LE(r.spectrum_distance, 1e-13);
    ASSERT_TRUE(r.passes());
  }
}

TEST(Similarity, EpChannelStaysDefective) {
  NmFamilyParams p;
  p.omega = 0.7;
  p.lambda = 0.7;
  const GaussianChannel ch = nm_channel(p, 1.0);
  const SimilarityReport r = similarity_spectrum_check(ch);
  EXPECT_TRUE(r.original.defective);
  EXPECT_TRUE(r.gauged.defective);
  EXPECT_TRUE(r.passes());
}
