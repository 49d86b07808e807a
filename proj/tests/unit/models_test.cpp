#include "test_util.hpp"

#include "gaussep/models.hpp"
#include "gaussep/sampling.hpp"

using namespace gaussep;
using namespace gaussep::testing;

TEST(Squeezed, DriftAndDiffusion) {
  const GaussianGenerator g = squeezed_generator({});
  EXPECT_TRUE(near(g.A, mat2(-1, 0, -2, -1), 0.0));
  EXPECT_TRUE(near(g.D, Matrix(Matrix::Identity(2, 2)), 0.0));
  for (double phi : {0.0, 1.0, 4.0})
    EXPECT_TRUE(near(squeezed_diffusion(3.0, 0.0, phi), Matrix(1.5 * Matrix::Identity(2, 2)), 0.0));
  const auto [lp, lm] = squeezed_drift_eigenvalues(2.0, 0.5, 1.0);
  EXPECT_NEAR(lp.real(), -1 + std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(lm.real(), -1 - std::sqrt(0.75), 1e-15);
  const auto e = eigenvalues(squeezed_drift(2.0, 0.5, 1.0));
  EXPECT_NEAR(std::max(e[0].real(), e[1].real()), lp.real(), 1e-14);
}

TEST(Squeezed, LindbladDerivationMatches) {
  Sampler rng(51);
  for (int k = 0; k < 200; ++k) {
    SqueezedReservoirParams p;
    p.kappa = rng.uniform(0.1, 5.0);
    p.delta = rng.uniform(-2.0, 2.0);
    p.epsilon = rng.uniform(-2.0, 2.0);
    p.r = rng.uniform(0.0, 1.5);
    p.phi = rng.uniform(0.0, 2 * kPi);
    const GaussianGenerator a = from_lindblad(squeezed_lindblad_data(p));
    const GaussianGenerator b = squeezed_generator(p);
    ASSERT_TRUE(near(a.A, b.A, 1e-13));
    ASSERT_TRUE(near(a.D, b.D, 1e-13 * (1 + max_abs(b.D))));
  }
}

TEST(SqueezedEpGauge, Examples) {
  SqueezedReservoirParams p;
  const GaugeCovariance plus = squeezed_ep_gauge(p, Branch::Plus);
  EXPECT_TRUE(near(plus.S, mat2(0.5, -0.5, -0.5, 1.5), 1e-15));
  EXPECT_EQ(plus.source, CovarianceSource::EpBranchFormula);
  const GaugeCovariance minus = squeezed_ep_gauge(p, Branch::Minus);
  EXPECT_TRUE(near(minus.S, mat2(0.5, 0.5, 0.5, 1.5), 1e-15));
}

TEST(SqueezedEpGauge, MatchesLyapunovSolver) {
  Sampler rng(52);
  for (int k = 0; k < 500; ++k) {
    SqueezedReservoirParams p;
    p.kappa = rng.uniform(0.2, 5.0);
    p.epsilon = rng.uniform(-2.0, 2.0);
    p.r = rng.uniform(0.0, 1.5);
    p.phi = rng.uniform(0.0, 2 * kPi);
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const double e = b == Branch::Plus ? p.epsilon : -p.epsilon;
      const Matrix A = squeezed_drift(p.kappa, e, e);
      const Matrix S = solve_lyapunov(A, squeezed_diffusion(p.kappa, p.r, p.phi)).S;
      const GaugeCovariance f = squeezed_ep_gauge(p, b);
      ASSERT_TRUE(near(f.S, S, 1e-10 * std::max(1.0, max_abs(S))));
      ASSERT_LE(f.residual, f.tolerance);
    }
  }
}

TEST(SqueezedEpGauge, BranchReflection) {
  // Minus at phi equals P (Plus at -phi) P with P = diag(1,-1).
  SqueezedReservoirParams p;
  p.r = 0.6;
  p.phi = 1.1;
  SqueezedReservoirParams q = p;
  q.phi = -p.phi;
  const Matrix P = mat2(1, 0, 0, -1);
  EXPECT_TRUE(near(squeezed_ep_gauge(p, Branch::Minus).S, Matrix(P * squeezed_ep_gauge(q, Branch::Plus).S * P), 1e-14));
}

TEST(SqueezedGeneralGauge, Examples) {
  SqueezedReservoirParams p;
  p.kappa = 1.5;
  p.delta = 0.7;
  p.epsilon = 0.4;
  const GaugeCovariance g = squeezed_general_gauge(p);
  const double denom = p.kappa * p.kappa + 4 * (p.delta * p.delta - p.epsilon * p.epsilon);
  EXPECT_NEAR(g.S(0, 1), -p.epsilon * p.kappa / denom, 1e-15);
  EXPECT_LE(g.residual, g.tolerance);

  SqueezedReservoirParams ep;
  ep.r = 0.4;
  ep.phi = 0.9;
  EXPECT_TRUE(near(squeezed_general_gauge(ep).S, squeezed_ep_gauge(ep, Branch::Plus).S, 1e-14));

  SqueezedReservoirParams bad;
  bad.kappa = 0.5;
  bad.delta = 0.0;
  bad.epsilon = 1.0;
  EXPECT_ERROR_KIND(squeezed_general_gauge(bad), ErrorKind::NonHurwitz);
}

TEST(SqueezedGeneralGauge, RandomResiduals) {
  Sampler rng(53);
  int checked = 0;
  while (checked < 500) {
    SqueezedReservoirParams p;
    p.kappa = rng.uniform(0.2, 5.0);
    p.delta = rng.uniform(-2.0, 2.0);
    p.epsilon = rng.uniform(-2.0, 2.0);
    p.r = rng.uniform(0.0, 1.0);
    p.phi = rng.uniform(0.0, 2 * kPi);
    const auto [lp, lm] = squeezed_drift_eigenvalues(p.kappa, p.delta, p.epsilon);
    if (std::max(lp.real(), lm.real()) > -0.05) continue;
    const GaugeCovariance g = squeezed_general_gauge(p);
    ASSERT_LE(g.residual, 1e-10 * (1 + max_abs(squeezed_diffusion(p.kappa, p.r, p.phi))) * std::max(1.0, max_abs(g.S)));
    ++checked;
  }
}

TEST(SqueezedModel, SquareRootCoalescence) {
  // Gap of the drift eigenvalues against the distance to the EP.
  const double kappa = 2.0, eps = 1.0;
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    const double h = std::pow(10.0, -6.0 + 4.0 * i / 20);
    const CVector e = Eigen::EigenSolver<Matrix>(squeezed_drift(kappa, eps - h, eps)).eigenvalues();
    x.push_back(std::log(h));
    y.push_back(std::log(std::abs(e(0) - e(1))));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  EXPECT_NEAR((n * sxy - sx * sy) / (n * sxx - sx * sx), 0.5, 0.02);
}

TEST(NmFamily, IsotropicDiffusionValue) {
  NmFamilyParams p;
  EXPECT_TRUE(near(nm_diffusion(p, 0.8, drift_B(0.1, 0.2)), Matrix((0.18 + 1e-3) * Matrix::Identity(2, 2)), 1e-15));
}

TEST(NmFamily, DiffusionDeterminantTarget) {
  const double k = 0.55, g = 0.5 * (1 - k * k) + 1e-3;
  for (DiffusionModel m : {DiffusionModel::isotropic(), DiffusionModel::anisotropic(0.7),
                           DiffusionModel::drift_aligned(1.5)}) {
    NmFamilyParams p;
    p.diffusion = m;
    const Matrix Y = nm_diffusion(p, k, drift_B(0.4, -0.9));
    EXPECT_NEAR(Y.determinant(), g * g, 1e-14) << to_string(m.kind);
    EXPECT_GT(least_eigenvalue(Y), 0.0);
  }
}

TEST(NmFamily, EpLineIsDefective) {
  NmFamilyParams p;
  p.omega = 0.9;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    for (double t : {0.2, 1.0, 3.0}) {
      const GaussianChannel ch = nm_channel(on_ep_line(p, b), t);
      const Matrix expect = kappa_t(p, t) * (Matrix::Identity(2, 2) + t * drift_B(on_ep_line(p, b).lambda, p.omega));
      EXPECT_TRUE(near(ch.X, expect, 1e-14));
      EXPECT_TRUE(jordan_structure(ch.X).defective);
    }
  }
}

TEST(NmFamily, NotASemigroup) {
  NmFamilyParams p;
  p.lambda = 0.3;
  p.omega = 0.5;
  const double t = 0.7, s = 1.1;
  const GaussianChannel joint = nm_channel(p, t + s);
  const GaussianChannel split = compose(nm_channel(p, t), nm_channel(p, s));
  EXPECT_GT(max_abs(Matrix(joint.X - split.X)), 1e-3);
  EXPECT_NE(kappa_t(p, t) * kappa_t(p, s), kappa_t(p, t + s));
}

TEST(NmFamily, DriftAlignedNeedsNonzeroDrift) {
  NmFamilyParams p;
  p.diffusion = DiffusionModel::drift_aligned(1.0);
  EXPECT_ERROR_KIND(nm_channel(p, 1.0), ErrorKind::DegenerateModel);
}

TEST(NmFamily, Validation) {
  NmFamilyParams p;
  p.r_mem = 1.0;  // equals gamma / nu
  EXPECT_ERROR_KIND(nm_channel(p, 1.0), ErrorKind::InvalidParameter);
  NmFamilyParams q;
  EXPECT_ERROR_KIND(nm_channel(q, 0.0), ErrorKind::InvalidParameter);
}

TEST(NmFamily, CpMarginStrictlyPositive) {
  Sampler rng(54);
  for (int k = 0; k < 500; ++k) {
    NmFamilyParams p;
    p.lambda = rng.uniform(-2.0, 2.0);
    p.omega = rng.uniform(-2.0, 2.0);
    p.diffusion = std::array{DiffusionModel::isotropic(), DiffusionModel::anisotropic(rng.uniform(-1, 1)),
                             DiffusionModel::drift_aligned(rng.uniform(0.1, 2))}[k % 3];
    const double t = rng.uniform(0.05, 4.0);
    const GaussianChannel ch = nm_channel(p, t);
    const CpReport r = cp_check(ch, CpMethod::DetCondition);
    ASSERT_GT(r.margin, 0.0);
    // det Y - ((1 - det X)/2)^2 >= g^2 - ((1 - k^2)/2)^2 >= eps_buf^2.
    ASSERT_GE(r.margin, p.eps_buf * p.eps_buf * (1 - 1e-9));
  }
}

TEST(NmEpGauge, MatchesSteinAndSeries) {
  Sampler rng(55);
  int checked = 0;
  while (checked < 300) {
    NmFamilyParams p;
    p.omega = rng.uniform(-2.0, 2.0);
    p.diffusion = std::array{DiffusionModel::isotropic(), DiffusionModel::anisotropic(rng.uniform(-1, 1)),
                             DiffusionModel::drift_aligned(rng.uniform(0.1, 2))}[checked % 3];
    const double t = rng.uniform(0.1, 3.0);
    if (kappa_t(p, t) > 0.95) continue;
    const Branch b = rng.integer(0, 1) ? Branch::Plus : Branch::Minus;
    const GaugeCovariance S = nm_ep_gauge(p, t, b);
    const GaussianChannel ch = nm_channel(on_ep_line(p, b), t);
    const double scale = std::max(1.0, max_abs(S.S));
    ASSERT_LE(stein_residual(ch.X, S.S, ch.Y), 1e-10 * (1 + max_abs(ch.Y)) * scale);
    ASSERT_TRUE(near(S.S, stein_series(ch.X, ch.Y, 1e-15).S, 1e-9 * scale));
    ASSERT_TRUE(near(S.S, solve_stein(ch.X, ch.Y).S, 1e-10 * scale));
    ++checked;
  }
}

TEST(NmEpGauge, BranchSymmetryDependsOnModel) {
  NmFamilyParams p;
  p.omega = 0.8;
  const double t = 1.0;
  auto eigs = [&](Branch b) { return symmetric_eigenvalues(nm_ep_gauge(p, t, b).S); };
  EXPECT_TRUE(near(eigs(Branch::Plus), eigs(Branch::Minus), 1e-12));

  p.diffusion = DiffusionModel::drift_aligned(1.0);
  const Matrix plus = nm_ep_gauge(p, t, Branch::Plus).S;
  const Matrix minus = nm_ep_gauge(p, t, Branch::Minus).S;
  EXPECT_GT(max_abs(Matrix(plus - minus)), 1e-3);
  EXPECT_NEAR(plus(0, 1), -minus(0, 1), 1e-12);
}

TEST(NmEpGauge, ScalarLimitAndUnstable) {
  NmFamilyParams p;
  const double t = 1.0, k = kappa_t(p, t);
  const GaugeCovariance S = nm_ep_gauge(p, t, Branch::Plus);  // omega = 0
  const double g = 0.5 * (1 - k * k) + p.eps_buf;
  EXPECT_TRUE(near(S.S, Matrix(g / (1 - k * k) * Matrix::Identity(2, 2)), 1e-14));

  // r_mem < gamma/nu keeps kappa(t) < 1 for every t > 0.
  NmFamilyParams q;
  q.gamma = 0.1;
  q.r_mem = 0.0999;
  for (double u = 1e-4; u < 50.0; u *= 1.1) ASSERT_LT(kappa_t(q, u), 1.0) << u;
}

TEST(Catalog, ThermalLoss) {
  const auto out = ep_free_catalog(ThermalLoss{0.5, 0.0});
  const auto& ch = std::get<GaussianChannel>(out);
  EXPECT_TRUE(near(ch.X, Matrix(std::sqrt(0.5) * Matrix::Identity(2, 2)), 0.0));
  EXPECT_TRUE(near(ch.Y, Matrix(0.25 * Matrix::Identity(2, 2)), 0.0));
  EXPECT_FALSE(jordan_structure(ch.X).defective);
  EXPECT_ERROR_KIND(ep_free_catalog(ThermalLoss{1.5, 0.0}), ErrorKind::InvalidParameter);
}

TEST(Catalog, QuadratureDiffusion) {
  const auto ch = std::get<GaussianChannel>(ep_free_catalog(QuadratureDiffusion{1.0}));
  EXPECT_FALSE(jordan_structure(ch.X).defective);
  const CpReport r = cp_check(ch, CpMethod::DetCondition);
  EXPECT_TRUE(r.passes);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(Catalog, CriticalOscillator) {
  const auto g = std::get<GaussianGenerator>(ep_free_catalog(CriticalOscillator{1.0}));
  EXPECT_TRUE(cp_check_generator(g).passes);
  const auto ch = std::get<GaussianChannel>(ep_free_catalog(CriticalOscillator{1.0}, 1.0));
  // e^{-t}(I + tN) in the shifted basis is e^{-t}(I + t(A + I)).
  const Matrix N = g.A + Matrix::Identity(2, 2);
  EXPECT_TRUE(near(ch.X, Matrix(std::exp(-1.0) * (Matrix::Identity(2, 2) + N)), 1e-14));
  EXPECT_TRUE(jordan_structure(ch.X).defective);
}
