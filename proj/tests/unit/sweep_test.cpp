#include "test_util.hpp"

#include "gaussep/sweep.hpp"

#include <cstdio>
#include <fstream>

using namespace gaussep;
using namespace gaussep::testing;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.delta_grid = {-2.0, 2.0, 9};
  c.kappa_grid = {0.5, 5.0, 10};
  c.r_grid = {0.0, 1.5, 7};
  c.phi_grid = {0.0, 2 * kPi, 13};
  c.lambda_grid = {-2.0, 2.0, 9};
  c.omega_grid = {-2.0, 2.0, 9};
  c.branch_grid = {-2.0, 2.0, 8};
  return c;
}

std::string csv(const SweepTable& t) {
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

}  // namespace

TEST(Config, DefaultsValidate) {
  EXPECT_NO_THROW(SweepConfig{}.validate());
  EXPECT_EQ(SweepConfig{}.delta_grid.count, 101);
  EXPECT_EQ(SweepConfig{}.phi_grid.count, 361);
}

TEST(Config, TextParsing) {
  SweepConfig c;
  apply_config_text(c, "# comment\n kappa = 3.5 \nphi=pi\nr-grid = 0, 2, 5  # trailing\n\naxis = r\n");
  EXPECT_EQ(c.kappa, 3.5);
  EXPECT_EQ(c.phi, kPi);
  EXPECT_EQ(c.r_grid.count, 5);
  EXPECT_EQ(c.r_grid.max, 2.0);
  EXPECT_EQ(c.axis, "r");
  apply_setting(c, "phi_grid", "0,2pi,3");
  EXPECT_EQ(c.phi_grid.max, 2 * kPi);
}

TEST(Config, Precedence) {
  // defaults < file < explicit overrides applied afterwards
  const std::string path = ::testing::TempDir() + "/sweep_precedence.cfg";
  {
    std::ofstream f(path);
    f << "kappa = 4\nepsilon = 0.5\n";
  }
  SweepConfig c;
  apply_config_file(c, path);
  apply_setting(c, "kappa", "1.25");
  EXPECT_EQ(c.kappa, 1.25);
  EXPECT_EQ(c.epsilon, 0.5);
  EXPECT_EQ(c.gamma, 1.0);
  std::remove(path.c_str());
}

TEST(Config, Errors) {
  SweepConfig c;
  EXPECT_ERROR_KIND(apply_setting(c, "kapa", "1"), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(apply_setting(c, "kappa", "abc"), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(apply_setting(c, "axis", "delta"), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(apply_setting(c, "r_grid", "0,1"), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(apply_config_text(c, "kappa 2\n"), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(apply_config_file(c, "/nonexistent/file.cfg"), ErrorKind::InvalidParameter);
  SweepConfig bad;
  bad.r_mem = 2.0;
  EXPECT_ERROR_KIND(bad.validate(), ErrorKind::InvalidParameter);
  SweepConfig grid;
  grid.lambda_grid = {1.0, 0.0, 5};
  EXPECT_ERROR_KIND(grid.validate(), ErrorKind::InvalidParameter);
}

TEST(Grid, EndpointsExact) {
  const GridSpec g{-2.0, 2.0, 101};
  const auto v = g.values();
  EXPECT_EQ(v.front(), -2.0);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_EQ(v[25], -1.0);
  EXPECT_EQ(v[50], 0.0);
  EXPECT_EQ(v[75], 1.0);
}

TEST(Output, CsvAndJsonShape) {
  SweepTable t;
  t.columns = {"a", "b"};
  t.rows = {{1.0, 0.5}, {std::numeric_limits<double>::quiet_NaN(), 2.0}};
  t.meta = {{"command", "demo"}};
  EXPECT_EQ(csv(t), "# command = demo\na,b\n1,0.5\nnan,2\n");
  const auto j = table_json(t);
  EXPECT_EQ(j["meta"]["command"], "demo");
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_TRUE(j["rows"][1]["a"].is_null());
  EXPECT_EQ(j["rows"][1]["b"], 2.0);
  const auto round = nlohmann::json::parse(table_json(t).dump());
  EXPECT_EQ(round["rows"][0]["b"], 0.5);
}

TEST(Output, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(DriftEigs, EpRowsAndSplitting) {
  SweepConfig c;
  const SweepTable t = cmd_drift_eigs(c);
  ASSERT_EQ(t.rows.size(), 101u);
  const auto d = t.column("delta"), rp = t.column("re_lambda_plus"), rm = t.column("re_lambda_minus"),
             ep = t.column("ep");
  for (const auto& row : t.rows) {
    const double delta = row[d];
    const bool at_ep = std::abs(std::abs(delta) - 1.0) < 1e-15;
    EXPECT_EQ(row[ep], at_ep ? 1.0 : 0.0) << delta;
    if (std::abs(delta) >= 1.0) {
      EXPECT_NEAR(row[rp], -1.0, 1e-7);
      EXPECT_NEAR(row[rm], -1.0, 1e-7);
    } else {
      const double split = std::sqrt(1 - delta * delta);
      EXPECT_NEAR(std::max(row[rp], row[rm]), -1 + split, 1e-12);
      EXPECT_NEAR(std::min(row[rp], row[rm]), -1 - split, 1e-12);
    }
  }
}

TEST(DriftEigs, ZeroDrive) {
  SweepConfig c = small_config();
  c.epsilon = 0.0;
  const SweepTable t = cmd_drift_eigs(c);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row[t.column("re_lambda_plus")], -1.0, 1e-14);
    EXPECT_NEAR(row[t.column("gap")], 2 * std::abs(row[0]), 1e-13);
  }
}

TEST(SqueezedGauge, KappaAxisMatchesClosedFormAndDecreases) {
  SweepConfig c = small_config();
  c.r = 0.0;
  c.branch = "plus";
  const SweepTable t = cmd_squeezed_gauge(c);
  ASSERT_EQ(t.rows.size(), 10u);
  double prev1 = std::numeric_limits<double>::infinity(), prev2 = prev1;
  for (const auto& row : t.rows) {
    const double k = row[0], e = c.epsilon;
    Matrix S = mat2(0.5, -e / k, -e / k, 0.5 + 4 * e * e / (k * k));
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues();
    EXPECT_NEAR(row[t.column("lambda1")], ev(0), 1e-14);
    EXPECT_NEAR(row[t.column("lambda2")], ev(1), 1e-14);
    EXPECT_LE(row[t.column("lambda2")], prev2);
    prev2 = row[t.column("lambda2")];
    prev1 = row[t.column("lambda1")];
  }
  (void)prev1;
}

TEST(SqueezedGauge, BothBranchesOrdered) {
  SweepConfig c = small_config();
  c.axis = "phi";
  const SweepTable t = cmd_squeezed_gauge(c);
  ASSERT_EQ(t.rows.size(), 26u);
  EXPECT_EQ(t.rows.front()[1], 1.0);
  EXPECT_EQ(t.rows.back()[1], -1.0);
  EXPECT_EQ(t.columns.front(), "phi");
}

TEST(NmSurface, OverlayRowsMatchClosedForm) {
  SweepConfig c = small_config();
  const SweepTable t = cmd_nm_surface(c);
  ASSERT_EQ(t.rows.size(), 81u + 18u);
  const auto ov = t.column("overlay");
  int overlays = 0;
  for (const auto& row : t.rows) {
    if (row[ov] == 0.0) continue;
    ++overlays;
    NmFamilyParams p = detail::nm_params(c, row[0], row[1]);
    const Branch b = row[ov] > 0 ? Branch::Plus : Branch::Minus;
    const GaussianChannel ch = nm_channel(on_ep_line(p, b), c.t);
    const Vector ev = symmetric_eigenvalues(solve_stein(ch.X, ch.Y).S);
    EXPECT_NEAR(row[t.column("lambda_min")], ev(0), 1e-10 * std::max(1.0, ev(1)));
    EXPECT_NEAR(row[t.column("lambda_max")], ev(1), 1e-10 * std::max(1.0, ev(1)));
    EXPECT_EQ(row[t.column("defective")], row[1] == 0.0 ? 0.0 : 1.0);
  }
  EXPECT_EQ(overlays, 18);
}

TEST(NmSurface, ScalarPoint) {
  SweepConfig c = small_config();
  const SweepTable t = cmd_nm_surface(c);
  const double k = std::exp(-c.gamma * c.t + c.r_mem * std::sin(c.nu * c.t));
  const double y = 0.5 * (1 - k * k) + c.eps_buf;
  for (const auto& row : t.rows) {
    if (row[0] != 0.0 || row[1] != 0.0 || row[t.column("overlay")] != 0.0) continue;
    EXPECT_NEAR(row[t.column("lambda_min")], y / (1 - k * k), 1e-13);
    EXPECT_NEAR(row[t.column("lambda_max")], y / (1 - k * k), 1e-13);
  }
}

TEST(NmSurface, UnstableRowsCarryNoNumbers) {
  SweepConfig c = small_config();
  c.t = 3.0;
  const SweepTable t = cmd_nm_surface(c);
  int unstable = 0;
  for (const auto& row : t.rows) {
    if (row[t.column("unstable")] != 1.0) {
      EXPECT_TRUE(std::isfinite(row[t.column("lambda_min")]));
      continue;
    }
    ++unstable;
    EXPECT_TRUE(std::isnan(row[t.column("lambda_min")]));
    EXPECT_TRUE(std::isnan(row[t.column("lambda_max")]));
    EXPECT_TRUE(std::isnan(row[t.column("cp_margin")]));
  }
  EXPECT_GT(unstable, 0);
}

TEST(NmSurface, DriftAlignedDegeneratePoint) {
  SweepConfig c = small_config();
  c.diffusion = "drift-aligned";
  const SweepTable t = cmd_nm_surface(c);
  int degenerate = 0;
  for (const auto& row : t.rows) {
    if (row[t.column("degenerate")] == 1.0) {
      ++degenerate;
      EXPECT_EQ(row[0], 0.0);
      EXPECT_EQ(row[1], 0.0);
      EXPECT_TRUE(std::isnan(row[t.column("lambda_min")]));
    }
  }
  EXPECT_GT(degenerate, 0);
}

TEST(NmBranch, IsotropicBranchesCoincide) {
  SweepConfig c = small_config();
  const SweepTable t = cmd_nm_branch(c);
  ASSERT_EQ(t.rows.size(), 16u);
  for (std::size_t i = 0; i < t.rows.size(); i += 2) {
    EXPECT_EQ(t.rows[i][1], 1.0);
    EXPECT_EQ(t.rows[i + 1][1], -1.0);
    EXPECT_NEAR(t.rows[i][2], t.rows[i + 1][2], 1e-12);
    EXPECT_NEAR(t.rows[i][3], t.rows[i + 1][3], 1e-12);
  }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  SweepConfig a = small_config();
  a.threads = 1;
  SweepConfig b = a;
  b.threads = 4;
  EXPECT_EQ(csv(cmd_nm_surface(a)), csv(cmd_nm_surface(b)));
  EXPECT_EQ(csv(cmd_drift_eigs(a)), csv(cmd_drift_eigs(b)));
}

TEST(Sweep, RowsRevalidate) {
  // Recompute every nm-branch row from the library and compare within the row tolerance.
  SweepConfig c = small_config();
  c.diffusion = "aniso";
  const SweepTable t = cmd_nm_branch(c);
  for (const auto& row : t.rows) {
    const Branch b = row[1] > 0 ? Branch::Plus : Branch::Minus;
    const GaugeCovariance S = nm_ep_gauge(detail::nm_params(c, 0.0, row[0]), c.t, b);
    EXPECT_LE(S.residual, S.tolerance);
    EXPECT_NEAR(row[t.column("s11")], S.S(0, 0), 1e-10 * (1 + max_abs(S.S)));
    EXPECT_NEAR(row[t.column("s12")], S.S(0, 1), 1e-10 * (1 + max_abs(S.S)));
    EXPECT_NEAR(row[t.column("s22")], S.S(1, 1), 1e-10 * (1 + max_abs(S.S)));
  }
}

TEST(Sweep, MetaRecordsConfig) {
  const SweepTable t = cmd_drift_eigs(small_config());
  bool has_grid = false;
  for (const auto& [k, v] : t.meta)
    if (k == "delta_grid") has_grid = v == "-2,2,9";
  EXPECT_TRUE(has_grid);
}
