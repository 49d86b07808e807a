#pragma once

// Invariant suites behind `gaussep_sweep verify`. Each suite draws seeded random
// instances, checks one family of identities and reports its worst defect.

#include "gaussep/models.hpp"
#include "gaussep/sampling.hpp"

#include <string>

namespace gaussep {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst normalized defect (defect / tolerance)
  std::size_t samples = 0;
  std::string note;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::string fault;  // "", "stein", "lyapunov", "gauge"
};

namespace detail {

inline SuiteResult finish(std::string name, double worst, std::size_t samples, std::string note = {}) {
  return {std::move(name), worst <= 1.0, worst, samples, std::move(note)};
}

inline double relative(double defect, double tol) { return defect / tol; }

// Least-squares slope of y on x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

inline SuiteResult suite_composition(const VerifyOptions& o) {
  Sampler rng(o.seed + 1);
  double worst = 0.0;
  const std::size_t n = 200;
  for (std::size_t k = 0; k < n; ++k) {
    const int modes = rng.integer(1, 3);
    const Eigen::Index d = 2 * modes;
    auto make = [&] {
      return GaussianChannel{rng.matrix(d, d), rng.psd(d), rng.vector(d), Ordering::Grouped, false};
    };
    const GaussianChannel c1 = make(), c2 = make(), c3 = make();
    const GaussianChannel left = compose(c3, compose(c2, c1));
    const GaussianChannel right = compose(compose(c3, c2), c1);
    const double scale = 1.0 + std::max({max_abs(left.X), max_abs(left.Y), max_abs(left.delta)});
    const double tol = 1e-12 * scale;
    worst = std::max(worst, detail::relative(max_abs(Matrix(left.X - right.X)), tol));
    worst = std::max(worst, detail::relative(max_abs(Matrix(left.Y - right.Y)), tol));
    worst = std::max(worst, detail::relative(max_abs(Vector(left.delta - right.delta)), tol));
    const MomentState s{rng.vector(d), Matrix(rng.psd(d) + 0.5 * Matrix::Identity(d, d)),
                        Ordering::Grouped};
    const MomentState a = apply_channel(compose(c2, c1), s);
    const MomentState b = apply_channel(c2, apply_channel(c1, s));
    const double mtol = 1e-12 * (1.0 + std::max(max_abs(a.V), max_abs(a.d)));
    worst = std::max(worst, detail::relative(max_abs(Matrix(a.V - b.V)), mtol));
    worst = std::max(worst, detail::relative(max_abs(Vector(a.d - b.d)), mtol));
  }
  return detail::finish("composition", worst, n);
}

inline SuiteResult suite_cp_equivalence(const VerifyOptions& o) {
  Sampler rng(o.seed + 2);
  const std::size_t n = 2000;
  std::size_t disagree = 0, in_band = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix X = rng.matrix(2, 2);
    Matrix Y = rng.psd(2) * rng.uniform(0.0, 3.0);
    if (rng.integer(0, 4) == 0) Y(0, 0) -= rng.uniform(0.0, 0.5);
    const CpReport h = cp_check_hermitian(X, Y, sigma(1));
    const CpReport d = cp_check_det(X, Y);
    if (h.passes == d.passes) continue;
    if (std::abs(h.margin) <= 1e-10 || std::abs(d.margin) <= 1e-10)
      ++in_band;
    else
      ++disagree;
  }
  return {"cp-equivalence", disagree == 0, static_cast<double>(disagree), n,
          std::to_string(in_band) + " in-band"};
}

inline SuiteResult suite_lyapunov(const VerifyOptions& o) {
  Sampler rng(o.seed + 3);
  const std::size_t n = 300;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const int modes = rng.integer(1, 3);
    const Matrix A = rng.hurwitz(2 * modes);
    const Matrix D = rng.psd(2 * modes);
    const GaugeCovariance S = solve_lyapunov(A, D);
    Matrix Dcheck = D;
    if (o.fault == "lyapunov") Dcheck(0, 0) += 1e-6;
    worst = std::max(worst, lyapunov_residual(A, S.S, Dcheck) / equation_tolerance(D));
  }
  return detail::finish("lyapunov-residual", worst, n);
}

inline SuiteResult suite_stein(const VerifyOptions& o) {
  Sampler rng(o.seed + 4);
  const std::size_t n = 300;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const int modes = rng.integer(1, 3);
    const Matrix X = rng.schur_stable(2 * modes);
    Matrix Y = rng.psd(2 * modes);
    const GaugeCovariance S = solve_stein(X, Y);
    if (o.fault == "stein") Y(0, 0) += 1e-6;
    worst = std::max(worst, stein_residual(X, S.S, Y) / equation_tolerance(Y));
    if (modes == 1) {
      const Matrix K = solve_stein(X, Y, {SolvePath::Kronecker}).S;
      const Matrix C = solve_stein(X, Y, {SolvePath::ClosedForm2x2}).S;
      worst = std::max(worst, max_abs(Matrix(K - C)) / (1e-11 * std::max(1.0, max_abs(K))));
    }
  }
  return detail::finish("stein-residual", worst, n);
}

inline SuiteResult suite_channel_gauge(const VerifyOptions& o) {
  Sampler rng(o.seed + 5);
  const std::size_t n = 300;
  double worst = 0.0;
  bool bitwise = true;
  for (std::size_t k = 0; k < n; ++k) {
    const GaussianChannel ch = rng.stable_channel(rng.integer(1, 3));
    GaugingResult g = gauge_channel(ch);
    if (o.fault == "gauge") {
      Matrix S = g.S.S;
      S(0, 0) += 1e-6;
      g.gauged = conjugate_by_smoothing(ch, {S, ch.ordering});
      g.residual_Y = max_abs(g.gauged.Y);
    }
    worst = std::max(worst, g.residual_Y / g.tolerance);
    bitwise = bitwise && (g.gauged.X.array() == ch.X.array()).all() &&
              (g.gauged.delta.array() == ch.delta.array()).all();
  }
  SuiteResult r = detail::finish("channel-gauge", worst, n);
  if (!bitwise) {
    r.passed = false;
    r.note = "X or delta changed";
  }
  return r;
}

inline SuiteResult suite_semigroup_gauge(const VerifyOptions& o) {
  Sampler rng(o.seed + 6);
  const std::size_t n = 30;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const GaussianGenerator g = rng.hurwitz_generator(rng.integer(1, 3));
    const SemigroupGauging r = gauge_semigroup(g);
    worst = std::max(worst, r.max_residual / 1e-8);
  }
  return detail::finish("semigroup-gauge", worst, n);
}

inline SuiteResult suite_ep_branch(const VerifyOptions& o) {
  Sampler rng(o.seed + 7);
  const std::size_t n = 300;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    SqueezedReservoirParams p{rng.uniform(0.2, 5.0), 0.0, rng.uniform(-2.0, 2.0),
                              rng.uniform(0.0, 1.5), rng.uniform(0.0, 2.0 * kPi)};
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const double e = b == Branch::Plus ? p.epsilon : -p.epsilon;
      const GaugeCovariance closed = squeezed_ep_gauge(p, b);
      const GaugeCovariance ref = solve_lyapunov(squeezed_drift(p.kappa, e, e),
                                                 squeezed_diffusion(p.kappa, p.r, p.phi));
      const double tol = 1e-10 * std::max(1.0, max_abs(ref.S));
      worst = std::max(worst, max_abs(Matrix(closed.S - ref.S)) / tol);
    }
  }
  return detail::finish("ep-branch-closed-form", worst, n);
}

inline SuiteResult suite_jordan_closed_form(const VerifyOptions& o) {
  Sampler rng(o.seed + 8);
  const std::size_t n = 300;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    NmFamilyParams p;
    p.omega = rng.uniform(-2.0, 2.0);
    p.gamma = rng.uniform(0.5, 2.0);
    p.nu = rng.uniform(0.5, 2.0);
    p.r_mem = rng.uniform(0.01, 0.99) * p.gamma / p.nu;
    const int model = static_cast<int>(k % 3);
    p.diffusion = model == 0   ? DiffusionModel::isotropic()
                  : model == 1 ? DiffusionModel::anisotropic(rng.uniform(-1.0, 1.0))
                               : DiffusionModel::drift_aligned(rng.uniform(0.1, 3.0));
    const Branch b = rng.integer(0, 1) == 0 ? Branch::Plus : Branch::Minus;
    const double t = rng.uniform(0.5, 3.0);
    const NmFamilyParams q = on_ep_line(p, b);
    if (!(kappa_t(q, t) < 0.95)) continue;
    const GaussianChannel ch = nm_channel(q, t);
    const GaugeCovariance j = nm_ep_gauge(p, t, b);
    const GaugeCovariance s = solve_stein(ch.X, ch.Y);
    const double scale = std::max(1.0, max_abs(s.S));
    worst = std::max(worst, max_abs(Matrix(j.S - s.S)) / (1e-10 * scale));
  }
  return detail::finish("jordan-closed-form", worst, n);
}

inline SuiteResult suite_noise_independence(const VerifyOptions& o) {
  Sampler rng(o.seed + 9);
  const std::size_t n = 20;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    GaussianGenerator g{rng.hurwitz(2), rng.psd(2), rng.vector(2), Ordering::Grouped, false};
    GaussianGenerator g0 = g;
    g0.D.setZero();
    const auto a = eigenvalues(truncated_ou_matrix(g, 6));
    const auto b = eigenvalues(truncated_ou_matrix(g0, 6));
    worst = std::max(worst, spectrum_distance(a, b) / 1e-9);
  }
  return detail::finish("noise-independence", worst, n);
}

inline SuiteResult suite_jordan_chain(const VerifyOptions& o) {
  Sampler rng(o.seed + 10);
  const double lambda = -rng.uniform(0.2, 2.0);
  Matrix At = lambda * Matrix::Identity(2, 2);
  At(0, 1) = 1.0;
  const Matrix A = At.transpose();
  bool ok = true;
  for (int l = 1; l <= 6; ++l) {
    const JordanReport r = jordan_structure(drift_restriction_matrix(A, l));
    ok = ok && r.eigenvalues.size() == 1 && r.block_sizes[0] == std::vector<int>{l + 1} &&
         std::abs(r.eigenvalues[0] - Complex(l * lambda, 0.0)) < 1e-6;
  }
  return {"jordan-chain", ok, ok ? 0.0 : 1.0, 6, ""};
}

inline SuiteResult suite_sqrt_coalescence(const VerifyOptions&) {
  const double kappa = 2.0, eps = 1.0;
  std::vector<double> lx, ly;
  for (int i = 0; i <= 16; ++i) {
    const double target = std::pow(10.0, -6.0 + 4.0 * i / 16.0);
    const double delta = std::sqrt(eps * eps + 0.25 * target * target);
    const auto ev = eigenvalues(squeezed_drift(kappa, delta, eps));
    const double gap = std::abs(ev[0] - ev[1]);
    lx.push_back(std::log(std::abs((delta - eps) * (delta + eps))));
    ly.push_back(std::log(gap));
  }
  const double slope = detail::fit_slope(lx, ly);
  return {"sqrt-coalescence", std::abs(slope - 0.5) <= 0.02, std::abs(slope - 0.5) / 0.02, lx.size(),
          "exponent " + format_double(slope)};
}

inline std::vector<SuiteResult> run_verify(const VerifyOptions& o) {
  return {suite_composition(o),      suite_cp_equivalence(o),   suite_lyapunov(o),
          suite_stein(o),            suite_channel_gauge(o),    suite_semigroup_gauge(o),
          suite_ep_branch(o),        suite_jordan_closed_form(o), suite_noise_independence(o),
          suite_jordan_chain(o),     suite_sqrt_coalescence(o)};
}

}  // namespace gaussep
