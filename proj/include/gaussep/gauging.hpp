#pragma once

// Diffusion gauging: conjugation of channels and semigroups by the smoothing
// map (I, S, 0) chosen so the conjugated diffusion vanishes.

#include "gaussep/spectrum_ep.hpp"

namespace gaussep {

struct SmoothingMap {
  Matrix S;
  Ordering ordering = Ordering::Grouped;

  GaussianChannel forward() const {
    const Eigen::Index n = S.rows();
    return {Matrix::Identity(n, n), S, Vector::Zero(n), ordering, true};
  }

  // Formal inverse; not CP for S > 0.
  GaussianChannel inverse() const {
    const Eigen::Index n = S.rows();
    return {Matrix::Identity(n, n), Matrix(-S), Vector::Zero(n), ordering, false};
  }
};

// V_S^{-1} o ch o V_S, formed by two compositions.
inline GaussianChannel conjugate_by_smoothing(const GaussianChannel& ch, const SmoothingMap& m) {
  GaussianChannel out = compose(m.inverse(), compose(ch, m.forward()));
  out.physical = false;
  return out;
}

struct GaugingResult {
  GaussianChannel gauged;
  GaugeCovariance S;
  double residual_Y = 0.0;
  double tolerance = 0.0;
};

inline GaugingResult gauge_channel(const GaussianChannel& ch) {
  ch.validate();
  GaugingResult r;
  r.S = solve_stein(ch.X, ch.Y);
  r.gauged = conjugate_by_smoothing(ch, {r.S.S, ch.ordering});
  r.residual_Y = max_abs(r.gauged.Y);
  r.tolerance = 1e-9 * (1.0 + max_abs(ch.Y));
  return r;
}

struct SemigroupGauging {
  GaugeCovariance S;
  std::vector<double> times;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

// 20 log-spaced times in [1e-3, 10 / |max Re lambda(A)|].
inline std::vector<double> default_gauge_times(const Matrix& A, int count = 20) {
  const double abscissa = spectral_abscissa(A);
  if (!(abscissa < 0.0)) throw Error(ErrorKind::NonHurwitz, "drift is not Hurwitz");
  const double lo = std::log(1e-3), hi = std::log(10.0 / std::abs(abscissa));
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i)
    t[i] = std::exp(lo + (hi - lo) * i / std::max(1, count - 1));
  return t;
}

// One time-independent S from the Lyapunov equation; each Y_t is built without
// reference to S (block exponential plus doubling) before conjugation.
inline SemigroupGauging gauge_semigroup(const GaussianGenerator& g,
                                        std::vector<double> times = {}) {
  g.validate();
  if (!(spectral_abscissa(g.A) < 0.0)) throw Error(ErrorKind::NonHurwitz, "drift is not Hurwitz");
  if (times.empty()) times = default_gauge_times(g.A);
  SemigroupGauging out;
  out.S = solve_lyapunov(g.A, g.D);
  out.times = times;
  const SmoothingMap map{out.S.S, g.ordering};
  SemigroupOptions opt;
  opt.y_method = YMethod::Doubling;
  for (double t : times) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "times must be nonnegative");
    const GaussianChannel gauged = conjugate_by_smoothing(semigroup_channel(g, t, opt), map);
    const double res = max_abs(gauged.Y);
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

struct SimilarityReport {
  bool drift_identical = false;  // entrywise ==
  double spectrum_distance = 0.0;
  JordanReport original;
  JordanReport gauged;
  bool jordan_match = false;

  bool passes() const { return drift_identical && jordan_match; }
};

inline SimilarityReport similarity_spectrum_check(const GaussianChannel& ch) {
  const GaugingResult g = gauge_channel(ch);
  SimilarityReport r;
  r.drift_identical = (g.gauged.X.array() == ch.X.array()).all();
  r.spectrum_distance = gaussep::spectrum_distance(eigenvalues(ch.X), eigenvalues(g.gauged.X));
  r.original = jordan_structure(ch.X);
  r.gauged = jordan_structure(g.gauged.X);
  r.jordan_match = same_structure(r.original, r.gauged, 0.0);
  return r;
}

}  // namespace gaussep
