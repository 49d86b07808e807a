#pragma once

// Stability classification, Lyapunov and Stein solvers (explicit 2x2 paths and
// vectorized general paths), the Stein solution for a Jordan drift, and matrix
// exponentials.

#include "gaussep/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <optional>

namespace gaussep {

enum class StabilityMode { Discrete, Continuous };

struct StabilityReport {
  StabilityMode mode = StabilityMode::Continuous;
  bool hurwitz = false;  // max Re lambda < 0
  bool schur = false;    // spectral radius < 1
  double spectral_radius = 0.0;
  double spectral_abscissa = 0.0;
  // (1 - det, 1 - tr + det, 1 + tr + det), 2x2 only.
  std::optional<std::array<double, 3>> jury;
  std::vector<Complex> eigenvalues;

  bool stable() const { return mode == StabilityMode::Continuous ? hurwitz : schur; }
};

inline std::array<double, 3> jury_triple(const Matrix& X) {
  const double tau = X.trace(), det = X.determinant();
  return {1.0 - det, 1.0 - tau + det, 1.0 + tau + det};
}

inline bool jury_stable(const std::array<double, 3>& j) {
  return j[0] > 0.0 && j[1] > 0.0 && j[2] > 0.0;
}

inline StabilityReport stability(const Matrix& M, StabilityMode mode) {
  require_square(M, "matrix");
  StabilityReport r;
  r.mode = mode;
  r.eigenvalues = eigenvalues(M);
  r.spectral_radius = 0.0;
  r.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& z : r.eigenvalues) {
    r.spectral_radius = std::max(r.spectral_radius, std::abs(z));
    r.spectral_abscissa = std::max(r.spectral_abscissa, z.real());
  }
  r.hurwitz = r.spectral_abscissa < 0.0;
  r.schur = r.spectral_radius < 1.0;
  if (M.rows() == 2) r.jury = jury_triple(M);
  return r;
}

enum class CovarianceSource { Lyapunov, Stein, SteinSeries, JordanClosedForm, EpBranchFormula };

inline const char* to_string(CovarianceSource s) {
  switch (s) {
    case CovarianceSource::Lyapunov: return "lyapunov";
    case CovarianceSource::Stein: return "stein";
    case CovarianceSource::SteinSeries: return "stein-series";
    case CovarianceSource::JordanClosedForm: return "jordan-closed-form";
    case CovarianceSource::EpBranchFormula: return "ep-branch-formula";
  }
  return "unknown";
}

struct GaugeCovariance {
  Matrix S;
  CovarianceSource source = CovarianceSource::Lyapunov;
  double residual = 0.0;   // max-abs defect of the defining equation
  double tolerance = 0.0;  // declared bound for residual
};

inline double lyapunov_residual(const Matrix& A, const Matrix& S, const Matrix& D) {
  return max_abs(Matrix(A * S + S * A.transpose() + D));
}

inline double stein_residual(const Matrix& X, const Matrix& S, const Matrix& Y) {
  return max_abs(Matrix(S - X * S * X.transpose() - Y));
}

inline double equation_tolerance(const Matrix& rhs) { return 1e-10 * (1.0 + max_abs(rhs)); }

enum class SolvePath { Auto, ClosedForm2x2, Kronecker };

struct LyapunovOptions {
  SolvePath path = SolvePath::Auto;
  bool require_hurwitz = true;
};

struct SteinOptions {
  SolvePath path = SolvePath::Auto;
  bool require_stable = true;
};

namespace detail {

constexpr Eigen::Index kMaxKroneckerDim = 20;

inline void require_kronecker_size(const Matrix& M) {
  if (M.rows() > kMaxKroneckerDim)
    throw Error(ErrorKind::InvalidDimension, "vectorized solver is capped at 2N <= 20");
}

// Solves K vec(S) = rhs, with one step of iterative refinement, and returns S
// symmetrized.
inline Matrix kron_solve(const Matrix& K, const Vector& rhs, Eigen::Index n) {
  Eigen::PartialPivLU<Matrix> lu(K);
  Vector x = lu.solve(rhs);
  x += lu.solve(Vector(rhs - K * x));
  return symmetrized(unvec(x, n));
}

// 2x2 Lyapunov via the symmetric 3x3 system in (s11, s12, s22).
inline Matrix lyapunov_3x3(const Matrix& A, const Matrix& D) {
  const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
  Eigen::Matrix3d M;
  M << 2 * a, 2 * b, 0, c, a + d, b, 0, 2 * c, 2 * d;
  Eigen::Vector3d rhs(-D(0, 0), -0.5 * (D(0, 1) + D(1, 0)), -D(1, 1));
  Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
  if (!lu.isInvertible())
    throw Error(ErrorKind::DegenerateSpectrum, "2x2 Lyapunov system is singular");
  Eigen::Vector3d s = lu.solve(rhs);
  Matrix S(2, 2);
  S << s(0), s(1), s(1), s(2);
  return S;
}

inline Matrix lyapunov_closed_form(const Matrix& A, const Matrix& D) {
  const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
  const double d11 = D(0, 0), d12 = 0.5 * (D(0, 1) + D(1, 0)), d22 = D(1, 1);
  const double scale = std::max(1.0, max_abs(A));
  const double trace = a + d, det = a * d - b * c;
  // Pivot gate on the elimination: a, d and both denominator factors.
  const double gate = 1e-12 * scale;
  if (std::abs(a) < gate || std::abs(d) < gate || std::abs(trace) < gate ||
      std::abs(det) < gate * scale)
    return lyapunov_3x3(A, D);
  const double s12 = (a * b * d22 + c * d * d11 - 2.0 * a * d * d12) / (2.0 * trace * det);
  const double s11 = -(d11 + 2.0 * b * s12) / (2.0 * a);
  const double s22 = -(d22 + 2.0 * c * s12) / (2.0 * d);
  Matrix S(2, 2);
  S << s11, s12, s12, s22;
  return S;
}

inline Matrix lyapunov_kronecker(const Matrix& A, const Matrix& D) {
  require_kronecker_size(A);
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix K = kron(I, A) + kron(A, I);
  return kron_solve(K, Vector(-vec(symmetrized(D))), n);
}

inline Matrix stein_closed_form(const Matrix& X, const Matrix& Y) {
  const double a = X(0, 0), b = X(0, 1), c = X(1, 0), d = X(1, 1);
  const double y11 = Y(0, 0), y12 = 0.5 * (Y(0, 1) + Y(1, 0)), y22 = Y(1, 1);
  const double tau = a + d, det = a * d - b * c;
  const double den = (1.0 - det) * (1.0 - tau + det) * (1.0 + tau + det);
  if (std::abs(den) < 1e-14)
    throw Error(ErrorKind::DegenerateSpectrum, "2x2 Stein system is singular");
  const double s11 = ((a * d * d * d - a * d - b * c * d * d - b * c - d * d + 1.0) * y11 +
                      (-2.0 * a * b * d * d + 2.0 * a * b + 2.0 * b * b * c * d) * y12 +
                      (a * b * b * d - b * b * b * c + b * b) * y22) /
                     den;
  const double s12 = ((-a * c * d * d + a * c + b * c * c * d) * y11 +
                      (a * a * d * d - a * a - b * b * c * c - d * d + 1.0) * y12 +
                      (-a * a * b * d + a * b * b * c + b * d) * y22) /
                     den;
  const double s22 = ((a * c * c * d - b * c * c * c + c * c) * y11 +
                      (-2.0 * a * a * c * d + 2.0 * a * b * c * c + 2.0 * c * d) * y12 +
                      (a * a * a * d - a * a * b * c - a * a - a * d - b * c + 1.0) * y22) /
                     den;
  Matrix S(2, 2);
  S << s11, s12, s12, s22;
  return S;
}

inline Matrix stein_kronecker(const Matrix& X, const Matrix& Y) {
  require_kronecker_size(X);
  const Eigen::Index n = X.rows();
  const Matrix K = Matrix::Identity(n * n, n * n) - kron(X, X);
  return kron_solve(K, vec(symmetrized(Y)), n);
}

}  // namespace detail

inline GaugeCovariance solve_lyapunov(const Matrix& A, const Matrix& D,
                                      LyapunovOptions options = {}) {
  require_square(A, "A");
  if (D.rows() != A.rows() || D.cols() != A.cols())
    throw Error(ErrorKind::DimensionMismatch, "A and D sizes disagree");
  const auto eig = eigenvalues(A);
  const double scale = std::max(1.0, max_abs(A));
  double abscissa = -std::numeric_limits<double>::infinity();
  double min_pair = std::numeric_limits<double>::infinity();
  for (const auto& x : eig) {
    abscissa = std::max(abscissa, x.real());
    for (const auto& y : eig) min_pair = std::min(min_pair, std::abs(x + y));
  }
  if (options.require_hurwitz && !(abscissa < 0.0))
    throw Error(ErrorKind::NonHurwitz, "drift is not Hurwitz");
  if (min_pair < 1e-12 * scale)
    throw Error(ErrorKind::DegenerateSpectrum, "drift has eigenvalues with lambda_i + lambda_j = 0");

  SolvePath path = options.path;
  if (path == SolvePath::Auto) path = A.rows() == 2 ? SolvePath::ClosedForm2x2 : SolvePath::Kronecker;
  if (path == SolvePath::ClosedForm2x2 && A.rows() != 2)
    throw Error(ErrorKind::InvalidDimension, "closed-form Lyapunov path is 2x2 only");

  GaugeCovariance out;
  out.source = CovarianceSource::Lyapunov;
  out.S = path == SolvePath::ClosedForm2x2 ? detail::lyapunov_closed_form(A, D)
                                           : detail::lyapunov_kronecker(A, D);
  out.residual = lyapunov_residual(A, out.S, D);
  out.tolerance = equation_tolerance(D);
  return out;
}

inline GaugeCovariance solve_stein(const Matrix& X, const Matrix& Y, SteinOptions options = {}) {
  require_square(X, "X");
  if (Y.rows() != X.rows() || Y.cols() != X.cols())
    throw Error(ErrorKind::DimensionMismatch, "X and Y sizes disagree");
  const auto eig = eigenvalues(X);
  double radius = 0.0, min_pair = std::numeric_limits<double>::infinity();
  for (const auto& x : eig) {
    radius = std::max(radius, std::abs(x));
    for (const auto& y : eig) min_pair = std::min(min_pair, std::abs(1.0 - x * y));
  }
  if (options.require_stable && !(radius < 1.0))
    throw Error(ErrorKind::Unstable, "spectral radius of X is not below 1");
  if (min_pair < 1e-12)
    throw Error(ErrorKind::DegenerateSpectrum, "X has eigenvalues with lambda_i * lambda_j = 1");

  SolvePath path = options.path;
  if (path == SolvePath::Auto) path = X.rows() == 2 ? SolvePath::ClosedForm2x2 : SolvePath::Kronecker;
  if (path == SolvePath::ClosedForm2x2 && X.rows() != 2)
    throw Error(ErrorKind::InvalidDimension, "closed-form Stein path is 2x2 only");

  GaugeCovariance out;
  out.source = CovarianceSource::Stein;
  out.S = path == SolvePath::ClosedForm2x2 ? detail::stein_closed_form(X, Y)
                                           : detail::stein_kronecker(X, Y);
  out.residual = stein_residual(X, out.S, Y);
  out.tolerance = equation_tolerance(Y);
  return out;
}

// Partial sums of sum_n X^n Y (X^T)^n until the increment drops below tol.
inline GaugeCovariance stein_series(const Matrix& X, const Matrix& Y, double tol = 1e-12,
                                    long max_terms = 100000) {
  require_square(X, "X");
  if (Y.rows() != X.rows() || Y.cols() != X.cols())
    throw Error(ErrorKind::DimensionMismatch, "X and Y sizes disagree");
  if (!(spectral_radius(X) < 1.0))
    throw Error(ErrorKind::Unstable, "spectral radius of X is not below 1");
  Matrix term = symmetrized(Y);
  Matrix S = term;
  long n = 1;
  // A Jordan drift can make early increments grow before they decay, so the
  // stop rule waits for two consecutive small increments.
  int small = max_abs(term) < tol ? 1 : 0;
  while (small < 2) {
    if (n >= max_terms)
      throw Error(ErrorKind::NonConvergence, "Stein series did not converge; X may be unstable");
    term = X * term * X.transpose();
    S += term;
    ++n;
    small = max_abs(term) < tol ? small + 1 : 0;
  }
  GaugeCovariance out;
  out.S = symmetrized(S);
  out.source = CovarianceSource::SteinSeries;
  out.residual = stein_residual(X, out.S, Y);
  out.tolerance = std::max(equation_tolerance(Y), 10.0 * tol);
  return out;
}

// X = alpha (I + t N) with N^2 = 0, N != 0.
struct JordanDrift2x2 {
  double alpha = 0.0;
  Matrix N;
  double t = 0.0;

  Matrix matrix() const { return alpha * (Matrix::Identity(2, 2) + t * N); }

  static JordanDrift2x2 make(double alpha, const Matrix& N, double t) {
    if (N.rows() != 2 || N.cols() != 2)
      throw Error(ErrorKind::InvalidDimension, "Jordan drift needs a 2x2 nilpotent");
    const double norm = max_abs(N);
    if (!(norm > 0.0)) throw Error(ErrorKind::InvalidParameter, "nilpotent part must be nonzero");
    if (max_abs(Matrix(N * N)) > 1e-12 * norm * norm)
      throw Error(ErrorKind::InvalidParameter, "N^2 != 0");
    return {alpha, N, t};
  }
};

// Splits a defective 2x2 X into alpha (I + N) with alpha = tr X / 2 and t = 1.
inline JordanDrift2x2 jordan_decompose(const Matrix& X) {
  if (X.rows() != 2 || X.cols() != 2)
    throw Error(ErrorKind::InvalidDimension, "Jordan decomposition here is 2x2 only");
  const double alpha = 0.5 * X.trace();
  if (alpha == 0.0) throw Error(ErrorKind::InvalidParameter, "nilpotent X has no scalar part");
  Matrix N = X / alpha - Matrix::Identity(2, 2);
  return JordanDrift2x2::make(alpha, N, 1.0);
}

inline GaugeCovariance stein_jordan_closed_form(const JordanDrift2x2& j, const Matrix& Y) {
  if (!(std::abs(j.alpha) < 1.0))
    throw Error(ErrorKind::Unstable, "Jordan drift needs |alpha| < 1");
  if (Y.rows() != 2 || Y.cols() != 2)
    throw Error(ErrorKind::DimensionMismatch, "Y must be 2x2");
  const Matrix Ys = symmetrized(Y);
  const double rho = j.alpha * j.alpha, q = 1.0 - rho;
  const Matrix& N = j.N;
  Matrix S = Ys / q + (rho * j.t / (q * q)) * (N * Ys + Ys * N.transpose()) +
             (rho * (1.0 + rho) * j.t * j.t / (q * q * q)) * (N * Ys * N.transpose());
  GaugeCovariance out;
  out.S = symmetrized(S);
  out.source = CovarianceSource::JordanClosedForm;
  out.residual = stein_residual(j.matrix(), out.S, Ys);
  out.tolerance = equation_tolerance(Ys) * std::max(1.0, max_abs(out.S));
  return out;
}

namespace detail {

// sinh(x)/x and sin(x)/x with a Taylor branch near zero.
inline double sinhc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace detail

// exp(tB) for 2x2 B via the traceless split B = (tr B / 2) I + B0, B0^2 = -det(B0) I.
inline Matrix expm2(const Matrix& B, double t) {
  if (B.rows() != 2 || B.cols() != 2) throw Error(ErrorKind::InvalidDimension, "expm2 is 2x2 only");
  const double half_trace = 0.5 * B.trace();
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix B0 = B - half_trace * I;
  const double det0 = B0.determinant();
  const double nu2 = -det0;  // B0^2 = nu2 I
  const double norm2 = B0.squaredNorm();
  Matrix out;
  if (std::abs(det0) <= 1e-12 * norm2) {
    // cosh and sinh/x to second order in x^2 = nu2 t^2; exactly I + t B0 on B0^2 = 0.
    const double z = nu2 * t * t;
    out = (1.0 + 0.5 * z) * I + (t * (1.0 + z / 6.0)) * B0;
  } else if (nu2 > 0.0) {
    const double x = std::sqrt(nu2) * t;
    out = std::cosh(x) * I + (t * detail::sinhc(x)) * B0;
  } else {
    const double x = std::sqrt(-nu2) * t;
    out = std::cos(x) * I + (t * detail::sinc(x)) * B0;
  }
  return std::exp(t * half_trace) * out;
}

// General matrix exponential (Pade scaling-and-squaring).
inline Matrix expm(const Matrix& M) {
  require_square(M, "matrix");
  return M.exp();
}

}  // namespace gaussep
