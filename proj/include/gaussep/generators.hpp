#pragma once

// Continuous-time Gaussian generators (A, D, u): construction from Lindblad or
// white-noise data, generator-level CP, finite-time semigroup channels and a
// fixed-step moment integrator.

#include "gaussep/matrix_equations.hpp"
#include "gaussep/phase_space.hpp"

#include <functional>

namespace gaussep {

struct GaussianGenerator {
  Matrix A;
  Matrix D;
  Vector u;
  Ordering ordering = Ordering::Grouped;
  bool physical = true;

  int modes() const { return static_cast<int>(A.rows() / 2); }

  void validate() const {
    require_even_square(A, "A");
    if (D.rows() != A.rows() || D.cols() != A.cols() || u.size() != A.rows())
      throw Error(ErrorKind::DimensionMismatch, "generator A, D, u sizes disagree");
  }
};

struct LindbladData {
  Matrix H;                       // quadratic Hamiltonian, 2N x 2N symmetric
  Vector f;                       // linear drive
  std::vector<CVector> jump_rows; // each jump operator is l_j^T x
  double rate = 1.0;
  Ordering ordering = Ordering::Grouped;
};

struct WhiteNoiseData {
  Matrix H_S;
  Vector u;
  Matrix C;         // 2N x 2M
  Matrix sigma_in;  // bath covariance, 2M x 2M
  std::optional<Matrix> Sigma_in;  // bath symplectic form; defaults to the system ordering's
  Ordering ordering = Ordering::Grouped;
  bool unchecked = false;
};

// C^dagger C = sum_j conj(l_j) l_j^T.
inline CMatrix jump_gram(const std::vector<CVector>& rows, Eigen::Index dim) {
  CMatrix g = CMatrix::Zero(dim, dim);
  for (const auto& l : rows) {
    if (l.size() != dim) throw Error(ErrorKind::DimensionMismatch, "jump row has wrong length");
    g += l.conjugate() * l.transpose();
  }
  return g;
}

inline GaussianGenerator from_lindblad(const LindbladData& data) {
  require_even_square(data.H, "H");
  const Eigen::Index dim = data.H.rows();
  if (data.f.size() != dim) throw Error(ErrorKind::DimensionMismatch, "f has wrong length");
  const Matrix sig = sigma(static_cast<int>(dim / 2), data.ordering);
  const CMatrix gram = jump_gram(data.jump_rows, dim);
  GaussianGenerator g;
  g.A = sig * (symmetrized(data.H) + data.rate * gram.imag());
  g.D = symmetrized(data.rate * sig * gram.real() * sig.transpose());
  g.u = sig * data.f;
  g.ordering = data.ordering;
  g.physical = true;
  return g;
}

inline GaussianGenerator from_white_noise(const WhiteNoiseData& data) {
  require_even_square(data.H_S, "H_S");
  const Eigen::Index dim = data.H_S.rows();
  if (data.u.size() != dim || data.C.rows() != dim)
    throw Error(ErrorKind::DimensionMismatch, "white-noise data sizes disagree");
  require_even_square(data.sigma_in, "sigma_in");
  if (data.C.cols() != data.sigma_in.rows())
    throw Error(ErrorKind::DimensionMismatch, "C columns must match the bath dimension");
  const Matrix sig = sigma(static_cast<int>(dim / 2), data.ordering);
  const Matrix sig_in = data.Sigma_in ? *data.Sigma_in
                                      : sigma(static_cast<int>(data.sigma_in.rows() / 2),
                                              data.ordering);
  if (sig_in.rows() != data.sigma_in.rows() || sig_in.cols() != data.sigma_in.cols())
    throw Error(ErrorKind::DimensionMismatch, "bath symplectic form has wrong size");
  if (!data.unchecked) {
    CMatrix z = data.sigma_in.cast<Complex>() + Complex(0.0, 0.5) * sig_in.cast<Complex>();
    z = 0.5 * (z + z.adjoint());
    if (least_eigenvalue(z) < -psd_tolerance(z.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::Unphysical, "bath covariance violates the uncertainty relation");
  }
  GaussianGenerator g;
  g.A = sig * symmetrized(data.H_S) + 0.5 * sig * data.C * sig_in * data.C.transpose();
  g.D = symmetrized(sig * data.C * data.sigma_in * data.C.transpose() * sig.transpose());
  g.u = data.u;
  g.ordering = data.ordering;
  g.physical = !data.unchecked;
  return g;
}

// D + (i/2)(A Sigma + Sigma A^T), Hermitian.
inline CpReport cp_check_generator(const GaussianGenerator& g) {
  g.validate();
  const Matrix sig = sigma(g.modes(), g.ordering);
  const Matrix anti = g.A * sig + sig * g.A.transpose();
  CMatrix z = symmetrized(g.D).cast<Complex>() + Complex(0.0, 0.5) * anti.cast<Complex>();
  z = 0.5 * (z + z.adjoint());
  CpReport r;
  r.method = CpMethod::HermitianEig;
  r.margin = least_eigenvalue(z);
  r.tolerance = psd_tolerance(z.cwiseAbs().maxCoeff());
  r.passes = r.margin >= -r.tolerance;
  return r;
}

namespace detail {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = gl.weights[n - 1 - i] = w;
  }
  return gl;
}

inline const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre gl = gauss_legendre(64);
  return gl;
}

inline Matrix drift_exp(const Matrix& A, double t) {
  return A.rows() == 2 ? expm2(A, t) : expm(Matrix(A * t));
}

// Matrix-valued adaptive Simpson on [a, b].
inline Matrix adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b,
                               const Matrix& fa, const Matrix& fm, const Matrix& fb,
                               const Matrix& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const Matrix flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Matrix both = left + right;
  const double err = max_abs(Matrix(both - whole));
  if (depth <= 0) {
    if (err > 15.0 * tol)
      throw Error(ErrorKind::NonConvergence, "adaptive quadrature hit its depth limit");
    return both + (both - whole) / 15.0;
  }
  if (err <= 15.0 * tol) return both + (both - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

enum class YMethod { Auto, LyapunovIdentity, Quadrature, Doubling };

struct SemigroupOptions {
  YMethod y_method = YMethod::Auto;
  double quadrature_tol = 1e-10;
};

// Y_t = int_0^t e^{As} D e^{A^T s} ds by adaptive Simpson.
inline Matrix diffusion_integral_quadrature(const Matrix& A, const Matrix& D, double t,
                                            double tol = 1e-10) {
  if (t == 0.0) return Matrix::Zero(A.rows(), A.cols());
  auto f = [&](double s) {
    const Matrix E = detail::drift_exp(A, s);
    return Matrix(E * D * E.transpose());
  };
  const Matrix fa = f(0.0), fm = f(0.5 * t), fb = f(t);
  const Matrix whole = t / 6.0 * (fa + 4.0 * fm + fb);
  return symmetrized(detail::adaptive_simpson(f, 0.0, t, fa, fm, fb, whole, tol, 40));
}

// Y_t by a short block exponential followed by repeated doubling
// Y_{2s} = X_s Y_s X_s^T + Y_s. Does not use any Lyapunov solution.
inline std::pair<Matrix, Matrix> drift_diffusion_doubling(const Matrix& A, const Matrix& D,
                                                         double t) {
  const Eigen::Index n = A.rows();
  if (t == 0.0) return {Matrix::Identity(n, n), Matrix::Zero(n, n)};
  const double norm = std::max(A.lpNorm<1>(), 1e-300);
  int k = 0;
  double h = t;
  while (norm * h > 0.5 && k < 60) {
    h *= 0.5;
    ++k;
  }
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = A * h;
  block.topRightCorner(n, n) = D * h;
  block.bottomRightCorner(n, n) = -A.transpose() * h;
  const Matrix E = expm(block);
  Matrix X = E.topLeftCorner(n, n);
  Matrix Y = symmetrized(E.topRightCorner(n, n) * X.transpose());
  for (int i = 0; i < k; ++i) {
    Y = symmetrized(X * Y * X.transpose() + Y);
    X = X * X;
  }
  return {X, Y};
}

inline bool is_invertible(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 1e-12 * std::max(1.0, sv(0));
}

// delta_t = int_0^t e^{As} u ds.
inline Vector drive_integral(const Matrix& A, const Vector& u, double t, const Matrix& Xt) {
  if (t == 0.0 || u.isZero(0.0)) return Vector::Zero(u.size());
  if (is_invertible(A))
    return A.partialPivLu().solve(Vector((Xt - Matrix::Identity(A.rows(), A.cols())) * u));
  const auto& gl = detail::gauss_legendre_64();
  Vector acc = Vector::Zero(u.size());
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double s = 0.5 * t * (gl.nodes[i] + 1.0);
    acc += gl.weights[i] * (detail::drift_exp(A, s) * u);
  }
  return 0.5 * t * acc;
}

inline GaussianChannel semigroup_channel(const GaussianGenerator& g, double t,
                                         SemigroupOptions options = {}) {
  g.validate();
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "time must be nonnegative");
  GaussianChannel ch;
  ch.ordering = g.ordering;
  ch.physical = g.physical;
  ch.X = detail::drift_exp(g.A, t);
  ch.delta = drive_integral(g.A, g.u, t, ch.X);

  YMethod method = options.y_method;
  if (method == YMethod::Auto)
    method = spectral_abscissa(g.A) < 0.0 ? YMethod::LyapunovIdentity : YMethod::Quadrature;
  switch (method) {
    case YMethod::LyapunovIdentity: {
      const Matrix S = solve_lyapunov(g.A, g.D).S;
      ch.Y = symmetrized(S - ch.X * S * ch.X.transpose());
      break;
    }
    case YMethod::Quadrature:
      ch.Y = diffusion_integral_quadrature(g.A, g.D, t, options.quadrature_tol);
      break;
    case YMethod::Doubling:
    case YMethod::Auto:
      ch.Y = drift_diffusion_doubling(g.A, g.D, t).second;
      break;
  }
  if (t == 0.0) ch.Y.setZero();
  return ch;
}

// Classical RK4 with `steps` equal steps for d' = A d + u, V' = A V + V A^T + D.
// The equations are linear with constant coefficients, so one RK4 step is an
// affine map on (d, vec V); it is assembled once and applied `steps` times by
// binary powering, which reproduces the stepped recursion.
inline MomentState propagate_moments(const GaussianGenerator& g, const MomentState& s0, double t,
                                     int steps) {
  g.validate();
  if (steps < 1) throw Error(ErrorKind::InvalidParameter, "steps must be >= 1");
  const Eigen::Index n = g.A.rows();
  if (s0.d.size() != n || s0.V.rows() != n)
    throw Error(ErrorKind::DimensionMismatch, "state and generator sizes disagree");
  const Eigen::Index m = n + n * n + 1;
  const Matrix I = Matrix::Identity(n, n);
  // z' = L z with z = (d, vec V, 1).
  Matrix L = Matrix::Zero(m, m);
  L.topLeftCorner(n, n) = g.A;
  L.block(0, m - 1, n, 1) = g.u;
  L.block(n, n, n * n, n * n) = kron(I, g.A) + kron(g.A, I);
  L.block(n, m - 1, n * n, 1) = vec(g.D);
  const double h = t / steps;
  const Matrix hL = h * L;
  const Matrix hL2 = hL * hL;
  const Matrix hL3 = hL2 * hL;
  const Matrix hL4 = hL3 * hL;
  Matrix step = Matrix::Identity(m, m) + hL + hL2 / 2.0 + hL3 / 6.0 + hL4 / 24.0;

  Vector z(m);
  z.head(n) = s0.d;
  z.segment(n, n * n) = vec(s0.V);
  z(m - 1) = 1.0;
  for (int k = steps; k > 0; k >>= 1) {
    if (k & 1) z = step * z;
    if (k > 1) step = step * step;
  }
  MomentState out;
  out.d = z.head(n);
  out.V = symmetrized(unvec(z.segment(n, n * n), n));
  out.ordering = s0.ordering;
  return out;
}

}  // namespace gaussep
