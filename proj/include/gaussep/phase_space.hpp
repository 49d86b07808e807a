#pragma once

// Symplectic conventions, Gaussian channels (X, Y, delta) acting on moment
// pairs (d, V), their composition, complete-positivity checks and
// displacement gauging.
//
// Conventions: vacuum covariance is I/2; grouped ordering (q1..qN, p1..pN) is
// the canonical one. Every operation reads the ordering carried by its
// arguments, so interleaved data works too as long as it is not mixed.

#include "gaussep/core.hpp"

#include <optional>
#include <utility>

namespace gaussep {

enum class Ordering { Grouped, Interleaved };

inline const char* to_string(Ordering o) {
  return o == Ordering::Grouped ? "grouped" : "interleaved";
}

struct SymplecticForm {
  int modes = 0;
  Ordering ordering = Ordering::Grouped;
  Matrix matrix;
};

inline SymplecticForm symplectic_form(int modes, Ordering ordering = Ordering::Grouped) {
  if (modes < 1) throw Error(ErrorKind::InvalidDimension, "mode count must be >= 1");
  const Eigen::Index n = modes;
  Matrix s = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ordering == Ordering::Grouped) {
      s(i, n + i) = 1.0;
      s(n + i, i) = -1.0;
    } else {
      s(2 * i, 2 * i + 1) = 1.0;
      s(2 * i + 1, 2 * i) = -1.0;
    }
  }
  return {modes, ordering, std::move(s)};
}

inline Matrix sigma(int modes, Ordering ordering = Ordering::Grouped) {
  return symplectic_form(modes, ordering).matrix;
}

// Grouped index of interleaved slot k: x = P r with P_{i,2i-1} = P_{N+i,2i} = 1.
inline Eigen::Index grouped_index(Eigen::Index interleaved, Eigen::Index modes) {
  return interleaved % 2 == 0 ? interleaved / 2 : modes + interleaved / 2;
}

// The permutation matrix P (x = P r) for N modes.
inline Matrix ordering_permutation(int modes) {
  if (modes < 1) throw Error(ErrorKind::InvalidDimension, "mode count must be >= 1");
  Matrix p = Matrix::Zero(2 * modes, 2 * modes);
  for (Eigen::Index k = 0; k < 2 * modes; ++k) p(grouped_index(k, modes), k) = 1.0;
  return p;
}

// Reorders a 2N-vector or a 2N x 2N matrix between quadrature orderings.
// Pure index shuffling; the round trip is exact.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> reorder(
    const Eigen::MatrixBase<Derived>& object, Ordering from, Ordering to) {
  using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index dim = object.rows();
  if (dim == 0 || dim % 2 != 0)
    throw Error(ErrorKind::InvalidDimension, "reorder needs an even leading dimension");
  const bool is_vector = object.cols() == 1;
  if (!is_vector && object.cols() != dim)
    throw Error(ErrorKind::DimensionMismatch, "reorder needs a vector or a square matrix");
  Out out(object.rows(), object.cols());
  if (from == to) {
    out = object;
    return out;
  }
  const Eigen::Index modes = dim / 2;
  // dest[map(k)] = src[k] for interleaved -> grouped, inverse otherwise.
  auto target = [&](Eigen::Index k) {
    if (from == Ordering::Interleaved) return grouped_index(k, modes);
    return k < modes ? 2 * k : 2 * (k - modes) + 1;
  };
  if (is_vector) {
    for (Eigen::Index k = 0; k < dim; ++k) out(target(k), 0) = object(k, 0);
  } else {
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) out(target(i), target(j)) = object(i, j);
  }
  return out;
}

struct MomentState {
  Vector d;
  Matrix V;
  Ordering ordering = Ordering::Grouped;

  int modes() const { return static_cast<int>(d.size() / 2); }

  static MomentState vacuum(int modes, Ordering ordering = Ordering::Grouped) {
    return {Vector::Zero(2 * modes), 0.5 * Matrix::Identity(2 * modes, 2 * modes), ordering};
  }
};

// Robertson-Schroedinger: V + (i/2) Sigma >= 0.
inline bool is_physical(const MomentState& s) {
  const int n = s.modes();
  CMatrix z = s.V.cast<Complex>() + Complex(0.0, 0.5) * sigma(n, s.ordering).cast<Complex>();
  return least_eigenvalue(CMatrix(0.5 * (z + z.adjoint()))) >= -psd_tolerance(s.V);
}

struct GaussianChannel {
  Matrix X;
  Matrix Y;
  Vector delta;
  Ordering ordering = Ordering::Grouped;
  // Set when the triple is meant to be a CPTP map; gauged representatives are not.
  bool physical = true;

  int modes() const { return static_cast<int>(X.rows() / 2); }

  static GaussianChannel identity(int modes, Ordering ordering = Ordering::Grouped) {
    const Eigen::Index d = 2 * modes;
    return {Matrix::Identity(d, d), Matrix::Zero(d, d), Vector::Zero(d), ordering, true};
  }

  void validate() const {
    require_even_square(X, "X");
    if (Y.rows() != X.rows() || Y.cols() != X.cols() || delta.size() != X.rows())
      throw Error(ErrorKind::DimensionMismatch, "channel X, Y, delta sizes disagree");
  }
};

inline void require_compatible(const GaussianChannel& a, const GaussianChannel& b) {
  a.validate();
  b.validate();
  if (a.X.rows() != b.X.rows())
    throw Error(ErrorKind::DimensionMismatch, "channels act on different mode counts");
  if (a.ordering != b.ordering)
    throw Error(ErrorKind::DimensionMismatch, "channels use different quadrature orderings");
}

inline MomentState apply_channel(const GaussianChannel& ch, const MomentState& s) {
  ch.validate();
  if (s.d.size() != ch.X.rows() || s.V.rows() != ch.X.rows() || s.V.cols() != ch.X.rows())
    throw Error(ErrorKind::DimensionMismatch, "state and channel sizes disagree");
  if (s.ordering != ch.ordering)
    throw Error(ErrorKind::DimensionMismatch, "state and channel orderings disagree");
  Vector d = ch.X * s.d + ch.delta;
  Matrix V = symmetrized(ch.X * s.V * ch.X.transpose() + ch.Y);
  return {std::move(d), std::move(V), s.ordering};
}

// second after first: (X2 X1, X2 Y1 X2^T + Y2, X2 d1 + d2).
inline GaussianChannel compose(const GaussianChannel& second, const GaussianChannel& first) {
  require_compatible(second, first);
  GaussianChannel out;
  out.X = second.X * first.X;
  out.Y = second.X * first.Y * second.X.transpose() + second.Y;
  out.delta = second.X * first.delta + second.delta;
  out.ordering = first.ordering;
  out.physical = first.physical && second.physical;
  return out;
}

enum class CpMethod { Auto, HermitianEig, DetCondition };

struct CpReport {
  bool passes = false;
  double margin = 0.0;
  CpMethod method = CpMethod::HermitianEig;
  double tolerance = 0.0;
};

// Y + (i/2)(Sigma - X Sigma X^T), Hermitian.
inline CMatrix cp_matrix(const Matrix& X, const Matrix& Y, const Matrix& sig) {
  Matrix anti = sig - X * sig * X.transpose();
  CMatrix z = symmetrized(Y).cast<Complex>() + Complex(0.0, 0.5) * anti.cast<Complex>();
  return 0.5 * (z + z.adjoint());
}

inline CpReport cp_check_hermitian(const Matrix& X, const Matrix& Y, const Matrix& sig) {
  CMatrix z = cp_matrix(X, Y, sig);
  CpReport r;
  r.method = CpMethod::HermitianEig;
  r.margin = least_eigenvalue(z);
  r.tolerance = psd_tolerance(z.cwiseAbs().maxCoeff());
  r.passes = r.margin >= -r.tolerance;
  return r;
}

// One-mode shortcut: Y >= 0 and det Y >= ((1 - det X)/2)^2. The margin is the
// determinant slack det Y - alpha^2 (or the most negative diagonal entry of Y
// when that already fails).
inline CpReport cp_check_det(const Matrix& X, const Matrix& Y) {
  if (X.rows() != 2 || X.cols() != 2 || Y.rows() != 2 || Y.cols() != 2)
    throw Error(ErrorKind::InvalidDimension, "determinant CP condition is one-mode only");
  const double alpha = 0.5 * (1.0 - X.determinant());
  const double y1 = Y(0, 0), y2 = Y(1, 1), y3 = 0.5 * (Y(0, 1) + Y(1, 0));
  const double scale = std::max({std::abs(y1), std::abs(y2), std::abs(y3), std::abs(alpha)});
  CpReport r;
  r.method = CpMethod::DetCondition;
  // Slack of the 2x2 determinant is roughly lambda_min * lambda_max, so the
  // eigenvalue tolerance is scaled by the matrix size.
  const double eig_tol = psd_tolerance(scale);
  r.tolerance = eig_tol * (1.0 + 2.0 * scale);
  const double diag = std::min(y1, y2);
  if (diag < -eig_tol) {
    r.margin = diag;
    r.passes = false;
    return r;
  }
  r.margin = (y1 * y2 - y3 * y3) - alpha * alpha;
  r.passes = r.margin >= -r.tolerance;
  return r;
}

inline CpReport cp_check(const GaussianChannel& ch, CpMethod method = CpMethod::Auto) {
  ch.validate();
  if (method == CpMethod::Auto)
    method = ch.modes() == 1 ? CpMethod::DetCondition : CpMethod::HermitianEig;
  if (method == CpMethod::DetCondition) {
    if (ch.ordering == Ordering::Interleaved || ch.modes() == 1) return cp_check_det(ch.X, ch.Y);
  }
  return cp_check_hermitian(ch.X, ch.Y, sigma(ch.modes(), ch.ordering));
}

struct DisplacementGauge {
  GaussianChannel channel;
  Vector chi;
  double condition = 0.0;  // 2-norm condition number of I - X
};

// Conjugation by the displacement chi = -(I - X)^{-1} delta removes delta.
inline DisplacementGauge displacement_gauge(const GaussianChannel& ch) {
  ch.validate();
  const Eigen::Index d = ch.X.rows();
  Matrix m = Matrix::Identity(d, d) - ch.X;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > 1e-12 * std::max(1.0, smax)))
    throw Error(ErrorKind::NotGaugeable, "I - X is singular (X has eigenvalue 1)");
  DisplacementGauge out;
  out.condition = smax / smin;
  out.chi = -m.partialPivLu().solve(ch.delta);
  out.channel = ch;
  out.channel.delta = Vector::Zero(d);
  return out;
}

}  // namespace gaussep
