#pragma once

// Shared numeric vocabulary for the gaussep toolkit: matrix aliases, the
// error type, and the small linear-algebra helpers every module leans on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaussep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr const char* kVersion = "0.3.1";

enum class ErrorKind {
  InvalidDimension,
  DimensionMismatch,
  NotGaugeable,
  NonHurwitz,
  DegenerateSpectrum,
  Unstable,
  NonConvergence,
  DegenerateModel,
  InvalidParameter,
  Unphysical,
  DegreeTooLarge,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::NotGaugeable: return "not-gaugeable";
    case ErrorKind::NonHurwitz: return "non-hurwitz";
    case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
    case ErrorKind::Unstable: return "unstable";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::DegenerateModel: return "degenerate-model";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Unphysical: return "unphysical";
    case ErrorKind::DegreeTooLarge: return "degree-too-large";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

inline void require_square(const Matrix& m, const char* what) {
  if (!is_square(m))
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square");
}

inline void require_even_square(const Matrix& m, const char* what) {
  require_square(m, what);
  if (m.rows() == 0 || m.rows() % 2 != 0)
    throw Error(ErrorKind::InvalidDimension, std::string(what) + " must be 2N x 2N with N >= 1");
}

// PSD slack: least eigenvalue >= -1e-10 * (1 + max-abs entry).
inline double psd_tolerance(double scale) { return 1e-10 * (1.0 + scale); }

template <class Derived>
double psd_tolerance(const Eigen::MatrixBase<Derived>& m) {
  return psd_tolerance(max_abs(m));
}

inline double least_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double least_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Ascending eigenvalues of a real symmetric matrix.
inline Vector symmetric_eigenvalues(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline std::vector<Complex> eigenvalues(const Matrix& m) {
  require_square(m, "matrix");
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

inline std::vector<Complex> eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

inline double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& z : eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

inline double spectral_abscissa(const Matrix& m) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(m)) r = std::max(r, z.real());
  return r;
}

// Kronecker product, column-major vec convention: vec(AXB) = (B^T kron A) vec(X).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index rows) {
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

// Full-precision decimal text (17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Greedy nearest-neighbour pairing of two eigenvalue multisets; returns the
// largest pairing distance (infinity on size mismatch).
inline double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto by_value = [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), by_value);
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(z - b[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

}  // namespace gaussep
