#pragma once

// Exceptional-point detection (Jordan structure of drift matrices), additive
// spectra of Ornstein-Uhlenbeck generators and their polynomial-space matrices.

#include "gaussep/generators.hpp"

#include <numeric>
#include <optional>

namespace gaussep {

struct JordanReport {
  std::vector<Complex> eigenvalues;           // one entry per distinct eigenvalue
  std::vector<int> multiplicities;            // algebraic
  std::vector<std::vector<int>> block_sizes;  // descending, per eigenvalue
  bool defective = false;
  double coalescence_gap = 0.0;  // min pairwise distance of the raw eigenvalues
  double tolerance = 0.0;
  bool certified = true;  // false when a cluster failed every rank test

  int largest_block() const {
    int b = 0;
    for (const auto& v : block_sizes)
      for (int s : v) b = std::max(b, s);
    return b;
  }
};

inline bool same_structure(const JordanReport& a, const JordanReport& b, double tol = 1e-9) {
  if (a.defective != b.defective || a.block_sizes.size() != b.block_sizes.size()) return false;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < b.eigenvalues.size() && !found; ++j) {
      if (std::find(used.begin(), used.end(), j) != used.end()) continue;
      const double scale = std::max(1.0, std::abs(a.eigenvalues[i]));
      if (std::abs(a.eigenvalues[i] - b.eigenvalues[j]) <= tol * scale &&
          a.block_sizes[i] == b.block_sizes[j]) {
        used.push_back(j);
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace detail {

inline double min_pairwise_distance(const std::vector<Complex>& z) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) gap = std::min(gap, std::abs(z[i] - z[j]));
  return z.size() < 2 ? 0.0 : gap;
}

inline JordanReport jordan_2x2(const Matrix& M, double tol) {
  JordanReport r;
  r.tolerance = tol;
  const double half = 0.5 * M.trace();
  const Matrix M0 = M - half * Matrix::Identity(2, 2);
  const double disc = (M(0, 0) - M(1, 1)) * (M(0, 0) - M(1, 1)) + 4.0 * M(0, 1) * M(1, 0);
  const double scale = std::max(max_abs(M), std::numeric_limits<double>::min());
  const Complex root = std::sqrt(Complex(disc, 0.0));
  r.coalescence_gap = std::abs(root);
  const bool repeated = std::abs(disc) < tol * scale * scale;
  const bool scalar = max_abs(M0) <= tol * scale;
  if (repeated) {
    r.eigenvalues = {Complex(half, 0.0)};
    r.multiplicities = {2};
    r.defective = !scalar;
    r.block_sizes = {r.defective ? std::vector<int>{2} : std::vector<int>{1, 1}};
  } else {
    r.eigenvalues = {half + 0.5 * root, half - 0.5 * root};
    r.multiplicities = {1, 1};
    r.block_sizes = {{1}, {1}};
  }
  return r;
}

// Rank threshold is absolute: the caller passes 1e-10 times the k-th power of
// the shifted matrix's 2-norm, so a power that is zero up to rounding counts as zero.
inline int numerical_nullity(const CMatrix& P, double thresh) {
  Eigen::JacobiSVD<CMatrix> svd(P);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return static_cast<int>(P.cols()) - rank;
}

// Nullities of (M - mu I)^k for k = 1..m.
inline std::vector<int> nullity_sequence(const CMatrix& M, Complex mu, int m) {
  const Eigen::Index n = M.rows();
  const CMatrix shifted = M - mu * CMatrix::Identity(n, n);
  const double s1 = Eigen::JacobiSVD<CMatrix>(shifted).singularValues()(0);
  if (!(s1 > 0.0)) return std::vector<int>(m, static_cast<int>(n));
  CMatrix P = shifted;
  double scale = s1;
  std::vector<int> out;
  for (int k = 1; k <= m; ++k) {
    if (k > 1) {
      P = P * shifted;
      scale *= s1;
    }
    out.push_back(numerical_nullity(P, 1e-10 * scale));
  }
  return out;
}

inline bool consistent_nullities(const std::vector<int>& n, int m) {
  if (n.empty() || n.front() < 1 || n.back() != m) return false;
  int prev = 0, prev_inc = std::numeric_limits<int>::max();
  for (int v : n) {
    const int inc = v - prev;
    if (inc < 0 || inc > prev_inc) return false;
    prev = v;
    prev_inc = inc;
  }
  return true;
}

inline std::vector<int> blocks_from_nullities(const std::vector<int>& n) {
  // at_least[k] = number of blocks of size >= k+1.
  std::vector<int> at_least;
  int prev = 0;
  for (int v : n) {
    at_least.push_back(v - prev);
    prev = v;
  }
  at_least.push_back(0);
  std::vector<int> sizes;
  for (std::size_t k = 0; k + 1 < at_least.size(); ++k) {
    const int exact = at_least[k] - at_least[k + 1];
    for (int c = 0; c < exact; ++c) sizes.push_back(static_cast<int>(k + 1));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

// Single-linkage grouping of eigenvalue indices at the given radius.
inline std::vector<std::vector<std::size_t>> link_groups(const std::vector<Complex>& z,
                                                         const std::vector<std::size_t>& idx,
                                                         double radius) {
  std::vector<int> label(idx.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < idx.size(); ++b) {
        if (label[b] < 0 && std::abs(z[idx[a]] - z[idx[b]]) <= radius) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<std::vector<std::size_t>> groups(next);
  for (std::size_t i = 0; i < idx.size(); ++i) groups[label[i]].push_back(idx[i]);
  return groups;
}

struct Cluster {
  Complex mean;
  int multiplicity;
  std::vector<int> blocks;
  bool certified;
};

// Coarse-to-fine: a group is accepted once the nullity sequence at its mean
// accounts for exactly its size; otherwise it is split at the next radius.
inline void resolve_clusters(const CMatrix& M, const std::vector<Complex>& z,
                             const std::vector<std::size_t>& idx, std::size_t level,
                             const std::vector<double>& radii, std::vector<Cluster>& out) {
  for (const auto& g : link_groups(z, idx, radii[level])) {
    Complex mu(0.0, 0.0);
    for (auto i : g) mu += z[i];
    mu /= static_cast<double>(g.size());
    const int m = static_cast<int>(g.size());
    const auto nul = nullity_sequence(M, mu, m);
    if (consistent_nullities(nul, m)) {
      out.push_back({mu, m, blocks_from_nullities(nul), true});
    } else if (level + 1 < radii.size()) {
      resolve_clusters(M, z, g, level + 1, radii, out);
    } else {
      for (auto i : g) out.push_back({z[i], 1, {1}, false});
    }
  }
}

inline JordanReport jordan_general(const CMatrix& M, double tol) {
  const auto z = eigenvalues(M);
  const double norm = std::max(M.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::vector<double> radii;
  for (double r = 1e-1; r >= tol * 0.99; r *= 0.1) radii.push_back(r * norm);
  if (radii.empty()) radii.push_back(tol * norm);
  std::vector<std::size_t> idx(z.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Cluster> clusters;
  resolve_clusters(M, z, idx, 0, radii, clusters);
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.mean.real() != b.mean.real() ? a.mean.real() < b.mean.real()
                                          : a.mean.imag() < b.mean.imag();
  });
  JordanReport r;
  r.tolerance = tol;
  r.coalescence_gap = min_pairwise_distance(z);
  for (const auto& c : clusters) {
    r.eigenvalues.push_back(c.mean);
    r.multiplicities.push_back(c.multiplicity);
    r.block_sizes.push_back(c.blocks);
    r.certified = r.certified && c.certified;
    for (int b : c.blocks) r.defective = r.defective || b >= 2;
  }
  return r;
}

}  // namespace detail

// Jordan structure of a square matrix. 2x2 real input uses the discriminant
// test (default tol 1e-12); larger input clusters eigenvalues and reads block
// sizes off the rank sequence of (M - mu I)^k (default tol 1e-7).
inline JordanReport jordan_structure(const Matrix& M, std::optional<double> tol = std::nullopt) {
  require_square(M, "matrix");
  if (M.rows() == 2) return detail::jordan_2x2(M, tol.value_or(1e-12));
  return detail::jordan_general(M.cast<Complex>(), tol.value_or(1e-7));
}

inline JordanReport jordan_structure(const CMatrix& M, std::optional<double> tol = std::nullopt) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  return detail::jordan_general(M, tol.value_or(1e-7));
}

struct AdditiveSpectrum {
  std::vector<Complex> base_eigenvalues;
  int max_total_degree = 0;
  std::vector<std::pair<std::vector<int>, Complex>> values;

  std::vector<Complex> eigenvalue_list() const {
    std::vector<Complex> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.second);
    return out;
  }
};

namespace detail {

// All multi-indices of length k with total exactly `degree`, lexicographically
// descending in the first slot.
inline void multi_indices(int k, int degree, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    cur.push_back(degree);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = degree; a >= 0; --a) {
    cur.push_back(a);
    multi_indices(k, degree - a, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline AdditiveSpectrum additive_spectrum(const std::vector<Complex>& eigs, int max_degree) {
  if (max_degree < 0) throw Error(ErrorKind::InvalidParameter, "max_degree must be >= 0");
  AdditiveSpectrum out;
  out.base_eigenvalues = eigs;
  out.max_total_degree = max_degree;
  const int k = static_cast<int>(eigs.size());
  if (k == 0) {
    out.values.push_back({{}, Complex(0.0, 0.0)});
    return out;
  }
  for (int deg = 0; deg <= max_degree; ++deg) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    detail::multi_indices(k, deg, cur, idx);
    for (auto& n : idx) {
      Complex v(0.0, 0.0);
      for (int j = 0; j < k; ++j) v += static_cast<double>(n[j]) * eigs[j];
      out.values.push_back({std::move(n), v});
    }
  }
  return out;
}

// (A^T xi) . grad on the basis xi1^(l-j) xi2^j, j = 0..l.
inline Matrix drift_restriction_matrix(const Matrix& A, int degree) {
  if (A.rows() != 2 || A.cols() != 2)
    throw Error(ErrorKind::InvalidDimension, "drift restriction is defined for 2x2 drifts");
  if (degree < 0) throw Error(ErrorKind::InvalidParameter, "degree must be >= 0");
  const int l = degree;
  Matrix M = Matrix::Zero(l + 1, l + 1);
  for (int j = 0; j <= l; ++j) {
    M(j, j) = (l - j) * A(0, 0) + j * A(1, 1);
    if (j + 1 <= l) M(j + 1, j) = (l - j) * A(1, 0);
    if (j >= 1) M(j - 1, j) = j * A(0, 1);
  }
  return M;
}

constexpr int kMaxOuDegree = 12;

// Index of xi1^a xi2^b (a + b = k) in the graded basis, lowest degree first.
inline Eigen::Index ou_basis_index(int a, int b) {
  const int k = a + b;
  return static_cast<Eigen::Index>(k) * (k + 1) / 2 + b;
}

inline Eigen::Index ou_basis_size(int max_degree) {
  return static_cast<Eigen::Index>(max_degree + 1) * (max_degree + 2) / 2;
}

// Matrix of -1/2 xi^T D xi + (A^T xi).grad + i u^T xi on monomials of degree
// <= max_degree, modulo higher degrees. Column c holds the image of basis c.
inline CMatrix truncated_ou_matrix(const GaussianGenerator& g, int max_degree) {
  g.validate();
  if (g.modes() != 1) throw Error(ErrorKind::InvalidDimension, "OU truncation is one-mode only");
  if (max_degree < 0) throw Error(ErrorKind::InvalidParameter, "max_degree must be >= 0");
  if (max_degree > kMaxOuDegree)
    throw Error(ErrorKind::DegreeTooLarge, "max_degree is capped at 12");
  const Eigen::Index dim = ou_basis_size(max_degree);
  CMatrix L = CMatrix::Zero(dim, dim);
  const Matrix& A = g.A;
  const double d11 = g.D(0, 0), d12 = 0.5 * (g.D(0, 1) + g.D(1, 0)), d22 = g.D(1, 1);
  auto add = [&](int a, int b, Eigen::Index col, Complex v) {
    if (a < 0 || b < 0 || a + b > max_degree || v == Complex(0.0, 0.0)) return;
    L(ou_basis_index(a, b), col) += v;
  };
  for (int k = 0; k <= max_degree; ++k) {
    for (int b = 0; b <= k; ++b) {
      const int a = k - b;
      const Eigen::Index c = ou_basis_index(a, b);
      // drift: a (A11 xi1 + A21 xi2) xi1^(a-1) xi2^b + b (A12 xi1 + A22 xi2) xi1^a xi2^(b-1)
      add(a, b, c, a * A(0, 0) + b * A(1, 1));
      if (a >= 1) add(a - 1, b + 1, c, a * A(1, 0));
      if (b >= 1) add(a + 1, b - 1, c, b * A(0, 1));
      // diffusion: -1/2 (d11 xi1^2 + 2 d12 xi1 xi2 + d22 xi2^2)
      add(a + 2, b, c, -0.5 * d11);
      add(a + 1, b + 1, c, -d12);
      add(a, b + 2, c, -0.5 * d22);
      // drive: i (u1 xi1 + u2 xi2)
      add(a + 1, b, c, Complex(0.0, g.u(0)));
      add(a, b + 1, c, Complex(0.0, g.u(1)));
    }
  }
  return L;
}

// Eigenvalues of truncated_ou_matrix. The degree-l drift block has eigenvalue
// condition growing like cond(V)^l, so the dense solve runs in long double.
inline std::vector<Complex> ou_spectrum(const GaussianGenerator& g, int max_degree) {
  using LC = std::complex<long double>;
  using LMatrix = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
  const LMatrix L = truncated_ou_matrix(g, max_degree).cast<LC>();
  Eigen::ComplexEigenSolver<LMatrix> es(L, false);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(L.rows()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const LC z = es.eigenvalues()(i);
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

}  // namespace gaussep
