#pragma once

// Seeded random instances for property checks: matrices, PSD diffusions,
// Hurwitz and Schur-stable drifts, physical generators and channels.

#include "gaussep/generators.hpp"

#include <random>

namespace gaussep {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Vector vector(Eigen::Index n) { return matrix(n, 1).col(0); }

  Matrix symmetric(Eigen::Index n) { return symmetrized(matrix(n, n)); }

  // G G^T / n; rank-deficient with probability 1/4.
  Matrix psd(Eigen::Index n) {
    const Eigen::Index k = integer(0, 3) == 0 ? std::max<Eigen::Index>(1, n - 1) : n;
    const Matrix G = matrix(n, k);
    return symmetrized(G * G.transpose() / static_cast<double>(n));
  }

  // Random matrix shifted so its spectral abscissa lies in [-1, -0.1].
  Matrix hurwitz(Eigen::Index n) {
    Matrix M = matrix(n, n);
    const double shift = spectral_abscissa(M) + uniform(0.1, 1.0);
    return M - shift * Matrix::Identity(n, n);
  }

  // Random matrix rescaled to spectral radius in [0.05, 0.95].
  Matrix schur_stable(Eigen::Index n) {
    Matrix M = matrix(n, n);
    const double rho = spectral_radius(M);
    return M * (uniform(0.05, 0.95) / std::max(rho, 1e-12));
  }

  // Lindblad generator with a Hurwitz drift (rejection sampled).
  GaussianGenerator hurwitz_generator(int modes) {
    const Eigen::Index dim = 2 * modes;
    for (;;) {
      LindbladData data;
      data.H = 0.5 * symmetric(dim);
      data.f = vector(dim);
      const int jumps = integer(1, dim);
      for (int j = 0; j < jumps; ++j) {
        CVector l(dim);
        for (Eigen::Index i = 0; i < dim; ++i) l(i) = Complex(normal(), normal()) / std::sqrt(2.0);
        data.jump_rows.push_back(l);
      }
      data.rate = uniform(0.2, 2.0);
      GaussianGenerator g = from_lindblad(data);
      if (spectral_abscissa(g.A) < -0.05) return g;
    }
  }

  // Stable channel with PSD Y and a random displacement (not necessarily CP).
  GaussianChannel stable_channel(int modes) {
    const Eigen::Index dim = 2 * modes;
    return {schur_stable(dim), psd(dim), vector(dim), Ordering::Grouped, false};
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gaussep
