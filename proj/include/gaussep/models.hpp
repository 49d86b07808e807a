#pragma once

// Concrete families: the squeezed-reservoir mode with its branch closed forms,
// the memory-modulated channel family kappa(t) e^{tB} with three diffusion
// models, and a small catalog of EP-free channels.

#include "gaussep/gauging.hpp"

#include <variant>

namespace gaussep {

inline constexpr double kPi = 3.14159265358979323846;

struct SqueezedReservoirParams {
  double kappa = 2.0;
  double delta = 1.0;  // detuning
  double epsilon = 1.0;  // parametric drive
  double r = 0.0;
  double phi = 0.0;

  void validate() const {
    if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidParameter, "kappa must be positive");
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidParameter, "squeezing r must be >= 0");
    if (!std::isfinite(delta) || !std::isfinite(epsilon) || !std::isfinite(phi))
      throw Error(ErrorKind::InvalidParameter, "non-finite squeezed-reservoir parameter");
  }
};

enum class Branch { Plus, Minus };

inline const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

inline Matrix squeezed_drift(double kappa, double delta, double epsilon) {
  Matrix A(2, 2);
  A << -0.5 * kappa, delta - epsilon, -(delta + epsilon), -0.5 * kappa;
  return A;
}

inline Matrix squeezed_diffusion(double kappa, double r, double phi) {
  const double ch = std::cosh(2.0 * r), sh = std::sinh(2.0 * r);
  Matrix D(2, 2);
  D << ch - sh * std::cos(phi), -sh * std::sin(phi), -sh * std::sin(phi), ch + sh * std::cos(phi);
  return 0.5 * kappa * D;
}

inline GaussianGenerator squeezed_generator(const SqueezedReservoirParams& p) {
  p.validate();
  GaussianGenerator g;
  g.A = squeezed_drift(p.kappa, p.delta, p.epsilon);
  g.D = squeezed_diffusion(p.kappa, p.r, p.phi);
  g.u = Vector::Zero(2);
  return g;
}

// Hamiltonian diag(delta + eps, delta - eps) and a single Bogoliubov jump at rate kappa.
inline LindbladData squeezed_lindblad_data(const SqueezedReservoirParams& p) {
  p.validate();
  LindbladData data;
  data.H = Matrix::Zero(2, 2);
  data.H(0, 0) = p.delta + p.epsilon;
  data.H(1, 1) = p.delta - p.epsilon;
  data.f = Vector::Zero(2);
  const Complex e = std::polar(1.0, p.phi);
  const double c = std::cosh(p.r), s = std::sinh(p.r);
  CVector row(2);
  row(0) = (c + e * s) / std::sqrt(2.0);
  row(1) = Complex(0.0, 1.0) * (c - e * s) / std::sqrt(2.0);
  data.jump_rows = {row};
  data.rate = p.kappa;
  return data;
}

// Lyapunov solution on the branch delta = +eps (Plus). Minus is the same
// formula under eps -> -eps, i.e. the drift of (delta, eps) = (-eps, -eps).
inline GaugeCovariance squeezed_ep_gauge(const SqueezedReservoirParams& p, Branch branch) {
  p.validate();
  const double k = p.kappa;
  const double e = branch == Branch::Plus ? p.epsilon : -p.epsilon;
  const double ch = std::cosh(2.0 * p.r), sh = std::sinh(2.0 * p.r);
  const double cphi = std::cos(p.phi), sphi = std::sin(p.phi);
  const double m = ch - sh * cphi;
  Matrix S(2, 2);
  S(0, 0) = 0.5 * m;
  S(0, 1) = S(1, 0) = -0.5 * sh * sphi - (e / k) * m;
  S(1, 1) = 0.5 * (ch + sh * cphi) + (2.0 * e / k) * sh * sphi + (4.0 * e * e / (k * k)) * m;
  GaugeCovariance out;
  out.S = S;
  out.source = CovarianceSource::EpBranchFormula;
  const Matrix A = squeezed_drift(k, e, e);
  const Matrix D = squeezed_diffusion(k, p.r, p.phi);
  out.residual = lyapunov_residual(A, S, D);
  out.tolerance = equation_tolerance(D) * std::max(1.0, max_abs(S));
  return out;
}

inline std::pair<Complex, Complex> squeezed_drift_eigenvalues(double kappa, double delta,
                                                              double epsilon) {
  const Complex root = std::sqrt(Complex(epsilon * epsilon - delta * delta, 0.0));
  return {-0.5 * kappa + root, -0.5 * kappa - root};
}

// Off-branch closed form, denominator kappa^2 + 4 (delta^2 - eps^2).
inline GaugeCovariance squeezed_general_gauge(const SqueezedReservoirParams& p) {
  p.validate();
  const auto [lp, lm] = squeezed_drift_eigenvalues(p.kappa, p.delta, p.epsilon);
  if (!(std::max(lp.real(), lm.real()) < 0.0))
    throw Error(ErrorKind::NonHurwitz, "squeezed-reservoir drift is not Hurwitz");
  const double k = p.kappa, dl = p.delta, e = p.epsilon;
  const Matrix D = squeezed_diffusion(k, p.r, p.phi);
  const double denom = k * k + 4.0 * (dl * dl - e * e);
  const double sqp = (k * D(0, 1) + (dl - e) * D(1, 1) - (dl + e) * D(0, 0)) / denom;
  Matrix S(2, 2);
  S(0, 1) = S(1, 0) = sqp;
  S(0, 0) = D(0, 0) / k + 2.0 * (dl - e) * sqp / k;
  S(1, 1) = D(1, 1) / k - 2.0 * (dl + e) * sqp / k;
  GaugeCovariance out;
  out.S = S;
  out.source = CovarianceSource::Lyapunov;
  out.residual = lyapunov_residual(squeezed_drift(k, dl, e), S, D);
  out.tolerance = equation_tolerance(D) * std::max(1.0, max_abs(S));
  return out;
}

enum class DiffusionKind { Isotropic, Anisotropic, DriftAligned };

inline const char* to_string(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::Isotropic: return "iso";
    case DiffusionKind::Anisotropic: return "aniso";
    case DiffusionKind::DriftAligned: return "drift-aligned";
  }
  return "unknown";
}

struct DiffusionModel {
  DiffusionKind kind = DiffusionKind::Isotropic;
  double s = 0.5;      // anisotropy, Anisotropic only
  double alpha = 1.0;  // drift-tensor weight, DriftAligned only

  static DiffusionModel isotropic() { return {DiffusionKind::Isotropic, 0.0, 0.0}; }
  static DiffusionModel anisotropic(double s) { return {DiffusionKind::Anisotropic, s, 0.0}; }
  static DiffusionModel drift_aligned(double alpha) {
    return {DiffusionKind::DriftAligned, 0.0, alpha};
  }
};

struct NmFamilyParams {
  double lambda = 0.0;
  double omega = 0.0;
  double gamma = 1.0;
  double r_mem = 0.3;
  double nu = 1.0;
  DiffusionModel diffusion;
  double eps_buf = 1e-3;

  void validate() const {
    if (!(gamma > 0.0) || !(nu > 0.0))
      throw Error(ErrorKind::InvalidParameter, "gamma and nu must be positive");
    if (!(r_mem > 0.0) || !(r_mem < gamma / nu))
      throw Error(ErrorKind::InvalidParameter, "memory amplitude must satisfy 0 < r_mem < gamma/nu");
    if (!(eps_buf > 0.0)) throw Error(ErrorKind::InvalidParameter, "CP buffer must be positive");
    if (diffusion.kind == DiffusionKind::DriftAligned && !(diffusion.alpha > 0.0))
      throw Error(ErrorKind::InvalidParameter, "drift-aligned weight must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(omega) || !std::isfinite(diffusion.s))
      throw Error(ErrorKind::InvalidParameter, "non-finite drift parameter");
  }
};

inline double kappa_t(const NmFamilyParams& p, double t) {
  return std::exp(-p.gamma * t + p.r_mem * std::sin(p.nu * t));
}

inline Matrix drift_B(double lambda, double omega) {
  Matrix B(2, 2);
  B << lambda, omega, -omega, -lambda;
  return B;
}

// Diffusion at time t with det Y = g^2, g = |1 - kappa^2|/2 + eps_buf.
inline Matrix nm_diffusion(const NmFamilyParams& p, double kappa, const Matrix& B) {
  const double g = 0.5 * std::abs(1.0 - kappa * kappa) + p.eps_buf;
  switch (p.diffusion.kind) {
    case DiffusionKind::Isotropic:
      return g * Matrix::Identity(2, 2);
    case DiffusionKind::Anisotropic: {
      Matrix Y = Matrix::Zero(2, 2);
      Y(0, 0) = g * std::exp(p.diffusion.s);
      Y(1, 1) = g * std::exp(-p.diffusion.s);
      return Y;
    }
    case DiffusionKind::DriftAligned: {
      const Matrix BBt = B * B.transpose();
      const double tr = BBt.trace();
      if (!(tr > 0.0))
        throw Error(ErrorKind::DegenerateModel, "drift-aligned diffusion needs B != 0");
      const Matrix shape = Matrix::Identity(2, 2) + p.diffusion.alpha * BBt / tr;
      return (g / std::sqrt(shape.determinant())) * shape;
    }
  }
  return Matrix::Zero(2, 2);
}

inline GaussianChannel nm_channel(const NmFamilyParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "time must be positive");
  const Matrix B = drift_B(p.lambda, p.omega);
  const double k = kappa_t(p, t);
  GaussianChannel ch;
  ch.X = k * expm2(B, t);
  ch.Y = nm_diffusion(p, k, B);
  ch.delta = Vector::Zero(2);
  ch.physical = true;
  if (!cp_check(ch, CpMethod::DetCondition).passes)
    throw Error(ErrorKind::Unphysical, "memory-family channel failed its CP check");
  return ch;
}

// Branch Plus is lambda = +omega, Minus is lambda = -omega; p.omega is used.
inline NmFamilyParams on_ep_line(NmFamilyParams p, Branch branch) {
  p.lambda = branch == Branch::Plus ? p.omega : -p.omega;
  return p;
}

// Jordan closed form on an EP line, where B^2 = 0 and X_t = kappa(t)(I + tB).
inline GaugeCovariance nm_ep_gauge(const NmFamilyParams& params, double t, Branch branch) {
  const NmFamilyParams p = on_ep_line(params, branch);
  p.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "time must be positive");
  const double k = kappa_t(p, t);
  if (!(k < 1.0)) throw Error(ErrorKind::Unstable, "kappa(t) >= 1, Stein gauge undefined");
  const Matrix B = drift_B(p.lambda, p.omega);
  // B = 0 (omega = 0) is the scalar limit; the closed form still holds.
  JordanDrift2x2 j{k, B, t};
  return stein_jordan_closed_form(j, nm_diffusion(p, k, B));
}

struct ThermalLoss {
  double eta = 1.0;
  double nbar = 0.0;
};
struct QuadratureDiffusion {
  double sigma2 = 0.0;
};
struct CriticalOscillator {
  double omega0 = 1.0;
};

using EpFreeEntry = std::variant<ThermalLoss, QuadratureDiffusion, CriticalOscillator>;
using ChannelOrGenerator = std::variant<GaussianChannel, GaussianGenerator>;

// Critically damped drift -omega0 I + N with diffusion omega0 I, which
// saturates the generator CP bound.
inline GaussianGenerator critical_oscillator_generator(double omega0) {
  if (!(omega0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "omega0 must be positive");
  GaussianGenerator g;
  g.A = Matrix(2, 2);
  g.A << 0.0, 1.0, -omega0 * omega0, -2.0 * omega0;
  g.D = omega0 * Matrix::Identity(2, 2);
  g.u = Vector::Zero(2);
  return g;
}

// CriticalOscillator returns the generator when no time is given.
inline ChannelOrGenerator ep_free_catalog(const EpFreeEntry& entry,
                                          std::optional<double> t = std::nullopt) {
  const Matrix I = Matrix::Identity(2, 2);
  if (const auto* e = std::get_if<ThermalLoss>(&entry)) {
    if (!(e->eta >= 0.0 && e->eta <= 1.0) || !(e->nbar >= 0.0))
      throw Error(ErrorKind::InvalidParameter, "thermal loss needs eta in [0,1], nbar >= 0");
    return GaussianChannel{std::sqrt(e->eta) * I, 0.5 * (1.0 - e->eta) * (2.0 * e->nbar + 1.0) * I,
                           Vector::Zero(2), Ordering::Grouped, true};
  }
  if (const auto* e = std::get_if<QuadratureDiffusion>(&entry)) {
    if (!(e->sigma2 >= 0.0))
      throw Error(ErrorKind::InvalidParameter, "diffusion strength must be >= 0");
    Matrix Y = Matrix::Zero(2, 2);
    Y(1, 1) = e->sigma2;
    return GaussianChannel{I, Y, Vector::Zero(2), Ordering::Grouped, true};
  }
  const auto& c = std::get<CriticalOscillator>(entry);
  GaussianGenerator g = critical_oscillator_generator(c.omega0);
  if (!t) return g;
  if (!(*t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "time must be nonnegative");
  return semigroup_channel(g, *t);
}

}  // namespace gaussep
