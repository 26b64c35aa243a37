#pragma once

// Reduced models for weakly attached probes.
//
// Probes resonant with one collective ring mode only see that mode to first
// order in epsilon. Every matrix here is written in the frame rotating at the
// resonant frequency and is defined up to an additive multiple of identity.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qdatabus/errors.hpp"

namespace qdatabus {

// First-order value of the collective-mode energy shift, n*eps/(2M) for n
// probes, or the printed value n*eps/M kept for reference.
enum class CollectiveShift { first_order, as_printed };

enum class Regime { center_of_mass, quarter_mode };

// H = 1/2 (X^T V X + P^T V P) over (c, a, b, target). V doubles as the
// hopping matrix of the mode amplitudes A = (X + iP)/sqrt(2).
struct EffectiveQuadraticModel {
  std::array<std::string, 4> labels{"c", "a", "b", "target"};
  Eigen::Matrix4d v_eff = Eigen::Matrix4d::Zero();
  int target_mode = 0;  // ring mode index k in 1..M
  double epsilon = 0.0;
  int ring_size = 0;
  double frame_frequency = 1.0;
};

struct ScalingEstimate {
  Regime regime = Regime::center_of_mass;
  double gap = 0.0;          // frequency separation to the nearest other ring mode
  double loss = 0.0;         // population leaked off resonance
  double time = 0.0;         // 2M / eps
  double loss_bound = 0.0;   // right-hand side of eps/c << bound
  double law_time = 0.0;     // M^{5/2}/(2 pi^2 c) or M^{3/2}/(2 pi c)
};

struct ThreeProbeCoefficients {
  std::complex<double> a, b, c, d;  // bus, probe a, probe b, probe c
  double tau = 0.0;
  double alpha = 0.0;
  double phase = 0.0;  // argument of cos/sin
  double cos_term = 0.0;
  double sin_term = 0.0;

  [[nodiscard]] double norm_squared() const {
    return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  }
};

namespace detail {

inline double collective_shift_factor(CollectiveShift shift) {
  return shift == CollectiveShift::first_order ? 0.5 : 1.0;
}

// weights[i]: amplitude of the target mode at probe i's attachment site.
inline EffectiveQuadraticModel single_mode_model(int ring_size, double epsilon,
                                                 const std::array<double, 2>& weights,
                                                 double omega, double shift_factor) {
  EffectiveQuadraticModel model;
  model.epsilon = epsilon;
  model.ring_size = ring_size;
  model.frame_frequency = omega;
  auto& v = model.v_eff;
  const double scale = epsilon / (2.0 * omega);
  v(1, 1) = v(2, 2) = scale;
  v(3, 3) = 2.0 * shift_factor * scale * (weights[0] * weights[0] + weights[1] * weights[1]);
  v(1, 3) = v(3, 1) = -scale * weights[0];
  v(2, 3) = v(3, 2) = -scale * weights[1];
  return model;
}

}  // namespace detail

// Two probes coupled to the centre-of-mass mode: probe diagonals eps/2,
// target eps/M (first order) or 2eps/M (printed), couplings -eps/(2 sqrt M).
inline EffectiveQuadraticModel approx_hamiltonian(int ring_size, double epsilon,
                                                  CollectiveShift shift = CollectiveShift::first_order) {
  detail::require(ring_size >= 3, "ring size must be at least 3");
  detail::require(epsilon >= 0.0 && std::isfinite(epsilon), "epsilon must be non-negative");
  const double w = 1.0 / std::sqrt(static_cast<double>(ring_size));
  auto model = detail::single_mode_model(ring_size, epsilon, {w, w}, 1.0,
                                         detail::collective_shift_factor(shift));
  model.target_mode = ring_size;
  return model;
}

// Probes detuned onto mode M/4 at separation d. The target is the standing
// wave of the degenerate M/4 pair with an antinode at probe a; its amplitude
// at b is sqrt(2/M) cos(pi d / 2), so odd separations decouple b.
inline EffectiveQuadraticModel quarter_mode_hamiltonian(int ring_size, double coupling,
                                                        double epsilon, int separation) {
  detail::require(ring_size >= 4 && ring_size % 4 == 0,
                  "quarter-mode model needs a ring size divisible by 4");
  detail::require(coupling > 0.0, "ring coupling must be positive");
  detail::require(epsilon >= 0.0, "epsilon must be non-negative");
  const double amp = std::sqrt(2.0 / ring_size);
  const double wb = amp * std::cos(std::numbers::pi * separation / 2.0);
  auto model = detail::single_mode_model(ring_size, epsilon,
                                         {amp, std::abs(wb) < 1e-15 ? 0.0 : wb},
                                         std::sqrt(1.0 + 2.0 * coupling), 0.5);
  model.target_mode = ring_size / 4;
  return model;
}

inline ScalingEstimate scaling_estimate(int ring_size, double coupling, double epsilon,
                                        Regime regime) {
  detail::require(ring_size >= 3, "ring size must be at least 3");
  detail::require(coupling > 0.0 && epsilon > 0.0, "couplings must be positive");
  const double m = ring_size;
  const double pi = std::numbers::pi;
  ScalingEstimate est;
  est.regime = regime;
  est.time = 2.0 * m / epsilon;
  if (regime == Regime::center_of_mass) {
    est.gap = 2.0 * pi * pi * coupling / (m * m);
    const double coupling_term = epsilon * std::sqrt(m) / 2.0;
    const double gap_term = 4.0 * pi * pi * coupling / (m * m);
    est.loss = coupling_term * coupling_term / (gap_term * gap_term);
    est.loss_bound = 4.0 * pi * pi / std::pow(m, 1.5);
    est.law_time = std::pow(m, 2.5) / (2.0 * pi * pi * coupling);
  } else {
    detail::require(ring_size % 4 == 0, "quarter-mode regime needs a ring size divisible by 4");
    est.gap = 2.0 * coupling * pi / m;
    const double x = epsilon * std::sqrt(m) / (4.0 * pi * coupling);
    est.loss = x * x;
    est.loss_bound = 4.0 * pi / std::sqrt(m);
    est.law_time = std::pow(m, 1.5) / (2.0 * pi * coupling);
  }
  return est;
}

// Single-excitation matrix over (probe_1..probe_n, collective) with probes at
// zero energy and the collective excitation at n*eps/(2M) - eps/2.
inline Eigen::MatrixXd effective_single_excitation_hamiltonian(
    int ring_size, double epsilon, int probes,
    CollectiveShift shift = CollectiveShift::first_order) {
  detail::require(probes == 2 || probes == 3, "effective model supports 2 or 3 probes");
  detail::require(ring_size >= 3, "ring size must be at least 3");
  const double m = ring_size;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(probes + 1, probes + 1);
  const double hop = -epsilon / (2.0 * std::sqrt(m));
  for (int i = 0; i < probes; ++i) h(i, probes) = h(probes, i) = hop;
  h(probes, probes) =
      2.0 * detail::collective_shift_factor(shift) * probes * epsilon / (2.0 * m) - epsilon / 2.0;
  return h;
}

// Independent couplings eps_a, eps_b, eps_c over (a, b, c, collective).
inline Eigen::Matrix4d generalized_probe_hamiltonian(
    double eps_a, double eps_b, double eps_c, int ring_size,
    CollectiveShift shift = CollectiveShift::first_order) {
  detail::require(eps_a >= 0.0 && eps_b >= 0.0 && eps_c >= 0.0, "couplings must be non-negative");
  detail::require(eps_a + eps_b + eps_c > 0.0, "at least one coupling must be nonzero");
  detail::require(ring_size >= 3, "ring size must be at least 3");
  const double m = ring_size;
  const std::array<double, 3> eps{eps_a, eps_b, eps_c};
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 3; ++i) {
    h(i, i) = eps[i] / 2.0;
    h(i, 3) = h(3, i) = -eps[i] / (2.0 * std::sqrt(m));
  }
  h(3, 3) = 2.0 * detail::collective_shift_factor(shift) * (eps_a + eps_b + eps_c) / (2.0 * m);
  return h;
}

// Closed-form amplitudes for three probes, excitation starting on probe a,
// as functions of the scaled time tau = eps t / 2:
//   alpha = (3-M)/M, kappa = sqrt(12 + M alpha^2), phi = kappa tau / (2 sqrt M)
//   s     = e^{-i alpha tau/2} [cos phi + i alpha sqrt(M)/kappa sin phi]
//   a     = 2i e^{-i alpha tau/2} sin(phi) / kappa
//   b     = 2/3 + s/3,   c = d = -1/3 + s/3
inline ThreeProbeCoefficients three_probe_coefficients(int ring_size, double tau) {
  detail::require(ring_size >= 4, "three-probe coefficients need M >= 4");
  using namespace std::complex_literals;
  const double m = ring_size;
  ThreeProbeCoefficients out;
  out.tau = tau;
  out.alpha = (3.0 - m) / m;
  const double kappa = std::sqrt(12.0 + m * out.alpha * out.alpha);
  out.phase = kappa * tau / (2.0 * std::sqrt(m));
  out.cos_term = std::cos(out.phase);
  out.sin_term = std::sin(out.phase);
  const std::complex<double> rotation = std::polar(1.0, -out.alpha * tau / 2.0);
  const std::complex<double> s =
      rotation * (out.cos_term + 1i * (out.alpha * std::sqrt(m) / kappa) * out.sin_term);
  out.a = 2.0i * rotation * out.sin_term / kappa;
  out.b = 2.0 / 3.0 + s / 3.0;
  out.c = -1.0 / 3.0 + s / 3.0;
  out.d = out.c;
  return out;
}

// The coefficients exactly as printed; a(0) != 0 and the norm is not conserved.
inline ThreeProbeCoefficients three_probe_coefficients_as_printed(int ring_size, double tau) {
  detail::require(ring_size >= 4, "three-probe coefficients need M >= 4");
  using namespace std::complex_literals;
  const double m = ring_size;
  ThreeProbeCoefficients out;
  out.tau = tau;
  out.alpha = (3.0 - m) / m;
  const double kappa = std::sqrt(12.0 + m * out.alpha * out.alpha);
  out.phase = std::sqrt((12.0 + out.alpha * out.alpha) / m) * tau / 2.0;
  out.cos_term = std::cos(out.phase);
  out.sin_term = std::sin(out.phase);
  const std::complex<double> rotation = std::polar(1.0, -out.alpha * tau / 2.0);
  out.a = 1i * rotation * out.cos_term / kappa;
  const std::complex<double> bracket = out.cos_term + 1i * out.sin_term / kappa;
  out.b = 2.0 / 3.0 + rotation * bracket / 3.0;
  out.c = -1.0 / 3.0 + rotation * bracket / 3.0;
  out.d = out.c;
  return out;
}

// Brute-force evolution of the effective single-excitation matrix from a unit
// excitation on probe a. Returned in the order (collective, a, b[, c]).
inline Eigen::VectorXcd four_level_oracle(int ring_size, double epsilon, double t, int probes,
                                          CollectiveShift shift = CollectiveShift::first_order) {
  const Eigen::MatrixXd h = effective_single_excitation_hamiltonian(ring_size, epsilon, probes, shift);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::MatrixXd& q = solver.eigenvectors();
  Eigen::VectorXcd phases(probes + 1);
  for (int k = 0; k <= probes; ++k) phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
  const Eigen::VectorXcd psi =
      q.cast<std::complex<double>>() * phases.asDiagonal() * q.row(0).transpose().cast<std::complex<double>>();
  Eigen::VectorXcd out(probes + 1);
  out(0) = psi(probes);
  for (int i = 0; i < probes; ++i) out(i + 1) = psi(i);
  return out;
}

}  // namespace qdatabus
