#pragma once

// Zero-mean Gaussian states as covariance matrices.
//
// Ordering (x_1..x_N, p_1..p_N); the vacuum is the identity, so a state is
// physical iff gamma + iJ >= 0 with J = [[0, 1], [-1, 0]]. Entanglement uses
// natural logarithms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include "qdatabus/chain_model.hpp"
#include "qdatabus/errors.hpp"

namespace qdatabus {

struct CovarianceState {
  std::vector<std::string> labels;
  Eigen::MatrixXd gamma;

  [[nodiscard]] int modes() const { return static_cast<int>(labels.size()); }

  [[nodiscard]] int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    throw ConfigError("unknown mode label '" + label + "'");
  }
};

struct SymplecticPropagator {
  Eigen::MatrixXd matrix;
  double time = 0.0;
};

inline Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  j.topRightCorner(modes, modes).setIdentity();
  j.bottomLeftCorner(modes, modes) = -Eigen::MatrixXd::Identity(modes, modes);
  return j;
}

namespace detail {

inline std::vector<std::string> default_labels(int modes) {
  std::vector<std::string> labels;
  for (int k = 1; k <= modes; ++k) labels.push_back(std::to_string(k));
  return labels;
}

}  // namespace detail

inline CovarianceState vacuum_state(const std::vector<std::string>& labels) {
  detail::require(!labels.empty(), "vacuum state needs at least one mode");
  const int n = static_cast<int>(labels.size());
  return {labels, Eigen::MatrixXd::Identity(2 * n, 2 * n)};
}

inline CovarianceState vacuum_state(int modes) {
  detail::require(modes >= 1, "vacuum state needs at least one mode");
  return vacuum_state(detail::default_labels(modes));
}

// Two-mode squeezed vacuum on modes i, j: x-block [[ch, -sh], [-sh, ch]],
// p-block [[ch, sh], [sh, ch]]; every other mode stays in vacuum.
inline CovarianceState two_mode_squeezed(double r, int i, int j,
                                         const std::vector<std::string>& labels) {
  const int n = static_cast<int>(labels.size());
  detail::require(r >= 0.0 && std::isfinite(r), "squeezing must be non-negative");
  detail::require(i >= 0 && j >= 0 && i < n && j < n, "squeezed mode index out of range");
  detail::require(i != j, "two-mode squeezing needs distinct modes");
  CovarianceState state = vacuum_state(labels);
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  auto& g = state.gamma;
  g(i, i) = g(j, j) = ch;
  g(n + i, n + i) = g(n + j, n + j) = ch;
  g(i, j) = g(j, i) = -sh;
  g(n + i, n + j) = g(n + j, n + i) = sh;
  return state;
}

inline CovarianceState two_mode_squeezed(double r, int i, int j, int modes) {
  return two_mode_squeezed(r, i, j, detail::default_labels(modes));
}

inline CovarianceState two_mode_squeezed(double r, const std::string& first,
                                         const std::string& second,
                                         const std::vector<std::string>& labels) {
  const CovarianceState vac{labels, {}};
  return two_mode_squeezed(r, vac.index_of(first), vac.index_of(second), labels);
}

// Smallest eigenvalue of the Hermitian matrix gamma + iJ.
inline double physicality_margin(const Eigen::MatrixXd& gamma) {
  const int n = static_cast<int>(gamma.rows() / 2);
  const Eigen::MatrixXcd h =
      gamma.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline bool is_physical(const CovarianceState& state, double tolerance = 1e-9) {
  return physicality_margin(state.gamma) >= -tolerance;
}

// The N positive eigenvalues of iJ gamma, ascending. Computed from the
// Hermitian matrix gamma^{1/2} iJ gamma^{1/2}, whose spectrum is {+-nu_j}.
inline Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& gamma) {
  detail::require(gamma.rows() == gamma.cols() && gamma.rows() % 2 == 0 && gamma.rows() > 0,
                  "covariance matrix must be square with even dimension");
  const int n = static_cast<int>(gamma.rows() / 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> root_solver(0.5 * (gamma + gamma.transpose()));
  const Eigen::VectorXd values = root_solver.eigenvalues();
  if (!(values(0) > 0.0)) throw NumericalError("covariance matrix is not positive definite");
  const Eigen::MatrixXd& q = root_solver.eigenvectors();
  const Eigen::MatrixXd root = q * values.cwiseSqrt().asDiagonal() * q.transpose();

  const Eigen::MatrixXd a = root * symplectic_form(n) * root;
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& pm = solver.eigenvalues();  // ascending: -nu_max .. nu_max
  Eigen::VectorXd nu(n);
  for (int k = 0; k < n; ++k) nu(k) = 0.5 * (pm(n + k) - pm(n - 1 - k));
  return nu;
}

// Purity tr(rho^2) = 1 / prod(nu_j) = 1 / sqrt(det gamma).
inline double purity(const Eigen::MatrixXd& gamma) {
  Eigen::LLT<Eigen::MatrixXd> llt(gamma);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance matrix is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return std::exp(-0.5 * log_det);
}

namespace detail {

inline void check_time(double t) {
  require(std::isfinite(t), "evolution time must be finite");
}

}  // namespace detail

// Exact solution of x' = p, p' = -V x through the eigendecomposition of V.
// Reuse one instance to evaluate many times.
class ChainPropagator {
 public:
  explicit ChainPropagator(const Eigen::MatrixXd& potential) {
    const auto solver = detail::checked_eigensolver(potential);
    if (solver.eigenvalues()(0) <= 0.0)
      throw NumericalError("potential is not positive definite");
    vectors_ = solver.eigenvectors();
    frequencies_ = solver.eigenvalues().cwiseSqrt();
  }

  explicit ChainPropagator(const QuadraticHamiltonian& h) : ChainPropagator(h.potential) {}

  [[nodiscard]] int modes() const { return static_cast<int>(frequencies_.size()); }

  [[nodiscard]] SymplecticPropagator at(double t) const {
    std::vector<int> all(static_cast<std::size_t>(modes()));
    for (int i = 0; i < modes(); ++i) all[i] = i;
    return {rows(t, all), t};
  }

  // Rows of S(t) belonging to the x and p coordinates of the listed modes,
  // ordered (x_kept..., p_kept...).
  [[nodiscard]] Eigen::MatrixXd rows(double t, const std::vector<int>& kept) const {
    detail::check_time(t);
    const int n = modes();
    const int k = static_cast<int>(kept.size());
    const Eigen::ArrayXd phase = frequencies_.array() * t;
    const Eigen::ArrayXd cos_t = phase.cos();
    const Eigen::ArrayXd sin_t = phase.sin();

    Eigen::MatrixXd u(k, n);
    for (int i = 0; i < k; ++i) u.row(i) = vectors_.row(kept[i]);

    Eigen::MatrixXd s(2 * k, 2 * n);
    const Eigen::MatrixXd ut = vectors_.transpose();
    s.topLeftCorner(k, n) = (u * cos_t.matrix().asDiagonal()) * ut;
    s.topRightCorner(k, n) = (u * (sin_t / frequencies_.array()).matrix().asDiagonal()) * ut;
    s.bottomLeftCorner(k, n) = (u * (-frequencies_.array() * sin_t).matrix().asDiagonal()) * ut;
    s.bottomRightCorner(k, n) = s.topLeftCorner(k, n);
    return s;
  }

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd frequencies_;
};

// S(t) = [[cos(sqrt(V) t), V^{-1/2} sin(sqrt(V) t)], [-V^{1/2} sin(sqrt(V) t), cos(sqrt(V) t)]].
inline SymplecticPropagator propagator(const QuadraticHamiltonian& h, double t) {
  return ChainPropagator(h).at(t);
}

// Propagator of H = 1/2 (x^T K x + p^T K p) for symmetric K of any signature:
// S(t) = [[cos(Kt), sin(Kt)], [-sin(Kt), cos(Kt)]].
inline SymplecticPropagator rotating_frame_propagator(const Eigen::MatrixXd& k, double t) {
  detail::check_time(t);
  const auto solver = detail::checked_eigensolver(k);
  const Eigen::MatrixXd& q = solver.eigenvectors();
  const Eigen::ArrayXd phase = solver.eigenvalues().array() * t;
  const Eigen::MatrixXd c = q * phase.cos().matrix().asDiagonal() * q.transpose();
  const Eigen::MatrixXd s = q * phase.sin().matrix().asDiagonal() * q.transpose();
  const auto n = k.rows();
  Eigen::MatrixXd m(2 * n, 2 * n);
  m << c, s, -s, c;
  return {m, t};
}

inline CovarianceState evolve(const CovarianceState& state, const SymplecticPropagator& s) {
  detail::require(s.matrix.rows() == state.gamma.rows() && s.matrix.cols() == state.gamma.cols(),
                  "propagator and state dimensions differ");
  const Eigen::MatrixXd g = s.matrix * state.gamma * s.matrix.transpose();
  return {state.labels, 0.5 * (g + g.transpose())};
}

// Gaussian partial trace: principal submatrix on the kept x and p coordinates,
// in the order given.
inline CovarianceState reduce(const CovarianceState& state, const std::vector<std::string>& keep) {
  detail::require(!keep.empty(), "reduce needs at least one mode to keep");
  const int n = state.modes();
  std::vector<int> idx;
  std::set<std::string> seen;
  for (const auto& label : keep) {
    detail::require(seen.insert(label).second, "mode '" + label + "' listed twice");
    idx.push_back(state.index_of(label));
  }
  const int k = static_cast<int>(idx.size());
  CovarianceState out{keep, Eigen::MatrixXd(2 * k, 2 * k)};
  for (int a = 0; a < 2 * k; ++a) {
    const int ra = a < k ? idx[a] : n + idx[a - k];
    for (int b = 0; b < 2 * k; ++b) {
      const int rb = b < k ? idx[b] : n + idx[b - k];
      out.gamma(a, b) = state.gamma(ra, rb);
    }
  }
  return out;
}

// Symplectic eigenvalues this close below 1 are treated as 1.
inline constexpr double kSymplecticClip = 1.0 - 1e-12;

inline double log_negativity_from_spectrum(const Eigen::VectorXd& nu) {
  double total = 0.0;
  for (double v : nu)
    if (v < kSymplecticClip) total += -std::log(v);
  return total;
}

// Partial transpose flips the momenta of the modes in `side_b` (every mode
// not listed in side_a).
inline Eigen::MatrixXd partial_transpose(const CovarianceState& state,
                                         const std::vector<std::string>& side_a) {
  const int n = state.modes();
  std::vector<bool> in_a(static_cast<std::size_t>(n), false);
  for (const auto& label : side_a) in_a[state.index_of(label)] = true;
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(2 * n);
  for (int i = 0; i < n; ++i)
    if (!in_a[i]) sign(n + i) = -1.0;
  return sign.asDiagonal() * state.gamma * sign.asDiagonal();
}

inline double log_negativity(const CovarianceState& state, const std::vector<std::string>& side_a,
                             double physical_tolerance = 1e-9) {
  detail::require(!side_a.empty() && static_cast<int>(side_a.size()) < state.modes(),
                  "bipartition needs a nonempty proper subset of modes");
  const Eigen::VectorXd nu = symplectic_eigenvalues(state.gamma);
  if (nu(0) < 1.0 - physical_tolerance)
    throw NumericalError("unphysical covariance matrix (symplectic eigenvalue " +
                         std::to_string(nu(0)) + ")");
  return log_negativity_from_spectrum(symplectic_eigenvalues(partial_transpose(state, side_a)));
}

}  // namespace qdatabus
