#pragma once

// Ring-of-oscillators ("data bus") Hamiltonians.
//
// Units hbar = omega = m = 1. A chain is H = 1/2 (p^T p + x^T V x) over the
// mode ordering: ring sites 1..M, then the attached probes in declaration
// order, then the decoupled spectator "c" when requested.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qdatabus/errors.hpp"

namespace qdatabus {

enum class DisorderModel { bond, site };

struct Disorder {
  DisorderModel model = DisorderModel::bond;
  double spread = 0.0;  // fraction in [0, 1)
  std::uint64_t seed = 0;
};

struct Probe {
  std::string label;
  int site = 1;         // 1-based ring site
  double epsilon = 0.0;
  double detuning = 0.0;  // additive shift of the bare squared frequency
};

struct ChainSpec {
  int ring_size = 0;
  double coupling = 1.0;
  std::vector<Probe> probes;
  bool include_decoupled_c = false;
  bool allow_shared_sites = false;
  std::optional<Disorder> disorder;
};

// Squared-frequency shift that makes a probe resonant with ring mode M/4.
inline double quarter_mode_detuning(double ring_coupling) { return 2.0 * ring_coupling; }

struct QuadraticHamiltonian {
  std::vector<std::string> labels;
  Eigen::MatrixXd potential;
  int ring_size = 0;

  [[nodiscard]] int size() const { return static_cast<int>(labels.size()); }

  [[nodiscard]] int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    throw ConfigError("unknown mode label '" + label + "'");
  }
};

enum class ModeOrigin { analytic_dft, numeric };

// Rows of `transform` are mode vectors: X = T x, and V = T^dagger diag(freq^2) T.
struct ModeBasis {
  Eigen::MatrixXcd transform;
  Eigen::VectorXd frequencies_squared;
  ModeOrigin origin = ModeOrigin::numeric;
};

namespace detail {

inline double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Multiplicative noise factors 1+u, u uniform in [-spread, spread]. Bits come
// straight from mt19937_64 so the draws are identical on every platform.
inline std::vector<double> disorder_factors(int count, double spread, std::uint64_t seed) {
  std::vector<double> factors(static_cast<std::size_t>(count), 1.0);
  if (spread == 0.0) return factors;
  std::mt19937_64 engine(seed);
  for (auto& f : factors) f = 1.0 + spread * (2.0 * unit_interval(engine()) - 1.0);
  return factors;
}

inline void validate_spread(double spread) {
  require(spread >= 0.0 && spread < 1.0, "disorder spread must lie in [0, 1)");
}

// Bond k joins ring sites k and k+1 (0-based, cyclic).
inline std::vector<double> ring_bonds(int ring_size, double coupling,
                                      const std::optional<Disorder>& disorder) {
  std::vector<double> bonds(static_cast<std::size_t>(ring_size), coupling);
  if (disorder && disorder->model == DisorderModel::bond) {
    validate_spread(disorder->spread);
    const auto f = disorder_factors(ring_size, disorder->spread, disorder->seed);
    for (int k = 0; k < ring_size; ++k) bonds[k] = coupling * f[k];
  }
  return bonds;
}

inline std::vector<double> onsite_terms(int ring_size, const std::optional<Disorder>& disorder) {
  std::vector<double> onsite(static_cast<std::size_t>(ring_size), 1.0);
  if (disorder && disorder->model == DisorderModel::site) {
    validate_spread(disorder->spread);
    onsite = disorder_factors(ring_size, disorder->spread, disorder->seed);
  }
  return onsite;
}

inline Eigen::MatrixXd ring_from_bonds(const std::vector<double>& bonds,
                                       const std::vector<double>& onsite) {
  const int m = static_cast<int>(bonds.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    const int next = (k + 1) % m;
    const int prev = (k + m - 1) % m;
    v(k, k) = onsite[k] + (bonds[prev] + bonds[k]);
    v(k, next) -= bonds[k];
    v(next, k) -= bonds[k];
  }
  return v;
}

inline void validate_ring(int ring_size, double coupling) {
  require(ring_size >= 3, "ring size must be at least 3");
  require(coupling > 0.0 && std::isfinite(coupling), "ring coupling must be positive");
}

inline void validate_spec(const ChainSpec& spec) {
  validate_ring(spec.ring_size, spec.coupling);
  std::set<std::string> labels;
  std::set<int> sites;
  for (const auto& p : spec.probes) {
    require(!p.label.empty(), "probe label must be nonempty");
    require(labels.insert(p.label).second, "duplicate probe label '" + p.label + "'");
    require(p.site >= 1 && p.site <= spec.ring_size,
            "probe '" + p.label + "' attachment site out of range");
    require(p.epsilon >= 0.0 && std::isfinite(p.epsilon),
            "probe '" + p.label + "' coupling must be non-negative");
    require(p.detuning >= 0.0 && std::isfinite(p.detuning),
            "probe '" + p.label + "' detuning must be non-negative");
    require(spec.allow_shared_sites || sites.insert(p.site).second,
            "probes share ring site " + std::to_string(p.site));
  }
  if (spec.include_decoupled_c)
    require(!labels.contains("c"), "probe label 'c' clashes with the decoupled oscillator");
  if (spec.disorder) validate_spread(spec.disorder->spread);
}

}  // namespace detail

// Ring potential: diagonal 1+2c, nearest neighbours (cyclic) -c.
inline Eigen::MatrixXd build_ring_potential(int ring_size, double coupling) {
  detail::validate_ring(ring_size, coupling);
  return detail::ring_from_bonds(std::vector<double>(ring_size, coupling),
                                 std::vector<double>(ring_size, 1.0));
}

// Expands every eps/2 (x_p - x_s)^2 term into the potential matrix.
inline QuadraticHamiltonian attach_probes(const ChainSpec& spec) {
  detail::validate_spec(spec);
  const int m = spec.ring_size;
  const int n = m + static_cast<int>(spec.probes.size()) + (spec.include_decoupled_c ? 1 : 0);

  QuadraticHamiltonian h;
  h.ring_size = m;
  h.potential = Eigen::MatrixXd::Zero(n, n);
  h.potential.topLeftCorner(m, m) =
      detail::ring_from_bonds(detail::ring_bonds(m, spec.coupling, spec.disorder),
                              detail::onsite_terms(m, spec.disorder));
  for (int k = 1; k <= m; ++k) h.labels.push_back(std::to_string(k));

  int p = m;
  for (const auto& probe : spec.probes) {
    const int s = probe.site - 1;
    h.potential(p, p) = (1.0 + probe.detuning) + probe.epsilon;
    h.potential(s, s) += probe.epsilon;
    h.potential(p, s) -= probe.epsilon;
    h.potential(s, p) -= probe.epsilon;
    h.labels.push_back(probe.label);
    ++p;
  }
  if (spec.include_decoupled_c) {
    h.potential(p, p) = 1.0;
    h.labels.push_back("c");
  }
  return h;
}

// Replaces ring bonds c_k by c_k (1+u_k) and rebalances the ring diagonal so
// every ring row keeps V_kk = 1 + adjacent bonds + probe couplings.
inline Eigen::MatrixXd apply_disorder(const Eigen::MatrixXd& potential, int ring_size,
                                      double spread, std::uint64_t seed) {
  detail::validate_spread(spread);
  detail::require(ring_size >= 3 && ring_size <= potential.rows(),
                  "ring size inconsistent with potential");
  const int m = ring_size;
  const int n = static_cast<int>(potential.rows());
  const auto factors = detail::disorder_factors(m, spread, seed);

  Eigen::MatrixXd v = potential;
  std::vector<double> bonds(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) bonds[k] = -potential(k, (k + 1) % m) * factors[k];
  for (int k = 0; k < m; ++k) {
    const int next = (k + 1) % m;
    const int prev = (k + m - 1) % m;
    v(k, next) = -bonds[k];
    v(next, k) = -bonds[k];
    double diag = 1.0 + (bonds[prev] + bonds[k]);
    for (int p = m; p < n; ++p) diag += -potential(p, k);
    v(k, k) = diag;
  }
  return v;
}

inline QuadraticHamiltonian apply_disorder(QuadraticHamiltonian h, const Disorder& disorder) {
  if (disorder.model == DisorderModel::bond) {
    h.potential = apply_disorder(h.potential, h.ring_size, disorder.spread, disorder.seed);
  } else {
    detail::validate_spread(disorder.spread);
    const auto f = detail::disorder_factors(h.ring_size, disorder.spread, disorder.seed);
    for (int k = 0; k < h.ring_size; ++k) h.potential(k, k) += f[k] - 1.0;
  }
  return h;
}

// Analytic Fourier modes of the ordered ring. Row k-1 holds mode k; k = M is
// the centre-of-mass mode (X_0 == X_M).
inline ModeBasis ring_normal_modes(int ring_size, double coupling) {
  detail::validate_ring(ring_size, coupling);
  const int m = ring_size;
  const double two_pi = 2.0 * std::numbers::pi;
  ModeBasis basis;
  basis.origin = ModeOrigin::analytic_dft;
  basis.transform.resize(m, m);
  basis.frequencies_squared.resize(m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int k = 1; k <= m; ++k) {
    basis.frequencies_squared(k - 1) =
        1.0 + 2.0 * coupling - 2.0 * coupling * std::cos(two_pi * k / m);
    for (int l = 1; l <= m; ++l) {
      // k*l mod m keeps the phase argument small for large rings
      const double phase = two_pi * static_cast<double>((static_cast<long>(k) * l) % m) / m;
      basis.transform(k - 1, l - 1) = norm * std::polar(1.0, phase);
    }
  }
  return basis;
}

namespace detail {

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> checked_eigensolver(
    const Eigen::MatrixXd& v) {
  require(v.rows() == v.cols() && v.rows() > 0, "potential must be a nonempty square matrix");
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  require((v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "potential matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return solver;
}

}  // namespace detail

// Orthogonal eigendecomposition, ascending; each eigenvector's first nonzero
// component is made positive.
inline ModeBasis numeric_normal_modes(const Eigen::MatrixXd& v) {
  const auto solver = detail::checked_eigensolver(v);
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (values(0) <= 0.0)
    throw NumericalError("potential is not positive definite (min eigenvalue " +
                         std::to_string(values(0)) + ")");
  Eigen::MatrixXd vectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-12) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
  ModeBasis basis;
  basis.origin = ModeOrigin::numeric;
  basis.frequencies_squared = values;
  basis.transform = vectors.transpose().cast<std::complex<double>>();
  return basis;
}

}  // namespace qdatabus
