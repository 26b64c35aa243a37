#pragma once

// One excitation shared between ring sites and probes.
//
// In the rotating-wave approximation a harmonic chain with at most one
// quantum is a tight-binding (xy spin chain) problem with hopping matrix
// h = (I + V)/2.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qdatabus/chain_model.hpp"
#include "qdatabus/errors.hpp"

namespace qdatabus {

enum class HoppingOrigin { rwa_from_quadratic, xy_direct };

struct HoppingMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd h;
  HoppingOrigin origin = HoppingOrigin::rwa_from_quadratic;
};

struct AmplitudeState {
  std::vector<std::string> labels;
  Eigen::VectorXcd psi;

  [[nodiscard]] double norm() const { return psi.norm(); }

  [[nodiscard]] int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    throw ConfigError("unknown mode label '" + label + "'");
  }

  static AmplitudeState localized(const std::vector<std::string>& labels, const std::string& at) {
    AmplitudeState s{labels, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(labels.size()))};
    s.psi(s.index_of(at)) = 1.0;
    return s;
  }
};

inline HoppingMatrix rwa_hopping_matrix(const QuadraticHamiltonian& h) {
  const Eigen::Index n = h.potential.rows();
  HoppingMatrix out{h.labels, Eigen::MatrixXd(n, n), HoppingOrigin::rwa_from_quadratic};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.h(i, j) = i == j ? (1.0 + h.potential(i, i)) / 2.0 : h.potential(i, j) / 2.0;
  return out;
}

// Builds the xy couplings J_ij and on-site fields straight from the chain
// description, without forming the oscillator potential.
inline HoppingMatrix xy_direct_matrix(const ChainSpec& spec) {
  detail::validate_spec(spec);
  const int m = spec.ring_size;
  const int np = static_cast<int>(spec.probes.size());
  const int n = m + np + (spec.include_decoupled_c ? 1 : 0);

  const auto bonds = detail::ring_bonds(m, spec.coupling, spec.disorder);
  const auto base = detail::onsite_terms(m, spec.disorder);

  std::vector<double> field(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < m; ++k) field[k] = base[k] + (bonds[(k + m - 1) % m] + bonds[k]);
  for (int p = 0; p < np; ++p) {
    const auto& probe = spec.probes[p];
    field[m + p] = (1.0 + probe.detuning) + probe.epsilon;
    field[probe.site - 1] += probe.epsilon;
  }
  if (spec.include_decoupled_c) field[n - 1] = 1.0;

  HoppingMatrix out{{}, Eigen::MatrixXd::Zero(n, n), HoppingOrigin::xy_direct};
  for (int i = 0; i < n; ++i) out.h(i, i) = (1.0 + field[i]) / 2.0;
  for (int k = 0; k < m; ++k) {
    const int next = (k + 1) % m;
    out.h(k, next) += -bonds[k] / 2.0;
    out.h(next, k) += -bonds[k] / 2.0;
  }
  for (int p = 0; p < np; ++p) {
    const int s = spec.probes[p].site - 1;
    out.h(m + p, s) += -spec.probes[p].epsilon / 2.0;
    out.h(s, m + p) += -spec.probes[p].epsilon / 2.0;
  }

  for (int k = 1; k <= m; ++k) out.labels.push_back(std::to_string(k));
  for (const auto& probe : spec.probes) out.labels.push_back(probe.label);
  if (spec.include_decoupled_c) out.labels.push_back("c");
  return out;
}

// psi(t) = exp(-i h t) psi(0) through one cached eigendecomposition of h.
class AmplitudeEvolver {
 public:
  explicit AmplitudeEvolver(const HoppingMatrix& h) : labels_(h.labels) {
    detail::require(h.h.rows() == h.h.cols() && h.h.rows() > 0, "hopping matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.h);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    vectors_ = solver.eigenvectors().cast<std::complex<double>>();
    energies_ = solver.eigenvalues();
  }

  [[nodiscard]] AmplitudeState evolve(const AmplitudeState& psi0, double t) const {
    detail::require(psi0.psi.size() == energies_.size(), "state and hopping matrix dimensions differ");
    detail::require(std::isfinite(t), "evolution time must be finite");
    const Eigen::VectorXcd coeff = vectors_.adjoint() * psi0.psi;
    Eigen::VectorXcd rotated(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
      rotated(k) = std::polar(1.0, -energies_(k) * t) * coeff(k);
    return {labels_, vectors_ * rotated};
  }

  [[nodiscard]] double energy(const AmplitudeState& psi) const {
    const Eigen::VectorXcd coeff = vectors_.adjoint() * psi.psi;
    return (coeff.cwiseAbs2().array() * energies_.array()).sum();
  }

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd energies_;
};

inline AmplitudeState evolve_amplitudes(const HoppingMatrix& h, const AmplitudeState& psi0, double t) {
  return AmplitudeEvolver(h).evolve(psi0, t);
}

inline Eigen::VectorXd site_populations(const AmplitudeState& psi) { return psi.psi.cwiseAbs2(); }

// Coefficients of x|100> + y|010> + z|001> over three probe labels.
struct WTarget {
  std::complex<double> x, y, z;
  std::array<std::string, 3> probes{"a", "b", "c"};
};

namespace detail {

inline std::complex<double> w_projection(const AmplitudeState& psi, const WTarget& w) {
  const double norm2 = std::norm(w.x) + std::norm(w.y) + std::norm(w.z);
  require(std::abs(norm2 - 1.0) <= 1e-9, "W-state coefficients must be normalized");
  return std::conj(w.x) * psi.psi(psi.index_of(w.probes[0])) +
         std::conj(w.y) * psi.psi(psi.index_of(w.probes[1])) +
         std::conj(w.z) * psi.psi(psi.index_of(w.probes[2]));
}

}  // namespace detail

// |<W| (x) <0|_bus |psi>|. Amplitude left on ring sites counts as loss.
inline double w_overlap(const AmplitudeState& psi, const WTarget& w) {
  return std::abs(detail::w_projection(psi, w));
}

inline double w_fidelity(const AmplitudeState& psi, const WTarget& w) {
  return std::norm(detail::w_projection(psi, w));
}

// Overlap after the best local phase rotation on each probe.
inline double phase_optimized_w_overlap(const AmplitudeState& psi, const WTarget& w) {
  detail::w_projection(psi, w);
  return std::abs(w.x) * std::abs(psi.psi(psi.index_of(w.probes[0]))) +
         std::abs(w.y) * std::abs(psi.psi(psi.index_of(w.probes[1]))) +
         std::abs(w.z) * std::abs(psi.psi(psi.index_of(w.probes[2])));
}

}  // namespace qdatabus
