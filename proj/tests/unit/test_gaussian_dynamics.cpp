#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qdatabus/chain_model.hpp"
#include "qdatabus/gaussian_dynamics.hpp"
#include "support.hpp"

using namespace qdatabus;
using testing_support::chain;

namespace {

double symplectic_defect(const Eigen::MatrixXd& s) {
  const auto j = symplectic_form(static_cast<int>(s.rows() / 2));
  return (s.transpose() * j * s - j).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd random_potential(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() / n + 0.2 * Eigen::MatrixXd::Identity(n, n);
}

// Single-mode squeezer on mode k: x -> e^{-s} x, p -> e^{s} p.
Eigen::MatrixXd squeezer(int n, int k, double s) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  m(k, k) = std::exp(-s);
  m(n + k, n + k) = std::exp(s);
  return m;
}

// Random symplectic matrix: chain propagator followed by squeezers.
Eigen::MatrixXd random_symplectic(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  Eigen::MatrixXd s = ChainPropagator(random_potential(rng, n)).at(3.0 + 10.0 * std::abs(u(rng))).matrix;
  for (int k = 0; k < n; ++k) s = squeezer(n, k, u(rng)) * s;
  return s;
}

}  // namespace

TEST(VacuumState, IsIdentity) {
  EXPECT_EQ(vacuum_state(1).gamma, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(vacuum_state(3).gamma, Eigen::MatrixXd::Identity(6, 6));
  EXPECT_NEAR(physicality_margin(vacuum_state(3).gamma), 0.0, 1e-12);
  EXPECT_TRUE(is_physical(vacuum_state(3)));
}

TEST(TwoModeSqueezed, ZeroSqueezingIsVacuum) {
  EXPECT_EQ(two_mode_squeezed(0.0, 0, 1, 3).gamma, vacuum_state(3).gamma);
}

TEST(TwoModeSqueezed, EntryPattern) {
  const auto g = two_mode_squeezed(1.0, 0, 1, 2).gamma;
  const double ch = std::cosh(1.0), sh = std::sinh(1.0);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g(i, i), ch);
  EXPECT_DOUBLE_EQ(g(0, 1), -sh);
  EXPECT_DOUBLE_EQ(g(2, 3), sh);
  EXPECT_DOUBLE_EQ(g(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(g(0, 3), 0.0);
}

TEST(TwoModeSqueezed, PureAndPhysical) {
  for (double r : {0.1, 1.0, 3.0}) {
    const auto s = two_mode_squeezed(r, 0, 2, 3);
    const auto nu = symplectic_eigenvalues(s.gamma);
    EXPECT_LT((nu - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(is_physical(s));
    EXPECT_NEAR(purity(s.gamma), 1.0, 1e-9);
  }
}

TEST(TwoModeSqueezed, RejectsBadArguments) {
  EXPECT_THROW(two_mode_squeezed(-0.1, 0, 1, 2), ConfigError);
  EXPECT_THROW(two_mode_squeezed(0.5, 1, 1, 2), ConfigError);
  EXPECT_THROW(two_mode_squeezed(0.5, 0, 2, 2), ConfigError);
}

TEST(Propagator, IdentityAtZeroTime) {
  const auto h = attach_probes(chain(6, 1.0, {{"a", 1, 0.1, 0.0}}, true));
  EXPECT_LT((propagator(h, 0.0).matrix - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Propagator, QuarterPeriodOfFreeMode) {
  const auto s = ChainPropagator(Eigen::MatrixXd::Identity(1, 1)).at(std::numbers::pi / 2).matrix;
  Eigen::Matrix2d expected;
  expected << 0, 1, -1, 0;
  EXPECT_LT((s - Eigen::MatrixXd(expected)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Propagator, CompositionAndSymplecticity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> time(0.0, 50.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ChainPropagator p(random_potential(rng, 2 + trial));
    const double t1 = time(rng), t2 = time(rng);
    const auto s12 = p.at(t1 + t2).matrix;
    EXPECT_LT((s12 - p.at(t2).matrix * p.at(t1).matrix).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(symplectic_defect(s12), 1e-9);
  }
}

TEST(Propagator, RowsMatchFullMatrix) {
  const auto h = attach_probes(chain(8, 1.0, {{"a", 1, 0.1, 0.0}, {"b", 5, 0.1, 0.0}}, true));
  const ChainPropagator p(h);
  const auto full = p.at(123.4).matrix;
  const auto rows = p.rows(123.4, {9, 10});
  const int n = h.size();
  EXPECT_EQ(rows.row(0), full.row(9));
  EXPECT_EQ(rows.row(1), full.row(10));
  EXPECT_EQ(rows.row(2), full.row(n + 9));
  EXPECT_EQ(rows.row(3), full.row(n + 10));
}

TEST(Propagator, RejectsIndefinitePotential) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(2, 2);
  v(1, 1) = -0.5;
  EXPECT_THROW(ChainPropagator{v}, NumericalError);
}

TEST(RotatingFrame, SymplecticForIndefiniteGenerator) {
  Eigen::Matrix3d k;
  k << 0.3, -0.2, 0.0, -0.2, -0.1, 0.4, 0.0, 0.4, 0.0;
  for (double t : {0.0, 1.0, 77.0}) EXPECT_LT(symplectic_defect(rotating_frame_propagator(k, t).matrix), 1e-12);
}

TEST(Evolve, IdentityAndPhysicality) {
  const auto s = two_mode_squeezed(0.8, 0, 1, 3);
  EXPECT_EQ(evolve(s, {Eigen::MatrixXd::Identity(6, 6), 0.0}).gamma, s.gamma);
  std::mt19937_64 rng(5);
  const auto vac = evolve(vacuum_state(4), {random_symplectic(rng, 4), 1.0});
  EXPECT_TRUE(is_physical(vac));
  EXPECT_THROW(evolve(s, {Eigen::MatrixXd::Identity(4, 4), 0.0}), ConfigError);
}

TEST(Evolve, PurityConservedOverTransferRun) {
  const auto spec = chain(20, 1.0, {{"a", 1, 0.015, 0.0}, {"b", 11, 0.015, 0.0}}, true);
  const auto h = attach_probes(spec);
  const auto g0 = two_mode_squeezed(1.0, "a", "c", h.labels);
  const ChainPropagator p(h);
  double worst = 0.0;
  for (double t = 0.0; t <= 5000.0; t += 250.0)
    worst = std::max(worst, std::abs(purity(evolve(g0, p.at(t)).gamma) - 1.0));
  EXPECT_LT(worst, 1e-8);
}

TEST(Reduce, SubmatrixSemantics) {
  const auto s = two_mode_squeezed(1.0, "a", "c", {"a", "b", "c"});
  EXPECT_EQ(reduce(s, {"a", "b", "c"}).gamma, s.gamma);
  const auto a = reduce(s, {"a"});
  EXPECT_DOUBLE_EQ(a.gamma(0, 0), std::cosh(1.0));
  EXPECT_DOUBLE_EQ(a.gamma(1, 1), std::cosh(1.0));
  EXPECT_DOUBLE_EQ(a.gamma(0, 1), 0.0);
  EXPECT_EQ(reduce(reduce(s, {"c", "a"}), {"a"}).gamma, a.gamma);
  EXPECT_THROW(reduce(s, {"z"}), ConfigError);
  EXPECT_THROW(reduce(s, {}), ConfigError);
  EXPECT_THROW(reduce(s, {"a", "a"}), ConfigError);
}

TEST(LogNegativity, VacuumAndProductStatesCarryNone) {
  EXPECT_EQ(log_negativity(vacuum_state(3), {"1"}), 0.0);
  // thermal (x) squeezed-single-mode product across the cut
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
  g(0, 0) = g(2, 2) = 2.5;
  g(1, 1) = std::exp(-1.2);
  g(3, 3) = std::exp(1.2);
  EXPECT_EQ(log_negativity({{"1", "2"}, g}, {"1"}), 0.0);
}

TEST(LogNegativity, TwoModeSqueezedEqualsSqueezing) {
  for (double r : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const auto s = two_mode_squeezed(r, 0, 1, 2);
    EXPECT_NEAR(log_negativity(s, {"1"}), r, 1e-9) << "r=" << r;
    // the smallest partially transposed symplectic eigenvalue is e^{-r}
    EXPECT_NEAR(symplectic_eigenvalues(partial_transpose(s, {"1"}))(0), std::exp(-r), 1e-9);
  }
}

TEST(LogNegativity, StrictlyIncreasingInSqueezing) {
  double prev = -1.0;
  for (double r = 0.0; r <= 3.0; r += 0.25) {
    const double e = log_negativity(two_mode_squeezed(r, 0, 1, 3), {"1"});
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(LogNegativity, InvariantUnderLocalSymplectics) {
  std::mt19937_64 rng(17);
  const auto s0 = two_mode_squeezed(0.9, 0, 2, 4);
  const std::vector<std::string> side_a{"1", "2"};
  const double e0 = log_negativity(s0, side_a);
  for (int trial = 0; trial < 5; ++trial) {
    // symplectic acting only on modes {1, 2}: embed a 2-mode random symplectic
    const Eigen::MatrixXd local = random_symplectic(rng, 2);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(8, 8);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        s(i, j) = local(i, j);
        s(i, 4 + j) = local(i, 2 + j);
        s(4 + i, j) = local(2 + i, j);
        s(4 + i, 4 + j) = local(2 + i, 2 + j);
      }
    EXPECT_NEAR(log_negativity(evolve(s0, {s, 0.0}), side_a), e0, 1e-8);
  }
}

TEST(LogNegativity, RejectsUnphysicalState) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4) * 0.5;
  EXPECT_THROW(log_negativity({{"1", "2"}, g}, {"1"}), NumericalError);
  EXPECT_THROW(log_negativity(vacuum_state(2), {}), ConfigError);
}

TEST(LogNegativity, EfficiencyRatioIsBaseIndependent) {
  const auto s1 = two_mode_squeezed(0.7, 0, 1, 2);
  const auto s2 = two_mode_squeezed(1.9, 0, 1, 2);
  const double natural = log_negativity(s1, {"1"}) / log_negativity(s2, {"1"});
  const auto base2 = [](const CovarianceState& s) {
    double total = 0.0;
    for (double v : symplectic_eigenvalues(partial_transpose(s, {"1"})))
      if (v < kSymplecticClip) total += -std::log2(v);
    return total;
  };
  EXPECT_NEAR(base2(s1) / base2(s2), natural, 1e-12);
}

TEST(SymplecticEigenvalues, DiagonalCases) {
  EXPECT_LT((symplectic_eigenvalues(Eigen::MatrixXd::Identity(6, 6)) - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd d(6);
  d << 3, 1, 5, 3, 1, 5;  // 2n+1 for n = 1, 0, 2
  const auto nu = symplectic_eigenvalues(d.asDiagonal());
  EXPECT_NEAR(nu(0), 1.0, 1e-12);
  EXPECT_NEAR(nu(1), 3.0, 1e-12);
  EXPECT_NEAR(nu(2), 5.0, 1e-12);
}

TEST(SymplecticEigenvalues, InvariantUnderSymplecticConjugation) {
  std::mt19937_64 rng(23);
  Eigen::VectorXd d(8);
  d << 1.5, 2.0, 4.0, 1.0, 1.5, 2.0, 4.0, 1.0;
  const Eigen::MatrixXd g = d.asDiagonal();
  const auto s = random_symplectic(rng, 4);
  const auto nu = symplectic_eigenvalues(s * g * s.transpose());
  EXPECT_LT((nu - symplectic_eigenvalues(g)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SymplecticEigenvalues, RejectsSingularInput) {
  EXPECT_THROW(symplectic_eigenvalues(Eigen::MatrixXd::Zero(2, 2)), NumericalError);
  EXPECT_THROW(symplectic_eigenvalues(Eigen::MatrixXd::Identity(3, 3)), ConfigError);
}

// Symplectic condition over random chains, N <= 60 and t <= 1e4.
TEST(SymplecticSuite, RandomChains) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(3, 57);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ChainSpec spec;
    spec.ring_size = size(rng);
    spec.coupling = 0.05 + 10.0 * unit(rng);
    spec.probes = {{"a", 1, 0.2 * unit(rng), 0.0}, {"b", 1 + spec.ring_size / 2, 0.2 * unit(rng), 2.0 * unit(rng)}};
    spec.include_decoupled_c = true;
    if (trial % 2) spec.disorder = Disorder{DisorderModel::bond, 0.5 * unit(rng), rng()};
    const auto s = propagator(attach_probes(spec), 1e4 * unit(rng));
    ASSERT_LT(symplectic_defect(s.matrix), 1e-9) << "trial " << trial;
  }
}
