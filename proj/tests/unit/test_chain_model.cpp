#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qdatabus/chain_model.hpp"

using namespace qdatabus;

namespace {

ChainSpec two_probe_spec(int m, double c, double eps, int site_b) {
  ChainSpec s;
  s.ring_size = m;
  s.coupling = c;
  s.probes = {{"a", 1, eps, 0.0}, {"b", site_b, eps, 0.0}};
  return s;
}

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

// Direct evaluation of Lambda_k^2 = 1 + 2c - 2c cos(2 pi k / M).
std::vector<double> ring_spectrum(int m, double c) {
  std::vector<double> out;
  for (int k = 1; k <= m; ++k) out.push_back(1.0 + 2.0 * c - 2.0 * c * std::cos(2.0 * std::numbers::pi * k / m));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(BuildRingPotential, ThreeSiteRing) {
  Eigen::Matrix3d expected;
  expected << 3, -1, -1, -1, 3, -1, -1, -1, 3;
  EXPECT_EQ(build_ring_potential(3, 1.0), Eigen::MatrixXd(expected));
}

TEST(BuildRingPotential, NearlyDecoupledRingIsIdentity) {
  const auto v = build_ring_potential(5, 1e-12);
  EXPECT_LT((v - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(BuildRingPotential, RejectsDegenerateInput) {
  EXPECT_THROW(build_ring_potential(2, 1.0), ConfigError);
  EXPECT_THROW(build_ring_potential(5, 0.0), ConfigError);
  EXPECT_THROW(build_ring_potential(5, -1.0), ConfigError);
}

TEST(BuildRingPotential, SpectrumMatchesFourierFormula) {
  const auto values = sorted(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(build_ring_potential(10, 1.0)).eigenvalues());
  const auto expected = ring_spectrum(10, 1.0);
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_NEAR(values[i], expected[i], 1e-10);
}

TEST(AttachProbes, SingleProbeExpansion) {
  ChainSpec s;
  s.ring_size = 3;
  s.coupling = 1.0;
  s.probes = {{"a", 1, 0.1, 0.0}};
  const auto h = attach_probes(s);
  ASSERT_EQ(h.size(), 4);
  const int a = h.index_of("a");
  EXPECT_DOUBLE_EQ(h.potential(a, a), 1.1);
  EXPECT_DOUBLE_EQ(h.potential(0, 0), 3.1);
  EXPECT_DOUBLE_EQ(h.potential(a, 0), -0.1);
  EXPECT_DOUBLE_EQ(h.potential(0, a), -0.1);
}

TEST(AttachProbes, ZeroCouplingIsBlockDiagonal) {
  auto s = two_probe_spec(6, 1.0, 0.0, 4);
  s.include_decoupled_c = true;
  const auto h = attach_probes(s);
  EXPECT_EQ(h.potential.topLeftCorner(6, 6), build_ring_potential(6, 1.0));
  EXPECT_EQ(h.potential.bottomRightCorner(3, 3), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(h.potential.topRightCorner(6, 3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AttachProbes, LabelOrder) {
  auto s = two_probe_spec(4, 1.0, 0.1, 3);
  s.include_decoupled_c = true;
  const auto h = attach_probes(s);
  const std::vector<std::string> expected{"1", "2", "3", "4", "a", "b", "c"};
  EXPECT_EQ(h.labels, expected);
}

TEST(AttachProbes, QuarterModeDetuningIsResonantWithModeMOver4) {
  auto s = two_probe_spec(8, 1.0, 0.02, 5);
  for (auto& p : s.probes) p.detuning = quarter_mode_detuning(1.0);
  const auto h = attach_probes(s);
  EXPECT_DOUBLE_EQ(h.potential(h.index_of("a"), h.index_of("a")), 3.02);
  // bare probe frequency^2 (eps removed) equals Lambda^2 of mode M/4
  const auto modes = ring_normal_modes(8, 1.0);
  EXPECT_NEAR(1.0 + s.probes[0].detuning, modes.frequencies_squared(8 / 4 - 1), 1e-12);
}

TEST(AttachProbes, RejectsBadSpecs) {
  auto s = two_probe_spec(5, 1.0, 0.1, 3);
  s.probes[1].site = 6;
  EXPECT_THROW(attach_probes(s), ConfigError);
  s.probes[1].site = 0;
  EXPECT_THROW(attach_probes(s), ConfigError);

  s = two_probe_spec(5, 1.0, 0.1, 3);
  s.probes[1].label = "a";
  EXPECT_THROW(attach_probes(s), ConfigError);

  s = two_probe_spec(5, 1.0, 0.1, 1);
  EXPECT_THROW(attach_probes(s), ConfigError);
  s.allow_shared_sites = true;
  EXPECT_NO_THROW(attach_probes(s));

  s = two_probe_spec(5, 1.0, -0.1, 3);
  EXPECT_THROW(attach_probes(s), ConfigError);

  s = two_probe_spec(5, 1.0, 0.1, 3);
  s.probes[1].label = "c";
  s.include_decoupled_c = true;
  EXPECT_THROW(attach_probes(s), ConfigError);
}

TEST(ApplyDisorder, ZeroSpreadLeavesPotentialUnchanged) {
  const auto h = attach_probes(two_probe_spec(12, 1.3, 0.05, 7));
  for (std::uint64_t seed : {0ull, 1ull, 99ull})
    EXPECT_EQ(apply_disorder(h.potential, 12, 0.0, seed), h.potential);
}

TEST(ApplyDisorder, SameSeedSameMatrix) {
  const auto v = build_ring_potential(20, 1.0);
  EXPECT_EQ(apply_disorder(v, 20, 0.1, 7), apply_disorder(v, 20, 0.1, 7));
  EXPECT_NE(apply_disorder(v, 20, 0.1, 7), apply_disorder(v, 20, 0.1, 8));
}

TEST(ApplyDisorder, BondsStayInRangeAndMatrixPositive) {
  const auto v = apply_disorder(build_ring_potential(20, 1.0), 20, 0.1, 7);
  for (int k = 0; k < 20; ++k) {
    const double bond = -v(k, (k + 1) % 20);
    EXPECT_GE(bond, 0.9);
    EXPECT_LE(bond, 1.1);
  }
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v).eigenvalues()(0), 0.0);
}

TEST(ApplyDisorder, ProbeCouplingsUntouched) {
  const auto h = attach_probes(two_probe_spec(10, 1.0, 0.05, 6));
  const auto v = apply_disorder(h.potential, 10, 0.3, 3);
  EXPECT_EQ(v.rightCols(2), h.potential.rightCols(2));
  // diagonal rebalanced: 1 + adjacent bonds + probe coupling at the site
  EXPECT_NEAR(v(0, 0), 1.0 - v(0, 1) - v(0, 9) + 0.05, 1e-15);
}

TEST(ApplyDisorder, MatchesSpecDrivenConstruction) {
  auto spec = two_probe_spec(15, 0.7, 0.03, 8);
  spec.include_decoupled_c = true;
  const auto plain = attach_probes(spec);
  spec.disorder = Disorder{DisorderModel::bond, 0.2, 42};
  EXPECT_EQ(attach_probes(spec).potential, apply_disorder(plain.potential, 15, 0.2, 42));
  EXPECT_EQ(attach_probes(spec).potential, apply_disorder(plain, *spec.disorder).potential);
}

TEST(ApplyDisorder, RejectsSpreadAtOrAboveOne) {
  const auto v = build_ring_potential(6, 1.0);
  EXPECT_THROW(apply_disorder(v, 6, 1.0, 0), ConfigError);
  EXPECT_THROW(apply_disorder(v, 6, -0.1, 0), ConfigError);
}

TEST(RingNormalModes, CentreOfMassHasUnitFrequency) {
  for (double c : {0.1, 1.0, 10.0}) {
    const auto b = ring_normal_modes(9, c);
    EXPECT_NEAR(b.frequencies_squared(8), 1.0, 1e-14);
  }
}

TEST(RingNormalModes, HalfwayModeForFourSites) {
  EXPECT_NEAR(ring_normal_modes(4, 1.0).frequencies_squared(1), 5.0, 1e-14);
}

TEST(RingNormalModes, ReconstructsPotentialAndIsUnitary) {
  const auto b = ring_normal_modes(10, 1.0);
  const Eigen::MatrixXcd rebuilt =
      b.transform.adjoint() * b.frequencies_squared.cast<std::complex<double>>().asDiagonal() * b.transform;
  EXPECT_LT((rebuilt.real() - build_ring_potential(10, 1.0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(rebuilt.imag().cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((b.transform * b.transform.adjoint() - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(b.origin, ModeOrigin::analytic_dft);
}

TEST(NumericNormalModes, IdentityInput) {
  const auto b = numeric_normal_modes(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_LT((b.frequencies_squared - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((b.transform.real() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(NumericNormalModes, AgreesWithAnalyticModes) {
  for (int m : {3, 8, 13}) {
    const auto num = numeric_normal_modes(build_ring_potential(m, 2.0));
    const auto ana = sorted(ring_normal_modes(m, 2.0).frequencies_squared);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(num.frequencies_squared(i), ana[i], 1e-10);
  }
}

TEST(NumericNormalModes, SignConventionAndReconstruction) {
  auto spec = two_probe_spec(9, 1.0, 0.1, 5);
  spec.disorder = Disorder{DisorderModel::bond, 0.3, 5};
  const auto v = attach_probes(spec).potential;
  const auto b = numeric_normal_modes(v);
  const Eigen::MatrixXd t = b.transform.real();
  EXPECT_LT((t.transpose() * b.frequencies_squared.asDiagonal() * t - v).cwiseAbs().maxCoeff(), 1e-10);
  for (int k = 0; k < t.rows(); ++k) {
    int first = 0;
    while (std::abs(t(k, first)) <= 1e-12) ++first;
    EXPECT_GT(t(k, first), 0.0);
  }
}

TEST(NumericNormalModes, DisorderedRingKeepsUnitLowestMode) {
  auto spec = two_probe_spec(20, 1.0, 0.0, 11);
  spec.disorder = Disorder{DisorderModel::bond, 0.1, 3};
  const auto b = numeric_normal_modes(attach_probes(spec).potential);
  EXPECT_NEAR(b.frequencies_squared(0), 1.0, 1e-10);
}

TEST(NumericNormalModes, RejectsInvalidMatrices) {
  Eigen::MatrixXd nonsym = Eigen::MatrixXd::Identity(3, 3);
  nonsym(0, 1) = 0.5;
  EXPECT_THROW(numeric_normal_modes(nonsym), ConfigError);
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  EXPECT_THROW(numeric_normal_modes(indefinite), NumericalError);
}

// Properties over random specs.
class RandomChains : public ::testing::TestWithParam<int> {};

TEST_P(RandomChains, SymmetricPositiveAndUniformVectorFixed) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_int_distribution<int> size(3, 30);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = size(rng);
  ChainSpec ring;
  ring.ring_size = m;
  ring.coupling = 0.1 + 5.0 * unit(rng);
  ring.disorder = Disorder{DisorderModel::bond, 0.9 * unit(rng), rng()};
  const auto v = attach_probes(ring).potential;
  EXPECT_EQ((v - v.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((v * Eigen::VectorXd::Ones(m) - Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff(), 1e-12);

  ChainSpec spec = ring;
  spec.probes = {{"a", 1, unit(rng), 0.0}, {"b", 1 + m / 2, unit(rng), 2.0 * unit(rng)}};
  spec.allow_shared_sites = true;
  spec.include_decoupled_c = true;
  const auto full = attach_probes(spec).potential;
  EXPECT_EQ((full - full.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(full).eigenvalues()(0), 0.0);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomChains, ::testing::Range(0, 25));

TEST(ChainProperties, TranslationInvariance) {
  const int m = 11;
  const auto v = build_ring_potential(m, 1.7);
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) shift(k, (k + 3) % m) = 1.0;
  const auto a = sorted(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v).eigenvalues());
  const auto b = sorted(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(shift * v * shift.transpose()).eigenvalues());
  for (int i = 0; i < m; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(ChainProperties, SiteDisorderBreaksUnitCentreOfMass) {
  ChainSpec spec;
  spec.ring_size = 20;
  spec.coupling = 1.0;
  spec.disorder = Disorder{DisorderModel::site, 0.1, 3};
  const auto b = numeric_normal_modes(attach_probes(spec).potential);
  EXPECT_GT(std::abs(b.frequencies_squared(0) - 1.0), 1e-4);
}
