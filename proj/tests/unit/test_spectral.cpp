#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ksfrag/spectral.hpp"
#include "ksfrag/u1_ladder.hpp"
#include "oracles.hpp"

using namespace ksfrag;

namespace {

oracle::Matrix to_oracle(const Eigen::MatrixXd& d) {
  oracle::Matrix m = oracle::zeros(static_cast<std::size_t>(d.rows()));
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) m[i][j] = d(i, j);
  return m;
}

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST(Diagonalize, SmallCases) {
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  const auto s = diagonalize(x);
  EXPECT_NEAR(s.energies[0], -1.0, 1e-15);
  EXPECT_NEAR(s.energies[1], 1.0, 1e-15);
  const auto id = diagonalize(SymmetricOperator::identity(5));
  for (Index k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(id.energies[k], 1.0);
}

TEST(Diagonalize, RejectsAsymmetricInput) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1 + 1e-9, 0;
  EXPECT_THROW(diagonalize(a), NumericalError);
  EXPECT_THROW(diagonalize(SymmetricOperator::from_dense(a)), NumericalError);
}

TEST(Diagonalize, SmallLadderAgainstJacobi) {
  const auto space = u1::build_u1_space(2, 1);
  const auto h = u1::build_u1_hamiltonian(space, 1.0);
  const auto s = diagonalize(h);
  const auto ref = oracle::jacobi_eigenvalues(to_oracle(h.dense()));
  ASSERT_EQ(s.size(), 9);
  for (Index k = 0; k < 9; ++k) EXPECT_NEAR(s.energies[k], ref[static_cast<std::size_t>(k)], 1e-12);
  EXPECT_LT(s.energies[0], 0.0);
  const auto check = check_spectrum(h, s);
  EXPECT_LE(check.max_residual, 1e-8);
  EXPECT_LE(check.max_orthonormality, 1e-10);
}

TEST(Diagonalize, SignFixAndClusters) {
  const auto s = diagonalize(random_symmetric(12, 3));
  for (Index k = 0; k < s.size(); ++k) {
    Index pivot = 0;
    s.vectors.col(k).cwiseAbs().maxCoeff(&pivot);
    EXPECT_GT(s.vectors(pivot, k), 0.0);
  }
  Eigen::VectorXd e(5);
  e << 0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0;
  EXPECT_EQ(cluster_ids(e), (std::vector<Index>{0, 1, 1, 2, 2}));
  EXPECT_EQ(cluster_sizes(cluster_ids(e)), (std::vector<Index>{1, 2, 2, 2, 2}));
}

TEST(TimeGrid, InclusiveUniform) {
  const auto t = time_grid(50.0, 200);
  ASSERT_EQ(t.size(), 200u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_DOUBLE_EQ(t.back(), 50.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i], t[i - 1]);
  EXPECT_THROW(time_grid(50.0, 1), InvalidArgument);
}

TEST(Evolve, EigenstateIsStationary) {
  const auto h = u1::build_u1_hamiltonian(u1::build_u1_space(3, 1), 0.8);
  const auto s = diagonalize(h);
  const Eigen::VectorXd v = s.vectors.col(4);
  const auto t = time_grid(50.0, 50);
  for (const auto& psi : evolve(s, v, t)) EXPECT_NEAR(std::abs(psi.dot(v.cast<std::complex<double>>())), 1.0, 1e-12);
}

TEST(Evolve, NormAndEnergyConserved) {
  const auto space = u1::build_u1_space(3, 2);
  const auto h = u1::build_u1_hamiltonian(space, 0.6);
  const auto s = diagonalize(h);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{2, -1, 0}});
  const double e0 = h.expectation(psi0);
  for (const auto& psi : evolve(s, psi0, time_grid(50.0, 200))) {
    EXPECT_LT(std::abs(psi.norm() - 1.0), 1e-10);
    EXPECT_LT(std::abs(h.expectation(psi) - e0), 1e-9 * std::max(1.0, std::abs(e0)));
  }
  EXPECT_THROW(evolve(s, Eigen::VectorXd::Zero(3), time_grid(1.0, 2)), InvalidArgument);
}

TEST(Evolve, AgreesWithRungeKutta) {
  const auto space = u1::build_u1_space(2, 1);
  const auto h = u1::build_u1_hamiltonian(space, 1.0);
  const auto s = diagonalize(h);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{0, 0}});
  const std::vector<double> t{0.1};
  const auto psi = evolve(s, psi0, t).front();
  oracle::CVector start(9, 0.0);
  start[static_cast<std::size_t>(space.index({{0, 0}}))] = 1.0;
  const auto ref = oracle::rk4(to_oracle(h.dense()), start, 0.1, 100);
  for (Index i = 0; i < 9; ++i) EXPECT_LT(std::abs(psi[i] - ref[static_cast<std::size_t>(i)]), 1e-6);
}

TEST(Evolve, AgreesWithRungeKuttaAtLongerTimes) {
  const auto space = u1::build_u1_space(3, 2);  // dimension 125
  const auto h = u1::build_u1_hamiltonian(space, 0.6);
  const auto s = diagonalize(h);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{2, -1, 1}});
  const std::vector<double> t{2.0};
  const auto psi = evolve(s, psi0, t).front();
  oracle::CVector start(125, 0.0);
  start[static_cast<std::size_t>(space.index({{2, -1, 1}}))] = 1.0;
  const auto ref = oracle::rk4(to_oracle(h.dense()), start, 2.0, 4000);
  for (Index i = 0; i < 125; ++i) EXPECT_LT(std::abs(psi[i] - ref[static_cast<std::size_t>(i)]), 1e-6);
}

TEST(Evolve, ExpectationSeriesMatchesStates) {
  const auto space = u1::build_u1_space(3, 1);
  const auto h = u1::build_u1_hamiltonian(space, 1.0);
  const auto s = diagonalize(h);
  const auto obs = u1::electric_observable(space, u1::ElectricObservable::total);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{1, 0, -1}});
  const auto t = time_grid(10.0, 17);
  const auto series = expectation_series(s, psi0, obs, t);
  const auto states = evolve(s, psi0, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(series[i], obs.expectation(states[i]), 1e-12);
  EXPECT_NEAR(series[0], obs.expectation(psi0), 1e-12);
}

TEST(Microcanonical, WindowSelection) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 0.0, 1.0, 2.0, 3.0;
  const auto s = diagonalize(d);
  const auto one = microcanonical_state(s, 1.0, 0.1);
  EXPECT_EQ(one.members, (std::vector<Index>{1}));
  EXPECT_LT((one.state - s.vectors.col(1)).norm(), 1e-15);
  const auto all = microcanonical_state(s, 1.5, 10.0);
  EXPECT_EQ(all.members.size(), 4u);
  EXPECT_NEAR(all.state.norm(), 1.0, 1e-15);
  const Eigen::VectorXd coeff = s.vectors.transpose() * all.state;
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(coeff[k], 0.5, 1e-15);
  EXPECT_THROW(microcanonical_state(s, 0.5, 0.1), NumericalError);
}

TEST(Microcanonical, LadderWindowCountMatchesScan) {
  const auto space = u1::build_u1_space(3, 3);
  const auto h = u1::build_u1_hamiltonian(space, 0.6);
  const auto s = diagonalize(h);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{3, -2, 3}});
  const auto m = energy_moments(h, psi0);
  const auto mc = microcanonical_state(s, m.mean, m.width);
  std::size_t count = 0;
  for (Index k = 0; k < s.size(); ++k)
    if (s.energies[k] >= m.mean - m.width && s.energies[k] <= m.mean + m.width) ++count;
  EXPECT_EQ(mc.members.size(), count);
  EXPECT_NEAR(m.mean, h.coeff(static_cast<Index>(space.index({{3, -2, 3}})), static_cast<Index>(space.index({{3, -2, 3}}))),
              1e-14);
}

TEST(ObservableStats, IdentityAndDiagonal) {
  const auto s = diagonalize(random_symmetric(6, 7));
  const auto id = observable_stats(s, SymmetricOperator::identity(6));
  for (Index k = 0; k < 6; ++k) {
    EXPECT_NEAR(id.mean[k], 1.0, 1e-12);
    EXPECT_NEAR(id.variance[k], 0.0, 1e-12);
  }
  Eigen::VectorXd d(3);
  d << 1.0, 4.0, -2.0;
  const auto diag = SymmetricOperator::diagonal(d);
  const auto st = observable_stats(diagonalize(diag), diag);
  for (Index k = 0; k < 3; ++k) EXPECT_EQ(st.variance[k], 0.0);
}

TEST(ObservableStats, MatchesDenseArithmetic) {
  Eigen::MatrixXd h = random_symmetric(3, 11);
  Eigen::MatrixXd a = random_symmetric(3, 12);
  const auto s = diagonalize(h);
  const auto st = observable_stats(s, SymmetricOperator::from_dense(a));
  for (Index k = 0; k < 3; ++k) {
    double mean = 0.0, second = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        mean += s.vectors(i, k) * a(i, j) * s.vectors(j, k);
        double a2 = 0.0;
        for (int l = 0; l < 3; ++l) a2 += a(i, l) * a(l, j);
        second += s.vectors(i, k) * a2 * s.vectors(j, k);
      }
    EXPECT_NEAR(st.mean[k], mean, 1e-12);
    EXPECT_NEAR(st.variance[k], second - mean * mean, 1e-12);
  }
}

TEST(Entropy, ProductAndEntangledStates) {
  const auto space = u1::build_u1_space(4, 1);
  EXPECT_NEAR(half_chain_entropy(u1::basis_state(space, {{1, 0, -1, 1}}), space, 2), 0.0, 1e-14);
  const Eigen::VectorXd pair =
      (u1::basis_state(space, {{1, 1, 0, 0}}) + u1::basis_state(space, {{0, -1, 1, 1}})) / std::sqrt(2.0);
  EXPECT_NEAR(half_chain_entropy(pair, space, 2), std::log(2.0), 1e-12);
  EXPECT_THROW(half_chain_entropy(2.0 * pair, space, 2), InvalidArgument);
  EXPECT_THROW(half_chain_entropy(pair, space, 4), InvalidArgument);
}

TEST(Entropy, MomentumProjectedPeriodTwoState) {
  const auto space = u1::build_u1_space(4, 4);
  const auto sector = u1::build_momentum_zero(space);
  const Eigen::VectorXd psi0 = u1::basis_state(space, {{3, -2, 3, -2}});
  Eigen::VectorXd proj = sector.embed(sector.restrict(psi0));
  proj.normalize();
  const double s = half_chain_entropy(proj, space, 2);
  EXPECT_NEAR(s, std::log(2.0), 1e-12);

  oracle::Matrix amp = oracle::zeros(81);
  for (Index i = 0; i < proj.size(); ++i) amp[static_cast<std::size_t>(i / 81)][static_cast<std::size_t>(i % 81)] = proj[i];
  EXPECT_NEAR(oracle::density_matrix_entropy(amp), s, 1e-10);
}

TEST(Entropy, BoundedByCutDimension) {
  const auto space = u1::build_u1_space(4, 1);
  const auto h = u1::build_u1_hamiltonian(space, 0.7);
  const auto s = diagonalize(h);
  for (Index k = 0; k < s.size(); ++k) {
    const double e = half_chain_entropy(s.vectors.col(k), space, 2);
    EXPECT_GE(e, -1e-12);
    EXPECT_LE(e, 2.0 * std::log(3.0) + 1e-12);
  }
}
