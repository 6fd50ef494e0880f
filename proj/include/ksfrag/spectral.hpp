#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ksfrag/errors.hpp"
#include "ksfrag/operator.hpp"
#include "ksfrag/u1_ladder.hpp"

namespace ksfrag {

/// Full eigendecomposition: energies ascending, eigenvectors as columns.
///
/// Each column is sign-fixed so that its largest-magnitude component (first
/// one on ties) is positive. Inside a degenerate cluster the basis is
/// whatever the solver returns; see `cluster_ids`.
struct SpectralData {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;

  Index size() const { return energies.size(); }
  Index basis_dim() const { return vectors.rows(); }
};

struct SpectralCheck {
  double max_residual = 0.0;        // max_k ||H v_k - E_k v_k|| / max(1, |E_k|)
  double max_orthonormality = 0.0;  // max |V^T V - 1|
};

inline SpectralData diagonalize(const Eigen::MatrixXd& dense, double symmetry_tol = 1e-12) {
  if (dense.rows() != dense.cols()) throw InvalidArgument("diagonalize: matrix is not square");
  const double asym = (dense - dense.transpose()).cwiseAbs().maxCoeff();
  if (dense.size() > 0 && asym > symmetry_tol)
    throw NumericalError("diagonalize: input asymmetry " + std::to_string(asym) + " exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) {
    throw NumericalError("diagonalize: eigensolver did not converge");
  }
  SpectralData out{es.eigenvalues(), es.eigenvectors()};
  for (Index k = 0; k < out.vectors.cols(); ++k) {
    Index pivot = 0;
    out.vectors.col(k).cwiseAbs().maxCoeff(&pivot);
    if (out.vectors(pivot, k) < 0) out.vectors.col(k) *= -1.0;
  }
  return out;
}

inline SpectralData diagonalize(const SymmetricOperator& op, double symmetry_tol = 1e-12) {
  if (op.asymmetry() > symmetry_tol)
    throw NumericalError("diagonalize: operator asymmetry " + std::to_string(op.asymmetry()) +
                         " exceeds tolerance");
  return diagonalize(op.dense(), symmetry_tol);
}

inline SpectralCheck check_spectrum(const SymmetricOperator& op, const SpectralData& spec) {
  SpectralCheck c;
  const Eigen::MatrixXd hv = op.matrix() * spec.vectors;
  for (Index k = 0; k < spec.size(); ++k) {
    const double r = (hv.col(k) - spec.energies[k] * spec.vectors.col(k)).norm();
    c.max_residual = std::max(c.max_residual, r / std::max(1.0, std::abs(spec.energies[k])));
  }
  const Eigen::MatrixXd gram = spec.vectors.transpose() * spec.vectors;
  c.max_orthonormality =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return c;
}

/// Cluster label per eigenvalue: consecutive energies closer than `gap`
/// share a label. Labels start at 0 and increase with energy.
inline std::vector<Index> cluster_ids(const Eigen::VectorXd& energies, double gap = 1e-9) {
  std::vector<Index> ids(static_cast<std::size_t>(energies.size()), 0);
  for (Index k = 1; k < energies.size(); ++k)
    ids[static_cast<std::size_t>(k)] =
        ids[static_cast<std::size_t>(k - 1)] + (energies[k] - energies[k - 1] < gap ? 0 : 1);
  return ids;
}

inline std::vector<Index> cluster_sizes(const std::vector<Index>& ids) {
  std::vector<Index> count(ids.empty() ? 0 : static_cast<std::size_t>(ids.back()) + 1, 0);
  for (Index id : ids) ++count[static_cast<std::size_t>(id)];
  std::vector<Index> out(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) out[k] = count[static_cast<std::size_t>(ids[k])];
  return out;
}

/// `points` uniform samples of [0, t_max], both ends included.
inline std::vector<double> time_grid(double t_max, int points) {
  if (points < 2 || !(t_max > 0.0)) throw InvalidArgument("time_grid: need t_max > 0 and at least 2 points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (points - 1);
  return t;
}

namespace detail {

inline Eigen::VectorXd eigen_coefficients(const SpectralData& spec, const Eigen::VectorXd& psi0) {
  if (psi0.size() != spec.basis_dim()) throw InvalidArgument("evolve: state and spectrum live on different bases");
  return spec.vectors.transpose() * psi0;
}

inline Eigen::VectorXcd propagate(const SpectralData& spec, const Eigen::VectorXd& coeff, double t) {
  Eigen::VectorXd re(coeff.size());
  Eigen::VectorXd im(coeff.size());
  for (Index k = 0; k < coeff.size(); ++k) {
    const double phase = -spec.energies[k] * t;
    re[k] = coeff[k] * std::cos(phase);
    im[k] = coeff[k] * std::sin(phase);
  }
  Eigen::VectorXcd out(spec.basis_dim());
  out.real() = spec.vectors * re;
  out.imag() = spec.vectors * im;
  return out;
}

}  // namespace detail

/// psi(t) = sum_k exp(-i E_k t) <v_k|psi0> v_k for every t.
inline std::vector<Eigen::VectorXcd> evolve(const SpectralData& spec, const Eigen::VectorXd& psi0,
                                            std::span<const double> times) {
  const Eigen::VectorXd c = detail::eigen_coefficients(spec, psi0);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(detail::propagate(spec, c, t));
  return out;
}

/// <psi(t)|O|psi(t)> along the grid without storing the states.
inline std::vector<double> expectation_series(const SpectralData& spec, const Eigen::VectorXd& psi0,
                                              const SymmetricOperator& observable, std::span<const double> times) {
  if (observable.dim() != spec.basis_dim()) throw InvalidArgument("expectation_series: observable basis mismatch");
  const Eigen::VectorXd c = detail::eigen_coefficients(spec, psi0);
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(observable.expectation(detail::propagate(spec, c, t)));
  return out;
}

struct MicrocanonicalState {
  double center = 0.0;
  double half_width = 0.0;
  std::vector<Index> members;  // eigenvalue indices inside the window
  Eigen::VectorXd state;       // in the basis of `spec.vectors`
};

/// Equal-amplitude superposition of the eigenvectors with |E_k - E| <= dE.
inline MicrocanonicalState microcanonical_state(const SpectralData& spec, double energy, double half_width) {
  if (!(half_width >= 0.0)) throw InvalidArgument("microcanonical_state: half width must be non-negative");
  MicrocanonicalState mc{energy, half_width, {}, Eigen::VectorXd::Zero(spec.basis_dim())};
  for (Index k = 0; k < spec.size(); ++k)
    if (std::abs(spec.energies[k] - energy) <= half_width) mc.members.push_back(k);
  if (mc.members.empty()) {
    Index nearest = 0;
    (spec.energies.array() - energy).abs().minCoeff(&nearest);
    throw NumericalError("microcanonical_state: empty window [" + std::to_string(energy - half_width) + ", " +
                         std::to_string(energy + half_width) + "], nearest eigenvalue " +
                         std::to_string(spec.energies[nearest]));
  }
  const double amp = 1.0 / std::sqrt(static_cast<double>(mc.members.size()));
  for (Index k : mc.members) mc.state += amp * spec.vectors.col(k);
  return mc;
}

/// Mean <psi|H|psi> and width sqrt(<H^2> - <H>^2) of a real state.
struct EnergyMoments {
  double mean = 0.0;
  double width = 0.0;
};

inline EnergyMoments energy_moments(const SymmetricOperator& h, const Eigen::VectorXd& psi) {
  const Eigen::VectorXd hpsi = h.apply(psi);
  const double mean = psi.dot(hpsi);
  const double second = hpsi.squaredNorm();
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

struct ObservableStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Per eigenvector: <v|A|v> and <v|A^2|v> - <v|A|v>^2 = ||A v||^2 - <v|A|v>^2.
inline ObservableStats observable_stats(const SpectralData& spec, const SymmetricOperator& op) {
  if (op.dim() != spec.basis_dim()) throw InvalidArgument("observable_stats: basis mismatch");
  const Eigen::MatrixXd av = op.matrix() * spec.vectors;
  ObservableStats s{Eigen::VectorXd(spec.size()), Eigen::VectorXd(spec.size())};
  for (Index k = 0; k < spec.size(); ++k) {
    const double m = spec.vectors.col(k).dot(av.col(k));
    s.mean[k] = m;
    s.variance[k] = av.col(k).squaredNorm() - m * m;
  }
  return s;
}

/// -sum s^2 ln s^2 over the singular values of an amplitude matrix.
inline double entanglement_entropy(const Eigen::MatrixXd& amplitudes) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(amplitudes);
  double s = 0.0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()[k] * svd.singularValues()[k];
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

/// Von Neumann entropy (nats) of plaquettes [0, cut) for a normalized
/// full-space U(1) state. Momentum-sector vectors must be embedded first.
inline double half_chain_entropy(const Eigen::VectorXd& state, const u1::U1Space& space, int cut) {
  if (state.size() != static_cast<Index>(space.dim()))
    throw InvalidArgument("half_chain_entropy: state is not a full-space vector");
  if (cut < 1 || cut >= space.length()) throw InvalidArgument("half_chain_entropy: cut must lie in [1, L-1]");
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw InvalidArgument("half_chain_entropy: state is not normalized (|norm-1| > 1e-8)");
  Index right = 1;
  for (int p = cut; p < space.length(); ++p) right *= static_cast<Index>(space.local_dim());
  const Index left = state.size() / right;
  // Lexicographic order puts plaquette 0 most significant, so the row-major
  // reshape is left-block x right-block.
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
      state.data(), left, right);
  return entanglement_entropy(amp);
}

}  // namespace ksfrag
