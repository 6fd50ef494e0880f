#pragma once

// Second-order Schrieffer-Wolff effective Hamiltonians.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ksfrag/errors.hpp"
#include "ksfrag/fragmentation.hpp"
#include "ksfrag/operator.hpp"
#include "ksfrag/u1_ladder.hpp"

namespace ksfrag {

struct SWSplit {
  SymmetricOperator h0;  // pattern-preserving part
  SymmetricOperator v;   // pattern-changing part, H - H0
};

inline SWSplit sw_split(const SymmetricOperator& h, const std::vector<FrozenPattern>& patterns) {
  SymmetricOperator h0 = effective_hamiltonian(h, patterns);
  SymmetricOperator v = h - h0;
  return {std::move(h0), std::move(v)};
}

struct SWOptions {
  double gap_tolerance = 1e-8;       // levels closer than this are one level
  double coupling_tolerance = 1e-12; // |V_ik| above this between one level is a resonance
  double symmetry_tolerance = 1e-12;
};

/// Eigenbasis of H0, diagonalized separately on every connected block of
/// its off-diagonal graph and then sorted by energy (stable).
struct BlockEigenbasis {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
};

inline BlockEigenbasis block_eigenbasis(const SymmetricOperator& h0) {
  const SectorReport blocks = connected_sectors(h0.matrix(), 1e-14);
  const Index n = h0.dim();
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(blocks.count));
  for (Index i = 0; i < n; ++i) members[static_cast<std::size_t>(blocks.labels[static_cast<std::size_t>(i)])].push_back(i);

  Eigen::VectorXd e(n);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd dense = h0.dense();
  Index col = 0;
  for (const auto& idx : members) {
    const auto size = static_cast<Index>(idx.size());
    Eigen::MatrixXd sub(size, size);
    for (Index a = 0; a < size; ++a)
      for (Index b = 0; b < size; ++b) sub(a, b) = dense(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    if (es.info() != Eigen::Success) throw NumericalError("sw_second_order: H0 block eigensolver failed");
    for (Index k = 0; k < size; ++k, ++col) {
      e[col] = es.eigenvalues()[k];
      for (Index a = 0; a < size; ++a) u(idx[static_cast<std::size_t>(a)], col) = es.eigenvectors()(a, k);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return e[a] < e[b]; });
  BlockEigenbasis out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.energies[k] = e[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = u.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

struct SWResult {
  SymmetricOperator effective;  // H0 + C in the original basis
  Eigen::MatrixXd correction;   // C in the original basis
  double correction_norm = 0.0; // spectral norm of C
};

namespace detail {

inline void check_sw_inputs(const SymmetricOperator& h0, const SymmetricOperator& v, const SWOptions& opt) {
  if (h0.dim() != v.dim()) throw InvalidArgument("sw_second_order: H0 and V dimensions differ");
  if (h0.asymmetry() > opt.symmetry_tolerance || v.asymmetry() > opt.symmetry_tolerance)
    throw NumericalError("sw_second_order: asymmetric input");
}

/// C_if = 1/2 sum_k V_ik V_kf (1/(E_i - E_k) - 1/(E_k - E_f)) in the H0
/// eigenbasis; terms with a vanishing denominator are checked for resonance
/// and dropped.
inline Eigen::MatrixXd sw_correction_eigenbasis(const BlockEigenbasis& basis, const Eigen::MatrixXd& vt,
                                                const SWOptions& opt) {
  const Index n = vt.rows();
  Eigen::MatrixXd a(n, n);  // V_ik / (E_i - E_k)
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      const double de = basis.energies[i] - basis.energies[k];
      if (std::abs(de) < opt.gap_tolerance) {
        if (i != k && std::abs(vt(i, k)) > opt.coupling_tolerance)
          throw ResonanceError("sw_second_order: V couples degenerate H0 levels " + std::to_string(i) + " and " +
                               std::to_string(k) + " (E = " + std::to_string(basis.energies[i]) +
                               ", |V| = " + std::to_string(std::abs(vt(i, k))) + ")");
        a(i, k) = 0.0;
      } else {
        a(i, k) = vt(i, k) / de;
      }
    }
  // sum_k V_ik V_kf / (E_k - E_f) = (V A)_if
  return 0.5 * (a * vt - vt * a);
}

inline SWResult rotate_back(const SymmetricOperator& h0, const BlockEigenbasis& basis, const Eigen::MatrixXd& c_eig) {
  Eigen::MatrixXd c = basis.vectors * c_eig * basis.vectors.transpose();
  c = 0.5 * (c + c.transpose()).eval();
  const Eigen::MatrixXd sym = 0.5 * (c_eig + c_eig.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double norm = sym.size() == 0 ? 0.0 : es.eigenvalues().cwiseAbs().maxCoeff();
  return {SymmetricOperator::from_dense(h0.dense() + c), c, norm};
}

}  // namespace detail

/// H0 + second-order correction, keeping only elements within one H0 level.
inline SWResult sw_second_order(const SymmetricOperator& h0, const SymmetricOperator& v, const SWOptions& opt = {}) {
  detail::check_sw_inputs(h0, v, opt);
  const BlockEigenbasis basis = block_eigenbasis(h0);
  const Eigen::MatrixXd vt = basis.vectors.transpose() * (v.matrix() * basis.vectors);
  Eigen::MatrixXd c = detail::sw_correction_eigenbasis(basis, vt, opt);
  for (Index i = 0; i < c.rows(); ++i)
    for (Index f = 0; f < c.cols(); ++f)
      if (std::abs(basis.energies[i] - basis.energies[f]) >= opt.gap_tolerance) c(i, f) = 0.0;
  return detail::rotate_back(h0, basis, c);
}

/// The same formula for every (i, f), without the within-level projection.
inline SWResult sw_second_order_raw(const SymmetricOperator& h0, const SymmetricOperator& v, const SWOptions& opt = {}) {
  detail::check_sw_inputs(h0, v, opt);
  const BlockEigenbasis basis = block_eigenbasis(h0);
  const Eigen::MatrixXd vt = basis.vectors.transpose() * (v.matrix() * basis.vectors);
  return detail::rotate_back(h0, basis, detail::sw_correction_eigenbasis(basis, vt, opt));
}

/// Slope of ln y against ln x.
inline double fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("fit_power_law: non-positive value in log-log fit");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_slope(lx, ly);
}

/// Second-order correction norm of the U(1) ladder split at cutoff E.
inline double u1_sw_correction_norm(int length, int truncation, double g, double cutoff) {
  const u1::U1Space space(length, truncation);
  const auto split = sw_split(u1::build_u1_hamiltonian(space, g), u1_frozen_patterns(space, cutoff));
  return sw_second_order(split.h0, split.v).correction_norm;
}

struct SWScalingRow {
  int length = 0;
  int truncation = 0;
  double g = 0.0;
  double cutoff = 0.0;
  Index dimension = 0;
  double correction_norm = 0.0;
};

struct SWScaling {
  std::vector<SWScalingRow> rows;
  double exponent = 0.0;  // d ln(norm) / d ln(scanned variable)
};

/// Correction norm against the cutoff at fixed g, truncation tied to the
/// cutoff (Lambda = E) so every cutoff sees the same flux-gap structure.
inline SWScaling sw_scaling_vs_cutoff(int length, double g, std::span<const int> cutoffs) {
  SWScaling out;
  std::vector<double> xs, ys;
  for (int e : cutoffs) {
    const double norm = u1_sw_correction_norm(length, e, g, e);
    Index dim = 1;
    for (int p = 0; p < length; ++p) dim *= 2 * e + 1;
    out.rows.push_back({length, e, g, static_cast<double>(e), dim, norm});
    xs.push_back(e);
    ys.push_back(norm);
  }
  if (xs.size() >= 2) out.exponent = fit_power_law(xs, ys);
  return out;
}

/// Correction norm against g at fixed cutoff (Lambda = E).
inline SWScaling sw_scaling_vs_coupling(int length, int cutoff, std::span<const double> couplings) {
  SWScaling out;
  std::vector<double> xs, ys;
  Index dim = 1;
  for (int p = 0; p < length; ++p) dim *= 2 * cutoff + 1;
  for (double g : couplings) {
    const double norm = u1_sw_correction_norm(length, cutoff, g, cutoff);
    out.rows.push_back({length, cutoff, g, static_cast<double>(cutoff), dim, norm});
    xs.push_back(g);
    ys.push_back(norm);
  }
  if (xs.size() >= 2) out.exponent = fit_power_law(xs, ys);
  return out;
}

}  // namespace ksfrag
