#pragma once

// Casimir-cutoff effective Hamiltonians and Krylov-sector enumeration.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ksfrag/errors.hpp"
#include "ksfrag/operator.hpp"
#include "ksfrag/su2_matter.hpp"
#include "ksfrag/u1_ladder.hpp"

namespace ksfrag {

/// One link at or above the cutoff: position and representation label.
/// U(1): horizontal link p has position p and label n_p, the vertical link
/// right of plaquette p has position L + p and label n_p - n_{p+1}.
/// SU(2): position is the link index and the label is 2j.
struct FrozenLink {
  int link = 0;
  int label = 0;

  friend bool operator==(const FrozenLink&, const FrozenLink&) = default;
  friend auto operator<=>(const FrozenLink&, const FrozenLink&) = default;
};

/// Links whose Casimir is >= cutoff^2, sorted by position.
struct FrozenPattern {
  std::vector<FrozenLink> links;

  bool empty() const { return links.empty(); }

  friend bool operator==(const FrozenPattern&, const FrozenPattern&) = default;
  friend auto operator<=>(const FrozenPattern&, const FrozenPattern&) = default;
};

inline FrozenPattern u1_frozen_pattern(std::span<const int> n, double cutoff) {
  const int length = static_cast<int>(n.size());
  const double c2 = cutoff * cutoff;
  FrozenPattern out;
  for (int p = 0; p < length; ++p) {
    const int h = n[static_cast<std::size_t>(p)];
    if (static_cast<double>(h) * h >= c2) out.links.push_back({p, h});
  }
  for (int p = 0; p < length; ++p) {
    const int v = n[static_cast<std::size_t>(p)] - n[static_cast<std::size_t>(u1::periodic_next(p, length))];
    if (static_cast<double>(v) * v >= c2) out.links.push_back({length + p, v});
  }
  return out;
}

inline std::vector<FrozenPattern> u1_frozen_patterns(const u1::U1Space& space, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("u1_frozen_patterns: cutoff must be positive");
  std::vector<FrozenPattern> out;
  out.reserve(space.dim());
  std::vector<int> n(static_cast<std::size_t>(space.length()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    space.decode(i, n);
    out.push_back(u1_frozen_pattern(n, cutoff));
  }
  return out;
}

/// Dense pattern ids: equal ids iff equal patterns. Ids follow the first
/// occurrence in basis order.
inline std::vector<Index> pattern_ids(const std::vector<FrozenPattern>& patterns) {
  std::map<FrozenPattern, Index> seen;
  std::vector<Index> ids;
  ids.reserve(patterns.size());
  for (const auto& p : patterns) ids.push_back(seen.try_emplace(p, static_cast<Index>(seen.size())).first->second);
  return ids;
}

/// H with every off-diagonal element between unequal frozen patterns removed.
inline SymmetricOperator effective_hamiltonian(const SymmetricOperator& h, const std::vector<FrozenPattern>& patterns) {
  if (static_cast<Index>(patterns.size()) != h.dim())
    throw InvalidArgument("effective_hamiltonian: " + std::to_string(patterns.size()) + " patterns for dimension " +
                          std::to_string(h.dim()));
  const std::vector<Index> id = pattern_ids(patterns);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(h.matrix().nonZeros()));
  for (Index k = 0; k < h.matrix().outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(h.matrix(), k); it; ++it)
      if (it.row() == it.col() || id[static_cast<std::size_t>(it.row())] == id[static_cast<std::size_t>(it.col())])
        t.emplace_back(it.row(), it.col(), it.value());
  return SymmetricOperator::from_triplets(h.dim(), t);
}

/// Disjoint sets with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& px = parent_[static_cast<std::size_t>(x)];
      px = parent_[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  }

  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    return true;
  }

 private:
  std::vector<Index> parent_;
  std::vector<Index> size_;
};

/// Connected components of the off-diagonal graph, numbered by their smallest
/// member so the result does not depend on traversal order.
struct SectorReport {
  Index dimension = 0;
  Index count = 0;
  Index largest = 0;
  std::vector<Index> labels;           // sector of every basis state
  std::vector<Index> sizes;            // per sector
  std::vector<Index> representatives;  // smallest member per sector, ascending
  std::map<Index, Index> histogram;    // sector size -> number of sectors
};

inline SectorReport connected_sectors(const SparseMatrix& m, double tol) {
  const Index n = m.rows();
  UnionFind uf(n);
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && std::abs(it.value()) > tol) uf.unite(it.row(), it.col());

  SectorReport r;
  r.dimension = n;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<Index> root_label(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    auto& slot = root_label[static_cast<std::size_t>(uf.find(i))];
    if (slot < 0) {
      slot = r.count++;
      r.representatives.push_back(i);
      r.sizes.push_back(0);
    }
    r.labels[static_cast<std::size_t>(i)] = slot;
    ++r.sizes[static_cast<std::size_t>(slot)];
  }
  for (Index s : r.sizes) {
    ++r.histogram[s];
    r.largest = std::max(r.largest, s);
  }
  return r;
}

inline SectorReport krylov_sectors(const SymmetricOperator& h_eff, double tol = 1e-14) {
  if (h_eff.asymmetry() > 1e-12) throw NumericalError("krylov_sectors: input is not symmetric");
  return connected_sectors(h_eff.matrix(), tol);
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_slope: abscissae are all equal");
  return sxy / sxx;
}

struct ScalingRow {
  int length = 0;
  double cutoff = 0.0;
  Index count = 0;
  Index largest = 0;
  Index dimension = 0;
};

struct SectorScaling {
  std::vector<ScalingRow> rows;
  double growth_rate = 0.0;  // slope of ln(count) against L
};

/// Sector count of the U(1) ladder effective Hamiltonian for each length.
/// The connectivity does not depend on g, so g = 1 is used.
inline SectorScaling sector_scaling(int truncation, double cutoff, std::span<const int> lengths) {
  if (lengths.empty()) throw InvalidArgument("sector_scaling: empty length list");
  SectorScaling out;
  std::vector<double> xs, ys;
  for (int length : lengths) {
    const u1::U1Space space(length, truncation);
    const auto h_eff = effective_hamiltonian(u1::build_u1_hamiltonian(space, 1.0), u1_frozen_patterns(space, cutoff));
    const SectorReport r = krylov_sectors(h_eff);
    out.rows.push_back({length, cutoff, r.count, r.largest, r.dimension});
    xs.push_back(length);
    ys.push_back(std::log(static_cast<double>(r.count)));
  }
  if (xs.size() >= 2) out.growth_rate = fit_slope(xs, ys);
  return out;
}

/// Basis of joint eigenvectors of the link Casimirs C_0, ..., C_{N-2} and
/// the spins j_l of every column. Columns are ordered lexicographically in
/// (j_0, j_1, ...).
struct LinkRepBasis {
  Eigen::MatrixXd vectors;
  std::vector<std::vector<int>> twice_j;  // [column][link]
};

inline int twice_spin(double casimir) {
  const double j = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(0.0, casimir)) - 1.0);
  const int tj = static_cast<int>(std::lround(2.0 * j));
  const double back = 0.25 * tj * (tj + 2);
  if (std::abs(back - casimir) > 1e-8)
    throw NumericalError("twice_spin: Casimir eigenvalue " + std::to_string(casimir) + " is not of the form j(j+1)");
  return tj;
}

/// `start` spans an invariant subspace of every link Casimir (for example the
/// identity or the singlet basis of a fixed-occupancy sector).
inline LinkRepBasis su2_link_rep_basis(const su2::SU2Space& space, const Eigen::MatrixXd& start) {
  if (start.rows() != space.dim()) throw InvalidArgument("su2_link_rep_basis: start basis dimension mismatch");
  struct Group {
    std::vector<int> labels;
    Eigen::MatrixXd cols;
  };
  std::vector<Group> groups{{{}, start}};
  for (int link = 0; link + 1 < space.sites(); ++link) {
    const SparseMatrix c = su2::link_casimir(space, link).matrix();
    std::vector<Group> next;
    for (const auto& g : groups) {
      Eigen::MatrixXd m = g.cols.transpose() * (c * g.cols);
      m = 0.5 * (m + m.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      if (es.info() != Eigen::Success) throw NumericalError("su2_link_rep_basis: eigensolver failed");
      const Eigen::MatrixXd rotated = g.cols * es.eigenvectors();
      Index k = 0;
      while (k < rotated.cols()) {
        const int tj = twice_spin(es.eigenvalues()[k]);
        Index end = k;
        while (end < rotated.cols() && twice_spin(es.eigenvalues()[end]) == tj) ++end;
        Group sub{g.labels, rotated.middleCols(k, end - k)};
        sub.labels.push_back(tj);
        next.push_back(std::move(sub));
        k = end;
      }
    }
    groups = std::move(next);
  }

  LinkRepBasis out;
  out.vectors.resize(space.dim(), start.cols());
  Index col = 0;
  for (const auto& g : groups) {
    out.vectors.middleCols(col, g.cols.cols()) = g.cols;
    for (Index k = 0; k < g.cols.cols(); ++k) out.twice_j.push_back(g.labels);
    col += g.cols.cols();
  }
  for (Index k = 0; k < out.vectors.cols(); ++k) {
    Index pivot = 0;
    out.vectors.col(k).cwiseAbs().maxCoeff(&pivot);
    if (out.vectors(pivot, k) < 0) out.vectors.col(k) *= -1.0;
  }
  return out;
}

inline std::vector<FrozenPattern> su2_frozen_patterns(const LinkRepBasis& basis, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("su2_frozen_patterns: cutoff must be positive");
  std::vector<FrozenPattern> out;
  out.reserve(basis.twice_j.size());
  for (const auto& js : basis.twice_j) {
    FrozenPattern p;
    for (std::size_t l = 0; l < js.size(); ++l) {
      const double casimir = 0.25 * js[l] * (js[l] + 2);
      if (casimir >= cutoff * cutoff) p.links.push_back({static_cast<int>(l), js[l]});
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Edge tolerance for Krylov sectors of operators rotated into the
/// link-representation basis, whose structural zeros carry rounding noise.
inline constexpr double kRotatedEdgeTolerance = 1e-10;

}  // namespace ksfrag
