#pragma once

// Gauge-fixed U(1) plaquette ladder without matter.
//
// A basis state is |n_0, ..., n_{L-1}>, n_p the electric flux on the upper
// link of plaquette p. Horizontal links of plaquette p carry n_p (upper and
// lower, opposite sign) and the vertical link to its right carries
// n_p - n_{p+1}. Boundaries are periodic in the plaquette index and the flux
// is hard-truncated at |n_p| <= Lambda.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksfrag/errors.hpp"
#include "ksfrag/operator.hpp"

namespace ksfrag::u1 {

/// Upper-link electric fluxes, one per plaquette.
struct PlaquetteConfig {
  std::vector<int> values;

  std::size_t length() const { return values.size(); }
  int operator[](std::size_t p) const { return values[p]; }

  friend bool operator==(const PlaquetteConfig&, const PlaquetteConfig&) = default;
};

/// The (2*Lambda+1)^L product basis, ordered lexicographically in
/// (n_0, ..., n_{L-1}) with n_0 most significant. States are decoded on
/// demand; nothing per-state is stored.
class U1Space {
 public:
  U1Space(int length, int truncation) : length_(length), truncation_(truncation) {
    if (length < 2) throw InvalidArgument("U1Space: plaquette count L must be >= 2");
    if (truncation < 1) throw InvalidArgument("U1Space: truncation Lambda must be >= 1");
    const auto local = static_cast<std::uint64_t>(2 * static_cast<std::int64_t>(truncation) + 1);
    std::uint64_t dim = 1;
    for (int p = 0; p < length; ++p) {
      if (dim > std::numeric_limits<std::uint64_t>::max() / local ||
          dim * local > static_cast<std::uint64_t>(std::numeric_limits<Index>::max())) {
        const double log2_dim = length * std::log2(static_cast<double>(local));
        throw CapacityError("U1Space: (2*Lambda+1)^L = " + std::to_string(local) + "^" +
                            std::to_string(length) + " needs about " +
                            std::to_string(static_cast<int>(std::ceil(log2_dim))) +
                            " index bits, more than the 63 available");
      }
      dim *= local;
    }
    local_dim_ = static_cast<std::size_t>(local);
    dim_ = static_cast<std::size_t>(dim);
    stride_.assign(static_cast<std::size_t>(length), 1);
    for (int p = length - 2; p >= 0; --p)
      stride_[static_cast<std::size_t>(p)] = stride_[static_cast<std::size_t>(p) + 1] * local_dim_;
  }

  int length() const { return length_; }
  int truncation() const { return truncation_; }
  std::size_t local_dim() const { return local_dim_; }
  std::size_t dim() const { return dim_; }

  /// Index increment for n_p -> n_p + 1.
  std::size_t stride(int plaquette) const { return stride_[static_cast<std::size_t>(plaquette)]; }

  void decode(std::size_t index, std::span<int> out) const {
    for (int p = length_ - 1; p >= 0; --p) {
      out[static_cast<std::size_t>(p)] = static_cast<int>(index % local_dim_) - truncation_;
      index /= local_dim_;
    }
  }

  PlaquetteConfig config(std::size_t index) const {
    if (index >= dim_) throw InvalidArgument("U1Space: index out of range");
    PlaquetteConfig c{std::vector<int>(static_cast<std::size_t>(length_))};
    decode(index, c.values);
    return c;
  }

  std::optional<std::size_t> find(std::span<const int> values) const {
    if (values.size() != static_cast<std::size_t>(length_)) return std::nullopt;
    std::size_t index = 0;
    for (int n : values) {
      if (n < -truncation_ || n > truncation_) return std::nullopt;
      index = index * local_dim_ + static_cast<std::size_t>(n + truncation_);
    }
    return index;
  }

  std::size_t index(const PlaquetteConfig& c) const {
    auto found = find(c.values);
    if (!found) throw InvalidArgument("U1Space: configuration outside the truncated basis");
    return *found;
  }

  /// Index of T|c>, T(n_0, n_1, ..., n_{L-1}) = (n_1, ..., n_{L-1}, n_0).
  std::size_t shift_index(std::size_t index) const {
    const std::size_t head = stride_[0];
    return (index % head) * local_dim_ + index / head;
  }

 private:
  int length_;
  int truncation_;
  std::size_t local_dim_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::size_t> stride_;
};

inline U1Space build_u1_space(int length, int truncation) { return U1Space(length, truncation); }

inline int periodic_next(int p, int length) { return (p + 1) % length; }

/// g^2 * sum_p [E_p^2 + (E_p - E_{p+1})^2 / 2].
inline double electric_energy(std::span<const int> n, double g) {
  const int length = static_cast<int>(n.size());
  double sum = 0.0;
  for (int p = 0; p < length; ++p) {
    const double e = n[static_cast<std::size_t>(p)];
    const double dv = e - n[static_cast<std::size_t>(periodic_next(p, length))];
    sum += e * e + 0.5 * dv * dv;
  }
  return g * g * sum;
}

namespace detail {

template <class Fn>
SymmetricOperator diagonal_from(const U1Space& space, Fn&& value_of) {
  Eigen::VectorXd diag(static_cast<Index>(space.dim()));
  std::vector<int> n(static_cast<std::size_t>(space.length()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    space.decode(i, n);
    diag[static_cast<Index>(i)] = value_of(std::span<const int>(n));
  }
  return SymmetricOperator::diagonal(diag);
}

}  // namespace detail

/// H = sum_p { g^2 [E_p^2 + (E_p - E_{p+1})^2 / 2] - (U_p + U_p^dag) / (2 g^2) }.
inline SymmetricOperator build_u1_hamiltonian(const U1Space& space, double g) {
  if (!(g > 0.0)) throw InvalidArgument("build_u1_hamiltonian: coupling g must be positive");
  const double hop = -1.0 / (2.0 * g * g);
  const int length = space.length();
  const int cap = space.truncation();

  std::vector<Triplet> t;
  t.reserve(space.dim() * (1 + 2 * static_cast<std::size_t>(length)));
  std::vector<int> n(static_cast<std::size_t>(length));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    space.decode(i, n);
    const auto row = static_cast<Index>(i);
    t.emplace_back(row, row, electric_energy(n, g));
    for (int p = 0; p < length; ++p) {
      if (n[static_cast<std::size_t>(p)] + 1 > cap) continue;
      const auto col = static_cast<Index>(i + space.stride(p));
      t.emplace_back(row, col, hop);
      t.emplace_back(col, row, hop);
    }
  }
  return SymmetricOperator::from_triplets(static_cast<Index>(space.dim()), t);
}

/// P(s): number of plaquettes whose upper-link flux equals s (signed).
inline SymmetricOperator counter_P(const U1Space& space, int s) {
  if (s < -space.truncation() || s > space.truncation())
    throw InvalidArgument("counter_P: s must lie in [-Lambda, Lambda]");
  return detail::diagonal_from(space, [s](std::span<const int> n) {
    return static_cast<double>(std::count(n.begin(), n.end(), s));
  });
}

/// P(s) + P(-s) for s > 0, P(0) for s = 0.
inline SymmetricOperator counter_P_symmetric(const U1Space& space, int s) {
  if (s < 0 || s > space.truncation())
    throw InvalidArgument("counter_P_symmetric: s must lie in [0, Lambda]");
  return detail::diagonal_from(space, [s](std::span<const int> n) {
    return static_cast<double>(std::count_if(n.begin(), n.end(), [s](int v) { return std::abs(v) == s; }));
  });
}

/// D(s): number of periodic neighbour pairs with |n_p - n_{p+1}| = s.
inline SymmetricOperator counter_D(const U1Space& space, int s) {
  if (s < 0 || s > 2 * space.truncation())
    throw InvalidArgument("counter_D: s must lie in [0, 2*Lambda]");
  return detail::diagonal_from(space, [s](std::span<const int> n) {
    const int length = static_cast<int>(n.size());
    int count = 0;
    for (int p = 0; p < length; ++p)
      if (std::abs(n[static_cast<std::size_t>(p)] - n[static_cast<std::size_t>(periodic_next(p, length))]) == s)
        ++count;
    return static_cast<double>(count);
  });
}

enum class ElectricObservable {
  /// O_E = sum_p [2 E_p^2 + (E_p - E_{p+1})^2]: both horizontal links and the
  /// right vertical link of every plaquette.
  total,
  /// sum_p E_p^2.
  horizontal,
};

inline SymmetricOperator electric_observable(const U1Space& space, ElectricObservable kind) {
  return detail::diagonal_from(space, [kind](std::span<const int> n) {
    const int length = static_cast<int>(n.size());
    double sum = 0.0;
    for (int p = 0; p < length; ++p) {
      const double e = n[static_cast<std::size_t>(p)];
      if (kind == ElectricObservable::horizontal) {
        sum += e * e;
      } else {
        const double dv = e - n[static_cast<std::size_t>(periodic_next(p, length))];
        sum += 2.0 * e * e + dv * dv;
      }
    }
    return sum;
  });
}

/// Permutation matrix of the cyclic shift T.
inline SparseMatrix shift_operator(const U1Space& space) {
  std::vector<Triplet> t;
  t.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i)
    t.emplace_back(static_cast<Index>(space.shift_index(i)), static_cast<Index>(i), 1.0);
  SparseMatrix m(static_cast<Index>(space.dim()), static_cast<Index>(space.dim()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

/// Translation eigenvalues with real orbit amplitudes.
enum class Momentum { zero, pi };

/// Translation-orbit basis of one real momentum sector.
///
/// Sector state k is sum_j chi(j) T^j |rep_k> / sqrt(period), chi(j) = 1 for
/// k = 0 and (-1)^j for k = pi; orbits whose period is odd carry no k = pi
/// state. Sector ordinals follow the ascending order of orbit representatives
/// (the smallest member index).
class MomentumSector {
 public:
  MomentumSector(const U1Space& space, Momentum momentum) : space_(space), momentum_(momentum) {
    const std::size_t dim = space.dim();
    std::vector<bool> seen(dim, false);
    std::vector<Triplet> t;
    t.reserve(dim);
    for (std::size_t rep = 0; rep < dim; ++rep) {
      if (seen[rep]) continue;
      std::vector<std::size_t> orbit;
      for (std::size_t c = rep; !seen[c]; c = space.shift_index(c)) {
        seen[c] = true;
        orbit.push_back(c);
      }
      if (momentum == Momentum::pi && orbit.size() % 2 != 0) continue;
      const auto col = static_cast<Index>(orbits_.size());
      const double amp = 1.0 / std::sqrt(static_cast<double>(orbit.size()));
      for (std::size_t j = 0; j < orbit.size(); ++j) {
        const double sign = (momentum == Momentum::pi && j % 2 == 1) ? -1.0 : 1.0;
        t.emplace_back(static_cast<Index>(orbit[j]), col, sign * amp);
      }
      orbits_.push_back(std::move(orbit));
    }
    embedding_.resize(static_cast<Index>(dim), static_cast<Index>(orbits_.size()));
    embedding_.setFromTriplets(t.begin(), t.end());
    embedding_.makeCompressed();
  }

  const U1Space& space() const { return space_; }
  Momentum momentum() const { return momentum_; }
  Index dim() const { return static_cast<Index>(orbits_.size()); }

  /// Members of orbit k in shift order, starting at its representative.
  const std::vector<std::size_t>& orbit(Index k) const { return orbits_[static_cast<std::size_t>(k)]; }

  /// full_dim x dim isometry P with orthonormal columns.
  const SparseMatrix& embedding() const { return embedding_; }

  Eigen::VectorXd embed(const Eigen::VectorXd& sector_vector) const {
    if (sector_vector.size() != dim()) throw InvalidArgument("MomentumSector::embed: dimension mismatch");
    return embedding_ * sector_vector;
  }

  /// P^T v: sector coordinates of the component of v inside the sector.
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const {
    if (full.size() != static_cast<Index>(space_.dim()))
      throw InvalidArgument("MomentumSector::restrict: dimension mismatch");
    return embedding_.transpose() * full;
  }

 private:
  U1Space space_;
  Momentum momentum_;
  std::vector<std::vector<std::size_t>> orbits_;
  SparseMatrix embedding_;
};

inline MomentumSector build_momentum_sector(const U1Space& space, Momentum momentum) {
  return MomentumSector(space, momentum);
}

inline MomentumSector build_momentum_zero(const U1Space& space) {
  return MomentumSector(space, Momentum::zero);
}

/// P^T A P on the sector basis. With `check_commutes` the operator must
/// commute with the cyclic shift to 1e-10 (max-norm) or NumericalError is
/// raised with the violating norm.
inline SymmetricOperator project_operator(const SymmetricOperator& op, const MomentumSector& sector,
                                          bool check_commutes = true) {
  if (op.dim() != static_cast<Index>(sector.space().dim()))
    throw InvalidArgument("project_operator: operator and sector live on different spaces");
  if (check_commutes) {
    const double norm = commutator_max_norm(op.matrix(), shift_operator(sector.space()));
    if (norm > 1e-10)
      throw NumericalError("project_operator: operator does not commute with the cyclic shift, ||[A,T]||_max = " +
                           std::to_string(norm));
  }
  const SparseMatrix& p = sector.embedding();
  SparseMatrix reduced = SparseMatrix(p.transpose()) * (op.matrix() * p);
  return SymmetricOperator(std::move(reduced));
}

/// Basis vector |c> of the full space.
inline Eigen::VectorXd basis_state(const U1Space& space, const PlaquetteConfig& c) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Index>(space.dim()));
  v[static_cast<Index>(space.index(c))] = 1.0;
  return v;
}

}  // namespace ksfrag::u1
