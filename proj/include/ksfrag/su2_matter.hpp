#pragma once

// SU(2) gauge theory in 1+1D with one flavour of staggered fermions, open
// boundaries, gauge fields integrated out.
//
// Modes are ordered site-major, colour-minor: mu(v, a) = 2 v + a. Even sites
// are quark sites (mass +m), odd sites antiquark sites (mass -m); the
// staggered vacuum fills both colours of every odd site. Link v joins sites
// v and v+1 and carries the cumulative colour charge of sites 0..v.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ksfrag/errors.hpp"
#include "ksfrag/fock.hpp"
#include "ksfrag/operator.hpp"

namespace ksfrag::su2 {

using fock::Bits;
using fock::FermionOp;
using fock::FockState;

inline constexpr int kColors = 2;

constexpr int mode_index(int site, int color) { return kColors * site + color; }

/// +1 on even (quark) sites, -1 on odd (antiquark) sites.
constexpr int staggering(int site) { return site % 2 == 0 ? 1 : -1; }

/// Fock basis over 2N modes, optionally restricted to a fixed fermion number.
/// States are stored in ascending bit order.
class SU2Space {
 public:
  SU2Space(int sites, std::optional<int> occupancy) : sites_(sites), occupancy_(occupancy) {
    if (sites < 2 || sites % 2 != 0) throw InvalidArgument("SU2Space: site count N must be even and >= 2");
    const int modes = kColors * sites;
    fock::check_modes(modes);
    if (occupancy && (*occupancy < 0 || *occupancy > modes))
      throw InvalidArgument("SU2Space: occupancy must lie in [0, 2N]");

    const double count = occupancy ? binomial(modes, *occupancy) : std::ldexp(1.0, modes);
    if (count > kMaxStates)
      throw CapacityError("SU2Space: " + std::to_string(count) + " basis states requested, limit is " +
                          std::to_string(kMaxStates));
    states_.reserve(static_cast<std::size_t>(count));

    if (!occupancy) {
      for (Bits b = 0; b < (Bits{1} << modes); ++b) states_.push_back(b);
    } else if (*occupancy == 0) {
      states_.push_back(0);
    } else {
      // Gosper's hack walks fixed-popcount words in ascending order.
      const Bits last = ((Bits{1} << *occupancy) - 1) << (modes - *occupancy);
      for (Bits b = (Bits{1} << *occupancy) - 1;; ) {
        states_.push_back(b);
        if (b == last) break;
        const Bits c = b & (~b + 1);
        const Bits r = b + c;
        b = (((r ^ b) >> 2) / c) | r;
      }
    }
    index_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], static_cast<Index>(i));
  }

  int sites() const { return sites_; }
  int modes() const { return kColors * sites_; }
  std::optional<int> occupancy() const { return occupancy_; }
  Index dim() const { return static_cast<Index>(states_.size()); }

  FockState state(Index i) const { return FockState{states_[static_cast<std::size_t>(i)]}; }
  const std::vector<Bits>& states() const { return states_; }

  std::optional<Index> find(Bits bits) const {
    auto it = index_.find(bits);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Eigen::VectorXd basis_vector(Bits bits) const {
    auto i = find(bits);
    if (!i) throw InvalidArgument("SU2Space: state outside the basis");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
    v[*i] = 1.0;
    return v;
  }

 private:
  static constexpr double kMaxStates = 1u << 26;

  static double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
  }

  int sites_;
  std::optional<int> occupancy_;
  std::vector<Bits> states_;
  std::unordered_map<Bits, Index> index_;
};

inline SU2Space build_su2_space(int sites, std::optional<int> occupancy = std::nullopt) {
  return SU2Space(sites, occupancy);
}

/// Matrix of sum_t t over the basis. Images outside the basis (number
/// changing terms in a filtered space) are dropped.
inline SparseMatrix assemble(const SU2Space& space, const std::vector<FermionOp>& terms) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(space.dim()) * 4);
  for (Index col = 0; col < space.dim(); ++col) {
    const Bits in = space.state(col).bits;
    for (const auto& term : terms) {
      auto img = term.apply(in);
      if (!img) continue;
      if (auto row = space.find(img->bits)) t.emplace_back(*row, col, img->amplitude);
    }
  }
  SparseMatrix m(space.dim(), space.dim());
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

inline SymmetricOperator assemble_symmetric(const SU2Space& space, const std::vector<FermionOp>& terms) {
  return SymmetricOperator(assemble(space, terms));
}

namespace detail {

inline FermionOp number(int mode, double c = 1.0) { return {c, {fock::create(mode), fock::annihilate(mode)}}; }

/// Q^z_v = (n_{v,0} - n_{v,1}) / 2 as two terms.
inline std::vector<FermionOp> charge_z(int v) {
  return {number(mode_index(v, 0), 0.5), number(mode_index(v, 1), -0.5)};
}
/// Q^+_v = c^dag_{v,0} c_{v,1}.
inline FermionOp charge_plus(int v) { return {1.0, {fock::create(mode_index(v, 0)), fock::annihilate(mode_index(v, 1))}}; }
/// Q^-_v = c^dag_{v,1} c_{v,0}.
inline FermionOp charge_minus(int v) { return {1.0, {fock::create(mode_index(v, 1)), fock::annihilate(mode_index(v, 0))}}; }

/// Q_v . Q_w = Q^z_v Q^z_w + (Q^+_v Q^-_w + Q^-_v Q^+_w) / 2, scaled by c.
inline void append_charge_dot(std::vector<FermionOp>& out, int v, int w, double c) {
  for (const auto& a : charge_z(v))
    for (const auto& b : charge_z(w)) out.push_back((a * b).scaled(c));
  out.push_back((charge_plus(v) * charge_minus(w)).scaled(0.5 * c));
  out.push_back((charge_minus(v) * charge_plus(w)).scaled(0.5 * c));
}

}  // namespace detail

/// (g^2/2) sum_{links l} sum_a (sum_{v<=l} Q^a_v)^2, expanded into
/// four-fermion strings. Pair (v, w) appears on every link l >= max(v, w).
inline std::vector<FermionOp> electric_terms(int sites, double g) {
  std::vector<FermionOp> out;
  for (int v = 0; v < sites - 1; ++v)
    for (int w = 0; w < sites - 1; ++w) {
      const int links = sites - 1 - std::max(v, w);
      detail::append_charge_dot(out, v, w, 0.5 * g * g * links);
    }
  return out;
}

/// sum_{v,a} (c^dag_{v+1,a} c_{v,a} + h.c.) / 2.
inline std::vector<FermionOp> kinetic_terms(int sites) {
  std::vector<FermionOp> out;
  for (int v = 0; v + 1 < sites; ++v)
    for (int a = 0; a < kColors; ++a) {
      FermionOp hop{0.5, {fock::create(mode_index(v + 1, a)), fock::annihilate(mode_index(v, a))}};
      out.push_back(hop);
      out.push_back(hop.adjoint());
    }
  return out;
}

/// m sum_{v,a} eps(v) n_{v,a}.
inline std::vector<FermionOp> mass_terms(int sites, double m) {
  std::vector<FermionOp> out;
  for (int v = 0; v < sites; ++v)
    for (int a = 0; a < kColors; ++a) out.push_back(detail::number(mode_index(v, a), m * staggering(v)));
  return out;
}

struct SU2Hamiltonian {
  SymmetricOperator electric;
  SymmetricOperator kinetic;
  SymmetricOperator mass;
  SymmetricOperator total;
};

inline SU2Hamiltonian build_su2_parts(const SU2Space& space, double g, double m) {
  if (!(g > 0.0)) throw InvalidArgument("build_su2_hamiltonian: coupling g must be positive");
  SU2Hamiltonian h;
  h.electric = assemble_symmetric(space, electric_terms(space.sites(), g));
  h.kinetic = assemble_symmetric(space, kinetic_terms(space.sites()));
  h.mass = assemble_symmetric(space, mass_terms(space.sites(), m));
  h.total = h.electric + h.kinetic + h.mass;
  return h;
}

inline SymmetricOperator build_su2_hamiltonian(const SU2Space& space, double g, double m) {
  return build_su2_parts(space, g, m).total;
}

/// sum_a (E^a_link)^2 with E_link = sum_{v<=link} Q_v; eigenvalues j(j+1).
inline SymmetricOperator link_casimir(const SU2Space& space, int link) {
  if (link < 0 || link > space.sites() - 2) throw InvalidArgument("link_casimir: link must lie in [0, N-2]");
  std::vector<FermionOp> terms;
  for (int v = 0; v <= link; ++v)
    for (int w = 0; w <= link; ++w) detail::append_charge_dot(terms, v, w, 1.0);
  return assemble_symmetric(space, terms);
}

/// sum_a (Q^a_v)^2 on one site.
inline SymmetricOperator site_casimir(const SU2Space& space, int site) {
  if (site < 0 || site >= space.sites()) throw InvalidArgument("site_casimir: site out of range");
  std::vector<FermionOp> terms;
  detail::append_charge_dot(terms, site, site, 1.0);
  return assemble_symmetric(space, terms);
}

/// sum_a (Q^a_total)^2; zero exactly on global colour singlets.
inline SymmetricOperator total_charge_squared(const SU2Space& space) {
  std::vector<FermionOp> terms;
  for (int v = 0; v < space.sites(); ++v)
    for (int w = 0; w < space.sites(); ++w) detail::append_charge_dot(terms, v, w, 1.0);
  return assemble_symmetric(space, terms);
}

inline SymmetricOperator number_operator(const SU2Space& space) {
  std::vector<FermionOp> terms;
  for (int mu = 0; mu < space.modes(); ++mu) terms.push_back(detail::number(mu));
  return assemble_symmetric(space, terms);
}

/// Total colour charge Q^a = sum_v (1/2) chi^dag_v sigma^a chi_v.
///
/// Q^x and Q^z are real symmetric; Q^y is i times a real antisymmetric
/// matrix. The operator is `imaginary ? i * matrix : matrix`.
struct ChargeOperator {
  SparseMatrix matrix;
  bool imaginary = false;
};

inline ChargeOperator color_charge(const SU2Space& space, int a) {
  std::vector<FermionOp> terms;
  for (int v = 0; v < space.sites(); ++v) {
    switch (a) {
      case 0:  // (Q^+ + Q^-) / 2
        terms.push_back(detail::charge_plus(v).scaled(0.5));
        terms.push_back(detail::charge_minus(v).scaled(0.5));
        break;
      case 1:  // (Q^+ - Q^-) / (2i) = i * (Q^- - Q^+) / 2
        terms.push_back(detail::charge_plus(v).scaled(-0.5));
        terms.push_back(detail::charge_minus(v).scaled(0.5));
        break;
      case 2:
        for (auto& t : detail::charge_z(v)) terms.push_back(t);
        break;
      default:
        throw InvalidArgument("color_charge: component must be 0, 1 or 2");
    }
  }
  return ChargeOperator{assemble(space, terms), a == 1};
}

/// Both colours occupied on every odd site, even sites empty.
inline FockState staggered_vacuum(const SU2Space& space) {
  Bits bits = 0;
  for (int v = 1; v < space.sites(); v += 2)
    for (int a = 0; a < kColors; ++a) bits |= fock::mode_mask(mode_index(v, a));
  if (!space.find(bits))
    throw InvalidArgument("staggered_vacuum: the half-filled vacuum is not in the filtered sector");
  return FockState{bits};
}

/// |phi(x, D)>: prod_{s=0}^{D-1} sum_a (chi^dag_{x-s,a} chi_{x+s+1,a} +
/// chi_{x-s,a} chi^dag_{x+s+1,a}) / sqrt(2) applied to the staggered vacuum,
/// then normalized.
inline Eigen::VectorXd build_phi_state(const SU2Space& space, int x, int pairs) {
  if (pairs < 0) throw InvalidArgument("build_phi_state: pair count D must be >= 0");
  if (x % 2 != 0) throw InvalidArgument("build_phi_state: x must be an even (quark) site");
  if (pairs > 0 && (x - (pairs - 1) < 0 || x + pairs > space.sites() - 1))
    throw InvalidArgument("build_phi_state: requires x-(D-1) >= 0 and x+D <= N-1");
  if (x < 0 || x >= space.sites()) throw InvalidArgument("build_phi_state: x out of range");

  const double r = 1.0 / std::sqrt(2.0);
  std::map<Bits, double> amp{{staggered_vacuum(space).bits, 1.0}};
  for (int s = pairs - 1; s >= 0; --s) {
    std::vector<FermionOp> factor;
    for (int a = 0; a < kColors; ++a) {
      const int left = mode_index(x - s, a);
      const int right = mode_index(x + s + 1, a);
      factor.push_back({r, {fock::create(left), fock::annihilate(right)}});
      factor.push_back({r, {fock::annihilate(left), fock::create(right)}});
    }
    std::map<Bits, double> next;
    for (const auto& [bits, c] : amp)
      for (const auto& term : factor)
        if (auto img = term.apply(bits)) next[img->bits] += c * img->amplitude;
    amp = std::move(next);
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(space.dim());
  for (const auto& [bits, c] : amp) {
    auto i = space.find(bits);
    if (!i) throw InvalidArgument("build_phi_state: image leaves the basis");
    v[*i] += c;
  }
  const double norm = v.norm();
  if (norm < 1e-12) throw InvalidArgument("build_phi_state: zero vector, site/vacuum convention mismatch");
  return v / norm;
}

/// Orthonormal basis (columns) of the global colour-singlet subspace, the
/// null space of sum_a (Q^a_total)^2. With open boundaries Gauss's law leaves
/// no flux beyond the last site, so physical states are singlets.
inline Eigen::MatrixXd singlet_basis(const SU2Space& space, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(total_charge_squared(space).dense());
  if (es.info() != Eigen::Success) throw NumericalError("singlet_basis: eigensolver failed");
  Index count = 0;
  while (count < es.eigenvalues().size() && es.eigenvalues()[count] < tol) ++count;
  Eigen::MatrixXd basis = es.eigenvectors().leftCols(count);
  for (Index k = 0; k < count; ++k) {
    Index pivot = 0;
    basis.col(k).cwiseAbs().maxCoeff(&pivot);
    if (basis(pivot, k) < 0) basis.col(k) *= -1.0;
  }
  return basis;
}

}  // namespace ksfrag::su2
