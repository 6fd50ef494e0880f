#pragma once

// Bit-packed fermionic occupation states and products of ladder operators.
//
// Bit mu of a FockState is the occupation of mode mu. Acting with c_mu or
// c^dag_mu picks up (-1)^(number of occupied modes with index < mu); a
// product is applied factor by factor from right to left.

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksfrag/errors.hpp"

namespace ksfrag::fock {

using Bits = std::uint64_t;
inline constexpr int kMaxModes = 64;

struct FockState {
  Bits bits = 0;

  bool occupied(int mode) const { return (bits >> mode) & Bits{1}; }
  int count() const { return std::popcount(bits); }

  friend bool operator==(FockState, FockState) = default;
  friend auto operator<=>(FockState, FockState) = default;
};

inline Bits mode_mask(int mode) { return Bits{1} << mode; }

/// +1 or -1: parity of the occupied modes strictly below `mode`.
inline int sign_below(Bits bits, int mode) {
  const Bits below = mode == 0 ? Bits{0} : (bits & (~Bits{0} >> (kMaxModes - mode)));
  return (std::popcount(below) & 1) ? -1 : 1;
}

struct LadderOp {
  int mode = 0;
  bool creation = false;
};

inline LadderOp create(int mode) { return {mode, true}; }
inline LadderOp annihilate(int mode) { return {mode, false}; }

/// Result of applying a single ladder operator: nullopt when it annihilates
/// the state, otherwise the new state and the fermionic sign.
struct Signed {
  int sign = 1;
  Bits bits = 0;
};

inline std::optional<Signed> apply(LadderOp op, Bits bits) {
  const bool occ = (bits >> op.mode) & Bits{1};
  if (occ == op.creation) return std::nullopt;
  return Signed{sign_below(bits, op.mode), bits ^ mode_mask(op.mode)};
}

/// coefficient * factors[0] * factors[1] * ... (leftmost factor acts last).
struct FermionOp {
  double coefficient = 1.0;
  std::vector<LadderOp> factors;

  struct Image {
    double amplitude = 0.0;
    Bits bits = 0;
  };

  std::optional<Image> apply(Bits bits) const {
    int sign = 1;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
      auto r = fock::apply(*it, bits);
      if (!r) return std::nullopt;
      sign *= r->sign;
      bits = r->bits;
    }
    return Image{coefficient * sign, bits};
  }

  /// Operator product (this * rhs).
  FermionOp operator*(const FermionOp& rhs) const {
    FermionOp out{coefficient * rhs.coefficient, factors};
    out.factors.insert(out.factors.end(), rhs.factors.begin(), rhs.factors.end());
    return out;
  }

  FermionOp scaled(double s) const { return FermionOp{coefficient * s, factors}; }

  /// Hermitian conjugate: reversed order, creation <-> annihilation.
  FermionOp adjoint() const {
    FermionOp out{coefficient, {}};
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) out.factors.push_back({it->mode, !it->creation});
    return out;
  }
};

inline void check_modes(int modes) {
  if (modes < 1 || modes > kMaxModes)
    throw CapacityError("fock: " + std::to_string(modes) + " modes requested, at most " +
                        std::to_string(kMaxModes) + " fit in one 64-bit word");
}

}  // namespace ksfrag::fock
