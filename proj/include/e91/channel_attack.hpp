#pragma once

// Eve restricted to the channel between the source and Bob. A unitary on
// probe (x) Bob's photon maps |F>|b>_+ to |F_b0>|0>_+ + |F_b1>|1>_+, and the
// pair Alice and Bob end up holding is sum_ab |F_ab>/sqrt2 (x) |ab>_+.

#include <array>
#include <random>

#include "e91/qmath.hpp"

namespace e91 {

class ChannelAttack {
 public:
  /// Probe kets in the order F_00, F_01, F_10, F_11. No validation here;
  /// see validate_unitarity().
  explicit ChannelAttack(std::array<Ket, 4> f);

  /// Decompose U (on probe (x) Bob photon, index probe * 2 + bob) applied to
  /// |initial_probe> (x) |b>_+ into the F kets. U must be square with
  /// dimension 2 * initial_probe.dim().
  static ChannelAttack from_unitary(const Operator& u, const Ket& initial_probe);

  std::size_t probe_dim() const { return f_[0].dim(); }

  /// F_{alice_bit, bob_bit}.
  const Ket& f(int alice_bit, int bob_bit) const {
    return f_.at(static_cast<std::size_t>(2 * alice_bit + bob_bit));
  }

 private:
  std::array<Ket, 4> f_;
};

struct UnitarityResiduals {
  bool valid = false;
  double norm_zero = 0.0;  // |<F00|F00> + <F01|F01> - 1|
  double norm_one = 0.0;   // |<F10|F10> + <F11|F11> - 1|
  double cross = 0.0;      // |<F00|F10> + <F01|F11>|

  double max() const;
};

UnitarityResiduals validate_unitarity(const ChannelAttack& f, double tol = default_tolerance);

/// Joint probe (x) pair state after the attack. Throws std::invalid_argument
/// if the attack fails validate_unitarity at tol.
Ket apply_channel_attack(const ChannelAttack& f, double tol = default_tolerance);

/// Alice's reduced density matrix: trace out the probe and Bob's photon.
Operator alice_marginal(const Ket& joint);

/// Eigenvalues of a 2x2 Hermitian matrix, largest first.
std::array<double, 2> hermitian_eigenvalues(const Operator& rho);

/// || (A (x) I) v - (I (x) A^T) v || with v = |00>_+ + |11>_+.
double remote_transpose_residual(const Operator& a);

/// 1/sqrt2 minus the smaller Schmidt coefficient of normalized (A (x) B)|B0>.
/// Zero iff the state is still maximally entangled, i.e. reachable as
/// (I (x) C)|B0> with C unitary. Throws std::invalid_argument if the vector
/// vanishes.
double unitary_remote_pair_gap(const Operator& a, const Operator& b);

/// Haar-like random unitary: Gram-Schmidt on a complex Gaussian matrix.
Operator random_unitary(std::size_t n, std::mt19937_64& rng);

/// Random valid channel attack on a two-dimensional probe.
ChannelAttack random_channel_attack(std::mt19937_64& rng);

}  // namespace e91
