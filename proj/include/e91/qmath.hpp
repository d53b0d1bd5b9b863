#pragma once

// Small exact complex linear algebra for photon pairs and Eve's probe.
//
// Index conventions used throughout the library:
//   single photon:  |0>_+ = index 0, |1>_+ = index 1
//   photon pair:    index = 2 * alice_bit + bob_bit
//   probe (x) pair: index = probe_index * 4 + pair_index   (probe-major)

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace e91 {

using Complex = std::complex<double>;

inline constexpr double default_tolerance = 1e-10;

/// Probabilities (and squared norms) at or below this are treated as zero
/// events: collapsed states are reported absent instead of normalized.
inline constexpr double absent_threshold = 1e-15;

/// Measurement basis of a single photon: rectilinear (+) or diagonal (x).
enum class Basis : std::uint8_t { rectilinear = 0, diagonal = 1 };

inline constexpr std::array<Basis, 2> all_bases{Basis::rectilinear, Basis::diagonal};

const char* to_string(Basis b);

class Ket {
 public:
  explicit Ket(std::size_t dim);
  explicit Ket(std::vector<Complex> amplitudes);
  Ket(std::initializer_list<Complex> amplitudes);

  /// Computational basis vector |index> of dimension dim.
  static Ket basis_vector(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amp_.size(); }
  std::span<const Complex> amplitudes() const { return amp_; }

  Complex operator[](std::size_t i) const { return amp_[i]; }
  Complex& operator[](std::size_t i) { return amp_[i]; }

  double norm_squared() const;
  double norm() const;

  /// Throws std::domain_error if the squared norm is at or below absent_threshold.
  Ket normalized() const;

  Ket& operator+=(const Ket& other);
  Ket& operator-=(const Ket& other);
  Ket& operator*=(Complex s);

  friend Ket operator+(Ket a, const Ket& b) { return a += b; }
  friend Ket operator-(Ket a, const Ket& b) { return a -= b; }
  friend Ket operator*(Complex s, Ket a) { return a *= s; }
  friend Ket operator*(Ket a, Complex s) { return a *= s; }

  friend bool operator==(const Ket&, const Ket&) = default;

 private:
  std::vector<Complex> amp_;
};

class Operator {
 public:
  Operator(std::size_t rows, std::size_t cols);
  Operator(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-major nested initializer: {{a, b}, {c, d}}.
  Operator(std::initializer_list<std::initializer_list<Complex>> rows);

  static Operator identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const Complex> entries() const { return entries_; }

  Complex operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  Operator transpose() const;
  Operator adjoint() const;

  Ket apply(const Ket& v) const;

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);

  /// Largest absolute entry; used as the norm for residual checks.
  double max_abs() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> entries_;
};

/// <a|b>, conjugate-linear in a. Throws std::invalid_argument on dim mismatch.
Complex inner(const Ket& a, const Ket& b);

/// 1 - |<a|b>|^2 / (|a|^2 |b|^2), summed as pairwise 2x2 minors so that it
/// stays accurate for nearly parallel kets. Zero if either ket vanishes.
double overlap_defect(const Ket& a, const Ket& b);

/// a (x) b with amplitude at i * b.dim() + j equal to a_i * b_j.
Ket tensor(const Ket& a, const Ket& b);

/// Kronecker product of operators, same index layout as tensor().
Operator kron(const Operator& a, const Operator& b);

/// |bit>_x = (|0>_+ + (-1)^bit |1>_+) / sqrt(2). Throws for bit outside {0,1}.
Ket conjugate_basis_ket(int bit);

/// |bit>_b for either basis.
Ket basis_ket(Basis b, int bit);

/// Bell states on the pair in the rectilinear basis:
///   B0 = (|00>+|11>)/sqrt2, B1 = (|00>-|11>)/sqrt2,
///   B2 = (|01>+|10>)/sqrt2, B3 = (|01>-|10>)/sqrt2.
Ket bell_ket(int c);

/// The four probe kets multiplying |ab> in the product basis where Alice
/// measures in `alice` and Bob in `bob`, ordered by pair index 2a+b.
/// Unnormalized; their squared norms sum to <psi|psi>.
using PairCoefficients = std::array<Ket, 4>;
PairCoefficients pair_basis_coefficients(const Ket& joint, Basis alice, Basis bob);

inline PairCoefficients pair_basis_coefficients(const Ket& joint, Basis common) {
  return pair_basis_coefficients(joint, common, common);
}

/// Inverse of pair_basis_coefficients: sum_k coeff[k] (x) |k>_{alice,bob},
/// expressed back in the rectilinear product basis.
Ket assemble_joint(const PairCoefficients& coefficients, Basis alice, Basis bob);

struct SchmidtPair {
  double major = 0.0;  // lambda0
  double minor = 0.0;  // lambda1 <= lambda0
};

/// Schmidt coefficients of a normalized two-qubit ket from the closed-form
/// singular values of its 2x2 amplitude matrix M[a][b] = psi[2a+b].
/// Throws std::invalid_argument if |<psi|psi> - 1| > tol or dim != 4.
SchmidtPair schmidt_coefficients(const Ket& two_qubit, double tol = default_tolerance);

struct Projection {
  double probability = 0.0;
  /// Normalized post-measurement probe; empty when probability <= absent_threshold.
  std::optional<Ket> probe;
};

/// Measure Alice's photon in `alice` and Bob's in `bob` and condition on
/// outcome (alice_bit, bob_bit). Throws std::invalid_argument if psi is not
/// normalized within tol.
Projection project_outcome(const Ket& joint, Basis alice, Basis bob, int alice_bit, int bob_bit,
                           double tol = default_tolerance);

inline Projection project_outcome(const Ket& joint, Basis common, int alice_bit, int bob_bit,
                                  double tol = default_tolerance) {
  return project_outcome(joint, common, common, alice_bit, bob_bit, tol);
}

}  // namespace e91
