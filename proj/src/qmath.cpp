#include "e91/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "e91/kernels.hpp"

namespace e91 {

namespace {

constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

void require_bit(int bit, const char* what) {
  if (bit != 0 && bit != 1) {
    throw std::invalid_argument(std::string(what) + ": bit must be 0 or 1, got " +
                                std::to_string(bit));
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// Amplitude of |bit>_b on the rectilinear vector |k>_+. Both basis changes
// are real, so <bit_b|k_+> needs no conjugation.
double basis_amplitude(Basis b, int bit, int k) {
  if (b == Basis::rectilinear) return bit == k ? 1.0 : 0.0;
  return (bit == 1 && k == 1) ? -inv_sqrt2 : inv_sqrt2;
}

std::size_t probe_dim_of(const Ket& joint) {
  if (joint.dim() % 4 != 0) {
    throw std::invalid_argument("joint ket dimension " + std::to_string(joint.dim()) +
                                " is not a multiple of 4");
  }
  return joint.dim() / 4;
}

}  // namespace

const char* to_string(Basis b) { return b == Basis::rectilinear ? "+" : "x"; }

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(std::size_t dim) : amp_(dim) {
  if (dim == 0) throw std::invalid_argument("Ket dimension must be positive");
}

Ket::Ket(std::vector<Complex> amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.empty()) throw std::invalid_argument("Ket dimension must be positive");
}

Ket::Ket(std::initializer_list<Complex> amplitudes)
    : Ket(std::vector<Complex>(amplitudes)) {}

Ket Ket::basis_vector(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("basis index out of range");
  Ket v(dim);
  v.amp_[index] = 1.0;
  return v;
}

double Ket::norm_squared() const { return kernels::cdot(amp_, amp_).real(); }

double Ket::norm() const { return std::sqrt(norm_squared()); }

Ket Ket::normalized() const {
  const double n2 = norm_squared();
  if (n2 <= absent_threshold) throw std::domain_error("cannot normalize a zero ket");
  return *this * Complex(1.0 / std::sqrt(n2));
}

Ket& Ket::operator+=(const Ket& other) {
  require_same_dim(dim(), other.dim(), "Ket +=");
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += other.amp_[i];
  return *this;
}

Ket& Ket::operator-=(const Ket& other) {
  require_same_dim(dim(), other.dim(), "Ket -=");
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] -= other.amp_[i];
  return *this;
}

Ket& Ket::operator*=(Complex s) {
  for (auto& a : amp_) a *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("Operator dimensions must be positive");
}

Operator::Operator(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("Operator dimensions must be positive");
  if (entries_.size() != rows * cols) {
    throw std::invalid_argument("Operator entry count does not match rows*cols");
  }
}

Operator::Operator(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Operator dimensions must be positive");
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged Operator initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

Operator Operator::identity(std::size_t n) {
  Operator id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

Operator Operator::transpose() const {
  Operator t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Operator Operator::adjoint() const {
  Operator t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

Ket Operator::apply(const Ket& v) const {
  require_same_dim(cols_, v.dim(), "Operator::apply");
  Ket out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    Complex acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a.cols_, b.rows_, "Operator product");
  Operator out(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex ark = a(r, k);
      for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_dim(a.rows_, b.rows_, "Operator difference");
  require_same_dim(a.cols_, b.cols_, "Operator difference");
  Operator out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] -= b.entries_[i];
  return out;
}

double Operator::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e));
  return m;
}

// ---------------------------------------------------------------------------
// Free functions

Complex inner(const Ket& a, const Ket& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  return kernels::cdot(a.amplitudes(), b.amplitudes());
}

double overlap_defect(const Ket& a, const Ket& b) {
  require_same_dim(a.dim(), b.dim(), "overlap_defect");
  const double scale = a.norm_squared() * b.norm_squared();
  if (scale <= 0.0) return 0.0;
  double minors = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = i + 1; j < a.dim(); ++j) minors += std::norm(a[i] * b[j] - a[j] * b[i]);
  return std::min(1.0, minors / scale);
}

Ket tensor(const Ket& a, const Ket& b) {
  Ket out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  return out;
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac)
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
  return out;
}

Ket conjugate_basis_ket(int bit) {
  require_bit(bit, "conjugate_basis_ket");
  return Ket{inv_sqrt2, bit == 0 ? inv_sqrt2 : -inv_sqrt2};
}

Ket basis_ket(Basis b, int bit) {
  require_bit(bit, "basis_ket");
  return b == Basis::rectilinear ? Ket::basis_vector(2, static_cast<std::size_t>(bit))
                                 : conjugate_basis_ket(bit);
}

Ket bell_ket(int c) {
  switch (c) {
    case 0: return Ket{inv_sqrt2, 0.0, 0.0, inv_sqrt2};
    case 1: return Ket{inv_sqrt2, 0.0, 0.0, -inv_sqrt2};
    case 2: return Ket{0.0, inv_sqrt2, inv_sqrt2, 0.0};
    case 3: return Ket{0.0, inv_sqrt2, -inv_sqrt2, 0.0};
    default:
      throw std::invalid_argument("bell_ket: index must be in 0..3, got " + std::to_string(c));
  }
}

PairCoefficients pair_basis_coefficients(const Ket& joint, Basis alice, Basis bob) {
  const std::size_t d = probe_dim_of(joint);
  PairCoefficients out{Ket(d), Ket(d), Ket(d), Ket(d)};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Ket& coeff = out[static_cast<std::size_t>(2 * a + b)];
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const double w = basis_amplitude(alice, a, j) * basis_amplitude(bob, b, k);
          if (w == 0.0) continue;
          const auto pair = static_cast<std::size_t>(2 * j + k);
          for (std::size_t p = 0; p < d; ++p) coeff[p] += w * joint[p * 4 + pair];
        }
    }
  return out;
}

Ket assemble_joint(const PairCoefficients& coefficients, Basis alice, Basis bob) {
  const std::size_t d = coefficients[0].dim();
  Ket joint(d * 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Ket& coeff = coefficients[static_cast<std::size_t>(2 * a + b)];
      require_same_dim(d, coeff.dim(), "assemble_joint");
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const double w = basis_amplitude(alice, a, j) * basis_amplitude(bob, b, k);
          if (w == 0.0) continue;
          const auto pair = static_cast<std::size_t>(2 * j + k);
          for (std::size_t p = 0; p < d; ++p) joint[p * 4 + pair] += w * coeff[p];
        }
    }
  return joint;
}

SchmidtPair schmidt_coefficients(const Ket& two_qubit, double tol) {
  if (two_qubit.dim() != 4) throw std::invalid_argument("schmidt_coefficients: need a dim-4 ket");
  const double n2 = two_qubit.norm_squared();
  if (std::abs(n2 - 1.0) > tol) {
    throw std::invalid_argument("schmidt_coefficients: ket is not normalized (norm^2 = " +
                                std::to_string(n2) + ")");
  }
  // For M = [[a, b], [c, d]] and w = det M / |det M|:
  //   (s0 + s1)^2 = |a + w conj(d)|^2 + |b - w conj(c)|^2
  //   (s0 - s1)^2 = |a - w conj(d)|^2 + |b + w conj(c)|^2
  // which stays accurate near maximal entanglement where s0 ~ s1.
  const Complex a = two_qubit[0], b = two_qubit[1], c = two_qubit[2], d = two_qubit[3];
  const Complex det = a * d - b * c;
  const double det_abs = std::abs(det);
  const Complex w = det_abs > 0.0 ? det / det_abs : Complex(1.0);
  const double sum = std::sqrt(std::norm(a + w * std::conj(d)) + std::norm(b - w * std::conj(c)));
  const double diff = std::sqrt(std::norm(a - w * std::conj(d)) + std::norm(b + w * std::conj(c)));
  const double major = 0.5 * (sum + diff);
  const double minor = 0.5 * (sum - diff);
  return {major, std::max(minor, 0.0)};
}

Projection project_outcome(const Ket& joint, Basis alice, Basis bob, int alice_bit, int bob_bit,
                           double tol) {
  require_bit(alice_bit, "project_outcome");
  require_bit(bob_bit, "project_outcome");
  const double n2 = joint.norm_squared();
  if (std::abs(n2 - 1.0) > tol) {
    throw std::invalid_argument("project_outcome: joint state is not normalized (norm^2 = " +
                                std::to_string(n2) + ")");
  }
  auto coeffs = pair_basis_coefficients(joint, alice, bob);
  Ket& c = coeffs[static_cast<std::size_t>(2 * alice_bit + bob_bit)];
  const double prob = c.norm_squared();
  if (prob <= absent_threshold) return {prob, std::nullopt};
  return {prob, c * Complex(1.0 / std::sqrt(prob))};
}

}  // namespace e91
