#include "e91/channel_attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace e91 {

ChannelAttack::ChannelAttack(std::array<Ket, 4> f) : f_(std::move(f)) {
  for (const auto& k : f_) {
    if (k.dim() != f_[0].dim()) throw std::invalid_argument("ChannelAttack: probe kets differ in dimension");
  }
}

ChannelAttack ChannelAttack::from_unitary(const Operator& u, const Ket& initial_probe) {
  const std::size_t d = initial_probe.dim();
  if (u.rows() != 2 * d || u.cols() != 2 * d) {
    throw std::invalid_argument("ChannelAttack::from_unitary: operator must be " +
                                std::to_string(2 * d) + "x" + std::to_string(2 * d));
  }
  std::array<Ket, 4> f{Ket(d), Ket(d), Ket(d), Ket(d)};
  for (int in = 0; in < 2; ++in) {
    const Ket out = u.apply(tensor(initial_probe, Ket::basis_vector(2, static_cast<std::size_t>(in))));
    for (int b = 0; b < 2; ++b) {
      Ket& target = f[static_cast<std::size_t>(2 * in + b)];
      for (std::size_t p = 0; p < d; ++p) target[p] = out[p * 2 + static_cast<std::size_t>(b)];
    }
  }
  return ChannelAttack(std::move(f));
}

double UnitarityResiduals::max() const { return std::max({norm_zero, norm_one, cross}); }

UnitarityResiduals validate_unitarity(const ChannelAttack& f, double tol) {
  UnitarityResiduals r;
  r.norm_zero = std::abs(f.f(0, 0).norm_squared() + f.f(0, 1).norm_squared() - 1.0);
  r.norm_one = std::abs(f.f(1, 0).norm_squared() + f.f(1, 1).norm_squared() - 1.0);
  r.cross = std::abs(inner(f.f(0, 0), f.f(1, 0)) + inner(f.f(0, 1), f.f(1, 1)));
  r.valid = r.max() <= tol;
  return r;
}

Ket apply_channel_attack(const ChannelAttack& f, double tol) {
  const UnitarityResiduals r = validate_unitarity(f, tol);
  if (!r.valid) {
    throw std::invalid_argument("apply_channel_attack: unitarity violated (max residual " +
                                std::to_string(r.max()) + ")");
  }
  const std::size_t d = f.probe_dim();
  const double scale = 1.0 / std::numbers::sqrt2;
  Ket joint(d * 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Ket& fk = f.f(a, b);
      const auto pair = static_cast<std::size_t>(2 * a + b);
      for (std::size_t p = 0; p < d; ++p) joint[p * 4 + pair] = scale * fk[p];
    }
  return joint;
}

Operator alice_marginal(const Ket& joint) {
  if (joint.dim() % 4 != 0) throw std::invalid_argument("alice_marginal: dim not a multiple of 4");
  const std::size_t d = joint.dim() / 4;
  Operator rho(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t a2 = 0; a2 < 2; ++a2) {
      Complex acc = 0.0;
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t b = 0; b < 2; ++b)
          acc += joint[p * 4 + 2 * a + b] * std::conj(joint[p * 4 + 2 * a2 + b]);
      rho(a, a2) = acc;
    }
  return rho;
}

std::array<double, 2> hermitian_eigenvalues(const Operator& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw std::invalid_argument("hermitian_eigenvalues: need 2x2");
  const double a = rho(0, 0).real();
  const double d = rho(1, 1).real();
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho(0, 1)));
  const double mid = 0.5 * (a + d);
  return {mid + half_gap, mid - half_gap};
}

double remote_transpose_residual(const Operator& a) {
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("remote_transpose_residual: need 2x2");
  const Ket v{1.0, 0.0, 0.0, 1.0};
  const Operator id = Operator::identity(2);
  const Ket lhs = kron(a, id).apply(v);
  const Ket rhs = kron(id, a.transpose()).apply(v);
  return (lhs - rhs).norm();
}

double unitary_remote_pair_gap(const Operator& a, const Operator& b) {
  const Ket v = kron(a, b).apply(bell_ket(0));
  if (v.norm_squared() <= absent_threshold) {
    throw std::invalid_argument("unitary_remote_pair_gap: (A (x) B)|B0> vanishes");
  }
  const SchmidtPair s = schmidt_coefficients(v.normalized());
  return std::max(0.0, 1.0 / std::numbers::sqrt2 - s.minor);
}

Operator random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Ket> cols;
  cols.reserve(n);
  while (cols.size() < n) {
    Ket v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    // Two passes of Gram-Schmidt keep the columns orthonormal to ~1e-16.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) v -= inner(c, v) * c;
    if (v.norm_squared() < 1e-6) continue;
    cols.push_back(v.normalized());
  }
  Operator u(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) u(r, c) = cols[c][r];
  return u;
}

ChannelAttack random_channel_attack(std::mt19937_64& rng) {
  const Operator u = random_unitary(4, rng);
  std::normal_distribution<double> gauss;
  Ket probe{Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))};
  return ChannelAttack::from_unitary(u, probe.normalized());
}

}  // namespace e91
