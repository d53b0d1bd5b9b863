#include "kernels_impl.hpp"

#include <cmath>

namespace e91::kernels {

double grid_objective(double eps_plus, double eps_times, double x) {
  const double y = positive_part(1.0 - eps_plus - x);
  const double z = positive_part(1.0 - eps_times - x);
  const double t = positive_part(x + eps_plus + eps_times - 1.0);
  return 0.5 + 0.5 * ((std::sqrt(y) + std::sqrt(z)) * (std::sqrt(x) + std::sqrt(t)));
}

namespace detail {

Complex cdot_scalar(std::span<const Complex> a, std::span<const Complex> b) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

RowMax grid_row_max_scalar(const GridRow& row) {
  RowMax best{-1.0, 0};
  for (std::size_t i = 0; i < row.count; ++i) {
    const double x = row.x_lo + static_cast<double>(i) * row.x_step;
    const double v = grid_objective(row.eps_plus, row.eps_times, x);
    if (v > best.value) best = {v, i};
  }
  return best;
}

}  // namespace detail

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &detail::cdot_scalar, &detail::grid_row_max_scalar};
  return table;
}

}  // namespace e91::kernels
