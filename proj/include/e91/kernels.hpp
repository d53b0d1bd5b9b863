#pragma once

// Inner loops that dominate runtime: conjugate-linear complex dot products
// (every bra-ket in the library) and one row of the optimizer grid.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is chosen once at first use from CPUID; setting
// E91_KERNELS=scalar in the environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace e91::kernels {

using Complex = std::complex<double>;

/// One row of the (eps_plus, x) search: eps_plus and eps_times fixed, x swept
/// as x_lo + i * x_step for i in [0, count).
struct GridRow {
  double eps_plus = 0.0;
  double eps_times = 0.0;
  double x_lo = 0.0;
  double x_step = 0.0;
  std::size_t count = 0;
};

struct RowMax {
  double value = 0.0;
  std::size_t index = 0;
};

using CdotFn = Complex (*)(std::span<const Complex>, std::span<const Complex>);
using GridRowMaxFn = RowMax (*)(const GridRow&);

struct KernelTable {
  std::string_view name;
  CdotFn cdot;
  GridRowMaxFn grid_row_max;
};

/// Zero-imaginary-overlap guess probability for the given error rates and x:
///   1/2 + 1/2 (sqrt(y) + sqrt(z)) (sqrt(x) + sqrt(t))
/// with y = 1 - eps_plus - x, z = 1 - eps_times - x, t = x + eps_plus + eps_times - 1,
/// each clamped at zero. Both kernel variants evaluate exactly this sequence
/// of IEEE operations, so their results are bit-identical.
double grid_objective(double eps_plus, double eps_times, double x);

const KernelTable& scalar_table();

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

/// Table selected for this process.
const KernelTable& active();

inline Complex cdot(std::span<const Complex> a, std::span<const Complex> b) {
  return active().cdot(a, b);
}

inline RowMax grid_row_max(const GridRow& row) { return active().grid_row_max(row); }

}  // namespace e91::kernels
