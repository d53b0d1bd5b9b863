#pragma once

#include "e91/kernels.hpp"

namespace e91::kernels {

// Shared with the AVX2 path: `v > 0 ? v : 0` matches _mm256_max_pd(v, 0).
inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

namespace detail {

Complex cdot_scalar(std::span<const Complex> a, std::span<const Complex> b);
RowMax grid_row_max_scalar(const GridRow& row);

#if defined(E91_HAVE_AVX2)
Complex cdot_avx2(std::span<const Complex> a, std::span<const Complex> b);
RowMax grid_row_max_avx2(const GridRow& row);
#endif

}  // namespace detail
}  // namespace e91::kernels
