// Compiled with -mavx2 -ffp-contract=off; only reached after the CPUID check
// in dispatch.cpp.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace e91::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

// Two complex numbers per register, laid out [re0, im0, re1, im1].
// acc_re collects (ar*br, ai*bi); acc_im collects (ar*bi, ai*br), and the
// imaginary part is the alternating sum of its lanes.
Complex cdot_avx2(std::span<const Complex> a, std::span<const Complex> b) {
  const auto* pa = reinterpret_cast<const double*>(a.data());
  const auto* pb = reinterpret_cast<const double*>(b.data());
  const std::size_t n = a.size();

  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    const __m256d vb_swap = _mm256_permute_pd(vb, 0b0101);
    acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(va, vb));
    acc_im = _mm256_add_pd(acc_im, _mm256_mul_pd(va, vb_swap));
  }

  double re = hsum(acc_re);
  alignas(32) double im_lanes[4];
  _mm256_store_pd(im_lanes, acc_im);
  double im = (im_lanes[0] - im_lanes[1]) + (im_lanes[2] - im_lanes[3]);

  for (; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

RowMax grid_row_max_avx2(const GridRow& row) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d ep = _mm256_set1_pd(row.eps_plus);
  const __m256d et = _mm256_set1_pd(row.eps_times);
  const __m256d x_lo = _mm256_set1_pd(row.x_lo);
  const __m256d x_step = _mm256_set1_pd(row.x_step);
  const __m256d one_minus_ep = _mm256_sub_pd(one, ep);
  const __m256d one_minus_et = _mm256_sub_pd(one, et);

  __m256d best_val = _mm256_set1_pd(-1.0);
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);

  std::size_t i = 0;
  for (; i + 4 <= row.count; i += 4) {
    const __m256d x = _mm256_add_pd(x_lo, _mm256_mul_pd(idx, x_step));
    const __m256d y = _mm256_max_pd(_mm256_sub_pd(one_minus_ep, x), zero);
    const __m256d z = _mm256_max_pd(_mm256_sub_pd(one_minus_et, x), zero);
    const __m256d t = _mm256_max_pd(_mm256_sub_pd(_mm256_add_pd(_mm256_add_pd(x, ep), et), one), zero);
    const __m256d lhs = _mm256_add_pd(_mm256_sqrt_pd(y), _mm256_sqrt_pd(z));
    const __m256d rhs = _mm256_add_pd(_mm256_sqrt_pd(x), _mm256_sqrt_pd(t));
    const __m256d v = _mm256_add_pd(half, _mm256_mul_pd(half, _mm256_mul_pd(lhs, rhs)));

    const __m256d better = _mm256_cmp_pd(v, best_val, _CMP_GT_OQ);
    best_val = _mm256_blendv_pd(best_val, v, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double vals[4];
  alignas(32) double idxs[4];
  _mm256_store_pd(vals, best_val);
  _mm256_store_pd(idxs, best_idx);

  RowMax best{-1.0, 0};
  for (int lane = 0; lane < 4; ++lane) {
    const auto lane_idx = static_cast<std::size_t>(idxs[lane]);
    if (vals[lane] > best.value || (vals[lane] == best.value && lane_idx < best.index)) {
      best = {vals[lane], lane_idx};
    }
  }
  for (; i < row.count; ++i) {
    const double x = row.x_lo + static_cast<double>(i) * row.x_step;
    const double v = grid_objective(row.eps_plus, row.eps_times, x);
    if (v > best.value) best = {v, i};
  }
  return best;
}

}  // namespace e91::kernels::detail
