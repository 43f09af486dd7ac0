// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/simd/kernels.hpp"

#if COTFLOW_SIMD_ARM64

#include <arm_neon.h>

namespace cotflow::simd::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void dot_rows(const double* query, const double* rows, std::size_t dim, double* out,
              std::size_t out_count) {
    for (std::size_t r = 0; r < out_count; ++r) out[r] = dot(query, rows + r * dim, dim);
}

}  // namespace cotflow::simd::neon

#endif
