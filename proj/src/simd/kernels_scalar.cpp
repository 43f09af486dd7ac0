// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/simd/kernels.hpp"

namespace cotflow::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void dot_rows(const double* query, const double* rows, std::size_t dim, double* out,
              std::size_t out_count) {
    for (std::size_t r = 0; r < out_count; ++r) out[r] = dot(query, rows + r * dim, dim);
}

}  // namespace cotflow::simd::scalar
