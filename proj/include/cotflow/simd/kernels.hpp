// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Similarity kernels used by the retrieval index.
//
// Every kernel has a scalar reference in `scalar::` and optional vectorised
// variants (`avx2::` on x86-64, `neon::` on AArch64). The variant is chosen at
// runtime from CPU features; COTFLOW_SIMD=scalar|avx2|neon overrides the
// choice. Variants must agree with the scalar reference to within rounding of
// the summation order.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#if defined(__x86_64__) || defined(_M_X64)
#define COTFLOW_SIMD_X86 1
#else
#define COTFLOW_SIMD_X86 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define COTFLOW_SIMD_ARM64 1
#else
#define COTFLOW_SIMD_ARM64 0
#endif

namespace cotflow::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view text);

/// Function table for one instruction set.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// out[r] = dot(query, rows + r*dim) for r in [0, out_count).
    void (*dot_rows)(const double* query, const double* rows, std::size_t dim, double* out,
                     std::size_t out_count);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t dim, double* out,
              std::size_t out_count);
}  // namespace scalar

#if COTFLOW_SIMD_X86
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t dim, double* out,
              std::size_t out_count);
}  // namespace avx2
#endif

#if COTFLOW_SIMD_ARM64
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t dim, double* out,
              std::size_t out_count);
}  // namespace neon
#endif

/// True when this binary carries `isa` and the running CPU supports it.
bool is_supported(Isa isa);

/// Best supported instruction set on this machine.
Isa best_isa();

/// Kernel table for `isa`; throws Error(ConfigError) when unsupported.
const KernelTable& kernels_for(Isa isa);

/// Table selected for this process: COTFLOW_SIMD if set and supported,
/// otherwise best_isa(). Resolved once.
const KernelTable& active_kernels();

double dot(std::span<const double> a, std::span<const double> b);

void dot_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out);

}  // namespace cotflow::simd
