// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/common.hpp"
#include "cotflow/simd/kernels.hpp"

#include <cstdlib>

namespace cotflow::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::dot, &scalar::dot_rows};
#if COTFLOW_SIMD_X86
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::dot, &avx2::dot_rows};
#endif
#if COTFLOW_SIMD_ARM64
constexpr KernelTable kNeon{Isa::Neon, &neon::dot, &neon::dot_rows};
#endif

const KernelTable& resolve_active() {
    if (const char* env = std::getenv("COTFLOW_SIMD"); env != nullptr && *env != '\0') {
        if (auto isa = parse_isa(env); isa && is_supported(*isa)) return kernels_for(*isa);
    }
    return kernels_for(best_isa());
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "?";
}

std::optional<Isa> parse_isa(std::string_view text) {
    if (text == "scalar") return Isa::Scalar;
    if (text == "avx2") return Isa::Avx2;
    if (text == "neon") return Isa::Neon;
    return std::nullopt;
}

bool is_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if COTFLOW_SIMD_X86 && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
            return COTFLOW_SIMD_ARM64 != 0;
    }
    return false;
}

Isa best_isa() {
    if (is_supported(Isa::Avx2)) return Isa::Avx2;
    if (is_supported(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& kernels_for(Isa isa) {
    if (!is_supported(isa)) {
        throw Error(ErrorCode::ConfigError,
                    "instruction set not available: " + std::string(to_string(isa)));
    }
    switch (isa) {
#if COTFLOW_SIMD_X86
        case Isa::Avx2: return kAvx2;
#endif
#if COTFLOW_SIMD_ARM64
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

const KernelTable& active_kernels() {
    static const KernelTable& table = resolve_active();
    return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "dot: operand sizes differ");
    }
    return active_kernels().dot(a.data(), b.data(), a.size());
}

void dot_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out) {
    const std::size_t dim = query.size();
    if (dim == 0 ? !rows.empty() : rows.size() != dim * out.size()) {
        throw Error(ErrorCode::DimensionMismatch, "dot_rows: row block does not match query");
    }
    active_kernels().dot_rows(query.data(), rows.data(), dim, out.data(), out.size());
}

}  // namespace cotflow::simd
