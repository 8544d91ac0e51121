#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Each kernel has a scalar reference and, on x86-64,
// an AVX2+FMA variant chosen once at startup from CPUID. Setting the
// environment variable TEXTNET_KERNELS=scalar forces the reference path.

namespace textnet::kernels {

enum class Isa { kScalar, kAvx2 };

/// Σ a[i]·b[i]. Lengths must match.
double dot(std::span<const double> a, std::span<const double> b);

/// Σ |a[i] − b[i]|. Lengths must match.
double sum_abs_diff(std::span<const double> a, std::span<const double> b);

/// Isa currently used by dot() and sum_abs_diff().
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Overrides the dispatch choice. Requesting kAvx2 on a CPU without AVX2
/// falls back to kScalar; the return value is the isa actually selected.
Isa select_isa(Isa requested);

/// True when the running CPU can execute the AVX2 kernels.
bool cpu_has_avx2();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace textnet::kernels
