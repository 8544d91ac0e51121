#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "textnet/kernels.hpp"

namespace textnet::kernels {

namespace {

using BinaryKernel = double (*)(const double*, const double*, std::size_t);

struct Table {
  Isa isa;
  BinaryKernel dot;
  BinaryKernel sum_abs_diff;
};

constexpr Table kScalarTable{Isa::kScalar, &scalar::dot, &scalar::sum_abs_diff};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::sum_abs_diff};
#endif

const Table* table_for(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) return &kAvx2Table;
#endif
  (void)isa;
  return &kScalarTable;
}

const Table* initial_table() {
  const char* env = std::getenv("TEXTNET_KERNELS");
  if (env != nullptr && std::string(env) == "scalar") return &kScalarTable;
  return table_for(Isa::kAvx2);
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  return current().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  return current().load(std::memory_order_relaxed)->sum_abs_diff(a.data(), b.data(), a.size());
}

Isa active_isa() { return current().load()->isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa select_isa(Isa requested) {
  const Table* t = table_for(requested);
  current().store(t);
  return t->isa;
}

}  // namespace textnet::kernels
