// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string_view>

#include "splitrx/kernels.hpp"

namespace splitrx::kernels {

#if defined(SPLITRX_HAVE_AVX2)
const KernelTable& avx2_table_unchecked() noexcept;
#endif

namespace {

[[maybe_unused]] bool cpu_has_avx2() noexcept {
#if defined(SPLITRX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* find(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  return nullptr;
}

const KernelTable* initial() {
  std::string_view want = "auto";
  if (const char* env = std::getenv("SPLITRX_KERNEL")) want = env;
  if (want != "auto") {
    if (const KernelTable* t = find(want)) return t;
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#if defined(SPLITRX_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  return out;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = name == "auto" ? (avx2_table() ? avx2_table() : &scalar_table()) : find(name);
  if (!t) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace splitrx::kernels
