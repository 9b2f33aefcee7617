//
// Copyright 2026 The robustkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <atomic>
#include <cstdlib>
#include <string>

#include "robustkit/error.hpp"
#include "robustkit/simd/kernels.hpp"

namespace robustkit::simd {
namespace {

bool cpu_has_avx2() {
#if defined(ROBUSTKIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend best_backend() {
  if (const char* env = std::getenv("ROBUSTKIT_SIMD")) {
    if (auto b = parse_backend(env); b && supported(*b)) return *b;
  }
  if (supported(Backend::kAvx2)) return Backend::kAvx2;
  if (supported(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(best_backend())};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  return std::nullopt;
}

bool supported(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
    case Backend::kNeon:
#if defined(ROBUSTKIT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (!supported(b)) {
    throw Error(ErrorCode::kUsageError,
                "SIMD backend '" + std::string(backend_name(b)) +
                    "' is not available on this machine");
  }
  switch (b) {
#if defined(ROBUSTKIT_HAVE_AVX2)
    case Backend::kAvx2:
      return detail::kAvx2Table;
#endif
#if defined(ROBUSTKIT_HAVE_NEON)
    case Backend::kNeon:
      return detail::kNeonTable;
#endif
    default:
      return detail::kScalarTable;
  }
}

const KernelTable& active_table() {
  return *active_slot().load(std::memory_order_acquire);
}

Backend active_backend() { return active_table().backend; }

void set_active_backend(Backend b) {
  active_slot().store(&table(b), std::memory_order_release);
}

}  // namespace robustkit::simd
