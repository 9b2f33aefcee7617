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

#ifndef ROBUSTKIT_SIMD_KERNELS_HPP_
#define ROBUSTKIT_SIMD_KERNELS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

// Inner-loop kernels for the dense math (Gram products, HSIC reductions,
// nearest-neighbour distances, probe gradients).
//
// The scalar table is the reference: a single running accumulator in index
// order, so it reproduces a naive loop bit for bit. Vector tables use
// several accumulators and FMA, which changes rounding; they agree with
// the reference to a few ulps per term and are equivalence-tested against
// it. The backend is chosen once at startup from the CPU's capabilities
// and can be overridden with ROBUSTKIT_SIMD=scalar|avx2|neon.

namespace robustkit::simd {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

std::string_view backend_name(Backend b);
std::optional<Backend> parse_backend(std::string_view name);

// Compiled in and supported by the running CPU.
bool supported(Backend b);

// Throws Error(kUsageError) if the backend is unavailable.
const KernelTable& table(Backend b);

const KernelTable& active_table();
Backend active_backend();
void set_active_backend(Backend b);

// RAII override, used by tests and by callers that need the reference path.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(active_backend()) {
    set_active_backend(b);
  }
  ~ScopedBackend() { set_active_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_table().dot(a.data(), b.data(), a.size());
}

inline double squared_l2(std::span<const double> a,
                         std::span<const double> b) {
  return active_table().squared_l2(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable kScalarTable;
#if defined(ROBUSTKIT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(ROBUSTKIT_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace robustkit::simd

#endif  // ROBUSTKIT_SIMD_KERNELS_HPP_
