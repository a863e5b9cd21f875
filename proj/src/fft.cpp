// Copyright 2026 The cylrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cylrad/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "cylrad/errors.hpp"
#include "cylrad/radar_config.hpp"

namespace cylrad {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(int n) : data(fftw_alloc_complex(static_cast<std::size_t>(n))) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

class PlanCache {
 public:
  fftw_plan get(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    FftwBuffer in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(n, in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan) throw NumericalError("FFTW failed to create a plan of size " + std::to_string(n));
    plans_.emplace(n, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<double> make_window(WindowKind kind, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (kind == WindowKind::Hann) {
    for (int k = 0; k < n; ++k) w[k] = 0.5 - 0.5 * std::cos(kTwoPi * k / n);
  }
  return w;
}

void fft_forward(std::span<const cplx> in, std::span<cplx> out) {
  const int n = static_cast<int>(in.size());
  if (out.size() != in.size()) throw InputError("fft_forward: size mismatch");
  if (n == 0) return;
  fftw_plan plan = plan_cache().get(n);
  // The plan was made for fftw_malloc-aligned buffers; stage through aligned
  // memory so SIMD codelets (and therefore results) are identical on every call.
  FftwBuffer a(n), b(n);
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(a.data));
  fftw_execute_dft(plan, a.data, b.data);
  const auto* result = reinterpret_cast<const cplx*>(b.data);
  std::copy(result, result + n, out.begin());
}

std::vector<cplx> fft_forward(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  fft_forward(in, out);
  return out;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace cylrad
