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

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cylrad {

using cplx = std::complex<double>;

enum class WindowKind { Rectangular, Hann };

/// Periodic window of length n (Hann: 0.5 - 0.5 cos(2 pi k / n)).
std::vector<double> make_window(WindowKind kind, int n);

/**
 * Forward complex DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N).
 *
 * Backed by FFTW with estimate-mode plans cached per size. Plans are created
 * under a lock and executed through the new-array interface, so calls are safe
 * from any thread and results do not depend on which thread runs them.
 */
void fft_forward(std::span<const cplx> in, std::span<cplx> out);

/// Convenience overload returning a new vector.
std::vector<cplx> fft_forward(std::span<const cplx> in);

/// Smallest power of two >= n.
int next_pow2(int n);

}  // namespace cylrad
