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

#include "cylrad/bessel.hpp"

#include <cmath>

namespace cylrad {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
// Below this the power series converges with acceptable cancellation in
// long double; above it the Hankel expansion is accurate to ~1e-15.
constexpr double kSeriesLimit = 17.0;

long double series(long double x) {
  const long double q = -0.25L * x * x;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && std::fabs(term) < 1e-22L) break;
  }
  return sum;
}

long double hankel(long double x) {
  // |a_k| = prod_{m<=k} (2m-1)^2 / (k! 8^k) with sign (-1)^k; P takes even k,
  // Q odd k, each alternating.
  long double p = 0.0L;
  long double q = 0.0L;
  long double term = 1.0L;  // a_k / x^k
  long double last = INFINITY;
  for (int k = 0; k < 100; ++k) {
    if (k > 0) {
      const long double odd = 2.0L * k - 1.0L;
      term *= odd * odd / (8.0L * k * x);
    }
    if (std::fabs(term) > last) break;  // asymptotic series started diverging
    last = std::fabs(term);
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q -= sign * term;
    }
    if (term < 1e-21L) break;
  }
  const long double chi = x - kPiL / 4.0L;
  return std::sqrt(2.0L / (kPiL * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  const long double ax = std::fabs(static_cast<long double>(x));
  if (ax <= kSeriesLimit) return static_cast<double>(series(ax));
  return static_cast<double>(hankel(ax));
}

}  // namespace cylrad
