/*
 * Copyright 2026 The SecureVector Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Hyper-parameters of the protection scheme and the security accounting
// that selects them.
//
// Symbols used in comments: S key bits, K segment count, L scale bound,
// M = L / lm_ratio scale divisor, d feature dimension.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace securevector {

enum class MetricMode {
  kCosineNormalized,
  kEuclideanNormalized,
  kDotUnnormalized,
  kEuclideanUnnormalized,
};

std::string_view to_string(MetricMode mode);
MetricMode parse_metric_mode(std::string_view name);

// Normalized modes expect unit-norm input features.
constexpr bool is_normalized(MetricMode mode) {
  return mode == MetricMode::kCosineNormalized ||
         mode == MetricMode::kEuclideanNormalized;
}

inline constexpr double kDefaultLmRatio = 128.0;
// Above this the per-segment scale factors e^(+-lm_ratio) leave too little
// double-precision headroom for the sanitized components.
inline constexpr double kMaxLmRatio = 256.0;
// Largest L the codec accepts; keeps 4L and the digit arithmetic in 64 bits.
inline constexpr std::uint64_t kMaxScaleBound = std::uint64_t{1} << 32;

struct ParamSet {
  std::size_t key_bits = 0;       // S
  std::size_t segments = 0;       // K
  std::uint64_t scale_bound = 0;  // L
  double lm_ratio = kDefaultLmRatio;
  std::size_t dim = 0;  // d
  MetricMode mode = MetricMode::kCosineNormalized;

  // M is kept implicit as the real value L / lm_ratio, so 1/M is exact
  // enough to use directly.
  double inverse_divisor() const {
    return lm_ratio / static_cast<double>(scale_bound);
  }
  std::size_t segment_length() const { return dim / segments; }
  std::uint64_t radix() const { return 4 * scale_bound; }

  // Throws Error(kInvalidArgument) on a malformed set and Error(kInfeasible)
  // when S cannot hold the sum of two packed tokens.
  void validate() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

// Largest L with (4L)^(2K+9) <= 2^S, i.e. floor(2^(S/(2K+9) - 2)), computed
// with exact integer roots. Throws Error(kInfeasible) if that is below 2.
mpz_class max_scale_bound(std::size_t key_bits, std::size_t segments);

// floor(2K + K*log2(L)): log2 of the brute-force space over (u, s).
std::size_t security_bits(std::size_t segments, const mpz_class& scale_bound);

// ceil((2K+9) * log2(4L)): the smallest S whose capacity avoids overflow.
std::size_t min_key_size(std::size_t segments, const mpz_class& scale_bound);

// Among divisors K of d, picks the K maximizing
// security_bits(K, max_scale_bound(S, K)); ties go to the smaller K.
// L is capped at kMaxScaleBound, which never weakens the capacity bound.
ParamSet optimal_params(std::size_t key_bits, std::size_t dim,
                        MetricMode mode = MetricMode::kCosineNormalized,
                        double lm_ratio = kDefaultLmRatio);

// Canonical single-line text form used for fingerprints and reports.
std::string canonical_string(const ParamSet& params);

}  // namespace securevector
