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

#include "securevector/params.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <string>

#include "securevector/error.hpp"

namespace securevector {
namespace {

std::optional<mpz_class> try_max_scale_bound(std::size_t key_bits,
                                             std::size_t segments) {
  if (segments == 0) return std::nullopt;
  mpz_class capacity;
  mpz_ui_pow_ui(capacity.get_mpz_t(), 2, key_bits);
  mpz_class root;
  mpz_root(root.get_mpz_t(), capacity.get_mpz_t(), 2 * segments + 9);
  mpz_class bound = root / 4;
  if (bound < 2) return std::nullopt;
  return bound;
}

void require_segments_and_bound(std::size_t segments,
                                const mpz_class& scale_bound) {
  if (segments < 1) {
    throw Error(ErrorCode::kInvalidArgument, "segment count K must be >= 1");
  }
  if (scale_bound < 2) {
    throw Error(ErrorCode::kInvalidArgument, "scale bound L must be >= 2");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string_view to_string(MetricMode mode) {
  switch (mode) {
    case MetricMode::kCosineNormalized:
      return "cosine-normalized";
    case MetricMode::kEuclideanNormalized:
      return "euclidean-normalized";
    case MetricMode::kDotUnnormalized:
      return "dot-unnormalized";
    case MetricMode::kEuclideanUnnormalized:
      return "euclidean-unnormalized";
  }
  return "unknown";
}

MetricMode parse_metric_mode(std::string_view name) {
  for (MetricMode mode :
       {MetricMode::kCosineNormalized, MetricMode::kEuclideanNormalized,
        MetricMode::kDotUnnormalized, MetricMode::kEuclideanUnnormalized}) {
    if (name == to_string(mode)) return mode;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric mode '" + std::string(name) + "'");
}

void ParamSet::validate() const {
  if (segments < 1) {
    throw Error(ErrorCode::kInvalidArgument, "segment count K must be >= 1");
  }
  if (scale_bound < 2 || scale_bound > kMaxScaleBound) {
    throw Error(ErrorCode::kInvalidArgument,
                "scale bound L must lie in [2, 2^32], got " +
                    std::to_string(scale_bound));
  }
  if (dim == 0 || dim % segments != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment count K=" + std::to_string(segments) +
                    " does not divide dimension d=" + std::to_string(dim));
  }
  if (!(lm_ratio > 0.0) || !(lm_ratio <= kMaxLmRatio)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lm_ratio must lie in (0, 256], got " + format_double(lm_ratio));
  }
  const std::size_t needed = min_key_size(segments, mpz_class(scale_bound));
  if (key_bits < needed) {
    throw Error(ErrorCode::kInfeasible,
                "key size S=" + std::to_string(key_bits) + " below " +
                    std::to_string(needed) + " bits required by K=" +
                    std::to_string(segments) +
                    ", L=" + std::to_string(scale_bound));
  }
}

mpz_class max_scale_bound(std::size_t key_bits, std::size_t segments) {
  if (segments < 1) {
    throw Error(ErrorCode::kInvalidArgument, "segment count K must be >= 1");
  }
  auto bound = try_max_scale_bound(key_bits, segments);
  if (!bound) {
    throw Error(ErrorCode::kInfeasible,
                "S=" + std::to_string(key_bits) + " admits no L >= 2 at K=" +
                    std::to_string(segments));
  }
  return *bound;
}

std::size_t security_bits(std::size_t segments, const mpz_class& scale_bound) {
  require_segments_and_bound(segments, scale_bound);
  // floor(K*log2(L)) = bitlen(L^K) - 1
  mpz_class space;
  mpz_pow_ui(space.get_mpz_t(), scale_bound.get_mpz_t(), segments);
  return 2 * segments + mpz_sizeinbase(space.get_mpz_t(), 2) - 1;
}

std::size_t min_key_size(std::size_t segments, const mpz_class& scale_bound) {
  require_segments_and_bound(segments, scale_bound);
  // Smallest S with 2^S >= (4L)^(2K+9) is bitlen((4L)^(2K+9) - 1).
  mpz_class base = 4 * scale_bound;
  mpz_class capacity;
  mpz_pow_ui(capacity.get_mpz_t(), base.get_mpz_t(), 2 * segments + 9);
  capacity -= 1;
  return mpz_sizeinbase(capacity.get_mpz_t(), 2);
}

ParamSet optimal_params(std::size_t key_bits, std::size_t dim,
                        MetricMode mode, double lm_ratio) {
  if (dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  }
  std::optional<ParamSet> best;
  std::size_t best_bits = 0;
  for (std::size_t k = 1; k <= dim; ++k) {
    if (dim % k != 0) continue;
    auto bound = try_max_scale_bound(key_bits, k);
    if (!bound) continue;
    if (*bound > kMaxScaleBound) *bound = kMaxScaleBound;
    const std::size_t bits = security_bits(k, *bound);
    if (!best || bits > best_bits) {
      best = ParamSet{key_bits, k, bound->get_ui(), lm_ratio, dim, mode};
      best_bits = bits;
    }
  }
  if (!best) {
    throw Error(ErrorCode::kInfeasible,
                "no divisor K of d=" + std::to_string(dim) +
                    " admits L >= 2 at S=" + std::to_string(key_bits));
  }
  best->validate();
  return *best;
}

std::string canonical_string(const ParamSet& params) {
  return "S=" + std::to_string(params.key_bits) +
         ";K=" + std::to_string(params.segments) +
         ";L=" + std::to_string(params.scale_bound) +
         ";lm_ratio=" + format_double(params.lm_ratio) +
         ";d=" + std::to_string(params.dim) +
         ";mode=" + std::string(to_string(params.mode));
}

}  // namespace securevector
