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

#include "securevector/match.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "securevector/error.hpp"

namespace securevector {
namespace {

// c_x_i . c_y_i * exp(log_factor), with both segments rescaled by powers of
// two first so that tiny components neither underflow in the product nor
// push the factor out of double range.
double scaled_segment_term(std::span<const double> cx,
                           std::span<const double> cy, double log_factor) {
  double max_x = 0.0;
  double max_y = 0.0;
  for (double v : cx) max_x = std::max(max_x, std::abs(v));
  for (double v : cy) max_y = std::max(max_y, std::abs(v));
  if (max_x == 0.0 || max_y == 0.0) return 0.0;
  const int ex = std::ilogb(max_x);
  const int ey = std::ilogb(max_y);
  double dot = 0.0;
  for (std::size_t j = 0; j < cx.size(); ++j) {
    dot += std::ldexp(cx[j], -ex) * std::ldexp(cy[j], -ey);
  }
  return dot * std::exp(log_factor + (ex + ey) * std::numbers::ln2);
}

double squared_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

}  // namespace

Matcher::Matcher(paillier::KeyPair keys, ParamSet params)
    : keys_(std::move(keys)), params_(params) {
  params_.validate();
  if (keys_.pub.bits() != params_.key_bits) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "key has " + std::to_string(keys_.pub.bits()) +
                    " bits, parameters expect S=" +
                    std::to_string(params_.key_bits));
  }
  fingerprint_ = securevector::fingerprint(params_, keys_.pub);
  max_norm_sum_ = 2 * codec::norm_levels(params_.scale_bound) - 2;
}

codec::CombinedSecret Matcher::combine(const EnrolledRecord& x,
                                       const EnrolledRecord& y) const {
  if (x.fingerprint != fingerprint_ || y.fingerprint != fingerprint_) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "record was enrolled under different parameters or keys");
  }
  const paillier::Ciphertext sum =
      paillier::add(keys_.pub, x.token.ct_, y.token.ct_);
  return decode_sum(paillier::decrypt(keys_.priv, keys_.pub, sum));
}

codec::CombinedSecret Matcher::decode_sum(const mpz_class& sum) const {
  codec::UnpackedSum digits =
      codec::unpack(sum, params_.segments, params_.scale_bound);
  const std::uint64_t max_digit = 4 * params_.scale_bound - 2;
  auto over = [max_digit](std::uint64_t d) { return d > max_digit; };
  if (std::ranges::any_of(digits.scales, over) ||
      std::ranges::any_of(digits.parities, over) ||
      digits.norm_index > max_norm_sum_) {
    throw Error(ErrorCode::kCorruptToken,
                "decrypted token sum has out-of-range digits");
  }
  codec::CombinedSecret out;
  out.sign_products = codec::decode_signs(digits.parities);
  out.scale_sums = std::move(digits.scales);
  out.norm_sum = std::move(digits.norm_index);
  return out;
}

MatchResult Matcher::match(const EnrolledRecord& x,
                           const EnrolledRecord& y) const {
  const codec::CombinedSecret combined = combine(x, y);
  return score_metric(x.sanitized, y.sanitized, combined, params_);
}

codec::CombinedSecret combine_tokens(const EnrolledRecord& x,
                                     const EnrolledRecord& y,
                                     const paillier::KeyPair& keys,
                                     const ParamSet& params) {
  return Matcher(keys, params).combine(x, y);
}

double score_cosine(std::span<const double> c_x, std::span<const double> c_y,
                    const codec::CombinedSecret& combined,
                    const ParamSet& params) {
  if (c_x.size() != params.dim || c_y.size() != params.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sanitized vectors do not have dimension " +
                    std::to_string(params.dim));
  }
  if (combined.scale_sums.size() != params.segments ||
      combined.sign_products.size() != params.segments) {
    throw Error(ErrorCode::kDimensionMismatch,
                "combined secret does not have K segments");
  }
  const double log_norms = codec::log_norm_sum(
      combined.norm_sum, params.scale_bound, params.lm_ratio);
  const double inv_divisor = params.inverse_divisor();
  const double twice_bound = 2.0 * static_cast<double>(params.scale_bound);
  const std::size_t seg_len = params.segment_length();

  double total = 0.0;
  for (std::size_t i = 0; i < params.segments; ++i) {
    const double log_factor =
        log_norms -
        (static_cast<double>(combined.scale_sums[i]) - twice_bound) *
            inv_divisor;
    const double term =
        scaled_segment_term(c_x.subspan(i * seg_len, seg_len),
                            c_y.subspan(i * seg_len, seg_len), log_factor);
    total += combined.sign_products[i] * term;
  }
  return total;
}

MatchResult score_metric(std::span<const double> c_x,
                         std::span<const double> c_y,
                         const codec::CombinedSecret& combined,
                         const ParamSet& params) {
  const double dot = score_cosine(c_x, c_y, combined, params);
  MatchResult result;
  result.mode = params.mode;
  switch (params.mode) {
    case MetricMode::kCosineNormalized:
    case MetricMode::kDotUnnormalized:
      result.score = dot;
      break;
    case MetricMode::kEuclideanNormalized:
      result.score = 2.0 - 2.0 * dot;
      break;
    case MetricMode::kEuclideanUnnormalized:
      result.score = squared_norm(c_x) + squared_norm(c_y) - 2.0 * dot;
      break;
  }
  return result;
}

MatchResult match_pair(const EnrolledRecord& x, const EnrolledRecord& y,
                       const paillier::KeyPair& keys, const ParamSet& params) {
  return Matcher(keys, params).match(x, y);
}

}  // namespace securevector
