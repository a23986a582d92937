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

#include "securevector/codec.hpp"

#include <cmath>
#include <string>

#include "securevector/error.hpp"

namespace securevector::codec {
namespace {

constexpr double kLogNormSlack = 1e-6;

void require_scale_bound(std::uint64_t scale_bound) {
  if (scale_bound < 2) {
    throw Error(ErrorCode::kInvalidArgument, "scale bound L must be >= 2");
  }
}

void require_digits(std::span<const std::uint64_t> digits,
                    std::uint64_t limit, const char* what) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= limit) {
      throw Error(ErrorCode::kOutOfRange,
                  std::string(what) + "[" + std::to_string(i) + "] = " +
                      std::to_string(digits[i]) + " outside [0, " +
                      std::to_string(limit) + ")");
    }
  }
}

}  // namespace

mpz_class norm_levels(std::uint64_t scale_bound) {
  mpz_class levels;
  mpz_class l(scale_bound);
  mpz_pow_ui(levels.get_mpz_t(), l.get_mpz_t(), 8);
  return levels << 15;
}

mpz_class radix_power(std::uint64_t scale_bound, std::size_t digits) {
  mpz_class out;
  mpz_class radix(4 * scale_bound);
  mpz_pow_ui(out.get_mpz_t(), radix.get_mpz_t(), digits);
  return out;
}

Digits encode_signs(std::span<const int> signs, std::uint64_t scale_bound,
                    RandomSource& rng) {
  require_scale_bound(scale_bound);
  Digits parities(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      throw Error(ErrorCode::kInvalidArgument, "signs must be +1 or -1");
    }
    const std::uint64_t j = rng.uniform(scale_bound);
    parities[i] = 2 * j + (signs[i] == 1 ? 0 : 1);
  }
  return parities;
}

Signs decode_signs(std::span<const std::uint64_t> parities) {
  Signs signs(parities.size());
  for (std::size_t i = 0; i < parities.size(); ++i) {
    signs[i] = parities[i] % 2 == 0 ? 1 : -1;
  }
  return signs;
}

mpz_class quantize_norm(double norm, std::uint64_t scale_bound,
                        double lm_ratio) {
  require_scale_bound(scale_bound);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kInvalidArgument, "norm must be positive and finite");
  }
  if (!(lm_ratio > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lm_ratio must be positive");
  }
  const double l = static_cast<double>(scale_bound);
  const double half_range = lm_ratio;  // L/M
  const double log_norm = std::log(norm);
  const double lower = -half_range;
  const double upper = lm_ratio * (l - 1.0) / l;  // (L-1)/M
  if (log_norm < lower - kLogNormSlack || log_norm > upper + kLogNormSlack) {
    throw Error(ErrorCode::kOutOfRange,
                "log-norm " + std::to_string(log_norm) + " outside [" +
                    std::to_string(lower) + ", " + std::to_string(upper) + "]");
  }
  double fraction = (log_norm + half_range) / (2.0 * half_range);
  if (fraction < 0.0) fraction = 0.0;

  const mpz_class levels = norm_levels(scale_bound);
  // The fraction carries 53 bits; extend to enough bits to scale exactly.
  const auto precision = 64 + mpz_sizeinbase(levels.get_mpz_t(), 2);
  mpf_class scaled(fraction, precision);
  scaled *= mpf_class(levels, precision);
  mpz_class index(scaled);  // truncation == floor for non-negative values
  if (index >= levels) index = levels - 1;
  return index;
}

double log_norm_sum(const mpz_class& norm_sum, std::uint64_t scale_bound,
                    double lm_ratio) {
  require_scale_bound(scale_bound);
  const mpz_class levels = norm_levels(scale_bound);
  const mpz_class centered = norm_sum - levels;
  // 2^14 L^7 M = (2^15 L^8 / 2) / lm_ratio
  return centered.get_d() * lm_ratio / (levels.get_d() / 2.0);
}

mpz_class pack(const PermutationSecret& secret, std::uint64_t scale_bound) {
  return pack(secret.scales, secret.parities, secret.norm_index, scale_bound);
}

mpz_class pack(std::span<const std::uint64_t> scales,
               std::span<const std::uint64_t> parities,
               const mpz_class& norm_index, std::uint64_t scale_bound) {
  require_scale_bound(scale_bound);
  if (scales.size() != parities.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scale and parity digit counts differ");
  }
  require_digits(scales, 2 * scale_bound, "u");
  require_digits(parities, 2 * scale_bound, "v");
  if (sgn(norm_index) < 0 || norm_index >= norm_levels(scale_bound)) {
    throw Error(ErrorCode::kOutOfRange, "norm index w outside [0, 2^15 L^8)");
  }
  const unsigned long radix = 4 * scale_bound;
  // Horner from the most significant digit down.
  mpz_class packed = norm_index;
  for (auto it = parities.rbegin(); it != parities.rend(); ++it) {
    mpz_mul_ui(packed.get_mpz_t(), packed.get_mpz_t(), radix);
    mpz_add_ui(packed.get_mpz_t(), packed.get_mpz_t(), *it);
  }
  for (auto it = scales.rbegin(); it != scales.rend(); ++it) {
    mpz_mul_ui(packed.get_mpz_t(), packed.get_mpz_t(), radix);
    mpz_add_ui(packed.get_mpz_t(), packed.get_mpz_t(), *it);
  }
  return packed;
}

UnpackedSum unpack(const mpz_class& packed, std::size_t segments,
                   std::uint64_t scale_bound) {
  require_scale_bound(scale_bound);
  if (sgn(packed) < 0 ||
      packed >= radix_power(scale_bound, 2 * segments + 9)) {
    throw Error(ErrorCode::kCorruptToken,
                "packed value outside [0, (4L)^(2K+9))");
  }
  const unsigned long radix = 4 * scale_bound;
  UnpackedSum out;
  out.scales.resize(segments);
  out.parities.resize(segments);
  mpz_class rest = packed;
  for (std::size_t i = 0; i < segments; ++i) {
    out.scales[i] =
        mpz_tdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), radix);
  }
  for (std::size_t i = 0; i < segments; ++i) {
    out.parities[i] =
        mpz_tdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), radix);
  }
  out.norm_index = std::move(rest);
  return out;
}

}  // namespace securevector::codec
