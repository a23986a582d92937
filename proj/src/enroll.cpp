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

#include "securevector/enroll.hpp"

#include <cassert>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "securevector/digest.hpp"
#include "securevector/error.hpp"

namespace securevector {
namespace {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void require_dimension(const FeatureVector& x, const ParamSet& params) {
  if (x.size() != params.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature has dimension " + std::to_string(x.size()) +
                    ", parameters expect " + std::to_string(params.dim));
  }
}

}  // namespace

FeatureVector::FeatureVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature vector is empty");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature vector has a non-finite component");
    }
  }
  norm_ = l2_norm(values_);
  if (!(norm_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "feature vector is zero");
  }
}

FeatureVector FeatureVector::normalized() const {
  std::vector<double> unit(values_.size());
  for (std::size_t i = 0; i < unit.size(); ++i) unit[i] = values_[i] / norm_;
  return FeatureVector(std::move(unit));
}

SealedToken SealedToken::seal(const paillier::PublicKey& pub,
                              const mpz_class& packed, RandomSource& rng) {
  return SealedToken(paillier::encrypt(pub, packed, rng));
}

SealedToken SealedToken::from_decimal(std::string_view digits) {
  if (digits.empty() ||
      digits.find_first_not_of("0123456789") != std::string_view::npos) {
    throw Error(ErrorCode::kParse, "ciphertext is not a decimal integer");
  }
  mpz_class value;
  value.set_str(std::string(digits), 10);
  return SealedToken(paillier::Ciphertext{std::move(value)});
}

std::string SealedToken::to_decimal() const { return ct_.value.get_str(10); }

Permutation sample_permutation(std::size_t segments, std::uint64_t scale_bound,
                               RandomSource& rng) {
  if (segments < 1 || scale_bound < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample_permutation needs K >= 1 and L >= 2");
  }
  Permutation p;
  p.scales.resize(segments);
  p.signs.resize(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    p.scales[i] = rng.uniform(2 * scale_bound);
    p.signs[i] = (rng.next_u64() & 1) ? -1 : 1;
  }
  return p;
}

PermutedFeature permute(const FeatureVector& x, const Permutation& permutation,
                        const ParamSet& params) {
  require_dimension(x, params);
  if (params.segments == 0 || params.dim % params.segments != 0 ||
      permutation.scales.size() != params.segments ||
      permutation.signs.size() != params.segments) {
    throw Error(ErrorCode::kDimensionMismatch,
                "permutation does not match the segment layout");
  }
  const std::size_t seg_len = params.segment_length();
  const double inv_divisor = params.inverse_divisor();
  const auto bound = static_cast<double>(params.scale_bound);

  // One exponential per distinct scale index.
  std::unordered_map<std::uint64_t, double> factors;
  factors.reserve(params.segments);

  PermutedFeature out;
  out.values.resize(params.dim);
  auto in = x.values();
  for (std::size_t i = 0; i < params.segments; ++i) {
    const std::uint64_t u = permutation.scales[i];
    const int s = permutation.signs[i];
    if (u >= 2 * params.scale_bound || (s != 1 && s != -1)) {
      throw Error(ErrorCode::kOutOfRange, "permutation component out of range");
    }
    auto [it, inserted] = factors.try_emplace(u, 0.0);
    if (inserted) {
      it->second = std::exp((static_cast<double>(u) - bound) * inv_divisor);
    }
    const double factor = s * it->second;
    for (std::size_t j = i * seg_len; j < (i + 1) * seg_len; ++j) {
      out.values[j] = factor * in[j];
    }
  }
  out.norm = l2_norm(out.values);
  if (!is_normalized(params.mode)) out.norm /= x.norm();
  return out;
}

Sanitized sanitize(const FeatureVector& x, const ParamSet& params,
                   RandomSource& rng, const EnrollOptions& options) {
  params.validate();
  require_dimension(x, params);
  std::optional<FeatureVector> rescaled;
  if (is_normalized(params.mode) &&
      std::abs(x.norm() - 1.0) > kUnitNormTolerance) {
    if (!options.normalize) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature norm " + std::to_string(x.norm()) +
                      " is not 1 in mode " +
                      std::string(to_string(params.mode)));
    }
    rescaled = x.normalized();
  }
  const FeatureVector& input = rescaled ? *rescaled : x;

  Permutation permutation =
      sample_permutation(params.segments, params.scale_bound, rng);
  PermutedFeature permuted = permute(input, permutation, params);
#ifndef NDEBUG
  {
    const double log_w = std::log(permuted.norm);
    const double l = static_cast<double>(params.scale_bound);
    assert(log_w >= -params.lm_ratio - 1e-6);
    assert(log_w <= params.lm_ratio * (l - 1.0) / l + 1e-6);
  }
#endif

  Sanitized out;
  out.norm = permuted.norm;
  out.sanitized = std::move(permuted.values);
  for (double& v : out.sanitized) v /= out.norm;

  out.secret.parities =
      codec::encode_signs(permutation.signs, params.scale_bound, rng);
  out.secret.scales = std::move(permutation.scales);
  out.secret.signs = std::move(permutation.signs);
  out.secret.norm_index =
      codec::quantize_norm(out.norm, params.scale_bound, params.lm_ratio);
  out.packed = codec::pack(out.secret, params.scale_bound);
  return out;
}

EnrolledRecord enroll(const FeatureVector& x, const ParamSet& params,
                      const paillier::PublicKey& pub, RandomSource& rng,
                      const EnrollOptions& options) {
  if (pub.bits() != params.key_bits) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "public key has " + std::to_string(pub.bits()) +
                    " bits, parameters expect S=" +
                    std::to_string(params.key_bits));
  }
  Sanitized s = sanitize(x, params, rng, options);
  EnrolledRecord record;
  record.sanitized = std::move(s.sanitized);
  record.token = SealedToken::seal(pub, s.packed, rng);
  record.fingerprint = fingerprint(params, pub);
  return record;
}

std::string fingerprint(const ParamSet& params,
                        const paillier::PublicKey& pub) {
  return sha256_hex(canonical_string(params) + ";n=" + pub.n.get_str(10));
}

}  // namespace securevector
