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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "securevector/codec.hpp"
#include "securevector/paillier.hpp"
#include "securevector/params.hpp"
#include "securevector/random.hpp"

namespace securevector {

// Tolerance on |‖x‖ - 1| for features enrolled in a normalized mode.
inline constexpr double kUnitNormTolerance = 1e-6;

// A raw feature: finite, nonzero, double precision.
class FeatureVector {
 public:
  explicit FeatureVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double norm() const { return norm_; }
  FeatureVector normalized() const;

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

class Matcher;
struct TokenInspector;

// Encrypted packed secret of one record. There is deliberately no way to
// decrypt a lone token through the public API; Matcher only ever decrypts the
// homomorphic sum of two tokens.
class SealedToken {
 public:
  SealedToken() = default;

  static SealedToken seal(const paillier::PublicKey& pub,
                          const mpz_class& packed, RandomSource& rng);
  static SealedToken from_decimal(std::string_view digits);
  std::string to_decimal() const;

  friend bool operator==(const SealedToken&, const SealedToken&) = default;

 private:
  explicit SealedToken(paillier::Ciphertext ct) : ct_(std::move(ct)) {}

  paillier::Ciphertext ct_;

  friend class Matcher;
  friend struct TokenInspector;
};

struct EnrolledRecord {
  std::vector<double> sanitized;  // c
  SealedToken token;
  std::string fingerprint;
  std::optional<std::string> label;

  friend bool operator==(const EnrolledRecord&,
                         const EnrolledRecord&) = default;
};

// Per-segment scale indices u in [0, 2L) and sign flips s in {-1, +1}.
struct Permutation {
  codec::Digits scales;
  codec::Signs signs;
};

struct PermutedFeature {
  std::vector<double> values;  // b
  double norm = 0.0;           // W
};

// Everything enrollment computes before encryption.
struct Sanitized {
  std::vector<double> sanitized;  // c = b / W
  codec::PermutationSecret secret;
  mpz_class packed;  // T
  double norm = 0.0; // W
};

struct EnrollOptions {
  // Rescale non-unit input in normalized modes instead of rejecting it.
  bool normalize = false;
};

Permutation sample_permutation(std::size_t segments, std::uint64_t scale_bound,
                               RandomSource& rng);

// Segment i of b is s_i * e^((u_i - L)/M) * x_i. W is ‖b‖ in normalized
// modes and ‖b‖ / ‖x‖ in unnormalized ones.
PermutedFeature permute(const FeatureVector& x, const Permutation& permutation,
                        const ParamSet& params);

Sanitized sanitize(const FeatureVector& x, const ParamSet& params,
                   RandomSource& rng, const EnrollOptions& options = {});

EnrolledRecord enroll(const FeatureVector& x, const ParamSet& params,
                      const paillier::PublicKey& pub, RandomSource& rng,
                      const EnrollOptions& options = {});

// Hex SHA-256 over the canonical parameter string and the modulus. Records
// carrying different fingerprints never match.
std::string fingerprint(const ParamSet& params, const paillier::PublicKey& pub);

}  // namespace securevector
