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

// Scoring of two enrolled records.
//
// The key holder adds the two encrypted tokens, decrypts only the sum and
// unpacks it into per-segment scale sums u_z, sign products s_z and the
// log-norm sum w_z. The similarity of the original features is then
//
//   x.y = sum_i s_z_i * exp(logW_x + logW_y - (u_z_i - 2L)/M) * (c_x_i . c_y_i)
//
// where c_x_i is segment i of the sanitized vector. Every factor is
// evaluated in log space with one exp per segment.

#pragma once

#include <span>
#include <string>

#include "securevector/codec.hpp"
#include "securevector/enroll.hpp"
#include "securevector/paillier.hpp"
#include "securevector/params.hpp"

namespace securevector {

struct MatchResult {
  // Cosine similarity, dot product or squared Euclidean distance, by mode.
  double score = 0.0;
  MetricMode mode = MetricMode::kCosineNormalized;
};

// Holds the private key and the parameters of one gallery. Stateless after
// construction and safe to share across threads.
class Matcher {
 public:
  Matcher(paillier::KeyPair keys, ParamSet params);

  const ParamSet& params() const { return params_; }
  const std::string& fingerprint() const { return fingerprint_; }

  // Decrypts E(T_x) * E(T_y) and decodes the digits. Throws
  // kFingerprintMismatch for foreign records and kCorruptToken when the
  // decrypted sum cannot come from two valid tokens.
  codec::CombinedSecret combine(const EnrolledRecord& x,
                                const EnrolledRecord& y) const;

  MatchResult match(const EnrolledRecord& x, const EnrolledRecord& y) const;

 private:
  codec::CombinedSecret decode_sum(const mpz_class& sum) const;

  paillier::KeyPair keys_;
  ParamSet params_;
  std::string fingerprint_;
  mpz_class max_norm_sum_;  // 2^16 L^8 - 2

  friend struct TokenInspector;
};

codec::CombinedSecret combine_tokens(const EnrolledRecord& x,
                                     const EnrolledRecord& y,
                                     const paillier::KeyPair& keys,
                                     const ParamSet& params);

// The reconstructed inner product x.y of the original features.
double score_cosine(std::span<const double> c_x, std::span<const double> c_y,
                    const codec::CombinedSecret& combined,
                    const ParamSet& params);

// Applies the metric of params.mode on top of score_cosine. The Euclidean
// modes use ‖c‖ as the feature norm (1 in normalized modes, ‖x‖ otherwise).
MatchResult score_metric(std::span<const double> c_x,
                         std::span<const double> c_y,
                         const codec::CombinedSecret& combined,
                         const ParamSet& params);

MatchResult match_pair(const EnrolledRecord& x, const EnrolledRecord& y,
                       const paillier::KeyPair& keys, const ParamSet& params);

}  // namespace securevector
