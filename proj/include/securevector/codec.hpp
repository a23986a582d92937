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

// Carry-free base-(4L) packing of a permutation secret.
//
// A secret holds K scale indices u in [0, 2L), K parity digits v in [0, 2L)
// whose parity carries the sign flips, and one quantized log-norm w in
// [0, 2^15 L^8). They are laid out as
//
//   T = sum_i u_i (4L)^i + sum_i v_i (4L)^(K+i) + w (4L)^(2K)
//
// Because every digit of a single token is at most 2L-1, the digits of the
// sum of two tokens are at most 4L-2 and never carry. The sum therefore
// unpacks into the componentwise sums, and the parity of each summed v digit
// is the product of the two sign flips.
//
// Everything here is exact integer arithmetic except quantize_norm and
// log_norm_sum.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "securevector/random.hpp"

namespace securevector::codec {

using Digits = std::vector<std::uint64_t>;
using Signs = std::vector<int>;  // each entry is +1 or -1

struct PermutationSecret {
  Digits scales;    // u
  Signs signs;      // s
  Digits parities;  // v, even iff the sign is +1
  mpz_class norm_index;  // w
};

// Digits of T_x + T_y.
struct UnpackedSum {
  Digits scales;    // u_x + u_y
  Digits parities;  // v_x + v_y
  mpz_class norm_index;  // w_x + w_y
};

// What the key holder learns while matching two records.
struct CombinedSecret {
  Digits scale_sums;   // u_z, each <= 4L-2
  Signs sign_products; // s_z
  mpz_class norm_sum;  // w_z, <= 2^16 L^8 - 2
};

// 2^15 L^8: number of quantization levels for one log-norm.
mpz_class norm_levels(std::uint64_t scale_bound);

// (4L)^digits.
mpz_class radix_power(std::uint64_t scale_bound, std::size_t digits);

// Draws each v_i uniformly from the even (s_i = +1) or odd (s_i = -1)
// members of [0, 2L).
Digits encode_signs(std::span<const int> signs, std::uint64_t scale_bound,
                    RandomSource& rng);

Signs decode_signs(std::span<const std::uint64_t> parities);

// floor((log W + L/M) / (2L/M) * 2^15 L^8), with a half-open reading of
// the interval: the exact upper end clamps to the last level. W outside
// [e^(-L/M), e^((L-1)/M)] (beyond a 1e-6 slack in log space) is rejected.
mpz_class quantize_norm(double norm, std::uint64_t scale_bound,
                        double lm_ratio);

// (w_z - 2^15 L^8) / (2^14 L^7 M): the recovered log W_x + log W_y.
double log_norm_sum(const mpz_class& norm_sum, std::uint64_t scale_bound,
                    double lm_ratio);

mpz_class pack(const PermutationSecret& secret, std::uint64_t scale_bound);
mpz_class pack(std::span<const std::uint64_t> scales,
               std::span<const std::uint64_t> parities,
               const mpz_class& norm_index, std::uint64_t scale_bound);

// Splits a token or a token sum into its digits. Rejects values at or above
// (4L)^(2K+9), which no sum of two valid tokens can reach.
UnpackedSum unpack(const mpz_class& packed, std::size_t segments,
                   std::uint64_t scale_bound);

}  // namespace securevector::codec
