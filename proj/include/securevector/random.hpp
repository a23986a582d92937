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

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include <gmpxx.h>

namespace securevector {

// Source of randomness injected into every operation that samples.
//
// Satisfies UniformRandomBitGenerator, so it can drive <random>
// distributions directly. Implementations are not thread-safe; give each
// concurrent caller its own instance.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  virtual ~RandomSource() = default;

  virtual void fill(std::span<std::uint8_t> out) = 0;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  // Uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_real();

  // Uniform integer with exactly `bits` random bits (top bit may be zero).
  mpz_class random_bits(std::size_t bits);

  // Uniform integer in [0, bound). bound must be positive.
  mpz_class below(const mpz_class& bound);
};

// Operating-system entropy. The production source.
class SystemRandom final : public RandomSource {
 public:
  SystemRandom();
  void fill(std::span<std::uint8_t> out) override;
};

// ChaCha20 keystream keyed from a 64-bit seed. Reproducible across runs and
// platforms; intended for tests and `--seed` CI runs only.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed);
  void fill(std::span<std::uint8_t> out) override;

 private:
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::array<std::uint8_t, 1024> buffer_{};
  std::size_t offset_ = buffer_.size();
  std::uint32_t block_counter_ = 0;
  std::uint64_t nonce_counter_ = 0;
};

}  // namespace securevector
