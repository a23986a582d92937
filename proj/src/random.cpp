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

#include "securevector/random.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>
#include <vector>

#include <sodium.h>

namespace securevector {
namespace {

void ensure_sodium() {
  if (sodium_init() < 0) {
    throw std::runtime_error("libsodium initialisation failed");
  }
}

}  // namespace

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> bytes{};
  fill(bytes);
  std::uint64_t v = 0;
  for (std::uint8_t b : bytes) v = (v << 8) | b;
  return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: bound must be > 0");
  if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
  // Rejection on the largest multiple of bound below 2^64.
  const std::uint64_t limit = max() - (max() % bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

double RandomSource::uniform_real() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

mpz_class RandomSource::random_bits(std::size_t bits) {
  if (bits == 0) return 0;
  std::vector<std::uint8_t> bytes((bits + 7) / 8);
  fill(bytes);
  const std::size_t excess = bytes.size() * 8 - bits;
  bytes[0] &= static_cast<std::uint8_t>(0xFFu >> excess);
  mpz_class out;
  mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return out;
}

mpz_class RandomSource::below(const mpz_class& bound) {
  if (sgn(bound) <= 0) throw std::invalid_argument("below: bound must be > 0");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  for (;;) {
    mpz_class v = random_bits(bits);
    if (v < bound) return v;
  }
}

SystemRandom::SystemRandom() { ensure_sodium(); }

void SystemRandom::fill(std::span<std::uint8_t> out) {
  randombytes_buf(out.data(), out.size());
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  ensure_sodium();
  std::array<std::uint8_t, 8> seed_bytes{};
  for (int i = 0; i < 8; ++i) {
    seed_bytes[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  }
  static constexpr char kDomain[] = "securevector/seeded-random/v1";
  crypto_generichash_state state;
  crypto_generichash_init(&state, nullptr, 0, key_.size());
  crypto_generichash_update(
      &state, reinterpret_cast<const unsigned char*>(kDomain), sizeof kDomain);
  crypto_generichash_update(&state, seed_bytes.data(), seed_bytes.size());
  crypto_generichash_final(&state, key_.data(), key_.size());
}

void SeededRandom::refill() {
  static_assert(crypto_stream_chacha20_ietf_NONCEBYTES == 12);
  std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) {
    nonce[i] = static_cast<std::uint8_t>(nonce_counter_ >> (8 * i));
  }
  static const std::array<std::uint8_t, sizeof buffer_> kZeros{};
  crypto_stream_chacha20_ietf_xor_ic(buffer_.data(), kZeros.data(),
                                     buffer_.size(), nonce.data(),
                                     block_counter_, key_.data());
  block_counter_ += buffer_.size() / 64;
  if (block_counter_ == 0) ++nonce_counter_;
  offset_ = 0;
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::size_t written = 0;
  while (written < out.size()) {
    if (offset_ == buffer_.size()) refill();
    const std::size_t n =
        std::min(out.size() - written, buffer_.size() - offset_);
    std::memcpy(out.data() + written, buffer_.data() + offset_, n);
    offset_ += n;
    written += n;
  }
}

}  // namespace securevector
