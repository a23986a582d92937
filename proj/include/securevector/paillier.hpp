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

// Paillier additive homomorphic encryption with the g = n + 1 generator.
//
// A note on "key size": the library follows the convention of calling the
// modulus bit length S the security parameter. The classical security of
// a 512-bit RSA-type modulus is far below 512 bits (it can be factored with
// public tools), so production deployments should use S >= 2048.

#pragma once

#include <cstddef>

#include <gmpxx.h>

#include "securevector/random.hpp"

namespace securevector::paillier {

inline constexpr std::size_t kMinKeyBits = 64;

struct PublicKey {
  mpz_class n;
  mpz_class n_squared;

  // Bit length of n; the key size S.
  std::size_t bits() const { return mpz_sizeinbase(n.get_mpz_t(), 2); }

  // Builds a key from a modulus, caching n^2. Throws on n < 3 or even n.
  static PublicKey from_modulus(mpz_class n);

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.n == b.n;
  }
};

struct PrivateKey {
  mpz_class lambda;  // lcm(p-1, q-1)
  mpz_class mu;      // lambda^-1 mod n
};

struct KeyPair {
  PublicKey pub;
  PrivateKey priv;
};

struct Ciphertext {
  mpz_class value;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.value == b.value;
  }
};

// Generates a key pair whose modulus has exactly `bits` bits, from two
// distinct primes of bits/2 bits each. bits must be even and >= 64.
KeyPair generate_keypair(std::size_t bits, RandomSource& rng);

// Encrypts 0 <= m < n as (1 + m*n) * r^n mod n^2 with fresh random r.
Ciphertext encrypt(const PublicKey& pub, const mpz_class& m, RandomSource& rng);

// Returns m in [0, n). Ciphertexts from a different key decrypt to garbage;
// that is not detected.
mpz_class decrypt(const PrivateKey& priv, const PublicKey& pub,
                  const Ciphertext& ct);

// Ciphertext of m_a + m_b (mod n). Wraps silently when m_a + m_b >= n.
Ciphertext add(const PublicKey& pub, const Ciphertext& a, const Ciphertext& b);

}  // namespace securevector::paillier
