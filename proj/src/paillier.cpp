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

#include "securevector/paillier.hpp"

#include <string>
#include <utility>

#include "securevector/error.hpp"

namespace securevector::paillier {
namespace {

// Miller-Rabin rounds; composite acceptance probability < 4^-50 = 2^-100.
constexpr int kPrimalityRounds = 50;

// Random prime of exactly `bits` bits with the two top bits set, so that the
// product of two such primes has exactly 2*bits bits.
mpz_class random_prime(std::size_t bits, RandomSource& rng) {
  for (;;) {
    mpz_class candidate = rng.random_bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityRounds) > 0) {
      return candidate;
    }
  }
}

void check_ciphertext(const PublicKey& pub, const Ciphertext& ct) {
  if (sgn(ct.value) < 0 || ct.value >= pub.n_squared) {
    throw Error(ErrorCode::kOutOfRange, "ciphertext outside [0, n^2)");
  }
}

}  // namespace

PublicKey PublicKey::from_modulus(mpz_class n) {
  if (n < 3 || mpz_even_p(n.get_mpz_t())) {
    throw Error(ErrorCode::kInvalidArgument,
                "paillier modulus must be odd and >= 3");
  }
  PublicKey pub;
  pub.n_squared = n * n;
  pub.n = std::move(n);
  return pub;
}

KeyPair generate_keypair(std::size_t bits, RandomSource& rng) {
  if (bits < kMinKeyBits || bits % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "paillier key size must be even and >= " +
                    std::to_string(kMinKeyBits) + " bits, got " +
                    std::to_string(bits));
  }
  const std::size_t half = bits / 2;
  for (;;) {
    mpz_class p = random_prime(half, rng);
    mpz_class q = random_prime(half, rng);
    if (p == q) continue;
    mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bits) continue;

    mpz_class p1 = p - 1;
    mpz_class q1 = q - 1;
    mpz_class lambda;
    mpz_lcm(lambda.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
    mpz_class mu;
    if (mpz_invert(mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0) {
      continue;
    }
    return KeyPair{PublicKey::from_modulus(std::move(n)),
                   PrivateKey{std::move(lambda), std::move(mu)}};
  }
}

Ciphertext encrypt(const PublicKey& pub, const mpz_class& m,
                   RandomSource& rng) {
  if (sgn(m) < 0 || m >= pub.n) {
    throw Error(ErrorCode::kOutOfRange, "paillier plaintext outside [0, n)");
  }
  mpz_class r;
  mpz_class g;
  do {
    r = rng.below(pub.n);
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pub.n.get_mpz_t());
  } while (r == 0 || g != 1);

  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pub.n.get_mpz_t(),
           pub.n_squared.get_mpz_t());
  // g^m = (n + 1)^m = 1 + m*n (mod n^2)
  mpz_class gm = m * pub.n + 1;
  Ciphertext ct{gm * rn};
  mpz_mod(ct.value.get_mpz_t(), ct.value.get_mpz_t(),
          pub.n_squared.get_mpz_t());
  return ct;
}

mpz_class decrypt(const PrivateKey& priv, const PublicKey& pub,
                  const Ciphertext& ct) {
  check_ciphertext(pub, ct);
  mpz_class x;
  mpz_powm(x.get_mpz_t(), ct.value.get_mpz_t(), priv.lambda.get_mpz_t(),
           pub.n_squared.get_mpz_t());
  // L(x) = (x - 1) / n
  x -= 1;
  mpz_tdiv_q(x.get_mpz_t(), x.get_mpz_t(), pub.n.get_mpz_t());
  mpz_class m = x * priv.mu;
  mpz_mod(m.get_mpz_t(), m.get_mpz_t(), pub.n.get_mpz_t());
  return m;
}

Ciphertext add(const PublicKey& pub, const Ciphertext& a, const Ciphertext& b) {
  check_ciphertext(pub, a);
  check_ciphertext(pub, b);
  Ciphertext out{a.value * b.value};
  mpz_mod(out.value.get_mpz_t(), out.value.get_mpz_t(),
          pub.n_squared.get_mpz_t());
  return out;
}

}  // namespace securevector::paillier
