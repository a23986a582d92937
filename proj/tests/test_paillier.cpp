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

#include <set>

#include "doctest.h"
#include "securevector/error.hpp"
#include "securevector/paillier.hpp"
#include "securevector/random.hpp"

namespace sv = securevector;
namespace pl = securevector::paillier;

namespace {

const pl::KeyPair& key512() {
  static const pl::KeyPair keys = [] {
    sv::SeededRandom rng(512);
    return pl::generate_keypair(512, rng);
  }();
  return keys;
}

}  // namespace

TEST_CASE("keygen produces a modulus of exactly the requested size") {
  sv::SeededRandom rng(1);
  for (std::size_t bits : {64, 128, 256, 512}) {
    const auto keys = pl::generate_keypair(bits, rng);
    CHECK(keys.pub.bits() == bits);
    CHECK(keys.pub.n_squared == keys.pub.n * keys.pub.n);
  }
}

TEST_CASE("keygen rejects small or odd sizes") {
  sv::SeededRandom rng(1);
  CHECK_THROWS_AS(pl::generate_keypair(62, rng), sv::Error);
  CHECK_THROWS_AS(pl::generate_keypair(129, rng), sv::Error);
  CHECK_THROWS_AS(pl::generate_keypair(0, rng), sv::Error);
}

TEST_CASE("independent keygens give distinct moduli") {
  sv::SeededRandom a(10);
  sv::SeededRandom b(11);
  CHECK(pl::generate_keypair(128, a).pub.n != pl::generate_keypair(128, b).pub.n);
  sv::SystemRandom sys;
  CHECK(pl::generate_keypair(128, sys).pub.n != pl::generate_keypair(128, sys).pub.n);
}

TEST_CASE("seeded keygen is reproducible") {
  sv::SeededRandom a(99);
  sv::SeededRandom b(99);
  const auto ka = pl::generate_keypair(256, a);
  const auto kb = pl::generate_keypair(256, b);
  CHECK(ka.pub.n == kb.pub.n);
  CHECK(ka.priv.lambda == kb.priv.lambda);
}

TEST_CASE("lambda * mu = 1 mod n on generated keys") {
  sv::SeededRandom rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto keys = pl::generate_keypair(128, rng);
    mpz_class prod = keys.priv.lambda * keys.priv.mu;
    mpz_mod(prod.get_mpz_t(), prod.get_mpz_t(), keys.pub.n.get_mpz_t());
    CHECK(prod == 1);
  }
}

TEST_CASE("encrypt/decrypt boundary plaintexts") {
  const auto& k = key512();
  sv::SeededRandom rng(4);
  CHECK(pl::decrypt(k.priv, k.pub, pl::encrypt(k.pub, 0, rng)) == 0);
  CHECK(pl::decrypt(k.priv, k.pub, pl::encrypt(k.pub, 7, rng)) == 7);
  const mpz_class top = k.pub.n - 1;
  CHECK(pl::decrypt(k.priv, k.pub, pl::encrypt(k.pub, top, rng)) == top);
}

TEST_CASE("encryption is randomized") {
  const auto& k = key512();
  sv::SeededRandom rng(5);
  const auto a = pl::encrypt(k.pub, 42, rng);
  const auto b = pl::encrypt(k.pub, 42, rng);
  CHECK_FALSE(a == b);
  CHECK(pl::decrypt(k.priv, k.pub, a) == 42);
  CHECK(pl::decrypt(k.priv, k.pub, b) == 42);

  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    seen.insert(pl::encrypt(k.pub, 42, rng).value.get_str(16));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("homomorphic addition") {
  const auto& k = key512();
  sv::SeededRandom rng(6);
  auto enc = [&](long m) { return pl::encrypt(k.pub, m, rng); };
  CHECK(pl::decrypt(k.priv, k.pub, pl::add(k.pub, enc(3), enc(4))) == 7);
  CHECK(pl::decrypt(k.priv, k.pub, pl::add(k.pub, enc(1), enc(1))) == 2);
  CHECK(pl::decrypt(k.priv, k.pub, pl::add(k.pub, enc(0), enc(123456))) ==
        123456);
}

TEST_CASE("encrypt rejects plaintexts outside [0, n)") {
  const auto& k = key512();
  sv::SeededRandom rng(7);
  CHECK_THROWS_AS(pl::encrypt(k.pub, k.pub.n, rng), sv::Error);
  CHECK_THROWS_AS(pl::encrypt(k.pub, -1, rng), sv::Error);
}

TEST_CASE("decrypt rejects ciphertexts outside [0, n^2)") {
  const auto& k = key512();
  CHECK_THROWS_AS(pl::decrypt(k.priv, k.pub, pl::Ciphertext{k.pub.n_squared}),
                  sv::Error);
  CHECK_THROWS_AS(pl::decrypt(k.priv, k.pub, pl::Ciphertext{-1}), sv::Error);
}

TEST_CASE("property: roundtrip over 1000 random plaintexts") {
  const auto& k = key512();
  sv::SeededRandom rng(8);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const mpz_class m = rng.below(k.pub.n);
    if (pl::decrypt(k.priv, k.pub, pl::encrypt(k.pub, m, rng)) != m) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("property: additivity over 1000 random pairs") {
  const auto& k = key512();
  sv::SeededRandom rng(9);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const mpz_class m1 = rng.below(k.pub.n);
    const mpz_class m2 = rng.below(k.pub.n - m1);
    const auto sum = pl::add(k.pub, pl::encrypt(k.pub, m1, rng),
                             pl::encrypt(k.pub, m2, rng));
    if (pl::decrypt(k.priv, k.pub, sum) != m1 + m2) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("addition wraps modulo n past capacity") {
  const auto& k = key512();
  sv::SeededRandom rng(10);
  const mpz_class big = k.pub.n - 1;
  const auto sum =
      pl::add(k.pub, pl::encrypt(k.pub, big, rng), pl::encrypt(k.pub, 5, rng));
  CHECK(pl::decrypt(k.priv, k.pub, sum) == 4);
}

TEST_CASE("from_modulus rejects even or tiny moduli") {
  CHECK_THROWS_AS(pl::PublicKey::from_modulus(10), sv::Error);
  CHECK_THROWS_AS(pl::PublicKey::from_modulus(1), sv::Error);
}

TEST_CASE("random source helpers stay in range") {
  sv::SeededRandom rng(11);
  for (int i = 0; i < 10000; ++i) {
    CHECK(rng.uniform(6) < 6);
    const double u = rng.uniform_real();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const mpz_class bound("123456789012345678901234567890");
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(bound) < bound);
  CHECK(mpz_sizeinbase(rng.random_bits(3).get_mpz_t(), 2) <= 3);
  sv::SeededRandom a(5), b(5), c(6);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
}
