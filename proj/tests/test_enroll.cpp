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

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "securevector/error.hpp"
#include "support/test_support.hpp"

namespace sv = securevector;
namespace pl = securevector::paillier;
using sv::testing::dot;
using sv::testing::norm;

namespace {

const pl::KeyPair& key512() {
  static const pl::KeyPair keys = [] {
    sv::SeededRandom rng(512);
    return pl::generate_keypair(512, rng);
  }();
  return keys;
}

sv::ParamSet params512(sv::MetricMode mode = sv::MetricMode::kCosineNormalized) {
  return sv::optimal_params(512, 512, mode);
}

sv::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const sv::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return sv::ErrorCode::kIo;
}

}  // namespace

TEST_CASE("FeatureVector rejects empty, non-finite and zero input") {
  CHECK(code_of([] { sv::FeatureVector(std::vector<double>{}); }) ==
        sv::ErrorCode::kInvalidArgument);
  CHECK(code_of([] { sv::FeatureVector({1.0, NAN}); }) ==
        sv::ErrorCode::kInvalidArgument);
  CHECK(code_of([] { sv::FeatureVector({INFINITY, 0.0}); }) ==
        sv::ErrorCode::kInvalidArgument);
  CHECK(code_of([] { sv::FeatureVector({0.0, 0.0, 0.0}); }) ==
        sv::ErrorCode::kInvalidArgument);
  const sv::FeatureVector v({3.0, 4.0});
  CHECK(v.norm() == 5.0);
  CHECK(v.normalized().norm() == doctest::Approx(1.0));
}

TEST_CASE("sample_permutation stays in range") {
  sv::SeededRandom rng(20);
  for (int draw = 0; draw < 10000; ++draw) {
    const sv::Permutation p = sv::sample_permutation(64, 3, rng);
    REQUIRE(p.scales.size() == 64);
    for (std::size_t i = 0; i < 64; ++i) {
      REQUIRE(p.scales[i] < 6);
      REQUIRE((p.signs[i] == 1 || p.signs[i] == -1));
    }
  }
  CHECK_THROWS_AS(sv::sample_permutation(0, 3, rng), sv::Error);
  CHECK_THROWS_AS(sv::sample_permutation(4, 1, rng), sv::Error);
}

TEST_CASE("sample_permutation frequencies are within 3 sigma") {
  sv::SeededRandom rng(21);
  const std::uint64_t l = 3;
  const int draws = 100000;
  std::vector<int> counts(2 * l, 0);
  int plus = 0;
  for (int i = 0; i < draws; ++i) {
    const sv::Permutation p = sv::sample_permutation(1, l, rng);
    ++counts[p.scales[0]];
    if (p.signs[0] == 1) ++plus;
  }
  const double q = 1.0 / (2 * l);
  const double sigma = std::sqrt(draws * q * (1 - q));
  for (int c : counts) CHECK(std::abs(c - draws * q) < 3 * sigma);
  CHECK(std::abs(plus - draws / 2.0) < 3 * std::sqrt(draws * 0.25));
}

TEST_CASE("independent permutations differ") {
  sv::SeededRandom rng(22);
  const sv::Permutation a = sv::sample_permutation(64, 3, rng);
  const sv::Permutation b = sv::sample_permutation(64, 3, rng);
  CHECK((a.scales != b.scales || a.signs != b.signs));
}

TEST_CASE("identity permutation and pure sign flip") {
  sv::SeededRandom rng(23);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  sv::Permutation identity{sv::codec::Digits(p.segments, p.scale_bound),
                           sv::codec::Signs(p.segments, 1)};
  const sv::PermutedFeature b = sv::permute(x, identity, p);
  for (std::size_t i = 0; i < p.dim; ++i) CHECK(b.values[i] == x.values()[i]);
  CHECK(b.norm == doctest::Approx(x.norm()).epsilon(1e-15));

  identity.signs.assign(p.segments, -1);
  const sv::PermutedFeature flipped = sv::permute(x, identity, p);
  for (std::size_t i = 0; i < p.dim; ++i) {
    CHECK(flipped.values[i] == -x.values()[i]);
  }
}

TEST_CASE("permute scales each segment by s e^((u-L)/M)") {
  sv::SeededRandom rng(24);
  const sv::ParamSet p = sv::optimal_params(128, 48);
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  const sv::Permutation perm =
      sv::sample_permutation(p.segments, p.scale_bound, rng);
  const sv::PermutedFeature b = sv::permute(x, perm, p);
  const double m = p.scale_bound / p.lm_ratio;
  const std::size_t seg = p.segment_length();
  for (std::size_t i = 0; i < p.dim; ++i) {
    const std::size_t k = i / seg;
    const double factor =
        perm.signs[k] *
        std::exp((static_cast<double>(perm.scales[k]) - p.scale_bound) / m);
    CHECK(b.values[i] == doctest::Approx(factor * x.values()[i]).epsilon(1e-14));
  }
}

TEST_CASE("permute rejects layout mismatches") {
  sv::SeededRandom rng(25);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  sv::Permutation perm = sv::sample_permutation(p.segments, p.scale_bound, rng);
  const sv::FeatureVector short_x = sv::testing::unit_vector(256, rng);
  CHECK(code_of([&] { sv::permute(short_x, perm, p); }) ==
        sv::ErrorCode::kDimensionMismatch);
  perm.scales.pop_back();
  CHECK(code_of([&] { sv::permute(x, perm, p); }) ==
        sv::ErrorCode::kDimensionMismatch);
  perm = sv::sample_permutation(p.segments, p.scale_bound, rng);
  perm.scales[0] = 2 * p.scale_bound;
  CHECK(code_of([&] { sv::permute(x, perm, p); }) ==
        sv::ErrorCode::kOutOfRange);
}

TEST_CASE("permuted norm stays within [e^(-L/M), e^((L-1)/M)]") {
  sv::SeededRandom rng(26);
  for (double lm : {1.0, 4.0, 128.0, 256.0}) {
    sv::ParamSet p = params512();
    p.lm_ratio = lm;
    const double l = static_cast<double>(p.scale_bound);
    const double lo = -lm;
    const double hi = lm * (l - 1.0) / l;
    const int features = lm == 128.0 ? 10000 : 1000;
    std::size_t violations = 0;
    for (int i = 0; i < features; ++i) {
      const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
      const sv::Permutation perm =
          sv::sample_permutation(p.segments, p.scale_bound, rng);
      const double log_w = std::log(sv::permute(x, perm, p).norm);
      if (log_w < lo - 1e-9 || log_w > hi + 1e-9) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("normalized modes produce unit sanitized vectors") {
  sv::SeededRandom rng(27);
  for (auto mode : {sv::MetricMode::kCosineNormalized,
                    sv::MetricMode::kEuclideanNormalized}) {
    const sv::ParamSet p = params512(mode);
    for (int i = 0; i < 1000; ++i) {
      const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
      const sv::Sanitized s = sv::sanitize(x, p, rng);
      REQUIRE(std::abs(norm(s.sanitized) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("unnormalized modes preserve the feature norm") {
  sv::SeededRandom rng(28);
  for (auto mode : {sv::MetricMode::kDotUnnormalized,
                    sv::MetricMode::kEuclideanUnnormalized}) {
    const sv::ParamSet p = params512(mode);
    for (int i = 0; i < 1000; ++i) {
      const double length = std::exp(-3.0 + 6.0 * rng.uniform_real());
      const sv::FeatureVector x = sv::testing::scaled_vector(p.dim, length, rng);
      const sv::Sanitized s = sv::sanitize(x, p, rng);
      REQUIRE(std::abs(norm(s.sanitized) - x.norm()) <= 1e-9 * x.norm());
    }
  }
}

TEST_CASE("sanitize builds a consistent secret") {
  sv::SeededRandom rng(29);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  const sv::Sanitized s = sv::sanitize(x, p, rng);
  CHECK(s.secret.scales.size() == p.segments);
  CHECK(sv::codec::decode_signs(s.secret.parities) == s.secret.signs);
  CHECK(s.secret.norm_index ==
        sv::codec::quantize_norm(s.norm, p.scale_bound, p.lm_ratio));
  CHECK(s.packed == sv::codec::pack(s.secret, p.scale_bound));
  CHECK(s.packed < sv::codec::radix_power(p.scale_bound, 2 * p.segments + 8));
  // c = b / W: undoing the permutation on c recovers x / W.
  const double m = p.scale_bound / p.lm_ratio;
  const std::size_t seg = p.segment_length();
  for (std::size_t i = 0; i < p.dim; ++i) {
    const std::size_t k = i / seg;
    const double factor =
        s.secret.signs[k] *
        std::exp((static_cast<double>(s.secret.scales[k]) - p.scale_bound) / m);
    CHECK(s.sanitized[i] * s.norm / factor ==
          doctest::Approx(x.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("normalized modes validate rather than rescale by default") {
  sv::SeededRandom rng(30);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::scaled_vector(p.dim, 2.0, rng);
  CHECK(code_of([&] { sv::sanitize(x, p, rng); }) ==
        sv::ErrorCode::kInvalidArgument);
  const sv::Sanitized s = sv::sanitize(x, p, rng, {.normalize = true});
  CHECK(norm(s.sanitized) == doctest::Approx(1.0).epsilon(1e-12));
  // Within tolerance is accepted as is.
  std::vector<double> near(x.values().begin(), x.values().end());
  for (double& v : near) v *= (1.0 + 5e-7) / x.norm();
  CHECK_NOTHROW(sv::sanitize(sv::FeatureVector(near), p, rng));
}

TEST_CASE("enroll rejects mismatched inputs") {
  sv::SeededRandom rng(31);
  const sv::ParamSet p = params512();
  const sv::FeatureVector wrong_dim = sv::testing::unit_vector(256, rng);
  CHECK(code_of([&] { sv::enroll(wrong_dim, p, key512().pub, rng); }) ==
        sv::ErrorCode::kDimensionMismatch);
  const auto small = pl::generate_keypair(128, rng);
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  CHECK(code_of([&] { sv::enroll(x, p, small.pub, rng); }) ==
        sv::ErrorCode::kFingerprintMismatch);
  sv::ParamSet bad = p;
  bad.segments = 7;
  CHECK(code_of([&] { sv::enroll(x, bad, key512().pub, rng); }) ==
        sv::ErrorCode::kInvalidArgument);
}

TEST_CASE("re-enrolling the same feature gives unrelated records") {
  sv::SeededRandom rng(32);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  std::set<std::string> tokens;
  std::set<std::vector<double>> vectors;
  for (int i = 0; i < 100; ++i) {
    const sv::EnrolledRecord r = sv::enroll(x, p, key512().pub, rng);
    tokens.insert(r.token.to_decimal());
    vectors.insert(r.sanitized);
    CHECK(r.fingerprint == sv::fingerprint(p, key512().pub));
  }
  CHECK(tokens.size() == 100);
  CHECK(vectors.size() == 100);
}

TEST_CASE("seeded enrollment is deterministic") {
  const sv::ParamSet p = params512();
  sv::SeededRandom feature_rng(33);
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, feature_rng);
  sv::SeededRandom a(99);
  sv::SeededRandom b(99);
  const sv::Sanitized sa = sv::sanitize(x, p, a);
  const sv::Sanitized sb = sv::sanitize(x, p, b);
  CHECK(sa.sanitized == sb.sanitized);
  CHECK(sa.packed == sb.packed);
  CHECK(sv::enroll(x, p, key512().pub, a) == sv::enroll(x, p, key512().pub, b));
}

TEST_CASE("full permutation decorrelates c from x") {
  sv::SeededRandom rng(34);
  const sv::ParamSet p = params512();
  const sv::FeatureVector x = sv::testing::unit_vector(p.dim, rng);
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    sum += dot(x.values(), sv::sanitize(x, p, rng).sanitized);
  }
  CHECK(std::abs(sum / 1000.0) < 0.1);
}

TEST_CASE("fingerprint binds parameters and modulus") {
  sv::SeededRandom rng(35);
  const sv::ParamSet p = params512();
  const std::string base = sv::fingerprint(p, key512().pub);
  CHECK(base.size() == 64);
  sv::ParamSet q = p;
  q.mode = sv::MetricMode::kEuclideanNormalized;
  CHECK(sv::fingerprint(q, key512().pub) != base);
  q = p;
  q.lm_ratio = 64.0;
  CHECK(sv::fingerprint(q, key512().pub) != base);
  const auto other = pl::generate_keypair(512, rng);
  CHECK(sv::fingerprint(p, other.pub) != base);
}

TEST_CASE("SealedToken decimal roundtrip") {
  sv::SeededRandom rng(36);
  const auto t = sv::SealedToken::seal(key512().pub, 12345, rng);
  CHECK(sv::SealedToken::from_decimal(t.to_decimal()) == t);
  CHECK(code_of([] { sv::SealedToken::from_decimal(""); }) ==
        sv::ErrorCode::kParse);
  CHECK(code_of([] { sv::SealedToken::from_decimal("12a"); }) ==
        sv::ErrorCode::kParse);
  CHECK(code_of([] { sv::SealedToken::from_decimal("-5"); }) ==
        sv::ErrorCode::kParse);
}
