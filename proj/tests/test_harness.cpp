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
#include <vector>

#include "doctest.h"
#include "harness.hpp"
#include "securevector/error.hpp"
#include "support/test_support.hpp"

namespace sv = securevector;
namespace hn = securevector::harness;

namespace {

std::vector<sv::FeatureVector> unit_features(std::size_t count, std::size_t dim,
                                             sv::RandomSource& rng) {
  std::vector<sv::FeatureVector> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(hn::random_unit_vector(dim, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("random_unit_vector has unit norm") {
  sv::SeededRandom rng(70);
  for (std::size_t dim : {1, 2, 512}) {
    CHECK(hn::random_unit_vector(dim, rng).norm() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("plaintext_metric by mode") {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{3.0, -1.0};
  CHECK(hn::plaintext_metric(x, y, sv::MetricMode::kCosineNormalized) == 1.0);
  CHECK(hn::plaintext_metric(x, y, sv::MetricMode::kDotUnnormalized) == 1.0);
  CHECK(hn::plaintext_metric(x, y, sv::MetricMode::kEuclideanNormalized) == 13.0);
  CHECK(hn::plaintext_metric(x, y, sv::MetricMode::kEuclideanUnnormalized) ==
        13.0);
}

TEST_CASE("histogram bins, mean and the 0.6 fraction") {
  const std::vector<double> values{-1.0, -0.5, 0.0, 0.59, 0.6, 1.0};
  const hn::Histogram h = hn::histogram(values, 4);
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 1, 3});
  CHECK(h.mean == doctest::Approx(0.69 / 6.0));
  CHECK(h.fraction_below_0_6 == doctest::Approx(4.0 / 6.0));
  const hn::Histogram empty = hn::histogram(std::vector<double>{}, 3);
  CHECK(empty.counts == std::vector<std::size_t>{0, 0, 0});
  CHECK_THROWS_AS(hn::histogram(values, 0), sv::Error);
  CHECK_THROWS_AS(hn::histogram(values, 2, 1.0, 1.0), sv::Error);
}

TEST_CASE("sign-only permutations average to zero similarity") {
  sv::SeededRandom rng(71);
  const sv::ParamSet p = sv::optimal_params(512, 512);
  const auto features = unit_features(10, p.dim, rng);
  const auto sims = hn::permutation_similarities(
      features, p, hn::PermutationKind::kSignsOnly, 100, rng);
  CHECK(sims.size() == 1000);
  CHECK(std::abs(hn::histogram(sims, 20).mean) < 0.1);
}

TEST_CASE("scale-only permutations at lm_ratio 4 mostly fall below 0.6") {
  sv::SeededRandom rng(72);
  sv::ParamSet p = sv::optimal_params(512, 512, sv::MetricMode::kCosineNormalized,
                                      4.0);
  const auto features = unit_features(10, p.dim, rng);
  const auto sims = hn::permutation_similarities(
      features, p, hn::PermutationKind::kScalesOnly, 100, rng);
  for (double s : sims) CHECK(s > 0.0);  // positive rescaling keeps x's side
  CHECK(hn::histogram(sims, 20).fraction_below_0_6 >= 0.6);
}

TEST_CASE("full permutations decorrelate") {
  sv::SeededRandom rng(73);
  for (double lm : {4.0, 128.0}) {
    const sv::ParamSet p = sv::optimal_params(
        512, 512, sv::MetricMode::kCosineNormalized, lm);
    const auto features = unit_features(10, p.dim, rng);
    const auto sims = hn::permutation_similarities(
        features, p, hn::PermutationKind::kBoth, 100, rng);
    CHECK(std::abs(hn::histogram(sims, 20).mean) < 0.1);
  }
}

TEST_CASE("permutation study rejects bad input") {
  sv::SeededRandom rng(74);
  sv::ParamSet p = sv::optimal_params(512, 512);
  const auto features = unit_features(1, p.dim, rng);
  CHECK_THROWS_AS(hn::permutation_similarities(
                      features, p, hn::PermutationKind::kBoth, 0, rng),
                  sv::Error);
  p.lm_ratio = 0.0;
  CHECK_THROWS_AS(hn::permutation_similarities(
                      features, p, hn::PermutationKind::kBoth, 1, rng),
                  sv::Error);
  CHECK(hn::to_string(hn::PermutationKind::kScalesOnly) == "u-only");
  CHECK(hn::to_string(hn::PermutationKind::kSignsOnly) == "s-only");
  CHECK(hn::to_string(hn::PermutationKind::kBoth) == "both");
}

TEST_CASE("verify_lossless stays within tolerance") {
  sv::SeededRandom rng(75);
  const auto keys = sv::paillier::generate_keypair(512, rng);
  const sv::ParamSet p = sv::optimal_params(512, 512);
  const auto features = unit_features(50, p.dim, rng);
  for (std::size_t workers : {1, 2}) {
    const hn::VerifyReport r =
        hn::verify_lossless(features, p, keys, 500, rng, workers);
    CHECK(r.pairs == 500);
    CHECK(r.max_abs_error <= 1e-4);
    CHECK(r.mean_abs_error <= r.max_abs_error);
    CHECK(r.max_abs_error > 0.0);
  }
  const hn::VerifyReport none = hn::verify_lossless(features, p, keys, 0, rng);
  CHECK(none.pairs == 0);
  CHECK(none.max_abs_error == 0.0);
  CHECK_THROWS_AS(hn::verify_lossless(std::span(features).first(1), p, keys,
                                      10, rng),
                  sv::Error);
}

TEST_CASE("verify_lossless honours the normalize option") {
  sv::SeededRandom rng(76);
  const auto keys = sv::paillier::generate_keypair(512, rng);
  const sv::ParamSet p = sv::optimal_params(512, 512);
  std::vector<sv::FeatureVector> features;
  for (int i = 0; i < 10; ++i) {
    features.push_back(sv::testing::scaled_vector(p.dim, 3.0, rng));
  }
  CHECK_THROWS_AS(hn::verify_lossless(features, p, keys, 10, rng), sv::Error);
  const auto r =
      hn::verify_lossless(features, p, keys, 100, rng, 1, {.normalize = true});
  CHECK(r.max_abs_error <= 1e-4);
}

TEST_CASE("run_benchmark reports positive figures") {
  sv::SeededRandom rng(77);
  const hn::BenchReport one = hn::run_benchmark(512, 512, 1, rng);
  CHECK(one.trial_count == 1);
  CHECK(one.enroll_ms_avg > 0.0);
  CHECK(one.match_ms_avg > 0.0);
  CHECK(one.record_bytes >= 4 * 1024);
  CHECK(one.record_bytes <= 12 * 1024);
  CHECK(one.key_bytes > 0);
  CHECK(one.params.segments == 64);
  CHECK_THROWS_AS(hn::run_benchmark(512, 512, 0, rng), sv::Error);
  CHECK_THROWS_AS(hn::run_benchmark(512, 63, 1, rng), sv::Error);
}
