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

#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <utility>

#include "securevector/error.hpp"
#include "securevector/match.hpp"
#include "securevector/parallel.hpp"
#include "securevector/store.hpp"

namespace securevector::harness {
namespace {

using Clock = std::chrono::steady_clock;

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

double plaintext_metric(std::span<const double> x, std::span<const double> y,
                        MetricMode mode) {
  switch (mode) {
    case MetricMode::kCosineNormalized:
    case MetricMode::kDotUnnormalized:
      return dot(x, y);
    case MetricMode::kEuclideanNormalized:
    case MetricMode::kEuclideanUnnormalized: {
      double sum = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sum += (x[i] - y[i]) * (x[i] - y[i]);
      }
      return sum;
    }
  }
  return 0.0;
}

VerifyReport verify_lossless(std::span<const FeatureVector> features,
                             const ParamSet& params,
                             const paillier::KeyPair& keys, std::size_t pairs,
                             RandomSource& rng, std::size_t workers,
                             const EnrollOptions& options) {
  if (features.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "verification needs at least two features");
  }
  VerifyReport report;
  if (pairs == 0) return report;

  // The plaintext oracle sees exactly what enrollment saw.
  std::vector<FeatureVector> inputs;
  inputs.reserve(features.size());
  for (const FeatureVector& f : features) {
    const bool rescale = options.normalize && is_normalized(params.mode) &&
                         std::abs(f.norm() - 1.0) > kUnitNormTolerance;
    inputs.push_back(rescale ? f.normalized() : f);
  }
  std::vector<EnrolledRecord> records;
  records.reserve(inputs.size());
  for (const FeatureVector& f : inputs) {
    records.push_back(enroll(f, params, keys.pub, rng));
  }

  std::vector<std::pair<std::size_t, std::size_t>> sampled(pairs);
  for (auto& [a, b] : sampled) {
    a = rng.uniform(records.size());
    do {
      b = rng.uniform(records.size());
    } while (b == a);
  }

  const Matcher matcher(keys, params);
  std::vector<double> abs_err(pairs);
  std::vector<double> rel_err(pairs);
  parallel_for(pairs, workers, [&](std::size_t i) {
    const auto [a, b] = sampled[i];
    const double protected_score = matcher.match(records[a], records[b]).score;
    const double plain =
        plaintext_metric(inputs[a].values(), inputs[b].values(), params.mode);
    abs_err[i] = std::abs(protected_score - plain);
    rel_err[i] = plain != 0.0 ? abs_err[i] / std::abs(plain) : abs_err[i];
  });
  report.pairs = pairs;
  double total = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    report.max_abs_error = std::max(report.max_abs_error, abs_err[i]);
    report.max_rel_error = std::max(report.max_rel_error, rel_err[i]);
    total += abs_err[i];
  }
  report.mean_abs_error = total / static_cast<double>(pairs);
  return report;
}

BenchReport run_benchmark(std::size_t dim, std::size_t key_bits,
                          std::size_t trials, RandomSource& rng) {
  if (trials == 0) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  }
  const paillier::KeyPair keys = paillier::generate_keypair(key_bits, rng);
  const ParamSet params = optimal_params(key_bits, dim);
  const Matcher matcher(keys, params);

  const std::size_t total = trials + kBenchWarmup;
  std::vector<FeatureVector> features;
  features.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    features.push_back(random_unit_vector(dim, rng));
  }

  std::vector<EnrolledRecord> records;
  records.reserve(total);
  for (std::size_t i = 0; i < kBenchWarmup; ++i) {
    records.push_back(enroll(features[i], params, keys.pub, rng));
  }
  auto start = Clock::now();
  for (std::size_t i = kBenchWarmup; i < total; ++i) {
    records.push_back(enroll(features[i], params, keys.pub, rng));
  }
  const double enroll_ms = elapsed_ms(start);

  double sink = 0.0;
  for (std::size_t i = 0; i < kBenchWarmup; ++i) {
    sink += matcher.match(records[i], records[(i + 1) % total]).score;
  }
  start = Clock::now();
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t a = kBenchWarmup + i;
    sink += matcher.match(records[a], records[(a + 1) % total]).score;
  }
  const double match_ms = elapsed_ms(start);
  if (!std::isfinite(sink)) {
    throw Error(ErrorCode::kCorruptToken, "benchmark produced a non-finite score");
  }

  BenchReport report;
  report.trial_count = trials;
  report.enroll_ms_avg = enroll_ms / static_cast<double>(trials);
  report.match_ms_avg = match_ms / static_cast<double>(trials);
  report.record_bytes = store::serialize_record(records.back(), params).size();
  report.key_bytes = store::serialize_key_pair(keys).size();
  report.params = params;
  return report;
}

std::string_view to_string(PermutationKind kind) {
  switch (kind) {
    case PermutationKind::kScalesOnly:
      return "u-only";
    case PermutationKind::kSignsOnly:
      return "s-only";
    case PermutationKind::kBoth:
      return "both";
  }
  return "unknown";
}

std::vector<double> permutation_similarities(
    std::span<const FeatureVector> features, const ParamSet& params,
    PermutationKind kind, std::size_t repeats, RandomSource& rng) {
  params.validate();
  if (repeats == 0) {
    throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  }
  std::vector<double> out;
  out.reserve(features.size() * repeats);
  for (const FeatureVector& x : features) {
    for (std::size_t r = 0; r < repeats; ++r) {
      Permutation p =
          sample_permutation(params.segments, params.scale_bound, rng);
      if (kind == PermutationKind::kScalesOnly) {
        std::fill(p.signs.begin(), p.signs.end(), 1);
      } else if (kind == PermutationKind::kSignsOnly) {
        std::fill(p.scales.begin(), p.scales.end(), params.scale_bound);
      }
      const PermutedFeature b = permute(x, p, params);
      // c = b / W is a positive rescaling of b, so cos(x, c) = cos(x, b).
      double b_norm = 0.0;
      for (double v : b.values) b_norm += v * v;
      out.push_back(dot(x.values(), b.values) / (x.norm() * std::sqrt(b_norm)));
    }
  }
  return out;
}

Histogram histogram(std::span<const double> values, std::size_t bins,
                    double lower, double upper) {
  if (bins == 0 || !(upper > lower)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs bins >= 1");
  }
  Histogram h;
  h.lower = lower;
  h.upper = upper;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  double total = 0.0;
  std::size_t below = 0;
  const double width = (upper - lower) / static_cast<double>(bins);
  for (double v : values) {
    total += v;
    if (v < 0.6) ++below;
    auto bin = static_cast<std::ptrdiff_t>(std::floor((v - lower) / width));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  h.mean = total / static_cast<double>(values.size());
  h.fraction_below_0_6 =
      static_cast<double>(below) / static_cast<double>(values.size());
  return h;
}

FeatureVector random_unit_vector(std::size_t dim, RandomSource& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> v(dim);
  for (;;) {
    double sq = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      sq += x * x;
    }
    if (sq > 0.0) break;
  }
  return FeatureVector(std::move(v)).normalized();
}

}  // namespace securevector::harness
