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

// Verification, benchmarking and permutation-study routines behind the CLI.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "securevector/enroll.hpp"
#include "securevector/paillier.hpp"
#include "securevector/params.hpp"
#include "securevector/random.hpp"

namespace securevector::harness {

// Plaintext value of the metric selected by `mode`.
double plaintext_metric(std::span<const double> x, std::span<const double> y,
                        MetricMode mode);

struct VerifyReport {
  std::size_t pairs = 0;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double max_rel_error = 0.0;
};

// Enrolls every feature, scores `pairs` random distinct pairs through the
// protected path and compares against the plaintext metric.
VerifyReport verify_lossless(std::span<const FeatureVector> features,
                             const ParamSet& params,
                             const paillier::KeyPair& keys, std::size_t pairs,
                             RandomSource& rng, std::size_t workers = 1,
                             const EnrollOptions& options = {});

struct BenchReport {
  double enroll_ms_avg = 0.0;
  double match_ms_avg = 0.0;
  std::size_t record_bytes = 0;
  std::size_t key_bytes = 0;
  std::size_t trial_count = 0;
  ParamSet params;
};

inline constexpr std::size_t kBenchWarmup = 10;

// Times `trials` enrollments of random unit vectors and `trials` matches at
// the recommended parameters for (key_bits, dim), after kBenchWarmup
// discarded iterations of each. key_bytes is the private key document size.
BenchReport run_benchmark(std::size_t dim, std::size_t key_bits,
                          std::size_t trials, RandomSource& rng);

enum class PermutationKind { kScalesOnly, kSignsOnly, kBoth };

std::string_view to_string(PermutationKind kind);

// cos(x, c_x) for `repeats` fresh permutations of each feature.
std::vector<double> permutation_similarities(
    std::span<const FeatureVector> features, const ParamSet& params,
    PermutationKind kind, std::size_t repeats, RandomSource& rng);

struct Histogram {
  double lower = -1.0;
  double upper = 1.0;
  std::vector<std::size_t> counts;
  double mean = 0.0;
  double fraction_below_0_6 = 0.0;
};

Histogram histogram(std::span<const double> values, std::size_t bins,
                    double lower = -1.0, double upper = 1.0);

// A random unit vector with i.i.d. Gaussian direction.
FeatureVector random_unit_vector(std::size_t dim, RandomSource& rng);

}  // namespace securevector::harness
