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

// Text formats and the gallery.
//
// Keys (*.pub, *.key) and single records (*.svrec) are JSON documents with
// sorted keys and no insignificant whitespace. Galleries (*.svgal) are JSON
// Lines: a header line followed by one line per record. Big integers travel
// as decimal strings. Sanitized components travel as base64 of their
// little-endian IEEE-754 bytes, so they round-trip bit-exactly at about a
// third of the size of decimal text. Every document carries a "version"
// field.

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "securevector/enroll.hpp"
#include "securevector/match.hpp"
#include "securevector/paillier.hpp"
#include "securevector/params.hpp"

namespace securevector::store {

inline constexpr int kFormatVersion = 1;

std::string serialize_public_key(const paillier::PublicKey& pub);
paillier::PublicKey parse_public_key(std::string_view text);

std::string serialize_key_pair(const paillier::KeyPair& keys);
paillier::KeyPair parse_key_pair(std::string_view text);

std::string serialize_params(const ParamSet& params);
ParamSet parse_params(std::string_view text);

struct RecordDocument {
  ParamSet params;
  EnrolledRecord record;
};

std::string serialize_record(const EnrolledRecord& record,
                             const ParamSet& params);
RecordDocument parse_record(std::string_view text);
// Also checks the record against the expected parameters and key; throws
// kFingerprintMismatch if it was produced under anything else.
EnrolledRecord parse_record(std::string_view text, const ParamSet& expected,
                            const paillier::PublicKey& pub);

struct Gallery {
  ParamSet params;
  std::string fingerprint;
  std::string modulus_digest;  // SHA-256 of the decimal modulus
  std::vector<EnrolledRecord> entries;

  static Gallery create(const ParamSet& params, const paillier::PublicKey& pub);
  // Throws kFingerprintMismatch if the record belongs elsewhere.
  void add(EnrolledRecord record);
};

std::string serialize_gallery(const Gallery& gallery);
Gallery parse_gallery(std::string_view text);

struct Hit {
  std::size_t index = 0;  // insertion position in the gallery
  std::string label;
  double score = 0.0;
};

// Exhaustive scan returning the k best entries, best first: highest score
// for cosine and dot modes, smallest distance for the Euclidean modes. Ties
// keep insertion order.
std::vector<Hit> gallery_topk(const EnrolledRecord& probe,
                              const Gallery& gallery, std::size_t k,
                              const Matcher& matcher, std::size_t workers = 1);

// Whether a smaller score means a closer match in this mode.
constexpr bool lower_is_better(MetricMode mode) {
  return mode == MetricMode::kEuclideanNormalized ||
         mode == MetricMode::kEuclideanUnnormalized;
}

struct LabeledFeature {
  std::string label;
  std::vector<double> values;
  std::size_t line = 0;
};

// One vector per line, comma- or whitespace-separated. A leading token that
// is not a number is taken as the label; otherwise the 1-based line number
// is. Blank lines and lines starting with '#' are skipped. The first vector
// fixes the dimension.
std::vector<LabeledFeature> read_features(std::istream& in);
std::vector<LabeledFeature> read_features_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace securevector::store
