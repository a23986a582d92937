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

#include "securevector/store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <sodium.h>

#include "json.hpp"
#include "securevector/digest.hpp"
#include "securevector/error.hpp"
#include "securevector/parallel.hpp"

namespace securevector::store {
namespace {

using nlohmann::json;

constexpr std::string_view kGalleryFormat = "securevector-gallery";

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse,
                "malformed " + std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& doc, const char* name, std::string_view what) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    throw Error(ErrorCode::kParse, std::string(what) + " is missing field '" +
                                       name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kParse, std::string(what) + " has a malformed '" +
                                       name + "' field");
  }
}

void check_version(const json& doc, std::string_view what) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParse, std::string(what) + " is not an object");
  }
  const int version = field<int>(doc, "version", what);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kParse, std::string(what) + " has version " +
                                       std::to_string(version) + ", expected " +
                                       std::to_string(kFormatVersion));
  }
}

mpz_class decimal_field(const json& doc, const char* name,
                        std::string_view what) {
  const auto text = field<std::string>(doc, name, what);
  if (text.empty() ||
      text.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kParse, std::string(what) + " field '" + name +
                                       "' is not a decimal integer");
  }
  return mpz_class(text, 10);
}

paillier::PublicKey public_key_from(const json& doc) {
  auto pub = paillier::PublicKey::from_modulus(decimal_field(doc, "n", "key"));
  const auto bits = field<std::size_t>(doc, "S", "key");
  if (pub.bits() != bits) {
    throw Error(ErrorCode::kParse, "key modulus does not have S=" +
                                       std::to_string(bits) + " bits");
  }
  return pub;
}

json params_json(const ParamSet& p) {
  return json{{"S", p.key_bits},        {"K", p.segments},
              {"L", p.scale_bound},     {"lm_ratio", p.lm_ratio},
              {"d", p.dim},             {"mode", std::string(to_string(p.mode))}};
}

ParamSet params_from(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "params is not an object");
  ParamSet p;
  p.key_bits = field<std::size_t>(doc, "S", "params");
  p.segments = field<std::size_t>(doc, "K", "params");
  p.scale_bound = field<std::uint64_t>(doc, "L", "params");
  p.lm_ratio = field<double>(doc, "lm_ratio", "params");
  p.dim = field<std::size_t>(doc, "d", "params");
  p.mode = parse_metric_mode(field<std::string>(doc, "mode", "params"));
  p.validate();
  return p;
}

// Sanitized components as base64 of little-endian IEEE-754 binary64 values.
std::string encode_components(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
  }
  constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(),
                    kVariant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

std::vector<double> decode_components(const std::string& text,
                                      std::string_view what) {
  std::vector<unsigned char> bytes(text.size() / 4 * 3 + 3);
  std::size_t length = 0;
  const char* end = nullptr;
  if (sodium_base642bin(bytes.data(), bytes.size(), text.data(), text.size(),
                        nullptr, &length, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size() || length % 8 != 0) {
    throw Error(ErrorCode::kParse,
                std::string(what) + " has malformed sanitized components");
  }
  std::vector<double> values(length / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[8 * i + b];
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

json entry_json(const EnrolledRecord& record) {
  json doc{{"c", encode_components(record.sanitized)},
           {"ciphertext", record.token.to_decimal()}};
  doc["label"] = record.label ? json(*record.label) : json(nullptr);
  return doc;
}

EnrolledRecord entry_from(const json& doc, std::size_t dim,
                          std::string_view what) {
  EnrolledRecord record;
  record.sanitized =
      decode_components(field<std::string>(doc, "c", what), what);
  if (record.sanitized.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has " +
                    std::to_string(record.sanitized.size()) +
                    " components, expected " + std::to_string(dim));
  }
  record.token =
      SealedToken::from_decimal(field<std::string>(doc, "ciphertext", what));
  auto label = doc.find("label");
  if (label != doc.end() && !label->is_null()) {
    if (!label->is_string()) {
      throw Error(ErrorCode::kParse, std::string(what) + " label is not text");
    }
    record.label = label->get<std::string>();
  }
  return record;
}

bool parse_number(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\r';
  };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string serialize_public_key(const paillier::PublicKey& pub) {
  return json{{"version", kFormatVersion},
              {"S", pub.bits()},
              {"n", pub.n.get_str(10)}}
      .dump();
}

paillier::PublicKey parse_public_key(std::string_view text) {
  const json doc = parse_json(text, "public key");
  check_version(doc, "public key");
  return public_key_from(doc);
}

std::string serialize_key_pair(const paillier::KeyPair& keys) {
  return json{{"version", kFormatVersion},
              {"S", keys.pub.bits()},
              {"n", keys.pub.n.get_str(10)},
              {"lambda", keys.priv.lambda.get_str(10)},
              {"mu", keys.priv.mu.get_str(10)}}
      .dump();
}

paillier::KeyPair parse_key_pair(std::string_view text) {
  const json doc = parse_json(text, "private key");
  check_version(doc, "private key");
  paillier::KeyPair keys;
  keys.pub = public_key_from(doc);
  keys.priv.lambda = decimal_field(doc, "lambda", "private key");
  keys.priv.mu = decimal_field(doc, "mu", "private key");
  mpz_class check = keys.priv.lambda * keys.priv.mu;
  mpz_mod(check.get_mpz_t(), check.get_mpz_t(), keys.pub.n.get_mpz_t());
  if (check != 1) {
    throw Error(ErrorCode::kParse, "private key fails lambda*mu = 1 (mod n)");
  }
  return keys;
}

std::string serialize_params(const ParamSet& params) {
  json doc = params_json(params);
  doc["version"] = kFormatVersion;
  return doc.dump();
}

ParamSet parse_params(std::string_view text) {
  const json doc = parse_json(text, "params");
  check_version(doc, "params");
  return params_from(doc);
}

std::string serialize_record(const EnrolledRecord& record,
                             const ParamSet& params) {
  json doc = entry_json(record);
  doc["version"] = kFormatVersion;
  doc["params"] = params_json(params);
  doc["fingerprint"] = record.fingerprint;
  return doc.dump();
}

RecordDocument parse_record(std::string_view text) {
  const json doc = parse_json(text, "record");
  check_version(doc, "record");
  RecordDocument out;
  out.params = params_from(field<json>(doc, "params", "record"));
  out.record = entry_from(doc, out.params.dim, "record");
  out.record.fingerprint = field<std::string>(doc, "fingerprint", "record");
  return out;
}

EnrolledRecord parse_record(std::string_view text, const ParamSet& expected,
                            const paillier::PublicKey& pub) {
  RecordDocument doc = parse_record(text);
  if (doc.params != expected ||
      doc.record.fingerprint != fingerprint(expected, pub)) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "record was produced under " + canonical_string(doc.params) +
                    ", expected " + canonical_string(expected));
  }
  return std::move(doc.record);
}

Gallery Gallery::create(const ParamSet& params,
                        const paillier::PublicKey& pub) {
  params.validate();
  Gallery g;
  g.params = params;
  g.fingerprint = securevector::fingerprint(params, pub);
  g.modulus_digest = sha256_hex(pub.n.get_str(10));
  return g;
}

void Gallery::add(EnrolledRecord record) {
  if (record.fingerprint != fingerprint) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "record fingerprint does not match the gallery header");
  }
  entries.push_back(std::move(record));
}

std::string serialize_gallery(const Gallery& gallery) {
  json header{{"version", kFormatVersion},
              {"format", kGalleryFormat},
              {"params", params_json(gallery.params)},
              {"fingerprint", gallery.fingerprint},
              {"modulus_digest", gallery.modulus_digest},
              {"entries", gallery.entries.size()}};
  std::string out = header.dump();
  out += '\n';
  for (const EnrolledRecord& record : gallery.entries) {
    if (record.fingerprint != gallery.fingerprint) {
      throw Error(ErrorCode::kFingerprintMismatch,
                  "gallery entry fingerprint differs from the header");
    }
    out += entry_json(record).dump();
    out += '\n';
  }
  return out;
}

Gallery parse_gallery(std::string_view text) {
  std::size_t pos = text.find('\n');
  const json header = parse_json(text.substr(0, pos), "gallery header");
  check_version(header, "gallery header");
  if (field<std::string>(header, "format", "gallery header") != kGalleryFormat) {
    throw Error(ErrorCode::kParse, "not a gallery file");
  }
  Gallery g;
  g.params = params_from(field<json>(header, "params", "gallery header"));
  g.fingerprint = field<std::string>(header, "fingerprint", "gallery header");
  g.modulus_digest =
      field<std::string>(header, "modulus_digest", "gallery header");
  const auto expected = field<std::size_t>(header, "entries", "gallery header");
  g.entries.reserve(expected);

  std::size_t line_no = 1;
  while (pos != std::string_view::npos && pos + 1 < text.size()) {
    const std::size_t start = pos + 1;
    pos = text.find('\n', start);
    std::string_view line = text.substr(
        start, pos == std::string_view::npos ? std::string_view::npos
                                             : pos - start);
    ++line_no;
    if (line.empty()) continue;
    const std::string what = "gallery entry on line " + std::to_string(line_no);
    EnrolledRecord record =
        entry_from(parse_json(line, what), g.params.dim, what);
    record.fingerprint = g.fingerprint;
    g.entries.push_back(std::move(record));
  }
  if (g.entries.size() != expected) {
    throw Error(ErrorCode::kParse, "gallery header announces " +
                                       std::to_string(expected) +
                                       " entries, found " +
                                       std::to_string(g.entries.size()));
  }
  return g;
}

std::vector<Hit> gallery_topk(const EnrolledRecord& probe,
                              const Gallery& gallery, std::size_t k,
                              const Matcher& matcher, std::size_t workers) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (gallery.fingerprint != matcher.fingerprint() ||
      probe.fingerprint != gallery.fingerprint) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "probe, gallery and key do not share one fingerprint");
  }
  std::vector<Hit> hits(gallery.entries.size());
  parallel_for(hits.size(), workers, [&](std::size_t i) {
    const EnrolledRecord& entry = gallery.entries[i];
    hits[i].index = i;
    hits[i].label = entry.label.value_or(std::to_string(i + 1));
    hits[i].score = matcher.match(probe, entry).score;
  });
  const bool ascending = lower_is_better(gallery.params.mode);
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + keep, hits.end(),
                    [ascending](const Hit& a, const Hit& b) {
                      if (a.score != b.score) {
                        return ascending ? a.score < b.score
                                         : a.score > b.score;
                      }
                      return a.index < b.index;
                    });
  hits.resize(keep);
  return hits;
}

std::vector<LabeledFeature> read_features(std::istream& in) {
  std::vector<LabeledFeature> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    LabeledFeature feature;
    feature.line = line_no;
    double value = 0.0;
    std::size_t first = 0;
    if (!parse_number(fields.front(), value)) {
      feature.label = std::string(fields.front());
      first = 1;
    } else {
      feature.label = std::to_string(line_no);
    }
    for (std::size_t i = first; i < fields.size(); ++i) {
      if (!parse_number(fields[i], value)) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(line_no) + ": '" +
                        std::string(fields[i]) + "' is not a number");
      }
      feature.values.push_back(value);
    }
    if (feature.values.empty()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + " has no values");
    }
    if (dim == 0) dim = feature.values.size();
    if (feature.values.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(feature.values.size()) +
                      " values, expected " + std::to_string(dim));
    }
    out.push_back(std::move(feature));
  }
  return out;
}

std::vector<LabeledFeature> read_features_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  return read_features(in);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into " + path.string());
  }
}

}  // namespace securevector::store
