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

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harness.hpp"
#include "securevector/error.hpp"
#include "securevector/match.hpp"
#include "securevector/parallel.hpp"
#include "securevector/params.hpp"
#include "securevector/store.hpp"

namespace sv = securevector;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  bool porcelain = false;
  std::size_t threads = sv::default_workers();
};

struct ParamOptions {
  std::optional<std::size_t> segments;
  std::optional<std::uint64_t> scale_bound;
  double lm_ratio = sv::kDefaultLmRatio;
  std::string mode = "cosine-normalized";

  void attach(CLI::App* cmd) {
    cmd->add_option("--K", segments, "Segment count (default: optimal for S, d)");
    cmd->add_option("--L", scale_bound, "Scale bound (default: largest feasible)");
    cmd->add_option("--lm-ratio", lm_ratio, "L/M ratio")->capture_default_str();
    cmd->add_option("--mode", mode,
                    "cosine-normalized | euclidean-normalized | "
                    "dot-unnormalized | euclidean-unnormalized")
        ->capture_default_str();
  }

  sv::ParamSet resolve(std::size_t key_bits, std::size_t dim) const {
    const sv::MetricMode metric = sv::parse_metric_mode(mode);
    if (!segments) {
      sv::ParamSet p = sv::optimal_params(key_bits, dim, metric, lm_ratio);
      if (scale_bound) {
        p.scale_bound = *scale_bound;
        p.validate();
      }
      return p;
    }
    sv::ParamSet p;
    p.key_bits = key_bits;
    p.segments = *segments;
    p.dim = dim;
    p.lm_ratio = lm_ratio;
    p.mode = metric;
    if (scale_bound) {
      p.scale_bound = *scale_bound;
    } else {
      mpz_class bound = sv::max_scale_bound(key_bits, *segments);
      if (bound > sv::kMaxScaleBound) bound = sv::kMaxScaleBound;
      p.scale_bound = bound.get_ui();
    }
    p.validate();
    return p;
  }
};

std::unique_ptr<sv::RandomSource> make_rng(const GlobalOptions& g) {
  if (g.seed) return std::make_unique<sv::SeededRandom>(*g.seed);
  return std::make_unique<sv::SystemRandom>();
}

fs::path key_path(const std::string& arg, const char* ext) {
  fs::path p(arg);
  if (p.extension() == ext) return p;
  p += ext;
  return p;
}

std::vector<sv::FeatureVector> to_vectors(
    const std::vector<sv::store::LabeledFeature>& rows) {
  std::vector<sv::FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    try {
      out.emplace_back(row.values);
    } catch (const sv::Error& e) {
      throw sv::Error(e.code(), "row '" + row.label + "' (line " +
                                    std::to_string(row.line) +
                                    "): " + e.what());
    }
  }
  return out;
}

void print_kv(const GlobalOptions& g, const std::string& key,
              const std::string& value) {
  if (g.porcelain) {
    std::cout << key << '\t' << value << '\n';
  } else {
    std::cout << std::left << std::setw(20) << key << value << '\n';
  }
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void print_params(const GlobalOptions& g, const sv::ParamSet& p) {
  const mpz_class bound(p.scale_bound);
  print_kv(g, "S", std::to_string(p.key_bits));
  print_kv(g, "d", std::to_string(p.dim));
  print_kv(g, "K", std::to_string(p.segments));
  print_kv(g, "L", std::to_string(p.scale_bound));
  print_kv(g, "lm_ratio", fmt(p.lm_ratio));
  print_kv(g, "mode", std::string(sv::to_string(p.mode)));
  print_kv(g, "security_bits",
           std::to_string(sv::security_bits(p.segments, bound)));
  print_kv(g, "min_key_size",
           std::to_string(sv::min_key_size(p.segments, bound)));
}

// ---- subcommands ---------------------------------------------------------

struct KeygenArgs {
  std::size_t size = 0;
  std::string out;
  std::size_t dim = 512;
};

int cmd_keygen(const GlobalOptions& g, const KeygenArgs& a) {
  if (a.size < sv::paillier::kMinKeyBits || a.size % 2 != 0) {
    throw sv::Error(sv::ErrorCode::kInvalidArgument,
                    "key size must be even and at least " +
                        std::to_string(sv::paillier::kMinKeyBits) +
                        " bits (got " + std::to_string(a.size) + ")");
  }
  const sv::ParamSet recommended = sv::optimal_params(a.size, a.dim);
  auto rng = make_rng(g);
  const auto keys = sv::paillier::generate_keypair(a.size, *rng);
  const fs::path pub = key_path(a.out, ".pub");
  const fs::path key = key_path(a.out, ".key");
  sv::store::write_file_atomic(pub, sv::store::serialize_public_key(keys.pub) + "\n");
  sv::store::write_file_atomic(key, sv::store::serialize_key_pair(keys) + "\n");
  print_kv(g, "public_key", pub.string());
  print_kv(g, "private_key", key.string());
  print_params(g, recommended);
  return 0;
}

struct ParamsArgs {
  std::size_t size = 512;
  std::size_t dim = 512;
  ParamOptions params;
};

int cmd_params(const GlobalOptions& g, const ParamsArgs& a) {
  print_params(g, a.params.resolve(a.size, a.dim));
  return 0;
}

struct EnrollArgs {
  std::string features;
  std::string pub;
  std::string out;
  bool normalize = false;
  ParamOptions params;
};

int cmd_enroll(const GlobalOptions& g, const EnrollArgs& a) {
  const auto rows = sv::store::read_features_file(a.features);
  if (rows.empty()) {
    throw sv::Error(sv::ErrorCode::kInvalidArgument,
                    "no features in " + a.features);
  }
  const auto pub = sv::store::parse_public_key(
      sv::store::read_file(key_path(a.pub, ".pub")));
  const sv::ParamSet params =
      a.params.resolve(pub.bits(), rows.front().values.size());
  auto rng = make_rng(g);
  auto gallery = sv::store::Gallery::create(params, pub);
  const sv::EnrollOptions options{a.normalize};
  for (const auto& row : rows) {
    try {
      sv::EnrolledRecord record =
          sv::enroll(sv::FeatureVector(row.values), params, pub, *rng, options);
      record.label = row.label;
      gallery.add(std::move(record));
    } catch (const sv::Error& e) {
      throw sv::Error(e.code(), "row '" + row.label + "' (line " +
                                    std::to_string(row.line) +
                                    "): " + e.what());
    }
  }
  sv::store::write_file_atomic(a.out, sv::store::serialize_gallery(gallery));
  print_kv(g, "gallery", a.out);
  print_kv(g, "entries", std::to_string(gallery.entries.size()));
  print_kv(g, "params", sv::canonical_string(params));
  return 0;
}

struct SearchArgs {
  std::string probe;
  std::string gallery;
  std::string keys;
  std::size_t topk = 5;
  bool normalize = false;
};

int cmd_search(const GlobalOptions& g, const SearchArgs& a) {
  const auto gallery =
      sv::store::parse_gallery(sv::store::read_file(a.gallery));
  const auto keys = sv::store::parse_key_pair(
      sv::store::read_file(key_path(a.keys, ".key")));
  const sv::Matcher matcher(keys, gallery.params);
  if (matcher.fingerprint() != gallery.fingerprint) {
    throw sv::Error(sv::ErrorCode::kFingerprintMismatch,
                    "gallery was not enrolled under this key");
  }
  const auto probes = sv::store::read_features_file(a.probe);
  auto rng = make_rng(g);
  const sv::EnrollOptions options{a.normalize};
  for (const auto& row : probes) {
    sv::EnrolledRecord probe;
    try {
      probe = sv::enroll(sv::FeatureVector(row.values), gallery.params,
                         keys.pub, *rng, options);
    } catch (const sv::Error& e) {
      throw sv::Error(e.code(), "probe '" + row.label + "' (line " +
                                    std::to_string(row.line) +
                                    "): " + e.what());
    }
    const auto hits =
        sv::store::gallery_topk(probe, gallery, a.topk, matcher, g.threads);
    if (!g.porcelain) std::cout << "probe " << row.label << '\n';
    for (std::size_t rank = 0; rank < hits.size(); ++rank) {
      if (g.porcelain) {
        std::cout << row.label << '\t' << rank + 1 << '\t' << hits[rank].label
                  << '\t' << std::setprecision(10) << hits[rank].score << '\n';
      } else {
        std::cout << "  " << std::setw(3) << rank + 1 << "  " << std::setw(16)
                  << std::left << hits[rank].label << std::right << "  "
                  << std::fixed << std::setprecision(6) << hits[rank].score
                  << std::defaultfloat << '\n';
      }
    }
  }
  return 0;
}

struct VerifyArgs {
  std::string features;
  std::size_t pairs = 10000;
  std::string keys;
  double tol = 1e-4;
  bool normalize = false;
  ParamOptions params;
};

int cmd_verify(const GlobalOptions& g, const VerifyArgs& a) {
  const auto rows = sv::store::read_features_file(a.features);
  const auto keys = sv::store::parse_key_pair(
      sv::store::read_file(key_path(a.keys, ".key")));
  if (rows.size() < 2) {
    throw sv::Error(sv::ErrorCode::kInvalidArgument,
                    "verification needs at least two features");
  }
  const sv::ParamSet params =
      a.params.resolve(keys.pub.bits(), rows.front().values.size());
  auto rng = make_rng(g);
  const auto features = to_vectors(rows);
  const auto report = sv::harness::verify_lossless(
      features, params, keys, a.pairs, *rng, g.threads, {a.normalize});
  print_kv(g, "params", sv::canonical_string(params));
  print_kv(g, "pairs", std::to_string(report.pairs));
  print_kv(g, "max_abs_error", fmt(report.max_abs_error, 4));
  print_kv(g, "mean_abs_error", fmt(report.mean_abs_error, 4));
  print_kv(g, "max_rel_error", fmt(report.max_rel_error, 4));
  print_kv(g, "tolerance", fmt(a.tol, 4));
  const bool ok = report.max_abs_error <= a.tol;
  print_kv(g, "result", ok ? "pass" : "fail");
  if (!ok) {
    std::cerr << "error: max error " << fmt(report.max_abs_error, 4)
              << " exceeds tolerance " << fmt(a.tol, 4) << '\n';
  }
  return ok ? 0 : 1;
}

struct BenchArgs {
  std::size_t dim = 512;
  std::size_t size = 512;
  std::size_t trials = 1000;
};

int cmd_bench(const GlobalOptions& g, const BenchArgs& a) {
  auto rng = make_rng(g);
  const auto r = sv::harness::run_benchmark(a.dim, a.size, a.trials, *rng);
  print_kv(g, "params", sv::canonical_string(r.params));
  print_kv(g, "trial_count", std::to_string(r.trial_count));
  print_kv(g, "enroll_ms_avg", fmt(r.enroll_ms_avg, 4));
  print_kv(g, "match_ms_avg", fmt(r.match_ms_avg, 4));
  print_kv(g, "record_bytes", std::to_string(r.record_bytes));
  print_kv(g, "key_bytes", std::to_string(r.key_bytes));
  // Reference figures (S=512, d=512) from the original measurements.
  print_kv(g, "reference_enroll_ms", "0.59");
  print_kv(g, "reference_match_ms", "0.30");
  return 0;
}

struct StudyArgs {
  std::string features;
  std::vector<double> lm_ratios{1, 2, 4, 8, 16, 32, 64, 128};
  std::size_t repeats = 100;
  std::size_t bins = 20;
  std::size_t size = 512;
  std::optional<std::size_t> segments;
  std::optional<std::uint64_t> scale_bound;
};

int cmd_study(const GlobalOptions& g, const StudyArgs& a) {
  const auto rows = sv::store::read_features_file(a.features);
  if (rows.empty()) {
    throw sv::Error(sv::ErrorCode::kInvalidArgument,
                    "no features in " + a.features);
  }
  auto features = to_vectors(rows);
  for (auto& f : features) f = f.normalized();
  auto rng = make_rng(g);
  if (g.porcelain) {
    std::cout << "lm_ratio\tpermutation\tbin_lower\tbin_upper\tcount\n";
  }
  for (double ratio : a.lm_ratios) {
    ParamOptions po;
    po.segments = a.segments;
    po.scale_bound = a.scale_bound;
    po.lm_ratio = ratio;
    const sv::ParamSet params = po.resolve(a.size, features.front().size());
    for (auto kind :
         {sv::harness::PermutationKind::kScalesOnly,
          sv::harness::PermutationKind::kSignsOnly,
          sv::harness::PermutationKind::kBoth}) {
      const auto sims = sv::harness::permutation_similarities(
          features, params, kind, a.repeats, *rng);
      const auto h = sv::harness::histogram(sims, a.bins);
      const double width = (h.upper - h.lower) / static_cast<double>(a.bins);
      if (!g.porcelain) {
        std::cout << "lm_ratio=" << fmt(ratio) << "  permutation="
                  << sv::harness::to_string(kind) << "  n=" << sims.size()
                  << "  mean=" << fmt(h.mean, 4)
                  << "  below_0.6=" << fmt(h.fraction_below_0_6, 4) << '\n';
      }
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.lower + width * static_cast<double>(b);
        if (g.porcelain) {
          std::cout << fmt(ratio) << '\t' << sv::harness::to_string(kind)
                    << '\t' << fmt(lo, 4) << '\t' << fmt(lo + width, 4) << '\t'
                    << h.counts[b] << '\n';
        } else {
          std::cout << "  [" << std::setw(5) << fmt(lo, 2) << ", "
                    << std::setw(5) << fmt(lo + width, 2) << ")  "
                    << std::setw(8) << h.counts[b] << '\n';
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SecureVector: protected feature vectors with lossless matching"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed,
                 "Deterministic random source (tests and CI only)");
  app.add_flag("--porcelain", g.porcelain, "Tab-separated output");
  app.add_option("--threads", g.threads, "Worker threads for matching")
      ->check(CLI::PositiveNumber);

  KeygenArgs keygen;
  auto* c_keygen = app.add_subcommand("keygen", "Generate a Paillier key pair");
  c_keygen->add_option("--size", keygen.size, "Key size S in bits")->required();
  c_keygen->add_option("--out", keygen.out, "Output prefix")->required();
  c_keygen->add_option("--dim", keygen.dim, "Feature dimension for the recommendation")
      ->capture_default_str();

  ParamsArgs params;
  auto* c_params = app.add_subcommand("params", "Print a parameter report");
  c_params->add_option("--size", params.size, "Key size S")->capture_default_str();
  c_params->add_option("--dim", params.dim, "Feature dimension")->capture_default_str();
  params.params.attach(c_params);

  EnrollArgs enroll;
  auto* c_enroll = app.add_subcommand("enroll", "Enroll features into a gallery");
  c_enroll->add_option("--features", enroll.features, "Feature file")->required();
  c_enroll->add_option("--pub", enroll.pub, "Public key file or prefix")->required();
  c_enroll->add_option("--out", enroll.out, "Gallery file to write")->required();
  c_enroll->add_flag("--normalize", enroll.normalize,
                     "Rescale non-unit features in normalized modes");
  enroll.params.attach(c_enroll);

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "Top-k search of probes in a gallery");
  c_search->add_option("--probe", search.probe, "Probe feature file")->required();
  c_search->add_option("--gallery", search.gallery, "Gallery file")->required();
  c_search->add_option("--keys", search.keys, "Private key file or prefix")->required();
  c_search->add_option("--topk", search.topk, "Results per probe")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_search->add_flag("--normalize", search.normalize,
                     "Rescale non-unit probes in normalized modes");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand(
      "verify", "Compare protected scores against plaintext scores");
  c_verify->add_option("--features", verify.features, "Feature file")->required();
  c_verify->add_option("--pairs", verify.pairs, "Random pairs to score")
      ->capture_default_str();
  c_verify->add_option("--keys", verify.keys, "Private key file or prefix")->required();
  c_verify->add_option("--tol", verify.tol, "Maximum absolute error")
      ->capture_default_str();
  c_verify->add_flag("--normalize", verify.normalize,
                     "Rescale non-unit features in normalized modes");
  verify.params.attach(c_verify);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time enrollment and matching");
  c_bench->add_option("--dim", bench.dim, "Feature dimension")->capture_default_str();
  c_bench->add_option("--size", bench.size, "Key size S")->capture_default_str();
  c_bench->add_option("--trials", bench.trials, "Timed iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  StudyArgs study;
  auto* c_study = app.add_subcommand(
      "study-permutation", "Histogram cos(x, c_x) under partial permutations");
  c_study->add_option("--features", study.features, "Feature file")->required();
  c_study->add_option("--lm-ratios", study.lm_ratios, "L/M ratios to study")
      ->delimiter(',');
  c_study->add_option("--repeats", study.repeats, "Permutations per feature")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_study->add_option("--bins", study.bins, "Histogram bins over [-1, 1]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_study->add_option("--size", study.size, "Key size S used to pick K and L")
      ->capture_default_str();
  c_study->add_option("--K", study.segments, "Segment count");
  c_study->add_option("--L", study.scale_bound, "Scale bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_keygen->parsed()) return cmd_keygen(g, keygen);
    if (c_params->parsed()) return cmd_params(g, params);
    if (c_enroll->parsed()) return cmd_enroll(g, enroll);
    if (c_search->parsed()) return cmd_search(g, search);
    if (c_verify->parsed()) return cmd_verify(g, verify);
    if (c_bench->parsed()) return cmd_bench(g, bench);
    if (c_study->parsed()) return cmd_study(g, study);
  } catch (const sv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
