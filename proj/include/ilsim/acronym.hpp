// Copyright 2026 The ilsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ILSIM_ACRONYM_HPP_
#define ILSIM_ACRONYM_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ilsim/rng.hpp"

namespace ilsim {

// Self-data-augmentation over acronym examples: a growing pool of
// generated batches, an easy/hard split from a word-frequency table, and
// data-level filters steering what the generator imitates next.

struct AcronymExample {
  std::string acronym;             // uppercase
  std::vector<std::string> words;  // initials spell the acronym

  // Throws DomainError when the word list does not spell the acronym.
  void validate() const;

  bool operator==(const AcronymExample&) const = default;
};

// word -> frequency rank; lookups are case-insensitive and absent words
// count as hard. "Easy" means rank strictly below the threshold.
class FrequencyTable {
 public:
  static constexpr std::uint32_t kDefaultEasyThreshold = 60000;
  // Hard and unknown acronyms enter rank averages at this value.
  static constexpr std::uint32_t kHardRank = 60001;

  // Small bundled table covering acronym lengths 2..12 in both strata;
  // enough for tests and offline experiments.
  static FrequencyTable builtin();

  // CSV with header "word,rank", UTF-8, one row per word.
  static FrequencyTable from_csv(const std::string& path);

  void insert(std::string word, std::uint32_t rank);
  std::optional<std::uint32_t> rank(std::string_view word) const;

  std::uint32_t easy_threshold() const { return easy_threshold_; }
  void set_easy_threshold(std::uint32_t t) { easy_threshold_ = t; }

  // Stratum words grouped by length, alphabetical within a length.
  const std::map<std::size_t, std::vector<std::string>>& easy_by_length() const;
  const std::map<std::size_t, std::vector<std::string>>& hard_by_length() const;

  std::size_t size() const { return ranks_.size(); }

 private:
  std::map<std::string, std::uint32_t> ranks_;  // lowercase keys
  std::uint32_t easy_threshold_ = kDefaultEasyThreshold;
  mutable std::map<std::size_t, std::vector<std::string>> easy_by_length_;
  mutable std::map<std::size_t, std::vector<std::string>> hard_by_length_;
  mutable bool strata_fresh_ = false;

  void rebuild_strata() const;
};

bool classify_easy(std::string_view acronym, const FrequencyTable& table);

struct PoolMetrics {
  double ratio_easy = 0.0;
  double avg_rank = 0.0;
  double avg_length = 0.0;
};

PoolMetrics pool_metrics(std::span<const AcronymExample> batch,
                         const FrequencyTable& table);

// Generated batches in arrival order; the pool only ever grows.
struct DataPool {
  std::vector<std::vector<AcronymExample>> generations;

  void push(std::vector<AcronymExample> batch);
  std::vector<AcronymExample> all() const;
  std::size_t size() const;
};

// The stand-in for a prompted generator: a two-hypothesis Bayesian model
// over an easy-leaning and a hard-leaning style. The posterior over the
// two styles comes from the prompt labels; each emitted example draws a
// style from that posterior, picks its acronym from the matching table
// stratum, and takes its length from a style base blended toward the mean
// prompt length.
struct MockGeneratorParams {
  double prior_easy = 0.9;         // > 0.5 encodes the easy bias
  double label_likelihood = 0.55;  // p(easy label | easy style), symmetric
  double base_length_easy = 4.0;
  double base_length_hard = 7.0;
  double length_imitation = 0.8;   // blend weight toward the prompt mean
  double length_spread = 1.8;

  void validate() const;
};

// Exact posterior P(easy style | prompt labels); exposed so tests can
// check the generator against two-hypothesis arithmetic directly.
double mock_posterior_easy(std::span<const AcronymExample> prompts,
                           const MockGeneratorParams& params,
                           const FrequencyTable& table);

// Throws DomainError on empty prompts and MisuseError when the table has
// an empty stratum the generator needs.
std::vector<AcronymExample> mock_generator(
    std::span<const AcronymExample> prompts, const MockGeneratorParams& params,
    const FrequencyTable& table, std::size_t batch_size, Rng& rng);

enum class PoolFilter {
  kImitationOnly = 0,
  kRandom,
  kEasy,
  kHard,
  kEasyLong,
  kEasyShort,
};

const char* to_string(PoolFilter f);
PoolFilter parse_pool_filter(const std::string& s);

// Weighting realizing the filter over pool examples. random is uniform,
// easy/hard are indicators, easylong is indicator(easy) times length and
// easyshort indicator(easy) times reciprocal length. The imitation-only
// setting bypasses pool sampling entirely, so asking for its weighting is
// a misuse.
std::function<double(const AcronymExample&)> filter_weighting(
    PoolFilter filter, const FrequencyTable& table);

struct PoolExperimentConfig {
  std::size_t generations = 6;   // T
  std::size_t batch_size = 20;
  std::size_t initial_easy = 10; // N_e easy examples in the seed batch
  PoolFilter filter = PoolFilter::kRandom;
  MockGeneratorParams generator;
  std::uint64_t seed = 0;
};

struct PoolGenerationMetrics {
  std::size_t generation = 0;  // 1-based; 0 is the seed batch
  PoolMetrics metrics;
};

struct PoolExperimentResult {
  std::vector<PoolGenerationMetrics> per_generation;  // includes the seed row
  DataPool pool;
};

std::vector<AcronymExample> make_initial_batch(std::size_t batch_size,
                                               std::size_t n_easy,
                                               const FrequencyTable& table,
                                               const MockGeneratorParams& params,
                                               Rng& rng);

PoolExperimentResult run_pool_experiment(const PoolExperimentConfig& config,
                                         const FrequencyTable& table);

// Metrics CSV: generation,ratio_easy,avg_rank,avg_length.
void write_pool_metrics_csv(std::ostream& out,
                            const PoolExperimentResult& result);

}  // namespace ilsim

#endif  // ILSIM_ACRONYM_HPP_
