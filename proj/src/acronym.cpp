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

#include "ilsim/acronym.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "ilsim/errors.hpp"
#include "ilsim/interaction.hpp"

namespace ilsim {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return out;
}

// Word list used to fill in acronym expansions, a few entries per letter.
const std::vector<std::string>& lexicon_for(char letter) {
  static const std::map<char, std::vector<std::string>> kLexicon = {
      {'a', {"alpha", "amber", "atlas"}},   {'b', {"bridge", "bloom", "basil"}},
      {'c', {"cedar", "copper", "crane"}},  {'d', {"delta", "drift", "dawn"}},
      {'e', {"ember", "echo", "elm"}},      {'f', {"falcon", "fern", "flint"}},
      {'g', {"granite", "glow", "grove"}},  {'h', {"harbor", "hazel", "heron"}},
      {'i', {"indigo", "iris", "inlet"}},   {'j', {"jasper", "juniper", "jade"}},
      {'k', {"kernel", "kite", "kelp"}},    {'l', {"lantern", "lotus", "larch"}},
      {'m', {"meadow", "maple", "mist"}},   {'n', {"nectar", "north", "nimbus"}},
      {'o', {"onyx", "orchid", "otter"}},   {'p', {"pebble", "pine", "prism"}},
      {'q', {"quartz", "quill", "quay"}},   {'r', {"raven", "ridge", "reef"}},
      {'s', {"summit", "sage", "spruce"}},  {'t', {"timber", "tide", "thistle"}},
      {'u', {"umber", "upland", "urchin"}}, {'v', {"velvet", "vista", "vale"}},
      {'w', {"willow", "wander", "wren"}},  {'x', {"xenon", "xylem", "xerus"}},
      {'y', {"yarrow", "yonder", "yew"}},   {'z', {"zephyr", "zenith", "zinc"}},
  };
  const auto it = kLexicon.find(static_cast<char>(std::tolower(
      static_cast<unsigned char>(letter))));
  if (it == kLexicon.end())
    throw DomainError(std::string("no lexicon entries for letter '") + letter +
                      "'");
  return it->second;
}

std::vector<std::string> expand_acronym(const std::string& acronym, Rng& rng) {
  std::vector<std::string> words;
  words.reserve(acronym.size());
  for (char c : acronym) {
    const auto& options = lexicon_for(c);
    words.push_back(options[rng.next_index(options.size())]);
  }
  return words;
}

double gaussian(Rng& rng) {
  // Box-Muller; u1 kept away from zero.
  const double u1 = std::max(rng.next_unit(), 1e-12);
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

void AcronymExample::validate() const {
  if (acronym.empty()) throw DomainError("AcronymExample: empty acronym");
  if (words.size() != acronym.size())
    throw DomainError("AcronymExample: word count must equal acronym length");
  for (std::size_t i = 0; i < acronym.size(); ++i) {
    if (words[i].empty() ||
        std::toupper(static_cast<unsigned char>(words[i][0])) !=
            std::toupper(static_cast<unsigned char>(acronym[i])))
      throw DomainError("AcronymExample: word '" + words[i] +
                        "' does not start with '" + acronym[i] + "'");
  }
}

FrequencyTable FrequencyTable::builtin() {
  FrequencyTable table;
  // Common words across lengths 2..12 (easy stratum).
  const std::pair<const char*, std::uint32_t> easy[] = {
      {"it", 10},          {"go", 120},        {"us", 90},
      {"ok", 900},         {"am", 300},        {"the", 1},
      {"and", 3},          {"art", 800},       {"cat", 1200},
      {"sun", 1500},       {"map", 2100},      {"time", 60},
      {"idea", 700},       {"game", 1000},     {"blue", 1400},
      {"star", 1800},      {"fish", 2000},     {"world", 250},
      {"light", 500},      {"music", 1100},    {"plant", 1900},
      {"river", 2600},     {"people", 80},     {"system", 400},
      {"camera", 2800},    {"garden", 3100},   {"silver", 4200},
      {"science", 950},    {"machine", 1600},  {"network", 1700},
      {"freedom", 2300},   {"language", 1150}, {"computer", 1300},
      {"mountain", 2400},  {"sunshine", 8200}, {"education", 1050},
      {"knowledge", 2200}, {"adventure", 5200},{"technology", 1250},
      {"generation", 1850},{"basketball", 6200},{"information", 430},
      {"mathematics", 7800},{"relationship", 2050},{"intelligence", 3800},
  };
  // Obscure words (rank at or beyond the easy threshold).
  const std::pair<const char*, std::uint32_t> hard[] = {
      {"xu", 81000},          {"qi", 74000},         {"zyx", 99000},
      {"vug", 88000},         {"kex", 91000},        {"qoph", 86000},
      {"zarf", 90500},        {"cwms", 97000},       {"xebec", 83000},
      {"qanat", 87000},       {"zibet", 96000},      {"quokka", 78000},
      {"zygote", 66000},      {"fozier", 99500},     {"quixote", 71000},
      {"zorilla", 93000},     {"xylenes", 89000},    {"quillaja", 98000},
      {"zugzwang", 82000},    {"xanthene", 95000},   {"zymurgies", 99900},
      {"quercetin", 85000},   {"xenoliths", 92000},  {"zwitterion", 94000},
      {"quaternion", 76000},  {"xerophytism", 99100},{"heteroclites", 99300},
      {"quizzicality", 99800},
  };
  for (const auto& [word, rank] : easy) table.insert(word, rank);
  for (const auto& [word, rank] : hard) table.insert(word, rank);
  return table;
}

FrequencyTable FrequencyTable::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  FrequencyTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (to_lower(line) != "word,rank")
    throw ConfigError(path + ": expected header 'word,rank'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || comma == 0)
      throw ConfigError(path + ": malformed row at line " +
                        std::to_string(line_no));
    const std::string word = line.substr(0, comma);
    std::uint32_t rank = 0;
    try {
      rank = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError(path + ": bad rank at line " + std::to_string(line_no));
    }
    if (rank < 1)
      throw ConfigError(path + ": ranks start at 1 (line " +
                        std::to_string(line_no) + ")");
    table.insert(word, rank);
  }
  return table;
}

void FrequencyTable::insert(std::string word, std::uint32_t rank) {
  if (word.empty()) throw DomainError("FrequencyTable: empty word");
  if (rank < 1) throw DomainError("FrequencyTable: ranks start at 1");
  ranks_[to_lower(word)] = rank;
  strata_fresh_ = false;
}

std::optional<std::uint32_t> FrequencyTable::rank(std::string_view word) const {
  const auto it = ranks_.find(to_lower(word));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

void FrequencyTable::rebuild_strata() const {
  easy_by_length_.clear();
  hard_by_length_.clear();
  for (const auto& [word, rank] : ranks_) {
    auto& bucket = rank < easy_threshold_ ? easy_by_length_ : hard_by_length_;
    bucket[word.size()].push_back(word);
  }
  strata_fresh_ = true;
}

const std::map<std::size_t, std::vector<std::string>>&
FrequencyTable::easy_by_length() const {
  if (!strata_fresh_) rebuild_strata();
  return easy_by_length_;
}

const std::map<std::size_t, std::vector<std::string>>&
FrequencyTable::hard_by_length() const {
  if (!strata_fresh_) rebuild_strata();
  return hard_by_length_;
}

bool classify_easy(std::string_view acronym, const FrequencyTable& table) {
  if (acronym.empty()) throw DomainError("classify_easy: empty acronym");
  const auto r = table.rank(acronym);
  return r.has_value() && *r < table.easy_threshold();
}

PoolMetrics pool_metrics(std::span<const AcronymExample> batch,
                         const FrequencyTable& table) {
  if (batch.empty()) throw DomainError("pool_metrics: empty batch");
  PoolMetrics metrics;
  double rank_sum = 0.0, length_sum = 0.0;
  std::size_t easy_count = 0;
  for (const AcronymExample& e : batch) {
    const bool easy = classify_easy(e.acronym, table);
    if (easy) ++easy_count;
    rank_sum += easy ? static_cast<double>(*table.rank(e.acronym))
                     : static_cast<double>(FrequencyTable::kHardRank);
    length_sum += static_cast<double>(e.acronym.size());
  }
  const double n = static_cast<double>(batch.size());
  metrics.ratio_easy = static_cast<double>(easy_count) / n;
  metrics.avg_rank = rank_sum / n;
  metrics.avg_length = length_sum / n;
  return metrics;
}

void DataPool::push(std::vector<AcronymExample> batch) {
  generations.push_back(std::move(batch));
}

std::vector<AcronymExample> DataPool::all() const {
  std::vector<AcronymExample> out;
  out.reserve(size());
  for (const auto& batch : generations)
    out.insert(out.end(), batch.begin(), batch.end());
  return out;
}

std::size_t DataPool::size() const {
  std::size_t n = 0;
  for (const auto& batch : generations) n += batch.size();
  return n;
}

void MockGeneratorParams::validate() const {
  if (!(prior_easy > 0.0 && prior_easy < 1.0))
    throw DomainError("MockGeneratorParams: prior_easy must lie in (0, 1)");
  if (!(label_likelihood > 0.0 && label_likelihood < 1.0))
    throw DomainError(
        "MockGeneratorParams: label_likelihood must lie in (0, 1)");
  if (!(length_imitation >= 0.0 && length_imitation <= 1.0))
    throw DomainError(
        "MockGeneratorParams: length_imitation must lie in [0, 1]");
}

double mock_posterior_easy(std::span<const AcronymExample> prompts,
                           const MockGeneratorParams& params,
                           const FrequencyTable& table) {
  if (prompts.empty()) throw DomainError("mock_posterior_easy: no prompts");
  params.validate();
  double log_easy = std::log(params.prior_easy);
  double log_hard = std::log(1.0 - params.prior_easy);
  const double log_match = std::log(params.label_likelihood);
  const double log_miss = std::log(1.0 - params.label_likelihood);
  for (const AcronymExample& e : prompts) {
    const bool easy = classify_easy(e.acronym, table);
    log_easy += easy ? log_match : log_miss;
    log_hard += easy ? log_miss : log_match;
  }
  const double mx = std::max(log_easy, log_hard);
  const double z = std::exp(log_easy - mx) + std::exp(log_hard - mx);
  return std::exp(log_easy - mx) / z;
}

namespace {

// Nearest stocked length; ties prefer the shorter word.
std::size_t nearest_length(
    const std::map<std::size_t, std::vector<std::string>>& stratum,
    std::size_t target) {
  std::size_t best = 0;
  long best_dist = -1;
  for (const auto& [len, words] : stratum) {
    if (words.empty()) continue;
    const long dist = std::labs(static_cast<long>(len) -
                                static_cast<long>(target));
    if (best_dist < 0 || dist < best_dist) {
      best = len;
      best_dist = dist;
    }
  }
  if (best_dist < 0) throw MisuseError("mock_generator: empty stratum");
  return best;
}

}  // namespace

std::vector<AcronymExample> mock_generator(
    std::span<const AcronymExample> prompts, const MockGeneratorParams& params,
    const FrequencyTable& table, std::size_t batch_size, Rng& rng) {
  if (prompts.empty()) throw DomainError("mock_generator: no prompt examples");
  if (batch_size == 0) throw DomainError("mock_generator: empty batch");
  params.validate();

  const double posterior_easy = mock_posterior_easy(prompts, params, table);
  double prompt_length = 0.0;
  for (const AcronymExample& e : prompts)
    prompt_length += static_cast<double>(e.acronym.size());
  prompt_length /= static_cast<double>(prompts.size());

  const auto& easy_stratum = table.easy_by_length();
  const auto& hard_stratum = table.hard_by_length();
  if (easy_stratum.empty() || hard_stratum.empty())
    throw MisuseError("mock_generator: empty stratum");

  std::vector<AcronymExample> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const bool easy_style = rng.bernoulli(posterior_easy);
    const auto& stratum = easy_style ? easy_stratum : hard_stratum;
    const double base =
        easy_style ? params.base_length_easy : params.base_length_hard;
    const double mean = params.length_imitation * prompt_length +
                        (1.0 - params.length_imitation) * base;
    const double draw = mean + params.length_spread * gaussian(rng);
    const long clamped = std::lround(std::clamp(draw, 2.0, 12.0));
    const std::size_t len =
        nearest_length(stratum, static_cast<std::size_t>(clamped));
    const auto& words = stratum.at(len);
    AcronymExample e;
    e.acronym = to_upper(words[rng.next_index(words.size())]);
    e.words = expand_acronym(e.acronym, rng);
    e.validate();
    batch.push_back(std::move(e));
  }
  return batch;
}

const char* to_string(PoolFilter f) {
  switch (f) {
    case PoolFilter::kImitationOnly: return "imitation_only";
    case PoolFilter::kRandom: return "random";
    case PoolFilter::kEasy: return "easy";
    case PoolFilter::kHard: return "hard";
    case PoolFilter::kEasyLong: return "easylong";
    case PoolFilter::kEasyShort: return "easyshort";
  }
  return "random";
}

PoolFilter parse_pool_filter(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(PoolFilter::kEasyShort); ++i)
    if (s == to_string(static_cast<PoolFilter>(i)))
      return static_cast<PoolFilter>(i);
  throw ConfigError("unknown pool filter '" + s + "'");
}

std::function<double(const AcronymExample&)> filter_weighting(
    PoolFilter filter, const FrequencyTable& table) {
  switch (filter) {
    case PoolFilter::kImitationOnly:
      throw MisuseError(
          "filter_weighting: imitation_only passes the previous batch "
          "verbatim instead of weighting the pool");
    case PoolFilter::kRandom:
      return [](const AcronymExample&) { return 1.0; };
    case PoolFilter::kEasy:
      return [&table](const AcronymExample& e) {
        return classify_easy(e.acronym, table) ? 1.0 : 0.0;
      };
    case PoolFilter::kHard:
      return [&table](const AcronymExample& e) {
        return classify_easy(e.acronym, table) ? 0.0 : 1.0;
      };
    case PoolFilter::kEasyLong:
      return [&table](const AcronymExample& e) {
        return classify_easy(e.acronym, table)
                   ? static_cast<double>(e.acronym.size())
                   : 0.0;
      };
    case PoolFilter::kEasyShort:
      return [&table](const AcronymExample& e) {
        return classify_easy(e.acronym, table)
                   ? 1.0 / static_cast<double>(e.acronym.size())
                   : 0.0;
      };
  }
  throw ConfigError("filter_weighting: unknown filter");
}

std::vector<AcronymExample> make_initial_batch(std::size_t batch_size,
                                               std::size_t n_easy,
                                               const FrequencyTable& table,
                                               const MockGeneratorParams& params,
                                               Rng& rng) {
  if (n_easy > batch_size)
    throw DomainError("make_initial_batch: n_easy exceeds the batch size");
  const auto& easy_stratum = table.easy_by_length();
  const auto& hard_stratum = table.hard_by_length();
  if (easy_stratum.empty() || hard_stratum.empty())
    throw MisuseError("make_initial_batch: empty stratum");

  std::vector<AcronymExample> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const bool easy = i < n_easy;
    const auto& stratum = easy ? easy_stratum : hard_stratum;
    const double base =
        easy ? params.base_length_easy : params.base_length_hard;
    const double draw = base + params.length_spread * gaussian(rng);
    const long clamped = std::lround(std::clamp(draw, 2.0, 12.0));
    const std::size_t len =
        nearest_length(stratum, static_cast<std::size_t>(clamped));
    const auto& words = stratum.at(len);
    AcronymExample e;
    e.acronym = to_upper(words[rng.next_index(words.size())]);
    e.words = expand_acronym(e.acronym, rng);
    batch.push_back(std::move(e));
  }
  return batch;
}

PoolExperimentResult run_pool_experiment(const PoolExperimentConfig& config,
                                         const FrequencyTable& table) {
  if (config.generations < 1)
    throw DomainError("run_pool_experiment: T must be >= 1");
  if (config.batch_size < 1)
    throw DomainError("run_pool_experiment: batch size must be >= 1");
  config.generator.validate();

  Rng rng(config.seed);
  PoolExperimentResult result;
  result.pool.push(make_initial_batch(config.batch_size, config.initial_easy,
                                      table, config.generator, rng));
  result.per_generation.push_back(PoolGenerationMetrics{
      0, pool_metrics(result.pool.generations.front(), table)});

  for (std::size_t t = 1; t <= config.generations; ++t) {
    std::vector<AcronymExample> prompts;
    if (config.filter == PoolFilter::kImitationOnly) {
      prompts = result.pool.generations.back();
    } else {
      const std::vector<AcronymExample> pool = result.pool.all();
      prompts = weighted_pool_sample<AcronymExample>(
          pool, filter_weighting(config.filter, table), config.batch_size,
          rng);
    }
    std::vector<AcronymExample> batch = mock_generator(
        prompts, config.generator, table, config.batch_size, rng);
    result.per_generation.push_back(
        PoolGenerationMetrics{t, pool_metrics(batch, table)});
    result.pool.push(std::move(batch));
  }
  return result;
}

void write_pool_metrics_csv(std::ostream& out,
                            const PoolExperimentResult& result) {
  char buf[64];
  out << "generation,ratio_easy,avg_rank,avg_length\n";
  for (const PoolGenerationMetrics& row : result.per_generation) {
    out << row.generation;
    std::snprintf(buf, sizeof buf, "%.17g", row.metrics.ratio_easy);
    out << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", row.metrics.avg_rank);
    out << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", row.metrics.avg_length);
    out << ',' << buf << '\n';
  }
}

}  // namespace ilsim
