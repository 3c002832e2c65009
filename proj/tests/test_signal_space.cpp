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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ilsim/signal_space.hpp"

using namespace ilsim;

namespace {

SignalMapping make_mapping(int bc, int bb, int rc, int rb) {
  SignalMapping m;
  m.message[SignalObject{Color::kBlue, Shape::kCircle}.index()] = bc;
  m.message[SignalObject{Color::kBlue, Shape::kBox}.index()] = bb;
  m.message[SignalObject{Color::kRed, Shape::kCircle}.index()] = rc;
  m.message[SignalObject{Color::kRed, Shape::kBox}.index()] = rb;
  return m;
}

// The three worked examples: everything to "00"; color on the high bit and
// shape on the low bit; and a bijection that factors through neither.
const SignalMapping kDegenerate = make_mapping(0, 0, 0, 0);
const SignalMapping kSystematic = make_mapping(0, 1, 2, 3);
const SignalMapping kHolistic = make_mapping(0, 3, 1, 2);

}  // namespace

TEST_CASE("enumeration covers all 256 mappings exactly once") {
  const auto all = enumerate_mappings();
  REQUIRE(all.size() == 256);
  std::set<int> seen;
  for (const SignalMapping& m : all) seen.insert(m.index());
  CHECK(seen.size() == 256);
  // Lexicographic convention: the first mapping names everything "00".
  for (int msg : all.front().message) CHECK(msg == 0);
  // Index round-trip.
  for (int i = 0; i < 256; ++i)
    CHECK(SignalMapping::from_index(i).index() == i);
}

TEST_CASE("exactly 24 bijections exist (permutation oracle)") {
  // Independent count: enumerate permutations of the four messages.
  std::array<int, 4> perm{0, 1, 2, 3};
  std::set<int> bijective_indices;
  do {
    SignalMapping m;
    for (int obj = 0; obj < 4; ++obj) m.message[obj] = perm[obj];
    bijective_indices.insert(m.index());
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(bijective_indices.size() == 24);

  std::size_t counted = 0;
  for (const SignalMapping& m : enumerate_mappings())
    if (m.bijective()) {
      ++counted;
      CHECK(bijective_indices.count(m.index()) == 1);
    }
  CHECK(counted == 24);
}

TEST_CASE("classification of the worked examples") {
  CHECK(classify(kDegenerate) == MappingClass::kDegenerate);
  CHECK(classify(kSystematic) == MappingClass::kSystematic);
  CHECK(classify(kHolistic) == MappingClass::kHolistic);
  // Shape-first factored mapping is admitted as well.
  const SignalMapping shape_first = make_mapping(0, 2, 1, 3);
  CHECK(classify(shape_first) == MappingClass::kSystematic);
}

TEST_CASE("class census is 4 / 8 / 16 / 228") {
  int census[4] = {0, 0, 0, 0};
  for (const SignalMapping& m : enumerate_mappings())
    ++census[static_cast<int>(classify(m))];
  CHECK(census[static_cast<int>(MappingClass::kDegenerate)] == 4);
  CHECK(census[static_cast<int>(MappingClass::kSystematic)] == 8);
  CHECK(census[static_cast<int>(MappingClass::kHolistic)] == 16);
  CHECK(census[static_cast<int>(MappingClass::kOther)] == 228);
}

TEST_CASE("systematic implies bijective; degenerate means one message") {
  for (const SignalMapping& m : enumerate_mappings()) {
    const MappingClass c = classify(m);
    if (c == MappingClass::kSystematic || c == MappingClass::kHolistic)
      CHECK(m.bijective());
    if (c == MappingClass::kDegenerate) CHECK(m.distinct_messages() == 1);
  }
}

TEST_CASE("message relabeling preserves bijectivity and degeneracy") {
  // Permuting message labels maps classes onto themselves for the
  // structural properties: a systematic mapping can never become
  // degenerate, and bijections stay bijections.
  std::array<int, 4> perm{1, 3, 0, 2};
  for (const SignalMapping& m : enumerate_mappings()) {
    SignalMapping relabeled;
    for (int obj = 0; obj < 4; ++obj)
      relabeled.message[obj] = perm[m.message[obj]];
    CHECK(relabeled.bijective() == m.bijective());
    if (classify(m) == MappingClass::kSystematic)
      CHECK(classify(relabeled) != MappingClass::kDegenerate);
    if (classify(m) == MappingClass::kDegenerate)
      CHECK(classify(relabeled) == MappingClass::kDegenerate);
  }
}

TEST_CASE("canonical grammar costs are 18, 43 and 56") {
  CHECK(coding_length(kDegenerate) == 18);
  CHECK(coding_length(kSystematic) == 43);
  CHECK(coding_length(kHolistic) == 56);
}

TEST_CASE("coding length is uniform within the three named classes") {
  for (const SignalMapping& m : enumerate_mappings()) {
    switch (classify(m)) {
      case MappingClass::kDegenerate: CHECK(coding_length(m) == 18); break;
      case MappingClass::kSystematic: CHECK(coding_length(m) == 43); break;
      case MappingClass::kHolistic: CHECK(coding_length(m) == 56); break;
      case MappingClass::kOther: {
        const int alpha = coding_length(m);
        CHECK(alpha > 43);
        CHECK(alpha < 56);
        break;
      }
    }
  }
}

TEST_CASE("every degenerate/systematic/holistic triple is ordered") {
  std::vector<int> deg, sys, holi;
  for (const SignalMapping& m : enumerate_mappings()) {
    const int alpha = coding_length(m);
    switch (classify(m)) {
      case MappingClass::kDegenerate: deg.push_back(alpha); break;
      case MappingClass::kSystematic: sys.push_back(alpha); break;
      case MappingClass::kHolistic: holi.push_back(alpha); break;
      default: break;
    }
  }
  const int max_deg = *std::max_element(deg.begin(), deg.end());
  const int min_sys = *std::min_element(sys.begin(), sys.end());
  const int max_sys = *std::max_element(sys.begin(), sys.end());
  const int min_holi = *std::min_element(holi.begin(), holi.end());
  CHECK(max_deg < min_sys);
  CHECK(max_sys < min_holi);
}

TEST_CASE("rendered grammar matches the counting conventions") {
  const std::string deg = render_grammar(kDegenerate);
  CHECK(deg == "S: 00 → Everything");
  const std::string sys = render_grammar(kSystematic);
  CHECK(sys.find("z2") != std::string::npos);
  CHECK(sys.find("blue") != std::string::npos);
  const std::string holi = render_grammar(kHolistic);
  CHECK(holi.find("blue circle") != std::string::npos);
}

TEST_CASE("coding prior normalizes and orders hypotheses by class") {
  const SignalSpace space;
  for (double c : {0.1, 1.0, 4.0, 100.0}) {
    const BeliefState prior = coding_prior(space, c);
    const std::vector<double> probs = prior.probs();
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prior.prob(kDegenerate.index()) > prior.prob(kSystematic.index()));
    CHECK(prior.prob(kSystematic.index()) > prior.prob(kHolistic.index()));
  }
  CHECK_THROWS_AS(coding_prior(space, 0.0), DomainError);
  CHECK_THROWS_AS(coding_prior(space, -2.0), DomainError);
}

TEST_CASE("huge c flattens the prior to uniform") {
  const SignalSpace space;
  const BeliefState prior = coding_prior(space, 1e12);
  for (std::size_t h = 0; h < 256; ++h)
    CHECK(prior.prob(h) == doctest::Approx(1.0 / 256.0).epsilon(1e-6));
}

TEST_CASE("aggregated class mass: degenerate above systematic above holistic") {
  const SignalSpace space;
  const BeliefState prior = coding_prior(space, 1.6);
  double mass[4] = {0, 0, 0, 0};
  for (std::size_t h = 0; h < 256; ++h)
    mass[static_cast<int>(classify(SignalMapping::from_index(
        static_cast<int>(h))))] += prior.prob(h);
  CHECK(mass[0] > mass[1]);  // degenerate > systematic
  CHECK(mass[1] > mass[2]);  // systematic > holistic
}

TEST_CASE("table dump produces one row per mapping") {
  const SignalSpace space;
  std::ostringstream out;
  write_signal_table_csv(out, space, 1.6);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "mapping_id,assignment,class,alpha,prior");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 256);
}

TEST_CASE("calibration file round-trips the shipped defaults") {
  const CodingConfig from_file = CodingConfig::from_json_file(
      std::string(ILSIM_SOURCE_DIR) + "/data/coding_calibration.json");
  const CodingConfig defaults = CodingConfig::defaults();
  CHECK(from_file.spaced_degenerate == defaults.spaced_degenerate);
  CHECK(from_file.spaced_systematic == defaults.spaced_systematic);
  CHECK(from_file.spaced_holistic == defaults.spaced_holistic);
  CHECK(from_file.spaced_partial == defaults.spaced_partial);
  CHECK(coding_length(kDegenerate, from_file) == 18);
  CHECK(coding_length(kSystematic, from_file) == 43);
  CHECK(coding_length(kHolistic, from_file) == 56);
}
