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

#ifndef ILSIM_SIGNAL_SPACE_HPP_
#define ILSIM_SIGNAL_SPACE_HPP_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ilsim/bayes.hpp"

namespace ilsim {

// The signaling world: four objects (two colors x two shapes) named by
// four two-bit messages. A hypothesis is one of the 4^4 = 256 total
// object -> message assignments.

enum class Color { kBlue = 0, kRed = 1 };
enum class Shape { kCircle = 0, kBox = 1 };

struct SignalObject {
  Color color = Color::kBlue;
  Shape shape = Shape::kCircle;

  static constexpr int kCount = 4;

  // Enumeration order: blue circle, blue box, red circle, red box.
  static SignalObject from_index(int i);
  int index() const;
  std::string name() const;  // e.g. "blue circle"
};

// Messages are the strings "00", "01", "10", "11", indexed by their value
// as a two-bit number (high bit first).
struct Message {
  int index = 0;  // 0..3

  static constexpr int kCount = 4;

  std::string text() const;
  int high_bit() const { return (index >> 1) & 1; }
  int low_bit() const { return index & 1; }
};

// A total assignment of one message to each of the four objects.
struct SignalMapping {
  std::array<int, SignalObject::kCount> message{};  // message index per object

  // Mapping index in [0, 256): base-4 digits with object 0 most
  // significant, so index 0 sends every object to "00".
  int index() const;
  static SignalMapping from_index(int idx);

  int distinct_messages() const;
  bool bijective() const { return distinct_messages() == SignalObject::kCount; }

  bool operator==(const SignalMapping&) const = default;
};

enum class MappingClass { kDegenerate = 0, kSystematic, kHolistic, kOther };
const char* to_string(MappingClass c);

// All 256 mappings in index order; stable across runs.
std::vector<SignalMapping> enumerate_mappings();

// degenerate: all four objects share one message.
// systematic: some color->bit and shape->bit functions produce the message
//             as their concatenation (either bit order); always bijective.
// holistic:   bijective but not systematic.
// other:      everything else.
MappingClass classify(const SignalMapping& m);

// Grammar-template coding lengths. Every mapping is described by the
// shortest grammar among a closed family of templates:
//   - a single "Everything" rule when the mapping is degenerate,
//   - one rule per object (holistic),
//   - a start rule plus factored color/shape rules when systematic,
//   - one rule per used message with the covered objects comma-joined
//     (partial-degenerate), when at least two messages are used.
// A character is one letter, digit, space inside an object name, colon,
// comma, or arrow. Whether separator spaces around punctuation are counted
// is a per-template convention; the shipped defaults reproduce the
// canonical costs 18 (degenerate), 43 (systematic) and 56 (holistic).
struct CodingConfig {
  bool spaced_degenerate = true;
  bool spaced_systematic = false;
  bool spaced_holistic = false;
  bool spaced_partial = false;

  static CodingConfig defaults() { return CodingConfig{}; }
  static CodingConfig from_json_file(const std::string& path);
};

int coding_length(const SignalMapping& m,
                  const CodingConfig& config = CodingConfig::defaults());

// The minimal grammar behind coding_length, rendered for inspection.
std::string render_grammar(const SignalMapping& m,
                           const CodingConfig& config = CodingConfig::defaults());

class SignalSpace final : public MappingSpace {
 public:
  std::string id() const override { return "signal-4x4"; }
  std::size_t num_hypotheses() const override { return 256; }
  std::size_t num_inputs() const override { return SignalObject::kCount; }
  std::size_t num_outputs() const override { return Message::kCount; }
  int apply(std::size_t h, int x) const override;
};

// Prior over all 256 mappings with P(h) proportional to 2^(-alpha(h)/c).
// Throws DomainError for c <= 0.
BeliefState coding_prior(const SignalSpace& space, double c,
                         const CodingConfig& config = CodingConfig::defaults());

// Class label per hypothesis index, for aggregated mass summaries.
std::string signal_class_label(std::size_t h);

// Dumps the full (mapping, class, alpha, prior) table. Columns:
// mapping_id,assignment,class,alpha,prior where assignment joins the four
// message texts in object order with '-'.
void write_signal_table_csv(std::ostream& out, const SignalSpace& space,
                            double c,
                            const CodingConfig& config = CodingConfig::defaults());

}  // namespace ilsim

#endif  // ILSIM_SIGNAL_SPACE_HPP_
