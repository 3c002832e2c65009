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

#include "ilsim/signal_space.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ilsim {

SignalObject SignalObject::from_index(int i) {
  return SignalObject{static_cast<Color>((i >> 1) & 1),
                      static_cast<Shape>(i & 1)};
}

int SignalObject::index() const {
  return (static_cast<int>(color) << 1) | static_cast<int>(shape);
}

std::string SignalObject::name() const {
  std::string out = color == Color::kBlue ? "blue" : "red";
  out += ' ';
  out += shape == Shape::kCircle ? "circle" : "box";
  return out;
}

std::string Message::text() const {
  std::string out;
  out += static_cast<char>('0' + high_bit());
  out += static_cast<char>('0' + low_bit());
  return out;
}

int SignalMapping::index() const {
  int idx = 0;
  for (int obj = 0; obj < SignalObject::kCount; ++obj)
    idx = idx * Message::kCount + message[obj];
  return idx;
}

SignalMapping SignalMapping::from_index(int idx) {
  SignalMapping m;
  for (int obj = SignalObject::kCount - 1; obj >= 0; --obj) {
    m.message[obj] = idx % Message::kCount;
    idx /= Message::kCount;
  }
  return m;
}

int SignalMapping::distinct_messages() const {
  bool seen[Message::kCount] = {};
  int count = 0;
  for (int msg : message) {
    if (!seen[msg]) {
      seen[msg] = true;
      ++count;
    }
  }
  return count;
}

const char* to_string(MappingClass c) {
  switch (c) {
    case MappingClass::kDegenerate: return "degenerate";
    case MappingClass::kSystematic: return "systematic";
    case MappingClass::kHolistic: return "holistic";
    case MappingClass::kOther: return "other";
  }
  return "other";
}

std::vector<SignalMapping> enumerate_mappings() {
  std::vector<SignalMapping> out;
  out.reserve(256);
  for (int idx = 0; idx < 256; ++idx) out.push_back(SignalMapping::from_index(idx));
  return out;
}

namespace {

int color_of(int obj) { return (obj >> 1) & 1; }
int shape_of(int obj) { return obj & 1; }

// True when `bit_of_message` is a function of the chosen attribute alone.
bool bit_depends_only_on(const SignalMapping& m, bool high_bit,
                         bool attribute_is_color) {
  int value_for[2] = {-1, -1};
  for (int obj = 0; obj < SignalObject::kCount; ++obj) {
    const Message msg{m.message[obj]};
    const int bit = high_bit ? msg.high_bit() : msg.low_bit();
    const int attr = attribute_is_color ? color_of(obj) : shape_of(obj);
    if (value_for[attr] == -1) {
      value_for[attr] = bit;
    } else if (value_for[attr] != bit) {
      return false;
    }
  }
  return true;
}

// Both attribute-to-bit orders are admitted: color may fill the high bit
// and shape the low bit, or the reverse.
bool is_systematic(const SignalMapping& m) {
  if (!m.bijective()) return false;
  const bool color_first = bit_depends_only_on(m, /*high_bit=*/true, true) &&
                           bit_depends_only_on(m, /*high_bit=*/false, false);
  const bool shape_first = bit_depends_only_on(m, /*high_bit=*/true, false) &&
                           bit_depends_only_on(m, /*high_bit=*/false, true);
  return color_first || shape_first;
}

}  // namespace

MappingClass classify(const SignalMapping& m) {
  if (m.distinct_messages() == 1) return MappingClass::kDegenerate;
  if (m.bijective())
    return is_systematic(m) ? MappingClass::kSystematic
                            : MappingClass::kHolistic;
  return MappingClass::kOther;
}

namespace {

// One grammar production "lhs[:sel] -> rhs". The colon and arrow count one
// character each; the spaced convention adds three separator spaces.
struct Production {
  std::string lhs;
  std::string sel;  // empty for the systematic start rule
  std::string rhs;

  int chars() const {
    int n = static_cast<int>(lhs.size() + rhs.size()) + 1;  // arrow
    if (!sel.empty()) n += static_cast<int>(sel.size()) + 1;  // selector + colon
    return n;
  }

  std::string render(bool spaced) const {
    std::string out = lhs;
    if (!sel.empty()) {
      out += spaced ? ": " : ":";
      out += sel;
    }
    out += spaced ? " → " : "→";
    out += rhs;
    return out;
  }
};

struct Grammar {
  std::vector<Production> productions;
  bool spaced = false;

  int cost() const {
    int total = 0;
    for (const Production& p : productions) total += p.chars();
    if (spaced) total += 3 * static_cast<int>(productions.size());
    return total;
  }
};

Grammar degenerate_grammar(const SignalMapping& m, const CodingConfig& cfg) {
  Grammar g;
  g.spaced = cfg.spaced_degenerate;
  g.productions.push_back(
      Production{"S", Message{m.message[0]}.text(), "Everything"});
  return g;
}

Grammar holistic_grammar(const SignalMapping& m, const CodingConfig& cfg) {
  Grammar g;
  g.spaced = cfg.spaced_holistic;
  for (int obj = 0; obj < SignalObject::kCount; ++obj)
    g.productions.push_back(Production{"S", Message{m.message[obj]}.text(),
                                       SignalObject::from_index(obj).name()});
  return g;
}

Grammar partial_grammar(const SignalMapping& m, const CodingConfig& cfg) {
  Grammar g;
  g.spaced = cfg.spaced_partial;
  for (int msg = 0; msg < Message::kCount; ++msg) {
    std::string rhs;
    for (int obj = 0; obj < SignalObject::kCount; ++obj) {
      if (m.message[obj] != msg) continue;
      if (!rhs.empty()) rhs += ", ";
      rhs += SignalObject::from_index(obj).name();
    }
    if (!rhs.empty())
      g.productions.push_back(Production{"S", Message{msg}.text(), rhs});
  }
  return g;
}

Grammar systematic_grammar(const SignalMapping& m, const CodingConfig& cfg) {
  // Nonterminal z2 expands colors, z1 expands shapes; the start rule lists
  // them in the order their bits appear in the message.
  const bool color_high = bit_depends_only_on(m, /*high_bit=*/true, true) &&
                          bit_depends_only_on(m, /*high_bit=*/false, false);
  Grammar g;
  g.spaced = cfg.spaced_systematic;
  g.productions.push_back(
      Production{"S", "", color_high ? "z2,z1" : "z1,z2"});

  // Recover the attribute-to-bit functions from the blue circle.
  const Message m_bc{m.message[SignalObject{Color::kBlue, Shape::kCircle}.index()]};
  const int blue_bit = color_high ? m_bc.high_bit() : m_bc.low_bit();
  const int circle_bit = color_high ? m_bc.low_bit() : m_bc.high_bit();
  const int red_bit = 1 - blue_bit;
  const int box_bit = 1 - circle_bit;

  auto bit_text = [](int b) { return std::string(1, static_cast<char>('0' + b)); };
  g.productions.push_back(Production{"z2", bit_text(blue_bit), "blue"});
  g.productions.push_back(Production{"z2", bit_text(red_bit), "red"});
  g.productions.push_back(Production{"z1", bit_text(circle_bit), "circle"});
  g.productions.push_back(Production{"z1", bit_text(box_bit), "box"});
  return g;
}

Grammar minimal_grammar(const SignalMapping& m, const CodingConfig& cfg) {
  Grammar best = holistic_grammar(m, cfg);
  auto consider = [&best](Grammar candidate) {
    if (candidate.cost() < best.cost()) best = std::move(candidate);
  };
  if (m.distinct_messages() == 1) {
    consider(degenerate_grammar(m, cfg));
  } else {
    consider(partial_grammar(m, cfg));
  }
  if (is_systematic(m)) consider(systematic_grammar(m, cfg));
  return best;
}

}  // namespace

int coding_length(const SignalMapping& m, const CodingConfig& config) {
  return minimal_grammar(m, config).cost();
}

std::string render_grammar(const SignalMapping& m, const CodingConfig& config) {
  const Grammar g = minimal_grammar(m, config);
  std::string out;
  for (const Production& p : g.productions) {
    if (!out.empty()) out += '\n';
    out += p.render(g.spaced);
  }
  return out;
}

CodingConfig CodingConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("CodingConfig: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("CodingConfig: invalid JSON in " + path + ": " + e.what());
  }
  CodingConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "spaced_degenerate") cfg.spaced_degenerate = value.get<bool>();
    else if (key == "spaced_systematic") cfg.spaced_systematic = value.get<bool>();
    else if (key == "spaced_holistic") cfg.spaced_holistic = value.get<bool>();
    else if (key == "spaced_partial") cfg.spaced_partial = value.get<bool>();
    else if (key == "calibration") continue;  // recorded expectations, not knobs
    else throw ConfigError("CodingConfig: unknown key '" + key + "'");
  }
  return cfg;
}

int SignalSpace::apply(std::size_t h, int x) const {
  return SignalMapping::from_index(static_cast<int>(h)).message[x];
}

BeliefState coding_prior(const SignalSpace& space, double c,
                         const CodingConfig& config) {
  if (!(c > 0.0)) throw DomainError("coding_prior: c must be > 0");
  const double ln2 = std::log(2.0);
  std::vector<double> logw(space.num_hypotheses());
  for (std::size_t h = 0; h < logw.size(); ++h) {
    const int alpha =
        coding_length(SignalMapping::from_index(static_cast<int>(h)), config);
    logw[h] = -static_cast<double>(alpha) / c * ln2;
  }
  return BeliefState::from_log_weights(space.id(), std::move(logw));
}

std::string signal_class_label(std::size_t h) {
  return to_string(classify(SignalMapping::from_index(static_cast<int>(h))));
}

void write_signal_table_csv(std::ostream& out, const SignalSpace& space,
                            double c, const CodingConfig& config) {
  const BeliefState prior = coding_prior(space, c, config);
  out << "mapping_id,assignment,class,alpha,prior\n";
  char buf[64];
  for (std::size_t h = 0; h < space.num_hypotheses(); ++h) {
    const SignalMapping m = SignalMapping::from_index(static_cast<int>(h));
    std::string assignment;
    for (int obj = 0; obj < SignalObject::kCount; ++obj) {
      if (obj) assignment += '-';
      assignment += Message{m.message[obj]}.text();
    }
    std::snprintf(buf, sizeof buf, "%.17g", prior.prob(h));
    out << h << ',' << assignment << ',' << to_string(classify(m)) << ','
        << coding_length(m, config) << ',' << buf << '\n';
  }
}

}  // namespace ilsim
