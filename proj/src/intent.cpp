#include "icr/intent.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "icr/errors.hpp"

namespace icr::intent {

using nlohmann::json;

const char* intent_name(IntentLabel label) {
  switch (label) {
    case IntentLabel::TurnLeft: return "TurnLeft";
    case IntentLabel::TurnRight: return "TurnRight";
    case IntentLabel::GoStraight: return "GoStraight";
    case IntentLabel::LaneChangeLeft: return "LaneChangeLeft";
    case IntentLabel::LaneChangeRight: return "LaneChangeRight";
    case IntentLabel::Follow: return "Follow";
    case IntentLabel::Stop: return "Stop";
    case IntentLabel::Unknown: return "Unknown";
  }
  return "?";
}

IntentLabel intent_from_name(const std::string& name) {
  static const std::array<IntentLabel, 8> all = {
      IntentLabel::TurnLeft,        IntentLabel::TurnRight,
      IntentLabel::GoStraight,      IntentLabel::LaneChangeLeft,
      IntentLabel::LaneChangeRight, IntentLabel::Follow,
      IntentLabel::Stop,            IntentLabel::Unknown,
  };
  for (IntentLabel label : all) {
    if (name == intent_name(label)) return label;
  }
  throw ParseError("unknown intent label \"" + name + "\"");
}

ClassifierConfig ClassifierConfig::defaults() {
  ClassifierConfig cfg;
  // Lane-change rules outrank bare direction words; a lone direction word
  // reads as a turn. A bare "turn" with no direction stays Unknown.
  cfg.rules = {
      {{"lane", "left"}, IntentLabel::LaneChangeLeft},
      {{"lane", "right"}, IntentLabel::LaneChangeRight},
      {{"left"}, IntentLabel::TurnLeft},
      {{"right"}, IntentLabel::TurnRight},
      {{"straight"}, IntentLabel::GoStraight},
      {{"stop"}, IntentLabel::Stop},
      {{"halt"}, IntentLabel::Stop},
      {{"follow"}, IntentLabel::Follow},
  };
  return cfg;
}

std::vector<std::string> normalize_tokens(const std::string& text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '[' && i + 2 < text.size() && text[i + 1] == 'x' &&
        text[i + 2] == ']') {
      cleaned += "[x]";
      i += 2;
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      cleaned += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      cleaned += ' ';
    }
  }
  std::vector<std::string> tokens;
  std::istringstream stream(cleaned);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

int edit_distance(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

namespace {

bool token_matches_keyword(const std::string& token, const std::string& keyword,
                           const ClassifierConfig& cfg) {
  if (token == keyword) return true;
  if (static_cast<int>(keyword.size()) < cfg.min_fuzzy_keyword_length) {
    return false;
  }
  return edit_distance(token, keyword) <= cfg.max_keyword_edit_distance;
}

bool rule_fires(const std::vector<std::string>& tokens, const KeywordRule& rule,
                const ClassifierConfig& cfg) {
  for (const std::string& keyword : rule.all_of) {
    const bool found = std::any_of(
        tokens.begin(), tokens.end(), [&](const std::string& token) {
          return token_matches_keyword(token, keyword, cfg);
        });
    if (!found) return false;
  }
  return !rule.all_of.empty();
}

}  // namespace

IntentLabel classify_intent(const std::string& text, const ClassifierConfig& cfg) {
  const std::vector<std::string> tokens = normalize_tokens(text);
  if (tokens.empty()) return IntentLabel::Unknown;
  for (const KeywordRule& rule : cfg.rules) {
    if (rule_fires(tokens, rule, cfg)) return rule.label;
  }
  return IntentLabel::Unknown;
}

bool intent_consistent(const InstructionSequence& variant,
                       const std::vector<IntentLabel>& baseline_intents,
                       const ClassifierConfig& cfg) {
  if (variant.items.size() != baseline_intents.size()) {
    throw AlignmentError("variant has " + std::to_string(variant.items.size()) +
                         " items but baseline has " +
                         std::to_string(baseline_intents.size()));
  }
  for (std::size_t i = 0; i < variant.items.size(); ++i) {
    if (baseline_intents[i] == IntentLabel::Unknown) continue;
    if (classify_intent(variant.items[i].text, cfg) != baseline_intents[i]) {
      return false;
    }
  }
  return true;
}

bool conflicts(IntentLabel a, IntentLabel b) {
  const auto pair_is = [&](IntentLabel x, IntentLabel y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  return pair_is(IntentLabel::TurnLeft, IntentLabel::TurnRight) ||
         pair_is(IntentLabel::LaneChangeLeft, IntentLabel::LaneChangeRight) ||
         pair_is(IntentLabel::Follow, IntentLabel::Stop) ||
         pair_is(IntentLabel::GoStraight, IntentLabel::Stop);
}

bool intent_conflicting(const InstructionSequence& variant,
                        const std::vector<IntentLabel>& baseline_intents,
                        const ClassifierConfig& cfg) {
  if (variant.items.size() != baseline_intents.size()) {
    throw AlignmentError("variant has " + std::to_string(variant.items.size()) +
                         " items but baseline has " +
                         std::to_string(baseline_intents.size()));
  }
  for (std::size_t i = 0; i < variant.items.size(); ++i) {
    if (conflicts(classify_intent(variant.items[i].text, cfg),
                  baseline_intents[i])) {
      return true;
    }
  }
  return false;
}

std::vector<IntentLabel> classify_sequence(const InstructionSequence& seq,
                                           const ClassifierConfig& cfg) {
  std::vector<IntentLabel> labels;
  labels.reserve(seq.items.size());
  for (const auto& item : seq.items) {
    labels.push_back(classify_intent(item.text, cfg));
  }
  return labels;
}

ClassifierConfig load_classifier_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": not valid JSON: " + e.what());
  }
  ClassifierConfig cfg = ClassifierConfig::defaults();
  if (j.contains("max_keyword_edit_distance")) {
    if (!j["max_keyword_edit_distance"].is_number_integer() ||
        j["max_keyword_edit_distance"].get<int>() < 0) {
      throw ParseError(path.string() +
                       ": max_keyword_edit_distance: expected integer >= 0");
    }
    cfg.max_keyword_edit_distance = j["max_keyword_edit_distance"].get<int>();
  }
  if (j.contains("min_fuzzy_keyword_length")) {
    if (!j["min_fuzzy_keyword_length"].is_number_integer()) {
      throw ParseError(path.string() +
                       ": min_fuzzy_keyword_length: expected integer");
    }
    cfg.min_fuzzy_keyword_length = j["min_fuzzy_keyword_length"].get<int>();
  }
  if (j.contains("rules")) {
    if (!j["rules"].is_array()) {
      throw ParseError(path.string() + ": rules: expected array");
    }
    cfg.rules.clear();
    std::size_t index = 0;
    for (const auto& jr : j["rules"]) {
      const std::string at = path.string() + ": rules[" + std::to_string(index) + "]";
      if (!jr.is_object() || !jr.contains("all_of") || !jr["all_of"].is_array() ||
          !jr.contains("label") || !jr["label"].is_string()) {
        throw ParseError(at + ": expected {all_of: [...], label: \"...\"}");
      }
      KeywordRule rule;
      for (const auto& kw : jr["all_of"]) {
        if (!kw.is_string() || kw.get<std::string>().empty()) {
          throw ParseError(at + ".all_of: expected non-empty strings");
        }
        std::string keyword = kw.get<std::string>();
        std::transform(keyword.begin(), keyword.end(), keyword.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        rule.all_of.push_back(std::move(keyword));
      }
      rule.label = intent_from_name(jr["label"].get<std::string>());
      cfg.rules.push_back(std::move(rule));
      ++index;
    }
  }
  return cfg;
}

}  // namespace icr::intent
