#include "icr/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "json.hpp"

#include "icr/errors.hpp"

namespace icr::perturb {

using nlohmann::json;

const char* noise_transform_name(NoiseTransform t) {
  switch (t) {
    case NoiseTransform::UppercaseAll: return "UppercaseAll";
    case NoiseTransform::LowercaseAll: return "LowercaseAll";
    case NoiseTransform::StripPunctuation: return "StripPunctuation";
    case NoiseTransform::SwapAdjacentChars: return "SwapAdjacentChars";
    case NoiseTransform::DeleteChar: return "DeleteChar";
    case NoiseTransform::DuplicateChar: return "DuplicateChar";
    case NoiseTransform::CommaInjection: return "CommaInjection";
  }
  return "?";
}

NoiseTransform noise_transform_from_name(const std::string& name) {
  static const NoiseTransform all[] = {
      NoiseTransform::UppercaseAll,    NoiseTransform::LowercaseAll,
      NoiseTransform::StripPunctuation, NoiseTransform::SwapAdjacentChars,
      NoiseTransform::DeleteChar,      NoiseTransform::DuplicateChar,
      NoiseTransform::CommaInjection,
  };
  for (NoiseTransform t : all) {
    if (name == noise_transform_name(t)) return t;
  }
  throw ParseError("unknown noise transform \"" + name + "\"");
}

IntentLabel flip_direction(IntentLabel label) {
  switch (label) {
    case IntentLabel::TurnLeft: return IntentLabel::TurnRight;
    case IntentLabel::TurnRight: return IntentLabel::TurnLeft;
    case IntentLabel::LaneChangeLeft: return IntentLabel::LaneChangeRight;
    case IntentLabel::LaneChangeRight: return IntentLabel::LaneChangeLeft;
    case IntentLabel::GoStraight: return IntentLabel::Stop;
    case IntentLabel::Follow: return IntentLabel::Stop;
    case IntentLabel::Stop: return IntentLabel::Follow;
    case IntentLabel::Unknown: return IntentLabel::Unknown;
  }
  return IntentLabel::Unknown;
}

std::optional<std::string> direction_word(IntentLabel label) {
  switch (label) {
    case IntentLabel::TurnLeft:
    case IntentLabel::LaneChangeLeft:
      return "left";
    case IntentLabel::TurnRight:
    case IntentLabel::LaneChangeRight:
      return "right";
    case IntentLabel::GoStraight:
      return "straight";
    default:
      return std::nullopt;
  }
}

const std::vector<Template>& select_bank(FamilyTag family, IntentLabel intent,
                                         const TemplateBanks& banks) {
  if (family == FamilyTag::A) {
    if (banks.ambiguity.empty()) {
      throw BankMissingError("no templates in the global Ambiguity bank");
    }
    return banks.ambiguity;
  }
  const std::map<IntentLabel, std::vector<Template>>* keyed = nullptr;
  switch (family) {
    case FamilyTag::P: keyed = &banks.paraphrase; break;
    case FamilyTag::N: keyed = &banks.noise; break;
    case FamilyTag::M: keyed = &banks.misleading; break;
    default: break;
  }
  const auto it = keyed->find(intent);
  if (it == keyed->end() || it->second.empty()) {
    throw BankMissingError(std::string("no templates for (") +
                           family_letter(family) + ", " +
                           intent::intent_name(intent) + ")");
  }
  return it->second;
}

std::vector<Template> sample_k(const std::vector<Template>& bank, int k,
                               SplitMix64& rng) {
  if (k < 1) {
    throw InvalidCountError("sample count must be >= 1, got " +
                            std::to_string(k));
  }
  if (bank.empty()) {
    throw BankMissingError("cannot sample from an empty bank");
  }
  std::vector<Template> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(out.size()) < k) {
    // One Fisher-Yates pass per cycle; partial when fewer draws remain.
    std::vector<std::size_t> order(bank.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t remaining = static_cast<std::size_t>(k) - out.size();
    const std::size_t take = std::min(remaining, bank.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + rng.next_below(order.size() - i);
      std::swap(order[i], order[j]);
      out.push_back(bank[order[i]]);
    }
  }
  return out;
}

namespace {

// Spans of text that noise edits must leave untouched ("[x]" placeholders).
std::vector<std::pair<std::size_t, std::size_t>> protected_spans(
    const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t pos = text.find("[x]"); pos != std::string::npos;
       pos = text.find("[x]", pos + 3)) {
    spans.emplace_back(pos, pos + 3);
  }
  return spans;
}

bool in_protected_span(
    std::size_t i, const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
  for (const auto& [b, e] : spans) {
    if (i >= b && i < e) return true;
  }
  return false;
}

bool is_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'':
      return true;
    default:
      return false;
  }
}

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past last char
};

// Alphabetic runs outside protected spans; candidates for character edits.
std::vector<TokenSpan> editable_tokens(const std::string& text,
                                       std::size_t min_length) {
  const auto spans = protected_spans(text);
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (in_protected_span(i, spans) ||
        !std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    TokenSpan t{i, i};
    while (t.end < text.size() && !in_protected_span(t.end, spans) &&
           std::isalpha(static_cast<unsigned char>(text[t.end]))) {
      ++t.end;
    }
    if (t.end - t.begin >= min_length) tokens.push_back(t);
    i = t.end;
  }
  return tokens;
}

std::string uppercase_outside_placeholders(const std::string& text, bool upper) {
  const auto spans = protected_spans(text);
  std::string out = text;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (in_protected_span(i, spans)) continue;
    const unsigned char c = static_cast<unsigned char>(out[i]);
    out[i] = static_cast<char>(upper ? std::toupper(c) : std::tolower(c));
  }
  return out;
}

}  // namespace

std::string apply_noise_transform(NoiseTransform t, const std::string& text,
                                  SplitMix64& rng) {
  switch (t) {
    case NoiseTransform::UppercaseAll:
      return uppercase_outside_placeholders(text, true);
    case NoiseTransform::LowercaseAll:
      return uppercase_outside_placeholders(text, false);
    case NoiseTransform::StripPunctuation: {
      const auto spans = protected_spans(text);
      std::string out;
      out.reserve(text.size());
      for (std::size_t i = 0; i < text.size(); ++i) {
        if (!in_protected_span(i, spans) && is_punct(text[i])) continue;
        out += text[i];
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      return out;
    }
    case NoiseTransform::SwapAdjacentChars: {
      const auto tokens = editable_tokens(text, 3);
      if (tokens.empty()) return text;
      const TokenSpan tok = tokens[rng.next_below(tokens.size())];
      // Positions whose adjacent pair actually differs.
      std::vector<std::size_t> candidates;
      for (std::size_t i = tok.begin; i + 1 < tok.end; ++i) {
        if (text[i] != text[i + 1]) candidates.push_back(i);
      }
      if (candidates.empty()) return text;
      std::string out = text;
      const std::size_t p = candidates[rng.next_below(candidates.size())];
      std::swap(out[p], out[p + 1]);
      return out;
    }
    case NoiseTransform::DeleteChar: {
      const auto tokens = editable_tokens(text, 4);
      if (tokens.empty()) return text;
      const TokenSpan tok = tokens[rng.next_below(tokens.size())];
      const std::size_t p = tok.begin + rng.next_below(tok.end - tok.begin);
      std::string out = text;
      out.erase(p, 1);
      return out;
    }
    case NoiseTransform::DuplicateChar: {
      const auto tokens = editable_tokens(text, 3);
      if (tokens.empty()) return text;
      const TokenSpan tok = tokens[rng.next_below(tokens.size())];
      const std::size_t p = tok.begin + rng.next_below(tok.end - tok.begin);
      std::string out = text;
      out.insert(p, 1, out[p]);
      return out;
    }
    case NoiseTransform::CommaInjection: {
      // Insert a comma after a word that is not already followed by one and
      // is not the last word.
      const auto tokens = editable_tokens(text, 1);
      std::vector<std::size_t> candidates;
      for (const TokenSpan& tok : tokens) {
        if (tok.end >= text.size()) continue;
        if (text[tok.end] == ' ' && (tok.end == 0 || text[tok.end - 1] != ',')) {
          candidates.push_back(tok.end);
        }
      }
      if (candidates.empty()) return text;
      std::string out = text;
      out.insert(candidates[rng.next_below(candidates.size())], 1, ',');
      return out;
    }
  }
  return text;
}

namespace {

void replace_all(std::string& text, const std::string& slot,
                 const std::string& value) {
  for (std::size_t pos = text.find(slot); pos != std::string::npos;
       pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
}

// Drops the comma-delimited clause containing {DIST} and tidies the result.
std::string drop_distance_clause(const std::string& pattern) {
  std::vector<std::string> clauses;
  std::string current;
  for (char c : pattern) {
    if (c == ',') {
      clauses.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  clauses.push_back(current);
  if (clauses.size() < 2) {
    throw SlotError("pattern requires {DIST} but the base item has no \"[x]\" "
                    "and no droppable clause: \"" + pattern + "\"");
  }
  std::vector<std::string> kept;
  for (const std::string& clause : clauses) {
    if (clause.find("{DIST}") == std::string::npos) kept.push_back(clause);
  }
  std::string joined;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0) joined += ",";
    joined += kept[i];
  }
  // Trim, ensure a sentence start and terminal period.
  std::size_t b = 0, e = joined.size();
  while (b < e && joined[b] == ' ') ++b;
  while (e > b && joined[e - 1] == ' ') --e;
  std::string out = joined.substr(b, e - b);
  if (out.empty()) {
    throw SlotError("dropping the {DIST} clause left nothing of \"" + pattern +
                    "\"");
  }
  if (std::isalpha(static_cast<unsigned char>(out[0]))) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

}  // namespace

InstructionItem apply_template(const Template& t, const InstructionItem& base,
                               IntentLabel intent, SplitMix64& rng) {
  std::string pattern = t.pattern;

  if (pattern.find("{DIST}") != std::string::npos &&
      placeholder_count(base.text) == 0) {
    pattern = drop_distance_clause(pattern);
  }

  // {BASE} is filled last so base text is never re-scanned for slots.
  std::string text = pattern;
  if (text.find("{DIR}") != std::string::npos) {
    const auto dir = direction_word(intent);
    if (!dir) {
      throw SlotError(std::string("{DIR} slot needs a directional intent, got ") +
                      intent::intent_name(intent));
    }
    replace_all(text, "{DIR}", *dir);
  }
  if (text.find("{FLIP_DIR}") != std::string::npos) {
    const auto dir = direction_word(flip_direction(intent));
    if (!dir) {
      throw SlotError(
          std::string("{FLIP_DIR} slot needs a directional intent, got ") +
          intent::intent_name(intent));
    }
    replace_all(text, "{FLIP_DIR}", *dir);
  }
  replace_all(text, "{DIST}", "[x]");
  replace_all(text, "{BASE}", base.text);

  if (t.transform) {
    text = apply_noise_transform(*t.transform, text, rng);
  }
  return InstructionItem{text, base.trigger};
}

const std::vector<std::string>& qualifier_lexicon() {
  static const std::vector<std::string> lexicon = {
      "left",     "right", "straight",     "lane",   "junction",
      "intersection", "next",  "after",        "meters", "[x]",
  };
  return lexicon;
}

bool has_qualifier_token(const std::string& text) {
  const auto tokens = intent::normalize_tokens(text);
  const auto& lexicon = qualifier_lexicon();
  for (const std::string& token : tokens) {
    if (std::find(lexicon.begin(), lexicon.end(), token) != lexicon.end()) {
      return true;
    }
    const bool numeric =
        !token.empty() &&
        std::all_of(token.begin(), token.end(), [](unsigned char c) {
          return std::isdigit(c);
        });
    if (numeric) return true;
  }
  return false;
}

TemplateBanks load_banks(const std::filesystem::path& path) {
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
  if (!j.is_object() || !j.contains("templates") || !j["templates"].is_array()) {
    throw ParseError(path.string() + ": templates: expected array");
  }
  TemplateBanks banks;
  if (j.contains("version") && !j["version"].is_string()) {
    throw ParseError(path.string() + ": version: expected string");
  }
  banks.version = j.value("version", std::string("unversioned"));
  std::size_t index = 0;
  for (const auto& jt : j["templates"]) {
    const std::string at =
        path.string() + ": templates[" + std::to_string(index) + "]";
    if (!jt.is_object() || !jt.contains("family") || !jt["family"].is_string() ||
        !jt.contains("intent") || !jt["intent"].is_string() ||
        !jt.contains("pattern") || !jt["pattern"].is_string()) {
      throw ParseError(at + ": expected {family, intent, pattern[, transform]}");
    }
    const std::string fam_str = jt["family"].get<std::string>();
    const auto fam =
        fam_str.size() == 1 ? family_from_letter(fam_str[0]) : std::nullopt;
    if (!fam) {
      throw ParseError(at + ".family: expected one of P, A, N, M");
    }
    Template t;
    t.family = *fam;
    const std::string intent_str = jt["intent"].get<std::string>();
    if (intent_str != "GLOBAL") {
      t.intent_key = intent::intent_from_name(intent_str);
      if (*t.intent_key == IntentLabel::Unknown) {
        throw ParseError(at + ".intent: Unknown cannot key a bank");
      }
    }
    if (t.family == FamilyTag::A && t.intent_key) {
      throw ParseError(at + ": family A templates must use intent GLOBAL");
    }
    t.pattern = jt["pattern"].get<std::string>();
    if (jt.contains("transform") && !jt["transform"].is_null()) {
      if (!jt["transform"].is_string()) {
        throw ParseError(at + ".transform: expected string");
      }
      if (t.family != FamilyTag::N) {
        throw ParseError(at + ": only Noise templates may carry a transform");
      }
      t.transform = noise_transform_from_name(jt["transform"].get<std::string>());
    }

    if (t.family == FamilyTag::A) {
      banks.ambiguity.push_back(std::move(t));
    } else if (!t.intent_key) {
      switch (t.family) {
        case FamilyTag::P: banks.paraphrase_fallback.push_back(std::move(t)); break;
        case FamilyTag::N: banks.noise_fallback.push_back(std::move(t)); break;
        case FamilyTag::M: banks.misleading_fallback.push_back(std::move(t)); break;
        default: break;
      }
    } else {
      switch (t.family) {
        case FamilyTag::P: banks.paraphrase[*t.intent_key].push_back(std::move(t)); break;
        case FamilyTag::N: banks.noise[*t.intent_key].push_back(std::move(t)); break;
        case FamilyTag::M: banks.misleading[*t.intent_key].push_back(std::move(t)); break;
        default: break;
      }
    }
    ++index;
  }
  return banks;
}

}  // namespace icr::perturb
