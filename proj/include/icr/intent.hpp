#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "icr/model.hpp"

namespace icr::intent {

// Maneuver intent of an instruction. Unknown is the sink label when no rule
// fires; it never keys a template bank.
enum class IntentLabel {
  TurnLeft,
  TurnRight,
  GoStraight,
  LaneChangeLeft,
  LaneChangeRight,
  Follow,
  Stop,
  Unknown,
};

const char* intent_name(IntentLabel label);
IntentLabel intent_from_name(const std::string& name);  // throws ParseError

constexpr IntentLabel kKnownIntents[] = {
    IntentLabel::TurnLeft,       IntentLabel::TurnRight,
    IntentLabel::GoStraight,     IntentLabel::LaneChangeLeft,
    IntentLabel::LaneChangeRight, IntentLabel::Follow,
    IntentLabel::Stop,
};

// One keyword rule: fires when every keyword occurs in the token stream
// (fuzzily, see ClassifierConfig). Rules are tried in order; first match wins.
struct KeywordRule {
  std::vector<std::string> all_of;  // lowercase keywords
  IntentLabel label = IntentLabel::Unknown;
};

struct ClassifierConfig {
  std::vector<KeywordRule> rules;
  // Keyword tokens tolerate up to this many edits (optimal-string-alignment
  // distance, so an adjacent transposition counts as one edit). This is what
  // lets "turm" and "junciton" stay recoverable.
  int max_keyword_edit_distance = 1;
  // Keywords shorter than this require an exact token match.
  int min_fuzzy_keyword_length = 4;

  static ClassifierConfig defaults();
};

// Loads a classifier config file: {"max_keyword_edit_distance": 1,
// "min_fuzzy_keyword_length": 4, "rules": [{"all_of": [...], "label": "..."}]}.
ClassifierConfig load_classifier_config(const std::filesystem::path& path);

// Lowercases, strips punctuation (brackets of "[x]" survive), splits on
// whitespace.
std::vector<std::string> normalize_tokens(const std::string& text);

// Optimal-string-alignment edit distance (Levenshtein + adjacent swap).
int edit_distance(const std::string& a, const std::string& b);

// Deterministic, pure. Unknown when no rule fires; never throws.
IntentLabel classify_intent(const std::string& text, const ClassifierConfig& cfg);

// True iff every item whose baseline intent is known classifies to that same
// intent. Items with Unknown baseline intent are skipped. Throws
// AlignmentError on length mismatch.
bool intent_consistent(const InstructionSequence& variant,
                       const std::vector<IntentLabel>& baseline_intents,
                       const ClassifierConfig& cfg);

// True iff at least one item classifies to a label that conflicts with its
// baseline label (TurnLeft<->TurnRight, LaneChangeLeft<->LaneChangeRight,
// Follow/GoStraight<->Stop). Throws AlignmentError on length mismatch.
bool intent_conflicting(const InstructionSequence& variant,
                        const std::vector<IntentLabel>& baseline_intents,
                        const ClassifierConfig& cfg);

// The fixed conflict table; symmetric and irreflexive.
bool conflicts(IntentLabel a, IntentLabel b);

std::vector<IntentLabel> classify_sequence(const InstructionSequence& seq,
                                           const ClassifierConfig& cfg);

}  // namespace icr::intent
