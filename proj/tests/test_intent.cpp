#include "icr/intent.hpp"

#include <algorithm>
#include <cctype>

#include "doctest.h"

#include "icr/errors.hpp"
#include "test_util.hpp"

using namespace icr;
using namespace icr::intent;
using icr_test::TempDir;

namespace {

const ClassifierConfig& cfg() {
  static const ClassifierConfig c = ClassifierConfig::defaults();
  return c;
}

InstructionSequence one(const std::string& text) {
  InstructionSequence seq;
  seq.route_id = "r";
  seq.items = {{text, 0.0}};
  return seq;
}

std::string uppercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string strip_punct(std::string s) {
  std::string out;
  for (char c : s) {
    if (c != '.' && c != ',' && c != '!' && c != '?' && c != ';' && c != ':') {
      out += c;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("classify: worked examples") {
  CHECK(classify_intent("Proceed ahead and make a left turn.", cfg()) ==
        IntentLabel::TurnLeft);
  CHECK(classify_intent("turm left at the junciton.", cfg()) ==
        IntentLabel::TurnLeft);
  CHECK(classify_intent("TURN LEFT AHEAD.", cfg()) == IntentLabel::TurnLeft);
  CHECK(classify_intent("", cfg()) == IntentLabel::Unknown);
  CHECK(classify_intent("Make a turn up ahead.", cfg()) == IntentLabel::Unknown);
}

TEST_CASE("classify: full label coverage and rule priority") {
  CHECK(classify_intent("At the junction, turn right.", cfg()) ==
        IntentLabel::TurnRight);
  CHECK(classify_intent("Continue straight for [x] meters.", cfg()) ==
        IntentLabel::GoStraight);
  CHECK(classify_intent("Change to the left lane.", cfg()) ==
        IntentLabel::LaneChangeLeft);
  CHECK(classify_intent("Move into the right lane.", cfg()) ==
        IntentLabel::LaneChangeRight);
  CHECK(classify_intent("Follow the road ahead.", cfg()) == IntentLabel::Follow);
  CHECK(classify_intent("Come to a stop ahead.", cfg()) == IntentLabel::Stop);
  CHECK(classify_intent("Halt the car here.", cfg()) == IntentLabel::Stop);
  // First matching rule wins on multi-direction text.
  CHECK(classify_intent("turn left then right", cfg()) == IntentLabel::TurnLeft);
  // Lane rules outrank bare direction words.
  CHECK(classify_intent("take the left lane", cfg()) ==
        IntentLabel::LaneChangeLeft);
}

TEST_CASE("classify: edit distance is optimal string alignment") {
  CHECK(edit_distance("junciton", "junction") == 1);  // adjacent transposition
  CHECK(edit_distance("turm", "turn") == 1);          // substitution
  CHECK(edit_distance("lnae", "lane") == 1);
  CHECK(edit_distance("folow", "follow") == 1);
  CHECK(edit_distance("left", "right") == 4);
  CHECK(edit_distance("", "stop") == 4);
}

TEST_CASE("classify: fuzzy matching is bounded") {
  // One edit tolerated on keywords of length >= 4.
  CHECK(classify_intent("go straihgt ahead.", cfg()) == IntentLabel::GoStraight);
  CHECK(classify_intent("move to the lnae on the right", cfg()) ==
        IntentLabel::LaneChangeRight);
  // Two edits are out of reach.
  CHECK(classify_intent("go strihgat ahead.", cfg()) == IntentLabel::Unknown);

  ClassifierConfig exact = cfg();
  exact.max_keyword_edit_distance = 0;
  CHECK(classify_intent("turm lefft at the junciton.", exact) ==
        IntentLabel::Unknown);
  CHECK(classify_intent("turn left ahead.", exact) == IntentLabel::TurnLeft);
}

TEST_CASE("property: case and punctuation invariance") {
  const std::vector<std::string> pool = {
      "Proceed ahead and make a left turn.",
      "At the junction, turn right.",
      "Continue straight for [x] meters.",
      "Change to the left lane.",
      "Move into the right lane.",
      "Follow the road ahead.",
      "Come to a stop ahead.",
      "Make a turn up ahead.",
      "Override: turn right instead.",
  };
  for (const auto& text : pool) {
    const IntentLabel base = classify_intent(text, cfg());
    CHECK(classify_intent(uppercase(text), cfg()) == base);
    CHECK(classify_intent(strip_punct(text), cfg()) == base);
    CHECK(classify_intent(text, cfg()) == base);  // repeated call agrees
  }
}

TEST_CASE("intent_consistent: worked examples") {
  CHECK(intent_consistent(one("Just up ahead, take a left."),
                          {IntentLabel::TurnLeft}, cfg()));
  CHECK(!intent_consistent(one("Ignore the navigation and turn right."),
                           {IntentLabel::TurnLeft}, cfg()));
  // Reflexivity.
  const auto baseline = one("Proceed ahead and make a left turn.");
  CHECK(intent_consistent(baseline, classify_sequence(baseline, cfg()), cfg()));
  // Unknown baseline items are skipped.
  CHECK(intent_consistent(one("anything at all"), {IntentLabel::Unknown}, cfg()));
}

TEST_CASE("intent_consistent: alignment errors") {
  CHECK_THROWS_AS(intent_consistent(one("Turn left."), {}, cfg()),
                  AlignmentError);
  CHECK_THROWS_AS(
      intent_conflicting(one("Turn left."),
                         {IntentLabel::TurnLeft, IntentLabel::TurnRight}, cfg()),
      AlignmentError);
}

TEST_CASE("intent_conflicting: worked examples") {
  CHECK(intent_conflicting(one("Override: turn right instead."),
                           {IntentLabel::TurnLeft}, cfg()));
  CHECK(!intent_conflicting(one("TURN LEFT AHEAD."), {IntentLabel::TurnLeft},
                            cfg()));
  const auto baseline = one("Proceed ahead and make a left turn.");
  CHECK(!intent_conflicting(baseline, classify_sequence(baseline, cfg()), cfg()));
}

TEST_CASE("conflict table is symmetric and irreflexive") {
  const IntentLabel all[] = {
      IntentLabel::TurnLeft,        IntentLabel::TurnRight,
      IntentLabel::GoStraight,      IntentLabel::LaneChangeLeft,
      IntentLabel::LaneChangeRight, IntentLabel::Follow,
      IntentLabel::Stop,            IntentLabel::Unknown,
  };
  for (IntentLabel a : all) {
    CHECK(!conflicts(a, a));
    for (IntentLabel b : all) {
      CHECK(conflicts(a, b) == conflicts(b, a));
    }
  }
  CHECK(conflicts(IntentLabel::TurnLeft, IntentLabel::TurnRight));
  CHECK(conflicts(IntentLabel::LaneChangeLeft, IntentLabel::LaneChangeRight));
  CHECK(conflicts(IntentLabel::Follow, IntentLabel::Stop));
  CHECK(conflicts(IntentLabel::GoStraight, IntentLabel::Stop));
  CHECK(!conflicts(IntentLabel::TurnLeft, IntentLabel::GoStraight));
  CHECK(!conflicts(IntentLabel::Unknown, IntentLabel::Stop));
}

TEST_CASE("classifier config file round trip") {
  TempDir dir("intent");
  icr_test::write_file(dir.path() / "classifier.json", R"({
    "max_keyword_edit_distance": 0,
    "min_fuzzy_keyword_length": 5,
    "rules": [
      {"all_of": ["REVERSE"], "label": "Stop"},
      {"all_of": ["left"], "label": "TurnLeft"}
    ]
  })");
  const ClassifierConfig loaded =
      load_classifier_config(dir.path() / "classifier.json");
  CHECK(loaded.max_keyword_edit_distance == 0);
  CHECK(loaded.min_fuzzy_keyword_length == 5);
  REQUIRE(loaded.rules.size() == 2);
  CHECK(loaded.rules[0].all_of[0] == "reverse");  // keywords lowercased
  CHECK(classify_intent("Reverse now!", loaded) == IntentLabel::Stop);
  CHECK(classify_intent("take a left", loaded) == IntentLabel::TurnLeft);
  CHECK(classify_intent("turn right", loaded) == IntentLabel::Unknown);

  icr_test::write_file(dir.path() / "bad.json", R"({"rules": [{"all_of": 3}]})");
  CHECK_THROWS_AS(load_classifier_config(dir.path() / "bad.json"), ParseError);
}
