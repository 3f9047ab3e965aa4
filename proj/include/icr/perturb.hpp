#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icr/intent.hpp"
#include "icr/model.hpp"
#include "icr/rng.hpp"

namespace icr::perturb {

using intent::IntentLabel;

// Surface-level corruptions for the Noise family. Character-level kinds
// apply exactly one edit to one eligible token; the "[x]" placeholder is
// never touched and no token receives more than one edit.
enum class NoiseTransform {
  UppercaseAll,
  LowercaseAll,
  StripPunctuation,
  SwapAdjacentChars,
  DeleteChar,
  DuplicateChar,
  CommaInjection,
};

const char* noise_transform_name(NoiseTransform t);
NoiseTransform noise_transform_from_name(const std::string& name);  // ParseError

// One rewrite pattern. Slots:
//   {BASE}     the original item text (Noise in-place transforms)
//   {DIR}      direction word of the item's intent
//   {FLIP_DIR} direction word of the flipped intent (Misleading)
//   {DIST}     the verbatim "[x]" placeholder; when the base item has no
//              "[x]", the comma-delimited clause containing {DIST} is
//              dropped instead of inventing a number
// intent_key is empty for the global Ambiguity bank and the fallback banks.
struct Template {
  FamilyTag family = FamilyTag::P;
  std::optional<IntentLabel> intent_key;
  std::string pattern;
  std::optional<NoiseTransform> transform;  // Noise only

  bool operator==(const Template&) const = default;
};

// Fixed generation seed for a whole suite; recorded in every output's
// provenance. Default 2026.
struct GenerationSeed {
  std::uint64_t value = 2026;
};

struct TemplateBanks {
  std::map<IntentLabel, std::vector<Template>> paraphrase;
  std::map<IntentLabel, std::vector<Template>> noise;
  std::map<IntentLabel, std::vector<Template>> misleading;
  std::vector<Template> ambiguity;  // global, intent-independent

  // Used only for items whose baseline intent is Unknown.
  std::vector<Template> paraphrase_fallback;
  std::vector<Template> noise_fallback;
  std::vector<Template> misleading_fallback;

  std::string version;
};

// Banks shipped in the binary. Eight templates per (family, intent) pair and
// eight global Ambiguity templates, so K=8 draws each bank exhaustively.
const TemplateBanks& default_banks();

// Loads banks from a JSON file: {"version": "...", "templates": [{"family":
// "P", "intent": "TurnLeft"|"GLOBAL", "pattern": "...", "transform": "..."}]}.
TemplateBanks load_banks(const std::filesystem::path& path);

// T_A for family A regardless of intent, T_f[intent] otherwise. Throws
// BankMissingError when no templates exist for the pair.
const std::vector<Template>& select_bank(FamilyTag family, IntentLabel intent,
                                         const TemplateBanks& banks);

// k draws: without replacement while k <= |bank| (k == |bank| yields a full
// permutation), then further whole-bank shuffles are appended, so every
// template appears floor(k/|bank|) times or once more. Throws
// InvalidCountError when k == 0.
std::vector<Template> sample_k(const std::vector<Template>& bank, int k,
                               SplitMix64& rng);

// TurnLeft<->TurnRight, LaneChangeLeft<->LaneChangeRight,
// Follow/GoStraight -> Stop, Stop -> Follow, Unknown -> Unknown.
IntentLabel flip_direction(IntentLabel label);

// "left" / "right" / "straight" for directional intents; nullopt otherwise.
std::optional<std::string> direction_word(IntentLabel label);

// Fills the template against one base item. The trigger is always copied
// unchanged; only the text varies. Throws SlotError when a required slot
// cannot be satisfied. Character-level Noise transforms consume rng.
InstructionItem apply_template(const Template& t, const InstructionItem& base,
                               IntentLabel intent, SplitMix64& rng);

std::string apply_noise_transform(NoiseTransform t, const std::string& text,
                                  SplitMix64& rng);

// Directional / temporal / distance qualifier tokens that the Ambiguity
// family must not contain. Purely numeric tokens also count as qualifiers.
const std::vector<std::string>& qualifier_lexicon();
bool has_qualifier_token(const std::string& text);

}  // namespace icr::perturb
