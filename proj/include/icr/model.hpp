#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace icr {

// The four counterfactual instruction families.
enum class FamilyTag { P, A, N, M };

constexpr char family_letter(FamilyTag f) {
  switch (f) {
    case FamilyTag::P: return 'P';
    case FamilyTag::A: return 'A';
    case FamilyTag::N: return 'N';
    case FamilyTag::M: return 'M';
  }
  return '?';
}

const char* family_name(FamilyTag f);  // "Paraphrase", "Ambiguity", ...
std::optional<FamilyTag> family_from_letter(char c);

constexpr FamilyTag kAllFamilies[] = {FamilyTag::P, FamilyTag::A, FamilyTag::N,
                                      FamilyTag::M};

// Where an instruction sequence came from.
struct Provenance {
  enum class Kind { Baseline, Generated, External };

  Kind kind = Kind::Baseline;
  FamilyTag family = FamilyTag::P;  // Generated only
  int k = 0;                        // Generated only, 1-based variant index
  std::uint64_t seed = 0;           // Generated only
  std::string source_tag;           // External only

  static Provenance baseline() { return {}; }
  static Provenance generated(FamilyTag f, int k, std::uint64_t seed) {
    Provenance p;
    p.kind = Kind::Generated;
    p.family = f;
    p.k = k;
    p.seed = seed;
    return p;
  }
  static Provenance external(std::string source_tag) {
    Provenance p;
    p.kind = Kind::External;
    p.source_tag = std::move(source_tag);
    return p;
  }

  bool operator==(const Provenance&) const = default;
};

// One navigation instruction. `trigger` is meters of cumulative route
// progress at which the text becomes active. The literal token "[x]" is a
// distance placeholder and is preserved verbatim by every operation.
struct InstructionItem {
  std::string text;
  double trigger = 0.0;

  bool operator==(const InstructionItem&) const = default;
};

// A route's ordered instruction sequence (the baseline x or a variant).
struct InstructionSequence {
  std::string route_id;
  std::vector<InstructionItem> items;
  Provenance provenance;

  bool operator==(const InstructionSequence&) const = default;
};

// Fixed environment for one route. (route_id, sim_seed, condition) must be
// identical across a baseline run and all of its variant runs.
struct RouteSpec {
  std::string route_id;
  std::string map_id;
  std::uint64_t sim_seed = 0;
  std::string condition;

  bool operator==(const RouteSpec&) const = default;
};

// Canonical serialization: sorted keys, two-space indent, shortest
// round-trip float form, trailing newline. Identical sequences always
// produce byte-identical output.
std::string serialize_instruction_sequence(const InstructionSequence& seq);

// Parses and validates. Throws ParseError (naming field and item index) or
// EmptySequenceError.
InstructionSequence parse_instruction_sequence(const std::string& json_text,
                                               const std::string& origin = "<input>");

InstructionSequence load_instruction_file(const std::filesystem::path& path);
void save_instruction_file(const InstructionSequence& seq,
                           const std::filesystem::path& path);

// File naming convention: "{route_id}__{family}_{k:02}.json" for variants,
// "{route_id}__baseline.json" for baselines.
std::string variant_file_name(const std::string& route_id, FamilyTag f, int k);
std::string baseline_file_name(const std::string& route_id);

struct ParsedFileName {
  std::string route_id;
  std::optional<FamilyTag> family;  // nullopt = baseline
  int k = 0;
};
std::optional<ParsedFileName> parse_file_name(const std::string& file_name);

// Occurrences of the literal placeholder token "[x]".
std::size_t placeholder_count(const std::string& text);

}  // namespace icr
