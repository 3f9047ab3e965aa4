#include "icr/model.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "icr/errors.hpp"

namespace icr {

using nlohmann::json;

const char* family_name(FamilyTag f) {
  switch (f) {
    case FamilyTag::P: return "Paraphrase";
    case FamilyTag::A: return "Ambiguity";
    case FamilyTag::N: return "Noise";
    case FamilyTag::M: return "Misleading";
  }
  return "?";
}

std::optional<FamilyTag> family_from_letter(char c) {
  switch (c) {
    case 'P': return FamilyTag::P;
    case 'A': return FamilyTag::A;
    case 'N': return FamilyTag::N;
    case 'M': return FamilyTag::M;
    default: return std::nullopt;
  }
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Every '[' must open a literal "[x]" and every ']' must close one.
bool placeholder_tokens_intact(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') {
      if (i + 2 >= text.size() || text[i + 1] != 'x' || text[i + 2] != ']') {
        return false;
      }
      i += 2;
    } else if (text[i] == ']') {
      return false;  // unmatched close
    }
  }
  return true;
}

json provenance_to_json(const Provenance& p) {
  json j;
  switch (p.kind) {
    case Provenance::Kind::Baseline:
      j["kind"] = "baseline";
      break;
    case Provenance::Kind::Generated:
      j["kind"] = "generated";
      j["family"] = std::string(1, family_letter(p.family));
      j["k"] = p.k;
      j["seed"] = p.seed;
      break;
    case Provenance::Kind::External:
      j["kind"] = "external";
      j["source"] = p.source_tag;
      break;
  }
  return j;
}

Provenance provenance_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError(origin + ": provenance.kind: expected string");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "baseline") {
    return Provenance::baseline();
  }
  if (kind == "generated") {
    if (!j.contains("family") || !j["family"].is_string() ||
        j["family"].get<std::string>().size() != 1) {
      throw ParseError(origin + ": provenance.family: expected one-letter string");
    }
    const auto fam = family_from_letter(j["family"].get<std::string>()[0]);
    if (!fam) {
      throw ParseError(origin + ": provenance.family: unknown family letter");
    }
    if (!j.contains("k") || !j["k"].is_number_integer()) {
      throw ParseError(origin + ": provenance.k: expected integer");
    }
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
      throw ParseError(origin + ": provenance.seed: expected unsigned integer");
    }
    return Provenance::generated(*fam, j["k"].get<int>(),
                                 j["seed"].get<std::uint64_t>());
  }
  if (kind == "external") {
    if (!j.contains("source") || !j["source"].is_string()) {
      throw ParseError(origin + ": provenance.source: expected string");
    }
    return Provenance::external(j["source"].get<std::string>());
  }
  throw ParseError(origin + ": provenance.kind: unknown kind \"" + kind + "\"");
}

}  // namespace

std::string serialize_instruction_sequence(const InstructionSequence& seq) {
  json j;
  j["route_id"] = seq.route_id;
  j["provenance"] = provenance_to_json(seq.provenance);
  json items = json::array();
  for (const auto& item : seq.items) {
    json ji;
    ji["text"] = item.text;
    ji["trigger"] = item.trigger;
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);
  return j.dump(2) + "\n";
}

InstructionSequence parse_instruction_sequence(const std::string& json_text,
                                               const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw ParseError(origin + ": top level: expected object");
  }
  if (!j.contains("route_id") || !j["route_id"].is_string()) {
    throw ParseError(origin + ": route_id: expected string");
  }

  InstructionSequence seq;
  seq.route_id = j["route_id"].get<std::string>();
  if (seq.route_id.empty()) {
    throw ParseError(origin + ": route_id: must be non-empty");
  }

  seq.provenance = j.contains("provenance")
                       ? provenance_from_json(j["provenance"], origin)
                       : Provenance::baseline();

  if (!j.contains("items") || !j["items"].is_array()) {
    throw ParseError(origin + ": items: expected array");
  }
  if (j["items"].empty()) {
    throw EmptySequenceError(origin + ": items: empty sequence");
  }

  std::size_t index = 0;
  for (const auto& ji : j["items"]) {
    const std::string at = origin + ": items[" + std::to_string(index) + "]";
    if (!ji.is_object()) {
      throw ParseError(at + ": expected object");
    }
    if (!ji.contains("text") || !ji["text"].is_string()) {
      throw ParseError(at + ".text: expected string");
    }
    if (!ji.contains("trigger") || !ji["trigger"].is_number()) {
      throw ParseError(at + ".trigger: expected number");
    }
    InstructionItem item;
    item.text = ji["text"].get<std::string>();
    item.trigger = ji["trigger"].get<double>();
    if (trimmed(item.text).empty()) {
      throw ParseError(at + ".text: empty after trimming");
    }
    if (!(item.trigger >= 0.0)) {
      throw ParseError(at + ".trigger: must be a non-negative number");
    }
    if (!placeholder_tokens_intact(item.text)) {
      throw ParseError(at + ".text: brackets must form whole \"[x]\" tokens");
    }
    seq.items.push_back(std::move(item));
    ++index;
  }
  return seq;
}

InstructionSequence load_instruction_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instruction_sequence(buf.str(), path.filename().string());
}

void save_instruction_file(const InstructionSequence& seq,
                           const std::filesystem::path& path) {
  const std::string bytes = serialize_instruction_sequence(seq);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << bytes;
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::string variant_file_name(const std::string& route_id, FamilyTag f, int k) {
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "_%02d.json", k);
  return route_id + "__" + family_letter(f) + suffix;
}

std::string baseline_file_name(const std::string& route_id) {
  return route_id + "__baseline.json";
}

std::optional<ParsedFileName> parse_file_name(const std::string& file_name) {
  static const std::string ext = ".json";
  if (file_name.size() <= ext.size() ||
      file_name.compare(file_name.size() - ext.size(), ext.size(), ext) != 0) {
    return std::nullopt;
  }
  const std::string stem = file_name.substr(0, file_name.size() - ext.size());
  const std::size_t sep = stem.rfind("__");
  if (sep == std::string::npos || sep == 0) {
    return std::nullopt;
  }
  ParsedFileName parsed;
  parsed.route_id = stem.substr(0, sep);
  const std::string tail = stem.substr(sep + 2);
  if (tail == "baseline") {
    return parsed;
  }
  // Expect "{F}_{kk}".
  if (tail.size() < 3 || tail[1] != '_') {
    return std::nullopt;
  }
  const auto fam = family_from_letter(tail[0]);
  if (!fam) {
    return std::nullopt;
  }
  int k = 0;
  for (std::size_t i = 2; i < tail.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(tail[i]))) {
      return std::nullopt;
    }
    k = k * 10 + (tail[i] - '0');
  }
  parsed.family = fam;
  parsed.k = k;
  return parsed;
}

std::size_t placeholder_count(const std::string& text) {
  std::size_t count = 0;
  for (std::size_t pos = text.find("[x]"); pos != std::string::npos;
       pos = text.find("[x]", pos + 3)) {
    ++count;
  }
  return count;
}

}  // namespace icr
