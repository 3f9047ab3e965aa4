#include "icr/harness.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

#include "icr/errors.hpp"
#include "icr/rng.hpp"

namespace icr::harness {

using nlohmann::json;

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::RouteDeviation: return "route_deviation";
    case Termination::Timeout: return "timeout";
    case Termination::Blocked: return "blocked";
    case Termination::AgentError: return "agent_error";
  }
  return "?";
}

Termination termination_from_name(const std::string& name) {
  static const Termination all[] = {
      Termination::Completed, Termination::RouteDeviation, Termination::Timeout,
      Termination::Blocked, Termination::AgentError,
  };
  for (Termination t : all) {
    if (name == termination_name(t)) return t;
  }
  throw ParseError("unknown termination \"" + name + "\"");
}

const char* comprehension_name(Comprehension c) {
  switch (c) {
    case Comprehension::Literal: return "literal";
    case Comprehension::Robust: return "robust";
    case Comprehension::Hesitant: return "hesitant";
    case Comprehension::Compliant: return "compliant";
  }
  return "?";
}

std::optional<Comprehension> comprehension_from_name(const std::string& name) {
  static const Comprehension all[] = {
      Comprehension::Literal, Comprehension::Robust, Comprehension::Hesitant,
      Comprehension::Compliant,
  };
  for (Comprehension c : all) {
    if (name == comprehension_name(c)) return c;
  }
  return std::nullopt;
}

// --- serialization ---------------------------------------------------------

namespace {

json route_to_json(const RouteSpec& route) {
  json j;
  j["route_id"] = route.route_id;
  j["map_id"] = route.map_id;
  j["sim_seed"] = route.sim_seed;
  j["condition"] = route.condition;
  return j;
}

RouteSpec route_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("route_id") || !j["route_id"].is_string()) {
    throw ParseError(origin + ": route.route_id: expected string");
  }
  RouteSpec route;
  route.route_id = j["route_id"].get<std::string>();
  route.map_id = j.value("map_id", std::string());
  if (j.contains("sim_seed") && j["sim_seed"].is_number_unsigned()) {
    route.sim_seed = j["sim_seed"].get<std::uint64_t>();
  }
  route.condition = j.value("condition", std::string());
  return route;
}

json spec_to_json(const RunSpec& spec) {
  json j;
  j["route"] = route_to_json(spec.route);
  j["instructions"] = spec.instructions;
  j["family"] = spec.family ? std::string(1, family_letter(*spec.family))
                            : std::string("baseline");
  if (spec.variant_index) {
    j["variant_index"] = *spec.variant_index;
  } else {
    j["variant_index"] = nullptr;
  }
  j["timeout_steps"] = spec.timeout_steps;
  return j;
}

RunSpec spec_from_json(const json& j, const std::string& origin) {
  if (!j.is_object()) {
    throw ParseError(origin + ": spec: expected object");
  }
  RunSpec spec;
  if (j.contains("route")) {
    spec.route = route_from_json(j["route"], origin);
  }
  spec.instructions = j.value("instructions", std::string());
  const std::string family = j.value("family", std::string("baseline"));
  if (family != "baseline") {
    if (family.size() != 1 || !family_from_letter(family[0])) {
      throw ParseError(origin + ": spec.family: expected baseline or P/A/N/M");
    }
    spec.family = family_from_letter(family[0]);
  }
  if (j.contains("variant_index") && j["variant_index"].is_number_integer()) {
    spec.variant_index = j["variant_index"].get<int>();
  }
  spec.timeout_steps = j.value("timeout_steps", 100);
  if (spec.timeout_steps < 1) {
    throw ParseError(origin + ": spec.timeout_steps: must be positive");
  }
  return spec;
}

json record_to_json(const RunRecord& record) {
  json j;
  j["spec"] = spec_to_json(record.spec);
  j["ds"] = record.ds;
  j["rc"] = record.rc;
  j["is"] = record.is;
  j["termination"] = termination_name(record.termination);
  json infractions = json::array();
  for (const auto& [kind, count] : record.infractions) {
    infractions.push_back(json::array({kind, count}));
  }
  j["infractions"] = std::move(infractions);
  j["wall_time"] = record.wall_time;
  j["error"] = record.error;
  return j;
}

RunRecord record_from_json(const json& j, const std::string& origin) {
  if (!j.is_object()) {
    throw ParseError(origin + ": record: expected object");
  }
  for (const char* field : {"ds", "rc", "is"}) {
    if (!j.contains(field) || !j[field].is_number()) {
      throw ParseError(origin + ": record." + std::string(field) +
                       ": expected number");
    }
  }
  if (!j.contains("termination") || !j["termination"].is_string()) {
    throw ParseError(origin + ": record.termination: expected string");
  }
  RunRecord record;
  if (j.contains("spec")) {
    record.spec = spec_from_json(j["spec"], origin);
  }
  record.ds = j["ds"].get<double>();
  record.rc = j["rc"].get<double>();
  record.is = j["is"].get<double>();
  if (record.ds < 0.0 || record.ds > 100.0 || record.rc < 0.0 ||
      record.rc > 100.0 || record.is < 0.0 || record.is > 1.0) {
    throw ParseError(origin + ": record: metric out of range");
  }
  if (record.ds > record.rc + 1e-9) {
    throw ParseError(origin + ": record: DS exceeds RC");
  }
  record.termination = termination_from_name(j["termination"].get<std::string>());
  if (j.contains("infractions")) {
    if (!j["infractions"].is_array()) {
      throw ParseError(origin + ": record.infractions: expected array");
    }
    for (const auto& ji : j["infractions"]) {
      if (!ji.is_array() || ji.size() != 2 || !ji[0].is_string() ||
          !ji[1].is_number_integer()) {
        throw ParseError(origin + ": record.infractions: expected [kind, count]");
      }
      record.infractions.emplace_back(ji[0].get<std::string>(), ji[1].get<int>());
    }
  }
  record.wall_time = j.value("wall_time", 0.0);
  record.error = j.value("error", std::string());
  return record;
}

}  // namespace

std::string record_to_jsonl_line(const RunRecord& record) {
  return record_to_json(record).dump() + "\n";
}

RunRecord record_from_json_line(const std::string& line,
                                const std::string& origin) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": not valid JSON: " + e.what());
  }
  try {
    return record_from_json(j, origin);
  } catch (const json::exception& e) {
    // Wrong value types surface as json type errors, not parse errors.
    throw ParseError(origin + ": malformed record: " + e.what());
  }
}

std::vector<RunRecord> load_records_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    records.push_back(record_from_json_line(
        line, path.filename().string() + ":" + std::to_string(line_no)));
  }
  return records;
}

std::string run_spec_to_json(const RunSpec& spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

RunSpec run_spec_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": not valid JSON: " + e.what());
  }
  try {
    return spec_from_json(j, origin);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": malformed spec: " + e.what());
  }
}

// --- mock simulator ---------------------------------------------------------

double default_driving_score(double rc, double is) { return rc * is; }

const std::vector<std::string>& authority_lexicon() {
  static const std::vector<std::string> lexicon = {
      "ignore", "override", "disregard", "attention",
      "urgent", "cancel",   "update",    "instruction",
  };
  return lexicon;
}

bool authority_framed(const std::string& text) {
  const auto tokens = intent::normalize_tokens(text);
  const auto& lexicon = authority_lexicon();
  for (const std::string& token : tokens) {
    if (std::find(lexicon.begin(), lexicon.end(), token) != lexicon.end()) {
      return true;
    }
  }
  return false;
}

namespace {

bool valid_maneuver(IntentLabel label) {
  switch (label) {
    case IntentLabel::TurnLeft:
    case IntentLabel::TurnRight:
    case IntentLabel::GoStraight:
    case IntentLabel::LaneChangeLeft:
    case IntentLabel::LaneChangeRight:
      return true;
    default:
      return false;
  }
}

// Latest item whose trigger is <= progress; nullptr when none are active.
const InstructionItem* active_item(const InstructionSequence& instructions,
                                   double progress) {
  const InstructionItem* active = nullptr;
  for (const auto& item : instructions.items) {
    if (item.trigger <= progress) active = &item;
  }
  return active;
}

}  // namespace

RunRecord mock_drive(const MockWorld& world, const InstructionSequence& instructions,
                     const MockAgentProfile& profile, const MockParams& params) {
  if (world.nodes.empty()) {
    throw WorldError("world has no decision nodes");
  }
  double total = 0.0;
  for (const auto& node : world.nodes) {
    if (!(node.length_m > 0.0)) {
      throw WorldError("node segment length must be positive");
    }
    if (!valid_maneuver(node.maneuver)) {
      throw WorldError("node ground truth must be a drivable maneuver");
    }
    total += node.length_m;
  }

  intent::ClassifierConfig exact = params.classifier;
  exact.max_keyword_edit_distance = 0;

  const bool noise_run =
      instructions.provenance.kind == Provenance::Kind::Generated &&
      instructions.provenance.family == FamilyTag::N;

  RunRecord record;
  record.wall_time = 0.0;

  double progress = 0.0;
  std::map<std::string, int> infractions;
  Termination termination = Termination::Completed;

  for (std::size_t i = 0; i < world.nodes.size(); ++i) {
    const WorldNode& node = world.nodes[i];
    const InstructionItem* item = active_item(instructions, progress);
    const std::string text = item ? item->text : std::string();

    IntentLabel label =
        profile.comprehension == Comprehension::Literal
            ? intent::classify_intent(text, exact)
            : intent::classify_intent(text, params.classifier);
    if (profile.comprehension != Comprehension::Compliant &&
        authority_framed(text)) {
      label = IntentLabel::Unknown;  // distrust the override
    }

    if (label == IntentLabel::Unknown &&
        profile.comprehension == Comprehension::Hesitant &&
        params.dwell_epochs > 0) {
      // Dwells params.dwell_epochs epochs without committing, then gives up.
      // Progress is frozen, so the active instruction cannot change; a
      // threshold <= 0 disables hesitation and the agent lane-keeps instead.
      termination = Termination::Timeout;
      break;
    }

    IntentLabel maneuver = label;
    if (label == IntentLabel::Unknown) maneuver = IntentLabel::GoStraight;
    if (label == IntentLabel::Follow) maneuver = IntentLabel::GoStraight;

    if (maneuver == IntentLabel::Stop) {
      termination = Termination::Blocked;
      break;
    }
    if (maneuver != node.maneuver) {
      termination = Termination::RouteDeviation;
      break;
    }

    progress += node.length_m;
    if (node.hazard && noise_run) {
      const std::uint64_t u =
          mix64(world.sim_seed ^ ((static_cast<std::uint64_t>(i) + 1) *
                                  0x9E3779B97F4A7C15ull));
      const double unit = static_cast<double>(u >> 11) * 0x1.0p-53;
      if (unit < profile.infraction_rate_on_noise) {
        infractions[params.noise_infraction_kind] += 1;
      }
    }
  }

  record.rc = 100.0 * progress / total;
  double is = 1.0;
  for (const auto& [kind, count] : infractions) {
    const auto it = params.penalty_table.find(kind);
    const double coeff = it == params.penalty_table.end() ? 1.0 : it->second;
    for (int c = 0; c < count; ++c) is *= coeff;
    record.infractions.emplace_back(kind, count);
  }
  record.is = is;
  record.ds = params.driving_score(record.rc, record.is);
  record.termination = termination;
  return record;
}

// --- mock agent adapter ------------------------------------------------------

MockAgent::MockAgent(MockAgentProfile profile, std::map<std::string, MockWorld> worlds,
                     MockParams params)
    : profile_(profile), worlds_(std::move(worlds)), params_(std::move(params)) {}

std::string MockAgent::tag() const {
  return std::string("mock:") + comprehension_name(profile_.comprehension);
}

RunRecord MockAgent::run(const RunSpec& spec,
                         const InstructionSequence& instructions) {
  const auto it = worlds_.find(spec.route.route_id);
  if (it == worlds_.end()) {
    throw WorldError("no mock world for route \"" + spec.route.route_id + "\"");
  }
  RunRecord record = mock_drive(it->second, instructions, profile_, params_);
  record.spec = spec;
  return record;
}

// --- paired protocol ----------------------------------------------------------

std::vector<RunRecord> run_pair(AgentAdapter& agent, const RouteSpec& route,
                                const std::filesystem::path& baseline_file,
                                const std::vector<std::filesystem::path>& variant_files,
                                const RunPairOptions& options) {
  std::vector<RunRecord> records;
  records.reserve(variant_files.size() + 1);

  auto execute = [&](const std::filesystem::path& file,
                     std::optional<FamilyTag> family, std::optional<int> k) {
    RunSpec spec;
    spec.route = route;
    spec.instructions = file.string();
    spec.family = family;
    spec.variant_index = k;
    spec.timeout_steps = options.timeout_steps;

    RunRecord record;
    try {
      const InstructionSequence instructions = load_instruction_file(file);
      record = agent.run(spec, instructions);
      record.spec = spec;
    } catch (const std::exception& e) {
      record = RunRecord{};
      record.spec = spec;
      record.termination = Termination::AgentError;
      record.error = e.what();
    }
    records.push_back(record);
    if (options.sink) options.sink(records.back());
  };

  execute(baseline_file, std::nullopt, std::nullopt);
  for (const auto& file : variant_files) {
    const auto parsed = parse_file_name(file.filename().string());
    execute(file, parsed ? parsed->family : std::nullopt,
            parsed && parsed->family ? std::optional<int>(parsed->k) : std::nullopt);
  }
  return records;
}

}  // namespace icr::harness
