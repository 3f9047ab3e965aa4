#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icr/intent.hpp"
#include "icr/model.hpp"

namespace icr::harness {

using intent::IntentLabel;

// One planned closed-loop execution.
struct RunSpec {
  RouteSpec route;
  std::string instructions;             // file path, baseline or variant
  std::optional<FamilyTag> family;      // nullopt = baseline run
  std::optional<int> variant_index;
  int timeout_steps = 100;

  bool operator==(const RunSpec&) const = default;
};

enum class Termination {
  Completed,
  RouteDeviation,
  Timeout,
  Blocked,
  AgentError,
};

const char* termination_name(Termination t);
Termination termination_from_name(const std::string& name);  // ParseError

// Outcome of one execution. DS and RC are on a 0-100 scale, IS in [0,1];
// on the mock simulator DS == RC * IS exactly.
struct RunRecord {
  RunSpec spec;
  double ds = 0.0;
  double rc = 0.0;
  double is = 0.0;
  Termination termination = Termination::AgentError;
  std::vector<std::pair<std::string, int>> infractions;
  double wall_time = 0.0;
  std::string error;  // non-empty only for AgentError

  bool operator==(const RunRecord&) const = default;
};

// One record per line, canonical key order.
std::string record_to_jsonl_line(const RunRecord& record);
RunRecord record_from_json_line(const std::string& line,
                                const std::string& origin = "<input>");
std::vector<RunRecord> load_records_file(const std::filesystem::path& path);

std::string run_spec_to_json(const RunSpec& spec);
RunSpec run_spec_from_json(const std::string& text,
                           const std::string& origin = "<input>");

// ---------------------------------------------------------------------------
// Mock route simulator: a desk-scale stand-in for a closed-loop simulator.
// ---------------------------------------------------------------------------

struct WorldNode {
  IntentLabel maneuver = IntentLabel::GoStraight;  // ground truth
  double length_m = 0.0;                           // segment after the decision
  bool hazard = false;
};

struct MockWorld {
  std::vector<WorldNode> nodes;
  std::uint64_t sim_seed = 0;
};

enum class Comprehension {
  Literal,    // exact keyword match only
  Robust,     // fuzzy classifier
  Hesitant,   // stops when intent is Unknown
  Compliant,  // obeys conflicting directives
};

const char* comprehension_name(Comprehension c);
std::optional<Comprehension> comprehension_from_name(const std::string& name);

struct MockAgentProfile {
  Comprehension comprehension = Comprehension::Robust;
  double infraction_rate_on_noise = 0.25;  // in [0,1]
};

// Leaderboard-style per-route composition: completion scaled by the
// multiplicative infraction penalty.
double default_driving_score(double rc, double is);

struct MockParams {
  intent::ClassifierConfig classifier = intent::ClassifierConfig::defaults();
  // Consecutive uncommitted epochs a Hesitant agent tolerates before a
  // Timeout; <= 0 disables hesitation (the agent lane-keeps instead).
  int dwell_epochs = 3;
  std::map<std::string, double> penalty_table = {
      {"hazard_collision", 0.6},
      {"lane_infraction", 0.8},
  };
  std::string noise_infraction_kind = "hazard_collision";
  // Replaceable scoring rule; must keep DS <= RC.
  double (*driving_score)(double rc, double is) = &default_driving_score;
};

// Tokens that mark an authority-framed override; any profile other than
// Compliant distrusts such a directive and treats it as Unknown. Matching is
// exact on normalized tokens.
const std::vector<std::string>& authority_lexicon();
bool authority_framed(const std::string& text);

// Deterministic closed-loop rollout. Semantics, in decision order over
// world.nodes (progress starts at 0):
//   1. The active instruction is the item with the largest trigger <=
//      progress (later item wins ties); with none active the text reads as
//      Unknown.
//   2. Literal classifies with edit distance 0; other profiles use the
//      configured fuzzy classifier. A non-Compliant profile downgrades
//      authority-framed text to Unknown.
//   3. Unknown: Hesitant dwells dwell_epochs and terminates with Timeout at
//      the current progress; other profiles lane-keep (GoStraight). A Stop
//      label halts the run as Blocked. Follow acts as GoStraight.
//   4. A maneuver equal to the node's ground truth advances progress by the
//      node length; a mismatch terminates with RouteDeviation.
//   5. Advancing through a hazard node under a Noise-generated sequence
//      draws u = mix64(sim_seed ^ (node_index + 1) * 0x9E3779B97F4A7C15) and
//      books one noise_infraction_kind infraction when
//      (u >> 11) * 2^-53 < infraction_rate_on_noise.
// RC = 100 * progress / total, IS = product of penalty coefficients,
// DS = RC * IS. wall_time is always 0 so records are value-identical across
// repeated runs. Throws WorldError on an invalid world.
RunRecord mock_drive(const MockWorld& world, const InstructionSequence& instructions,
                     const MockAgentProfile& profile,
                     const MockParams& params = MockParams{});

// ---------------------------------------------------------------------------
// Agent adapters and the paired protocol.
// ---------------------------------------------------------------------------

class AgentAdapter {
 public:
  virtual ~AgentAdapter() = default;
  virtual std::string tag() const = 0;
  // May throw; run_pair converts exceptions into AgentError records.
  virtual RunRecord run(const RunSpec& spec,
                        const InstructionSequence& instructions) = 0;
};

class MockAgent : public AgentAdapter {
 public:
  MockAgent(MockAgentProfile profile, std::map<std::string, MockWorld> worlds,
            MockParams params = MockParams{});

  std::string tag() const override;
  RunRecord run(const RunSpec& spec,
                const InstructionSequence& instructions) override;

 private:
  MockAgentProfile profile_;
  std::map<std::string, MockWorld> worlds_;  // by route_id
  MockParams params_;
};

// Runs an external process per episode: writes a RunSpec file, substitutes
// {spec} and {record} into the command template, runs it under /bin/sh, and
// parses the record file it wrote. Wall-clock timeout is
// timeout_steps * seconds_per_step; on timeout the process is killed and a
// Termination::Timeout record is returned. A nonzero exit or a malformed
// record file raises AdapterProtocolError.
class ExternalProcessAgent : public AgentAdapter {
 public:
  ExternalProcessAgent(std::string command_template, std::filesystem::path io_dir,
                       double seconds_per_step = 0.1);

  std::string tag() const override;
  RunRecord run(const RunSpec& spec,
                const InstructionSequence& instructions) override;

 private:
  std::string command_template_;
  std::filesystem::path io_dir_;
  double seconds_per_step_;
  std::atomic<int> episode_{0};  // distinct routes may run concurrently
};

using RecordSink = std::function<void(const RunRecord&)>;

struct RunPairOptions {
  int timeout_steps = 100;
  RecordSink sink;  // invoked after every record, for incremental persistence
};

// Baseline first, then each variant file in the given order, all under the
// identical RouteSpec. Adapter exceptions become AgentError records with
// zeroed metrics; the remaining variants still run.
std::vector<RunRecord> run_pair(AgentAdapter& agent, const RouteSpec& route,
                                const std::filesystem::path& baseline_file,
                                const std::vector<std::filesystem::path>& variant_files,
                                const RunPairOptions& options = RunPairOptions{});

}  // namespace icr::harness
