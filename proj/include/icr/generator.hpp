#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icr/intent.hpp"
#include "icr/model.hpp"
#include "icr/perturb.hpp"

namespace icr::gen {

using intent::ClassifierConfig;
using intent::IntentLabel;
using perturb::GenerationSeed;
using perturb::TemplateBanks;

// All counterfactual sequences for one route: K variants per family.
struct VariantSuite {
  std::string route_id;
  InstructionSequence baseline;
  std::map<FamilyTag, std::vector<InstructionSequence>> families;
  GenerationSeed seed;
  // Baseline items whose intent is Unknown and were therefore served from
  // the global fallback banks; non-zero suites are flagged in the manifest.
  int fallback_items = 0;
};

struct ManifestEntry {
  std::string route_id;
  std::string family;  // "P"/"A"/"N"/"M" or "baseline"
  int k = 0;           // 0 for baseline
  std::string path;    // relative to the suite directory
  std::string content_hash;  // "fnv1a64:" + 16 hex digits
};

struct ManifestFailure {
  std::string route_id;
  std::string error;
};

// Reproducibility ledger for a generated suite directory.
struct SuiteManifest {
  std::vector<ManifestEntry> entries;  // sorted by (route_id, family, k)
  std::vector<ManifestFailure> failures;
  // Routes whose baseline had Unknown-intent items served from the global
  // fallback banks, with the fallback variant-item count.
  std::vector<std::pair<std::string, int>> flagged;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string bank_version;
};

std::string serialize_manifest(const SuiteManifest& manifest);
SuiteManifest parse_manifest(const std::string& json_text,
                             const std::string& origin = "<input>");

std::string content_hash(const std::string& bytes);

// Which families to generate; defaults to all four.
using FamilySet = std::vector<FamilyTag>;

// Algorithm-1 generation for one route. Per-family RNG streams are derived
// from (seed, route_id, family), so a suite depends only on its own inputs.
// Classification is per item; items with Unknown baseline intent use the
// global fallback banks (A and N do not need an intent). P/N variants are
// asserted intent-consistent and M variants intent-conflicting; a violation
// throws ConsistencyError. A is exempt.
VariantSuite generate_suite(const InstructionSequence& baseline,
                            const TemplateBanks& banks, int k,
                            GenerationSeed seed, const ClassifierConfig& cfg,
                            const FamilySet& families = {FamilyTag::P, FamilyTag::A,
                                                         FamilyTag::N, FamilyTag::M});

// In-memory file set of a suite: file name -> canonical bytes (baseline copy
// included). Lets callers diff against disk before writing.
std::map<std::string, std::string> suite_files(const VariantSuite& suite);

struct CorpusRoute {
  RouteSpec route;
  InstructionSequence baseline;
};

struct GenerateOptions {
  int k = 8;
  GenerationSeed seed{};
  FamilySet families = {FamilyTag::P, FamilyTag::A, FamilyTag::N, FamilyTag::M};
  int jobs = 1;
};

// Builds every route's suite plus "manifest.json" as an in-memory file set
// (name -> canonical bytes). Byte-identical for identical inputs regardless
// of jobs. Throws DuplicateRouteError up front; per-route generation errors
// are collected into manifest.failures rather than aborting the corpus.
std::map<std::string, std::string> corpus_file_set(
    const std::vector<CorpusRoute>& routes, const TemplateBanks& banks,
    const GenerateOptions& options, const ClassifierConfig& cfg,
    SuiteManifest* manifest_out = nullptr);

// corpus_file_set written to out_dir.
SuiteManifest generate_corpus(const std::vector<CorpusRoute>& routes,
                              const TemplateBanks& banks,
                              const GenerateOptions& options,
                              const ClassifierConfig& cfg,
                              const std::filesystem::path& out_dir);

// Validation of a (possibly externally generated) variant directory against
// one baseline.
struct FileValidation {
  std::string file;
  std::optional<FamilyTag> family;
  int k = 0;
  bool passed = false;
  std::vector<std::string> reasons;  // stable reason codes, see kReason*
};

struct ValidationReport {
  std::vector<FileValidation> files;
  int n_passed = 0;
  int n_failed = 0;
};

inline constexpr const char* kReasonUnreadable = "unreadable";
inline constexpr const char* kReasonSchemaInvalid = "schema-invalid";
inline constexpr const char* kReasonRouteIdMismatch = "route-id-mismatch";
inline constexpr const char* kReasonStructureNotPreserved = "structure-not-preserved";
inline constexpr const char* kReasonIntentInconsistent = "intent-inconsistent";
inline constexpr const char* kReasonNotConflicting = "not-conflicting";
inline constexpr const char* kReasonQualifierPresent = "qualifier-present";

// Checks every candidate file in dir that follows the naming convention for
// baseline.route_id: schema, structure preservation (item count and
// triggers), and the family constraint (P/N consistent, M conflicting, A
// qualifier-free). Never mutates inputs; unreadable files become failure
// entries rather than errors.
ValidationReport validate_external_suite(const std::filesystem::path& dir,
                                         const InstructionSequence& baseline,
                                         const ClassifierConfig& cfg);

}  // namespace icr::gen
