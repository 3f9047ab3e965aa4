#include "icr/generator.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

#include "icr/errors.hpp"
#include "icr/rng.hpp"
#include "icr/version.hpp"

namespace icr::gen {

using nlohmann::json;
using perturb::select_bank;
using perturb::Template;

namespace {

const std::vector<Template>& bank_for(const TemplateBanks& banks, FamilyTag f,
                                      IntentLabel item_intent) {
  if (f == FamilyTag::A || item_intent != IntentLabel::Unknown) {
    return select_bank(f, item_intent, banks);
  }
  // Unknown baseline intent: global fallbacks.
  switch (f) {
    case FamilyTag::P:
      if (banks.paraphrase_fallback.empty()) {
        throw BankMissingError("no global Paraphrase fallback bank");
      }
      return banks.paraphrase_fallback;
    case FamilyTag::N:
      if (banks.noise_fallback.empty()) {
        throw BankMissingError("no global Noise fallback bank");
      }
      return banks.noise_fallback;
    case FamilyTag::M:
      if (banks.misleading_fallback.empty()) {
        throw BankMissingError("no global Misleading fallback bank");
      }
      return banks.misleading_fallback;
    default:
      break;
  }
  throw BankMissingError("no bank for family");
}

}  // namespace

VariantSuite generate_suite(const InstructionSequence& baseline,
                            const TemplateBanks& banks, int k,
                            GenerationSeed seed, const ClassifierConfig& cfg,
                            const FamilySet& families) {
  if (k < 1) {
    throw InvalidCountError("K must be >= 1, got " + std::to_string(k));
  }
  VariantSuite suite;
  suite.route_id = baseline.route_id;
  suite.baseline = baseline;
  suite.seed = seed;

  const std::vector<IntentLabel> baseline_intents =
      intent::classify_sequence(baseline, cfg);
  for (IntentLabel label : baseline_intents) {
    if (label == IntentLabel::Unknown) ++suite.fallback_items;
  }

  for (FamilyTag family : families) {
    SplitMix64 rng(derive_sub_seed(seed.value, baseline.route_id,
                                   family_letter(family)));

    // K samples per item, drawn in item order for a stable stream.
    std::vector<std::vector<Template>> samples;
    samples.reserve(baseline.items.size());
    for (std::size_t i = 0; i < baseline.items.size(); ++i) {
      samples.push_back(
          sample_k(bank_for(banks, family, baseline_intents[i]), k, rng));
    }

    std::vector<InstructionSequence> variants;
    variants.reserve(static_cast<std::size_t>(k));
    for (int variant_index = 1; variant_index <= k; ++variant_index) {
      InstructionSequence variant;
      variant.route_id = baseline.route_id;
      variant.provenance =
          Provenance::generated(family, variant_index, seed.value);
      variant.items.reserve(baseline.items.size());
      for (std::size_t i = 0; i < baseline.items.size(); ++i) {
        variant.items.push_back(
            perturb::apply_template(samples[i][variant_index - 1],
                                    baseline.items[i], baseline_intents[i], rng));
      }

      if (family == FamilyTag::P || family == FamilyTag::N) {
        for (std::size_t i = 0; i < variant.items.size(); ++i) {
          if (baseline_intents[i] == IntentLabel::Unknown) continue;
          const IntentLabel got =
              intent::classify_intent(variant.items[i].text, cfg);
          if (got != baseline_intents[i]) {
            throw ConsistencyError(
                std::string("intent consistency failed: family ") +
                    family_letter(family) + ", k=" + std::to_string(variant_index) +
                    ", item " + std::to_string(i) + ": got " +
                    intent::intent_name(got) + ", want " +
                    intent::intent_name(baseline_intents[i]) + " (text: \"" +
                    variant.items[i].text + "\")",
                family_letter(family), variant_index, i, intent::intent_name(got),
                intent::intent_name(baseline_intents[i]));
          }
        }
      } else if (family == FamilyTag::M) {
        const bool any_known =
            std::any_of(baseline_intents.begin(), baseline_intents.end(),
                        [](IntentLabel l) { return l != IntentLabel::Unknown; });
        if (any_known &&
            !intent::intent_conflicting(variant, baseline_intents, cfg)) {
          throw ConsistencyError(
              std::string("no item conflicts with baseline intent: family M, k=") +
                  std::to_string(variant_index),
              'M', variant_index, static_cast<std::size_t>(-1), "none",
              "conflict");
        }
      }
      // Family A is exempt from intent assertions.

      variants.push_back(std::move(variant));
    }
    suite.families[family] = std::move(variants);
  }
  return suite;
}

std::map<std::string, std::string> suite_files(const VariantSuite& suite) {
  std::map<std::string, std::string> files;
  files[baseline_file_name(suite.route_id)] =
      serialize_instruction_sequence(suite.baseline);
  for (const auto& [family, variants] : suite.families) {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      files[variant_file_name(suite.route_id, family, static_cast<int>(i) + 1)] =
          serialize_instruction_sequence(variants[i]);
    }
  }
  return files;
}

std::string content_hash(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string serialize_manifest(const SuiteManifest& manifest) {
  json j;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["bank_version"] = manifest.bank_version;
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json je;
    je["route_id"] = e.route_id;
    je["family"] = e.family;
    je["k"] = e.k;
    je["path"] = e.path;
    je["hash"] = e.content_hash;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  json failures = json::array();
  for (const auto& f : manifest.failures) {
    json jf;
    jf["route_id"] = f.route_id;
    jf["error"] = f.error;
    failures.push_back(std::move(jf));
  }
  j["failures"] = std::move(failures);
  json flagged = json::array();
  for (const auto& [route_id, fallback_items] : manifest.flagged) {
    json jf;
    jf["route_id"] = route_id;
    jf["fallback_items"] = fallback_items;
    flagged.push_back(std::move(jf));
  }
  j["flagged"] = std::move(flagged);
  return j.dump(2) + "\n";
}

namespace {

SuiteManifest parse_manifest_fields(const json& j, const std::string& origin) {
  SuiteManifest manifest;
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw ParseError(origin + ": entries: expected array");
  }
  manifest.seed = j.value("seed", std::uint64_t{0});
  manifest.tool_version = j.value("tool_version", std::string());
  manifest.bank_version = j.value("bank_version", std::string());
  for (const auto& je : j["entries"]) {
    ManifestEntry e;
    e.route_id = je.value("route_id", std::string());
    e.family = je.value("family", std::string());
    e.k = je.value("k", 0);
    e.path = je.value("path", std::string());
    e.content_hash = je.value("hash", std::string());
    manifest.entries.push_back(std::move(e));
  }
  if (j.contains("failures")) {
    for (const auto& jf : j["failures"]) {
      manifest.failures.push_back(
          {jf.value("route_id", std::string()), jf.value("error", std::string())});
    }
  }
  if (j.contains("flagged")) {
    for (const auto& jf : j["flagged"]) {
      manifest.flagged.emplace_back(jf.value("route_id", std::string()),
                                    jf.value("fallback_items", 0));
    }
  }
  return manifest;
}

// Family sort key: baseline first, then P, A, N, M.
int family_order(const std::string& family) {
  if (family == "baseline") return 0;
  switch (family[0]) {
    case 'P': return 1;
    case 'A': return 2;
    case 'N': return 3;
    case 'M': return 4;
    default: return 5;
  }
}

}  // namespace

SuiteManifest parse_manifest(const std::string& json_text,
                             const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": not valid JSON: " + e.what());
  }
  try {
    return parse_manifest_fields(j, origin);
  } catch (const json::exception& e) {
    // Wrong value types surface as json type errors, not parse errors.
    throw ParseError(origin + ": malformed manifest: " + e.what());
  }
}

std::map<std::string, std::string> corpus_file_set(
    const std::vector<CorpusRoute>& routes, const TemplateBanks& banks,
    const GenerateOptions& options, const ClassifierConfig& cfg,
    SuiteManifest* manifest_out) {
  std::set<std::string> seen;
  for (const auto& route : routes) {
    if (!seen.insert(route.route.route_id).second) {
      throw DuplicateRouteError("duplicate route_id \"" + route.route.route_id +
                                "\"");
    }
    if (route.route.route_id != route.baseline.route_id) {
      throw ParseError("route spec \"" + route.route.route_id +
                       "\" paired with baseline for \"" +
                       route.baseline.route_id + "\"");
    }
  }

  struct RouteResult {
    std::map<std::string, std::string> files;
    std::string error;
    int fallback_items = 0;
  };
  std::vector<RouteResult> results(routes.size());

  const int jobs = std::max(1, options.jobs);
  std::mutex next_mutex;
  std::size_t next_route = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t index;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next_route >= routes.size()) return;
        index = next_route++;
      }
      try {
        const VariantSuite suite =
            generate_suite(routes[index].baseline, banks, options.k,
                           options.seed, cfg, options.families);
        results[index].files = suite_files(suite);
        results[index].fallback_items = suite.fallback_items;
      } catch (const Error& e) {
        results[index].error = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SuiteManifest manifest;
  manifest.seed = options.seed.value;
  manifest.tool_version = kToolVersion;
  manifest.bank_version = banks.version;

  std::map<std::string, std::string> files;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    if (!results[i].error.empty()) {
      manifest.failures.push_back({routes[i].route.route_id, results[i].error});
      continue;
    }
    if (results[i].fallback_items > 0) {
      manifest.flagged.emplace_back(routes[i].route.route_id,
                                    results[i].fallback_items);
    }
    for (auto& [name, bytes] : results[i].files) {
      const auto parsed = parse_file_name(name);
      ManifestEntry entry;
      entry.route_id = routes[i].route.route_id;
      entry.family = parsed && parsed->family
                         ? std::string(1, family_letter(*parsed->family))
                         : "baseline";
      entry.k = parsed ? parsed->k : 0;
      entry.path = name;
      entry.content_hash = content_hash(bytes);
      manifest.entries.push_back(std::move(entry));
      files[name] = std::move(bytes);
    }
  }

  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              if (a.route_id != b.route_id) return a.route_id < b.route_id;
              if (family_order(a.family) != family_order(b.family)) {
                return family_order(a.family) < family_order(b.family);
              }
              return a.k < b.k;
            });
  std::sort(manifest.failures.begin(), manifest.failures.end(),
            [](const ManifestFailure& a, const ManifestFailure& b) {
              return a.route_id < b.route_id;
            });
  std::sort(manifest.flagged.begin(), manifest.flagged.end());

  files["manifest.json"] = serialize_manifest(manifest);
  if (manifest_out) *manifest_out = std::move(manifest);
  return files;
}

SuiteManifest generate_corpus(const std::vector<CorpusRoute>& routes,
                              const TemplateBanks& banks,
                              const GenerateOptions& options,
                              const ClassifierConfig& cfg,
                              const std::filesystem::path& out_dir) {
  SuiteManifest manifest;
  const auto files = corpus_file_set(routes, banks, options, cfg, &manifest);
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, bytes] : files) {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + (out_dir / name).string());
    }
    out << bytes;
    if (!out) {
      throw IoError("write failed: " + (out_dir / name).string());
    }
  }
  return manifest;
}

ValidationReport validate_external_suite(const std::filesystem::path& dir,
                                         const InstructionSequence& baseline,
                                         const ClassifierConfig& cfg) {
  const std::vector<IntentLabel> baseline_intents =
      intent::classify_sequence(baseline, cfg);

  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto parsed = parse_file_name(entry.path().filename().string());
    if (!parsed || !parsed->family) continue;  // baselines and strays skipped
    if (parsed->route_id != baseline.route_id) continue;
    names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());

  ValidationReport report;
  for (const std::string& name : names) {
    FileValidation fv;
    fv.file = name;
    const auto parsed = parse_file_name(name);
    fv.family = parsed->family;
    fv.k = parsed->k;

    InstructionSequence candidate;
    bool loaded = false;
    try {
      candidate = load_instruction_file(dir / name);
      loaded = true;
    } catch (const IoError&) {
      fv.reasons.push_back(kReasonUnreadable);
    } catch (const Error&) {
      fv.reasons.push_back(kReasonSchemaInvalid);
    }

    if (loaded) {
      if (candidate.route_id != baseline.route_id) {
        fv.reasons.push_back(kReasonRouteIdMismatch);
      }
      bool structure_ok = candidate.items.size() == baseline.items.size();
      if (structure_ok) {
        for (std::size_t i = 0; i < candidate.items.size(); ++i) {
          if (candidate.items[i].trigger != baseline.items[i].trigger) {
            structure_ok = false;
            break;
          }
        }
      }
      if (!structure_ok) {
        fv.reasons.push_back(kReasonStructureNotPreserved);
      } else {
        switch (*fv.family) {
          case FamilyTag::P:
          case FamilyTag::N:
            if (!intent::intent_consistent(candidate, baseline_intents, cfg)) {
              fv.reasons.push_back(kReasonIntentInconsistent);
            }
            break;
          case FamilyTag::M: {
            const bool any_known = std::any_of(
                baseline_intents.begin(), baseline_intents.end(),
                [](IntentLabel l) { return l != IntentLabel::Unknown; });
            if (any_known &&
                !intent::intent_conflicting(candidate, baseline_intents, cfg)) {
              fv.reasons.push_back(kReasonNotConflicting);
            }
            break;
          }
          case FamilyTag::A:
            for (const auto& item : candidate.items) {
              if (perturb::has_qualifier_token(item.text)) {
                fv.reasons.push_back(kReasonQualifierPresent);
                break;
              }
            }
            break;
        }
      }
    }

    fv.passed = fv.reasons.empty();
    (fv.passed ? report.n_passed : report.n_failed) += 1;
    report.files.push_back(std::move(fv));
  }
  return report;
}

}  // namespace icr::gen
