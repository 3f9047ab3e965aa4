#include "icr/cli.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "icr/corpus.hpp"
#include "icr/errors.hpp"
#include "icr/generator.hpp"
#include "icr/harness.hpp"
#include "icr/metrics.hpp"
#include "icr/version.hpp"

namespace icr::cli {

using nlohmann::json;

std::vector<FamilyTag> parse_family_list(const std::string& list) {
  std::vector<FamilyTag> families;
  std::string token;
  std::istringstream stream(list);
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    if (token.size() != 1 || !family_from_letter(token[0])) {
      throw ParseError("unknown family \"" + token + "\" (expected P, A, N, M)");
    }
    const FamilyTag family = *family_from_letter(token[0]);
    if (std::find(families.begin(), families.end(), family) == families.end()) {
      families.push_back(family);
    }
  }
  if (families.empty()) {
    throw ParseError("family list is empty");
  }
  return families;
}

namespace {

intent::ClassifierConfig classifier_for(const CampaignConfig& cfg) {
  return cfg.classifier_file ? intent::load_classifier_config(*cfg.classifier_file)
                             : intent::ClassifierConfig::defaults();
}

const perturb::TemplateBanks& banks_for(const CampaignConfig& cfg,
                                        perturb::TemplateBanks& storage) {
  if (cfg.banks_file) {
    storage = perturb::load_banks(*cfg.banks_file);
    return storage;
  }
  return perturb::default_banks();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int family_rank(FamilyTag f) {
  switch (f) {
    case FamilyTag::P: return 0;
    case FamilyTag::A: return 1;
    case FamilyTag::N: return 2;
    case FamilyTag::M: return 3;
  }
  return 4;
}

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace

int cmd_generate(const CampaignConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.corpus_dir == cfg.suite_dir) {
      err << "error: --corpus and --out must be distinct directories\n";
      return 2;
    }
    const corpus::Corpus corpus = corpus::load_corpus(cfg.corpus_dir);
    perturb::TemplateBanks storage;
    const perturb::TemplateBanks& banks = banks_for(cfg, storage);
    const intent::ClassifierConfig classifier = classifier_for(cfg);

    gen::GenerateOptions options;
    options.k = cfg.k;
    options.seed = cfg.seed;
    options.families = cfg.families;
    options.jobs = cfg.jobs;

    gen::SuiteManifest manifest;
    const auto files =
        gen::corpus_file_set(corpus.routes, banks, options, classifier, &manifest);

    bool up_to_date = std::filesystem::exists(cfg.suite_dir / "manifest.json");
    if (up_to_date) {
      for (const auto& [name, bytes] : files) {
        if (!std::filesystem::exists(cfg.suite_dir / name) ||
            read_file(cfg.suite_dir / name) != bytes) {
          up_to_date = false;
          break;
        }
      }
    }

    if (up_to_date) {
      out << "up to date (" << manifest.entries.size() << " files, seed "
          << manifest.seed << ")\n";
    } else {
      std::filesystem::create_directories(cfg.suite_dir);
      for (const auto& [name, bytes] : files) {
        std::ofstream f(cfg.suite_dir / name, std::ios::binary | std::ios::trunc);
        if (!f) {
          throw IoError("cannot write " + (cfg.suite_dir / name).string());
        }
        f << bytes;
      }
      out << "wrote " << files.size() << " files to " << cfg.suite_dir.string()
          << " (seed " << manifest.seed << ", K=" << cfg.k << ")\n";
    }

    for (const auto& [route_id, fallback_items] : manifest.flagged) {
      out << "note: route " << route_id << " used fallback banks for "
          << fallback_items << " baseline item(s) with unclassifiable text\n";
    }
    if (!manifest.failures.empty()) {
      for (const auto& failure : manifest.failures) {
        err << "generation failed for route " << failure.route_id << ": "
            << failure.error << "\n";
      }
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_validate(const CampaignConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const InstructionSequence baseline = load_instruction_file(cfg.baseline_file);
    const intent::ClassifierConfig classifier = classifier_for(cfg);
    const gen::ValidationReport report =
        gen::validate_external_suite(cfg.candidates_dir, baseline, classifier);

    if (report.files.empty()) {
      err << "no candidate files for route \"" << baseline.route_id << "\" in "
          << cfg.candidates_dir.string() << "\n";
      return 1;
    }
    for (const auto& fv : report.files) {
      if (fv.passed) {
        out << "PASS " << fv.file << "\n";
      } else {
        out << "FAIL " << fv.file << " [";
        for (std::size_t i = 0; i < fv.reasons.size(); ++i) {
          if (i > 0) out << ", ";
          out << fv.reasons[i];
        }
        out << "]\n";
      }
    }
    out << report.n_passed << " passed, " << report.n_failed << " failed\n";
    return report.n_failed == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_run(const CampaignConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.suite_dir == cfg.runs_dir) {
      err << "error: --suite and --out must be distinct directories\n";
      return 2;
    }
    const corpus::Corpus corpus = corpus::load_corpus(cfg.corpus_dir);

    std::unique_ptr<harness::AgentAdapter> agent;
    if (cfg.agent.rfind("mock:", 0) == 0) {
      const auto comprehension =
          harness::comprehension_from_name(cfg.agent.substr(5));
      if (!comprehension) {
        err << "error: unknown mock profile \"" << cfg.agent.substr(5)
            << "\" (expected literal, robust, hesitant, compliant)\n";
        return 2;
      }
      harness::MockAgentProfile profile;
      profile.comprehension = *comprehension;
      agent = std::make_unique<harness::MockAgent>(profile, corpus.worlds);
    } else if (cfg.agent.rfind("exec:", 0) == 0) {
      agent = std::make_unique<harness::ExternalProcessAgent>(
          cfg.agent.substr(5), cfg.runs_dir / "io");
    } else {
      err << "error: unknown agent selector \"" << cfg.agent
          << "\" (expected mock:PROFILE or exec:\"CMD\")\n";
      return 2;
    }

    std::filesystem::create_directories(cfg.runs_dir);

    // Prefer the generation manifest as the suite's source of truth; fall
    // back to a directory scan for suites without one (external variants).
    std::optional<gen::SuiteManifest> manifest;
    const std::filesystem::path manifest_path = cfg.suite_dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
      try {
        manifest = gen::parse_manifest(read_file(manifest_path),
                                       manifest_path.filename().string());
      } catch (const Error&) {
        manifest.reset();
      }
    }

    // Runs for one route are serialized (baseline before variants); distinct
    // routes may execute concurrently, each appending to its own file.
    struct RouteOutcome {
      std::string summary;
      std::string error;
      std::size_t records = 0;
    };
    std::vector<RouteOutcome> outcomes(corpus.routes.size());

    std::mutex next_mutex;
    std::size_t next_route = 0;
    auto worker = [&]() {
      for (;;) {
        std::size_t index;
        {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (next_route >= corpus.routes.size()) return;
          index = next_route++;
        }
        const auto& route = corpus.routes[index];
        const std::string& route_id = route.route.route_id;
        RouteOutcome& outcome = outcomes[index];
        try {
          const std::filesystem::path baseline_path =
              cfg.suite_dir / baseline_file_name(route_id);
          if (!std::filesystem::exists(baseline_path)) {
            outcome.error = "missing suite baseline " + baseline_path.string() +
                            " (run `icr generate` first)";
            continue;
          }

          struct VariantFile {
            std::filesystem::path path;
            FamilyTag family;
            int k;
          };
          std::vector<VariantFile> variants;
          if (manifest) {
            for (const auto& entry : manifest->entries) {
              if (entry.route_id != route_id || entry.family == "baseline") {
                continue;
              }
              const auto family = family_from_letter(entry.family[0]);
              if (!family) continue;
              variants.push_back({cfg.suite_dir / entry.path, *family, entry.k});
            }
          } else {
            for (const auto& entry :
                 std::filesystem::directory_iterator(cfg.suite_dir)) {
              if (!entry.is_regular_file()) continue;
              const auto parsed =
                  parse_file_name(entry.path().filename().string());
              if (!parsed || !parsed->family || parsed->route_id != route_id) {
                continue;
              }
              variants.push_back({entry.path(), *parsed->family, parsed->k});
            }
          }
          std::sort(variants.begin(), variants.end(),
                    [](const VariantFile& a, const VariantFile& b) {
                      if (family_rank(a.family) != family_rank(b.family)) {
                        return family_rank(a.family) < family_rank(b.family);
                      }
                      return a.k < b.k;
                    });

          const std::filesystem::path records_path =
              cfg.runs_dir / (route_id + ".jsonl");
          const std::size_t expected = 1 + variants.size();
          if (count_lines(records_path) == expected) {
            outcome.summary = route_id + ": up to date (" +
                              std::to_string(expected) + " records)";
            outcome.records = expected;
            continue;
          }

          std::ofstream records_file(records_path,
                                     std::ios::binary | std::ios::trunc);
          if (!records_file) {
            throw IoError("cannot write " + records_path.string());
          }
          harness::RunPairOptions options;
          options.sink = [&records_file](const harness::RunRecord& record) {
            records_file << harness::record_to_jsonl_line(record);
            records_file.flush();
          };
          std::vector<std::filesystem::path> variant_paths;
          variant_paths.reserve(variants.size());
          for (const auto& v : variants) variant_paths.push_back(v.path);

          const auto records = harness::run_pair(*agent, route.route,
                                                 baseline_path, variant_paths,
                                                 options);
          std::size_t errors = 0;
          for (const auto& record : records) {
            if (record.termination == harness::Termination::AgentError) ++errors;
          }
          outcome.summary = route_id + ": " + std::to_string(records.size()) +
                            " records";
          if (errors > 0) {
            outcome.summary += " (" + std::to_string(errors) + " agent errors)";
          }
          outcome.records = records.size();
        } catch (const Error& e) {
          outcome.error = e.what();
        }
      }
    };
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    std::size_t total_records = 0;
    bool failed = false;
    for (const auto& outcome : outcomes) {
      if (!outcome.error.empty()) {
        err << "error: " << outcome.error << "\n";
        failed = true;
        continue;
      }
      out << outcome.summary << "\n";
      total_records += outcome.records;
    }
    if (failed) return 1;

    json campaign;
    campaign["agent"] = agent->tag();
    campaign["corpus"] = cfg.corpus_dir.string();
    campaign["suite"] = cfg.suite_dir.string();
    campaign["tool_version"] = kToolVersion;
    std::ofstream campaign_file(cfg.runs_dir / "campaign.json",
                                std::ios::binary | std::ios::trunc);
    campaign_file << campaign.dump(2) << "\n";

    out << "total: " << total_records << " records in " << cfg.runs_dir.string()
        << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_report(const CampaignConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.runs_dir == cfg.report_dir) {
      err << "error: --runs and --out must be distinct directories\n";
      return 2;
    }
    std::vector<std::filesystem::path> record_files;
    if (std::filesystem::exists(cfg.runs_dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(cfg.runs_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
          record_files.push_back(entry.path());
        }
      }
    }
    std::sort(record_files.begin(), record_files.end());
    if (record_files.empty()) {
      err << "error: no .jsonl run records in " << cfg.runs_dir.string() << "\n";
      return 1;
    }

    std::vector<harness::RunRecord> records;
    for (const auto& path : record_files) {
      const auto loaded = harness::load_records_file(path);
      records.insert(records.end(), loaded.begin(), loaded.end());
    }

    metrics::AggregateOptions agg_options;
    agg_options.per_route_first = cfg.per_route_first;
    const metrics::AggregateResult agg = metrics::aggregate(records, agg_options);

    std::string agent_tag = "agent";
    const std::filesystem::path campaign_path = cfg.runs_dir / "campaign.json";
    if (std::filesystem::exists(campaign_path)) {
      try {
        const json campaign = json::parse(read_file(campaign_path));
        agent_tag = campaign.value("agent", agent_tag);
      } catch (const json::exception&) {
        // Missing metadata only degrades the label.
      }
    }

    std::vector<metrics::TerminationSignature> signatures;
    signatures.push_back(
        metrics::termination_signature(records, std::nullopt, agent_tag));
    for (FamilyTag family : kAllFamilies) {
      const bool present =
          std::any_of(records.begin(), records.end(),
                      [&](const harness::RunRecord& r) {
                        return r.spec.family == std::optional<FamilyTag>(family);
                      });
      if (present) {
        signatures.push_back(
            metrics::termination_signature(records, family, agent_tag));
      }
    }

    std::vector<metrics::ReportFormat> formats;
    for (const std::string& name : cfg.formats) {
      formats.push_back(metrics::report_format_from_name(name));
    }

    const metrics::RenderedReport rendered =
        metrics::render_report(agg, signatures, formats, agent_tag);

    std::filesystem::create_directories(cfg.report_dir);
    auto write = [&](const char* name, const std::string& bytes) {
      std::ofstream f(cfg.report_dir / name, std::ios::binary | std::ios::trunc);
      if (!f) {
        throw IoError("cannot write " + (cfg.report_dir / name).string());
      }
      f << bytes;
      out << "wrote " << (cfg.report_dir / name).string() << "\n";
    };
    if (rendered.markdown) write("report.md", *rendered.markdown);
    if (rendered.csv) write("report.csv", *rendered.csv);
    if (rendered.signatures_csv) write("signatures.csv", *rendered.signatures_csv);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace icr::cli
