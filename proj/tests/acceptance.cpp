// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Everything runs offline against the bundled toy corpus.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icr/corpus.hpp"
#include "icr/errors.hpp"
#include "icr/generator.hpp"
#include "icr/harness.hpp"
#include "icr/metrics.hpp"
#include "icr/perturb.hpp"
#include "oracle_sim.hpp"
#include "reference_tables.hpp"
#include "test_util.hpp"

using namespace icr;
using icr_test::TempDir;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool ok,
               const std::string& detail = "") {
  std::printf("criterion %d [%s]: %s\n", number, name.c_str(),
              ok ? "PASS" : "FAIL");
  if (!ok) {
    ++g_failures;
    if (!detail.empty()) std::printf("  -> %s\n", detail.c_str());
  }
}

std::map<std::string, std::string> dir_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[entry.path().filename().string()] = icr_test::read_file(entry.path());
    }
  }
  return out;
}

struct Campaign {
  // All run records per profile over the generated suite.
  std::map<std::string, std::vector<harness::RunRecord>> records_by_profile;
};

std::vector<std::filesystem::path> route_variant_files(
    const std::filesystem::path& suite_dir, const std::string& route_id) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(suite_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto parsed = parse_file_name(entry.path().filename().string());
    if (parsed && parsed->family && parsed->route_id == route_id) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main() {
  const auto classifier = intent::ClassifierConfig::defaults();
  const corpus::Corpus corpus = corpus::load_corpus(icr_test::data_dir() / "corpus");
  const perturb::TemplateBanks& banks = perturb::default_banks();

  TempDir suite_a("acc-suite-a"), suite_b("acc-suite-b");

  // ---- 1. Suite cardinality --------------------------------------------
  {
    gen::GenerateOptions options;  // K=8, seed 2026, all families
    const auto start = std::chrono::steady_clock::now();
    const gen::SuiteManifest manifest = gen::generate_corpus(
        corpus.routes, banks, options, classifier, suite_a.path());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    bool counts_ok = manifest.failures.empty();
    for (const auto& route : corpus.routes) {
      int variants = 0;
      for (const auto& entry : manifest.entries) {
        if (entry.route_id == route.route.route_id && entry.family != "baseline") {
          ++variants;
        }
      }
      counts_ok = counts_ok && variants == 32;
    }
    criterion(1, "suite cardinality: 32 variants per route, under 5 s",
              counts_ok && seconds < 5.0,
              "generation took " + std::to_string(seconds) + " s");
  }

  // ---- 2. Byte-determinism ----------------------------------------------
  {
    gen::GenerateOptions parallel;
    parallel.jobs = 8;
    gen::generate_corpus(corpus.routes, banks, parallel, classifier,
                         suite_b.path());
    const auto a = dir_bytes(suite_a.path());
    const auto b = dir_bytes(suite_b.path());
    bool identical = a.size() == b.size();
    std::string mismatch;
    if (identical) {
      for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != bytes) {
          identical = false;
          mismatch = name;
          break;
        }
      }
    }

    // Clean-room repetition with the sequential path.
    TempDir suite_c("acc-suite-c");
    gen::GenerateOptions sequential;
    gen::generate_corpus(corpus.routes, banks, sequential, classifier,
                         suite_c.path());
    const auto c = dir_bytes(suite_c.path());
    identical = identical && a == c;
    criterion(2, "byte-determinism incl. jobs=1 vs jobs=8", identical, mismatch);
  }

  // ---- 3. Family constraints over the full generated suite ---------------
  {
    bool ok = true;
    std::string detail;
    for (const auto& route : corpus.routes) {
      const auto baseline_intents = intent::classify_sequence(route.baseline,
                                                              classifier);
      for (const auto& file :
           route_variant_files(suite_a.path(), route.route.route_id)) {
        const auto parsed = parse_file_name(file.filename().string());
        const InstructionSequence variant = load_instruction_file(file);
        bool pass = true;
        switch (*parsed->family) {
          case FamilyTag::P:
          case FamilyTag::N:
            pass = intent::intent_consistent(variant, baseline_intents, classifier);
            break;
          case FamilyTag::M:
            pass = intent::intent_conflicting(variant, baseline_intents, classifier);
            break;
          case FamilyTag::A:
            for (const auto& item : variant.items) {
              pass = pass && !perturb::has_qualifier_token(item.text);
            }
            break;
        }
        if (!pass) {
          ok = false;
          detail = file.filename().string();
        }
      }
    }
    criterion(3, "family constraints hold for 100% of generated variants", ok,
              detail);
  }

  // ---- 4. Worked-example fidelity -----------------------------------------
  {
    InstructionSequence baseline;
    baseline.route_id = "demo";
    baseline.items = {{"Proceed ahead and make a left turn.", 0.0}};
    const gen::VariantSuite suite = gen::generate_suite(
        baseline, banks, 8, perturb::GenerationSeed{2026}, classifier);

    std::set<std::string> texts[4];
    for (const auto& [family, variants] : suite.families) {
      for (const auto& variant : variants) {
        texts[static_cast<int>(family)].insert(variant.items[0].text);
      }
    }
    const bool verbatim =
        texts[static_cast<int>(FamilyTag::P)].count("Just up ahead, take a left.") &&
        texts[static_cast<int>(FamilyTag::A)].count("Make a turn up ahead.") &&
        texts[static_cast<int>(FamilyTag::N)].count("TURN LEFT AHEAD.") &&
        texts[static_cast<int>(FamilyTag::N)].count("turm left at the junciton.") &&
        texts[static_cast<int>(FamilyTag::M)].count(
            "Ignore the navigation and turn right.") &&
        texts[static_cast<int>(FamilyTag::M)].count("Override: turn right instead.");
    const bool classified =
        intent::classify_intent("TURN LEFT AHEAD.", classifier) ==
            intent::IntentLabel::TurnLeft &&
        intent::classify_intent("turm left at the junciton.", classifier) ==
            intent::IntentLabel::TurnLeft;
    criterion(4, "worked examples reproduced verbatim by the default banks",
              verbatim && classified);
  }

  // ---- 5. Delta arithmetic fixtures ---------------------------------------
  {
    bool ok = true;
    std::string detail;
    for (const auto& row : icr_test::kTableRows) {
      const auto& base = icr_test::baseline_for(row.agent, row.split);

      // Feed the absolute means through the aggregation path as synthetic
      // one-run aggregates.
      std::vector<harness::RunRecord> records;
      harness::RunRecord baseline_record;
      baseline_record.spec.route.route_id = "fixture";
      baseline_record.ds = base.ds;
      baseline_record.rc = base.rc;
      baseline_record.is = base.is;
      baseline_record.termination = harness::Termination::Completed;
      records.push_back(baseline_record);

      harness::RunRecord family_record = baseline_record;
      family_record.spec.family = row.family;
      family_record.ds = row.ds;
      family_record.rc = row.rc;
      family_record.is = row.is;
      records.push_back(family_record);

      const metrics::AggregateResult agg = metrics::aggregate(records);
      const metrics::MetricTriple& delta = agg.reports[0].delta;
      const bool row_ok = std::abs(delta.ds - row.d_ds) <= 0.02 &&
                          std::abs(delta.rc - row.d_rc) <= 0.02 &&
                          std::abs(delta.is - row.d_is) <= 0.002;
      if (!row_ok) {
        ok = false;
        std::ostringstream o;
        o << row.agent << "/" << row.split << "/" << family_name(row.family)
          << ": got dDS " << delta.ds << " want " << row.d_ds;
        detail = o.str();
      }
    }
    criterion(5, "reference-table deltas reproduced within +/-0.02 (0.002 for IS)", ok,
              detail);
  }

  // ---- 6. Mock-oracle equivalence ----------------------------------------
  Campaign campaign;
  {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    int episodes = 0;
    for (const std::string profile_name :
         {"literal", "robust", "hesitant", "compliant"}) {
      harness::MockAgentProfile profile;
      profile.comprehension = *harness::comprehension_from_name(profile_name);
      harness::MockAgent agent(profile, corpus.worlds);

      auto& records = campaign.records_by_profile[profile_name];
      for (const auto& route : corpus.routes) {
        const auto variant_files =
            route_variant_files(suite_a.path(), route.route.route_id);
        const auto route_records = harness::run_pair(
            agent, route.route,
            suite_a.path() / baseline_file_name(route.route.route_id),
            variant_files);
        for (const auto& record : route_records) {
          ++episodes;
          const InstructionSequence instructions =
              load_instruction_file(record.spec.instructions);
          const icr_oracle::Outcome expected = icr_oracle::simulate(
              corpus.worlds.at(route.route.route_id), instructions, profile_name);
          const bool match =
              record.rc == expected.rc && record.is == expected.is &&
              record.ds == expected.ds &&
              harness::termination_name(record.termination) ==
                  expected.termination;
          if (!match && detail.empty()) {
            std::ostringstream o;
            o << profile_name << " " << record.spec.instructions << ": got rc "
              << record.rc << "/" << harness::termination_name(record.termination)
              << ", oracle rc " << expected.rc << "/" << expected.termination;
            detail = o.str();
            ok = false;
          }
        }
        records.insert(records.end(), route_records.begin(), route_records.end());
      }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream note;
    note << detail << (detail.empty() ? "" : "; ") << episodes
         << " episodes in " << seconds << " s";
    criterion(6, "mock outcomes equal the independent oracle exactly",
              ok && episodes == 4 * 6 * 33 && seconds < 10.0, note.str());
  }

  // ---- 7. Directional findings -------------------------------------------
  {
    const auto agg_of = [&](const std::string& profile) {
      return metrics::aggregate(campaign.records_by_profile.at(profile));
    };
    const auto delta_rc = [](const metrics::AggregateResult& agg, FamilyTag f) {
      for (const auto& report : agg.reports) {
        if (report.family == f) return report.delta.rc;
      }
      return 0.0;
    };

    const auto compliant = agg_of("compliant");
    const double m_drop = delta_rc(compliant, FamilyTag::M);
    const bool compliant_ok = m_drop < delta_rc(compliant, FamilyTag::P) &&
                              m_drop < delta_rc(compliant, FamilyTag::A) &&
                              m_drop < delta_rc(compliant, FamilyTag::N);

    const auto& hesitant_records = campaign.records_by_profile.at("hesitant");
    const auto to_of = [&](std::optional<FamilyTag> family) {
      return metrics::termination_signature(hesitant_records, family, "mock")
          .to_rate;
    };
    const auto rd_of = [&](std::optional<FamilyTag> family) {
      return metrics::termination_signature(hesitant_records, family, "mock")
          .rd_rate;
    };
    const bool hesitant_ok = to_of(FamilyTag::A) > to_of(std::nullopt) &&
                             to_of(FamilyTag::A) > rd_of(FamilyTag::A);

    const auto robust = agg_of("robust");
    bool robust_ok = false;
    for (const auto& report : robust.reports) {
      if (report.family == FamilyTag::P) {
        robust_ok = std::abs(report.delta.ds) <= 0.5 &&
                    std::abs(report.delta.rc) <= 0.5 &&
                    std::abs(report.delta.is) <= 0.005;
      }
    }
    criterion(7,
              "directional findings: compliant worst under M, hesitant "
              "TO-dominant under A, robust flat under P",
              compliant_ok && hesitant_ok && robust_ok);
  }

  // ---- 8. Validation soundness and completeness ---------------------------
  {
    bool sound = true;
    std::string detail;
    for (const auto& route : corpus.routes) {
      const auto report =
          gen::validate_external_suite(suite_a.path(), route.baseline, classifier);
      if (report.files.size() != 32 || report.n_failed != 0) {
        sound = false;
        detail = route.route.route_id + ": " + std::to_string(report.n_failed) +
                 " rejected";
      }
    }

    TempDir bad("acc-validate");
    const InstructionSequence& baseline = corpus.routes[0].baseline;

    InstructionSequence flipped = baseline;
    flipped.items[1].text = "Proceed ahead and make a right turn.";
    save_instruction_file(
        flipped, bad.path() / variant_file_name(baseline.route_id, FamilyTag::P, 1));

    InstructionSequence extended = baseline;
    extended.items.push_back({"Then stop.", 999.0});
    save_instruction_file(
        extended, bad.path() / variant_file_name(baseline.route_id, FamilyTag::P, 2));

    InstructionSequence leaky = baseline;
    for (auto& item : leaky.items) item.text = "Make a turn up ahead.";
    leaky.items[0].text = "Make a left turn somewhere.";
    save_instruction_file(
        leaky, bad.path() / variant_file_name(baseline.route_id, FamilyTag::A, 1));

    const auto report = gen::validate_external_suite(bad.path(), baseline,
                                                     classifier);
    bool complete = report.files.size() == 3 && report.n_failed == 3;
    for (const auto& fv : report.files) {
      const std::string want =
          fv.family == FamilyTag::A ? gen::kReasonQualifierPresent
          : fv.k == 1               ? gen::kReasonIntentInconsistent
                                    : gen::kReasonStructureNotPreserved;
      complete = complete && fv.reasons.size() == 1 && fv.reasons[0] == want;
    }
    criterion(8, "validator accepts own suites, rejects violations with codes",
              sound && complete, detail);
  }

  // ---- 9. Signature geometry ----------------------------------------------
  {
    const auto& records = campaign.records_by_profile.at("robust");
    bool rates_ok = true;
    std::vector<metrics::TerminationSignature> signatures;
    std::vector<std::optional<FamilyTag>> selections = {
        std::nullopt, FamilyTag::P, FamilyTag::A, FamilyTag::N, FamilyTag::M};
    for (const auto& family : selections) {
      int total = 0, rd = 0, to = 0, completed = 0, error = 0;
      for (const auto& record : records) {
        if (record.spec.family != family) continue;
        ++total;
        switch (record.termination) {
          case harness::Termination::RouteDeviation: ++rd; break;
          case harness::Termination::Timeout:
          case harness::Termination::Blocked: ++to; break;
          case harness::Termination::Completed: ++completed; break;
          case harness::Termination::AgentError: ++error; break;
        }
      }
      const auto signature =
          metrics::termination_signature(records, family, "mock:robust");
      signatures.push_back(signature);
      const double sum = signature.rd_rate + signature.to_rate +
                         static_cast<double>(completed) / total +
                         static_cast<double>(error) / total;
      rates_ok = rates_ok && std::abs(sum - 1.0) <= 1e-12 &&
                 signature.rd_rate + signature.to_rate <= 1.0 + 1e-12;
    }

    const auto rendered = metrics::render_report(
        metrics::aggregate(records), signatures, {metrics::ReportFormat::Csv},
        "mock:robust");
    int rows = 0;
    std::istringstream csv(*rendered.signatures_csv);
    std::string line;
    while (std::getline(csv, line)) ++rows;
    criterion(9, "termination rates sum to 1; one signature point per pair",
              rates_ok && rows == 1 + 5);
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
