#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "icr/cli.hpp"
#include "icr/errors.hpp"
#include "icr/perturb.hpp"
#include "icr/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "icr - instruction counterfactual robustness toolkit: generate "
      "counterfactual instruction suites, validate external ones, run paired "
      "evaluations, and report robustness metrics"};
  app.require_subcommand(0, 1);

  bool show_version = false;
  app.add_flag("--version", show_version, "print tool and bank versions");

  icr::cli::CampaignConfig cfg;
  if (const char* env_seed = std::getenv("ICR_SEED")) {
    try {
      cfg.seed.value = std::stoull(env_seed);
    } catch (const std::exception&) {
      std::cerr << "error: ICR_SEED is not an unsigned integer: " << env_seed
                << "\n";
      return 2;
    }
  }

  std::string families = "P,A,N,M";
  std::string banks_path;
  std::string classifier_path;
  std::string formats = "md,csv";

  auto* generate = app.add_subcommand(
      "generate", "generate counterfactual instruction files for a corpus");
  generate->add_option("--corpus", cfg.corpus_dir, "corpus directory")
      ->required();
  generate->add_option("--out", cfg.suite_dir, "output suite directory")
      ->required();
  generate->add_option("--k", cfg.k, "variants per family (default 8)");
  generate->add_option("--seed", cfg.seed.value, "generation seed (default 2026)");
  generate->add_option("--families", families, "families to emit, e.g. P,A,N,M");
  generate->add_option("--jobs", cfg.jobs, "worker threads (default 1)");
  generate->add_option("--banks", banks_path, "template bank file (JSON)");
  generate->add_option("--classifier", classifier_path,
                       "classifier config file (JSON)");

  auto* validate = app.add_subcommand(
      "validate", "validate externally generated variant files");
  validate->add_option("--baseline", cfg.baseline_file, "baseline instruction file")
      ->required();
  validate->add_option("--candidates", cfg.candidates_dir, "candidate directory")
      ->required();
  validate->add_option("--classifier", classifier_path,
                       "classifier config file (JSON)");

  auto* run = app.add_subcommand(
      "run", "run the paired evaluation protocol over a generated suite");
  run->add_option("--corpus", cfg.corpus_dir, "corpus directory")->required();
  run->add_option("--suite", cfg.suite_dir, "generated suite directory")
      ->required();
  run->add_option("--agent", cfg.agent,
                  "agent adapter: mock:PROFILE (literal|robust|hesitant|"
                  "compliant) or exec:\"CMD\"");
  run->add_option("--out", cfg.runs_dir, "run records directory")->required();
  run->add_option("--jobs", cfg.jobs, "worker threads (default 1)");

  auto* report = app.add_subcommand(
      "report", "aggregate run records into robustness tables");
  report->add_option("--runs", cfg.runs_dir, "run records directory")->required();
  report->add_option("--out", cfg.report_dir, "report output directory")
      ->required();
  report->add_option("--format", formats, "comma list of md,csv (default both)");
  report->add_flag("--per-route-first", cfg.per_route_first,
                   "average within each route before averaging across routes");

  CLI11_PARSE(app, argc, argv);

  if (show_version) {
    std::cout << "icr " << icr::kToolVersion << " (banks "
              << icr::perturb::default_banks().version << ")\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    if (!families.empty()) {
      cfg.families = icr::cli::parse_family_list(families);
    }
    if (!banks_path.empty()) cfg.banks_file = banks_path;
    if (!classifier_path.empty()) cfg.classifier_file = classifier_path;
    cfg.formats.clear();
    std::string token;
    std::istringstream format_stream(formats);
    while (std::getline(format_stream, token, ',')) {
      if (!token.empty()) cfg.formats.push_back(token);
    }
  } catch (const icr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (generate->parsed()) return icr::cli::cmd_generate(cfg);
  if (validate->parsed()) return icr::cli::cmd_validate(cfg);
  if (run->parsed()) return icr::cli::cmd_run(cfg);
  if (report->parsed()) return icr::cli::cmd_report(cfg);
  return 0;
}
