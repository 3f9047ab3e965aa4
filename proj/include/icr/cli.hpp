#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "icr/model.hpp"
#include "icr/perturb.hpp"

namespace icr::cli {

// Shared configuration for the pipeline subcommands. Each command reads the
// fields it needs; defaults follow the suite parameters (K=8, seed 2026).
struct CampaignConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path suite_dir;
  std::filesystem::path runs_dir;
  std::filesystem::path report_dir;

  int k = 8;
  perturb::GenerationSeed seed{};
  std::vector<FamilyTag> families = {FamilyTag::P, FamilyTag::A, FamilyTag::N,
                                     FamilyTag::M};
  std::string agent = "mock:robust";  // "mock:PROFILE" or "exec:CMD"
  bool per_route_first = false;
  int jobs = 1;
  std::vector<std::string> formats = {"md", "csv"};

  std::optional<std::filesystem::path> banks_file;
  std::optional<std::filesystem::path> classifier_file;

  // validate only
  std::filesystem::path baseline_file;
  std::filesystem::path candidates_dir;
};

// Parses "P,A,N,M"-style lists. Throws ParseError on unknown letters.
std::vector<FamilyTag> parse_family_list(const std::string& list);

// Exit status 0 on success; protocol-level failures print to err and return
// nonzero. Agent-level failures during a run are recorded, not fatal.
int cmd_generate(const CampaignConfig& cfg, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);
int cmd_validate(const CampaignConfig& cfg, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);
int cmd_run(const CampaignConfig& cfg, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);
int cmd_report(const CampaignConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr);

}  // namespace icr::cli
