#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "icr/generator.hpp"
#include "icr/harness.hpp"

namespace icr::corpus {

// A corpus directory holds routes.json plus one {route_id}__baseline.json
// per route. routes.json:
//   {"routes": [{"route_id": "...", "map_id": "...", "sim_seed": 7,
//                "condition": "...",
//                "nodes": [{"maneuver": "TurnLeft", "length_m": 25.0,
//                           "hazard": false}, ...]}]}
struct Corpus {
  std::vector<gen::CorpusRoute> routes;
  std::map<std::string, harness::MockWorld> worlds;  // by route_id
};

Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace icr::corpus
