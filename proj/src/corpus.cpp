#include "icr/corpus.hpp"

#include <fstream>

#include "json.hpp"

#include "icr/errors.hpp"

namespace icr::corpus {

using nlohmann::json;

namespace {

gen::CorpusRoute parse_route(const json& jr, const std::filesystem::path& dir,
                             const std::string& at, harness::MockWorld& world) {
  if (!jr.is_object() || !jr.contains("route_id") ||
      !jr["route_id"].is_string()) {
    throw ParseError(at + ".route_id: expected string");
  }
  gen::CorpusRoute route;
  route.route.route_id = jr["route_id"].get<std::string>();
  route.route.map_id = jr.value("map_id", std::string());
  route.route.sim_seed = jr.value("sim_seed", std::uint64_t{0});
  route.route.condition = jr.value("condition", std::string());

  world.sim_seed = route.route.sim_seed;
  if (jr.contains("nodes")) {
    if (!jr["nodes"].is_array()) {
      throw ParseError(at + ".nodes: expected array");
    }
    std::size_t node_index = 0;
    for (const auto& jn : jr["nodes"]) {
      const std::string nat = at + ".nodes[" + std::to_string(node_index) + "]";
      if (!jn.is_object() || !jn.contains("maneuver") ||
          !jn["maneuver"].is_string() || !jn.contains("length_m") ||
          !jn["length_m"].is_number()) {
        throw ParseError(nat + ": expected {maneuver, length_m[, hazard]}");
      }
      harness::WorldNode node;
      node.maneuver = intent::intent_from_name(jn["maneuver"].get<std::string>());
      node.length_m = jn["length_m"].get<double>();
      node.hazard = jn.value("hazard", false);
      if (!(node.length_m > 0.0)) {
        throw ParseError(nat + ".length_m: must be positive");
      }
      world.nodes.push_back(node);
      ++node_index;
    }
  }

  route.baseline =
      load_instruction_file(dir / baseline_file_name(route.route.route_id));
  if (route.baseline.route_id != route.route.route_id) {
    throw ParseError(at + ": baseline file carries route_id \"" +
                     route.baseline.route_id + "\"");
  }
  return route;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir) {
  const std::filesystem::path routes_path = dir / "routes.json";
  std::ifstream in(routes_path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + routes_path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(routes_path.string() + ": not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("routes") || !j["routes"].is_array()) {
    throw ParseError(routes_path.string() + ": routes: expected array");
  }

  Corpus corpus;
  std::size_t index = 0;
  for (const auto& jr : j["routes"]) {
    const std::string at =
        routes_path.string() + ": routes[" + std::to_string(index) + "]";
    harness::MockWorld world;
    gen::CorpusRoute route;
    try {
      route = parse_route(jr, dir, at, world);
    } catch (const json::exception& e) {
      // Wrong value types surface as json type errors, not parse errors.
      throw ParseError(at + ": " + e.what());
    }
    corpus.worlds[route.route.route_id] = std::move(world);
    corpus.routes.push_back(std::move(route));
    ++index;
  }
  return corpus;
}

}  // namespace icr::corpus
