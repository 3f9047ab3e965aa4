#include "icr/generator.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"

#include "icr/corpus.hpp"
#include "icr/errors.hpp"
#include "test_util.hpp"

using namespace icr;
using namespace icr::gen;
using intent::IntentLabel;
using icr_test::TempDir;

namespace {

const intent::ClassifierConfig& cfg() {
  static const auto c = intent::ClassifierConfig::defaults();
  return c;
}

InstructionSequence worked_example_baseline() {
  InstructionSequence seq;
  seq.route_id = "demo";
  seq.items = {{"Proceed ahead and make a left turn.", 0.0}};
  return seq;
}

std::vector<CorpusRoute> two_routes() {
  const corpus::Corpus corpus = corpus::load_corpus(icr_test::data_dir() / "corpus");
  return {corpus.routes[0], corpus.routes[1]};
}

}  // namespace

TEST_CASE("generate_suite: 4 x 8 = 32 variants per route") {
  const VariantSuite suite = generate_suite(worked_example_baseline(),
                                            perturb::default_banks(), 8,
                                            GenerationSeed{2026}, cfg());
  std::size_t total = 0;
  for (const auto& [family, variants] : suite.families) {
    CHECK(variants.size() == 8);
    total += variants.size();
  }
  CHECK(total == 32);
  CHECK(suite.fallback_items == 0);

  // Structure preservation and provenance stamping.
  for (const auto& [family, variants] : suite.families) {
    int expected_k = 1;
    for (const auto& variant : variants) {
      CHECK(variant.items.size() == suite.baseline.items.size());
      for (std::size_t i = 0; i < variant.items.size(); ++i) {
        CHECK(variant.items[i].trigger == suite.baseline.items[i].trigger);
      }
      CHECK(variant.provenance.kind == Provenance::Kind::Generated);
      CHECK(variant.provenance.family == family);
      CHECK(variant.provenance.k == expected_k++);
      CHECK(variant.provenance.seed == 2026);
    }
  }
}

TEST_CASE("generate_suite: deterministic in the seed") {
  const auto a = generate_suite(worked_example_baseline(), perturb::default_banks(),
                                8, GenerationSeed{2026}, cfg());
  const auto b = generate_suite(worked_example_baseline(), perturb::default_banks(),
                                8, GenerationSeed{2026}, cfg());
  CHECK(a.baseline == b.baseline);
  CHECK(a.families == b.families);

  // Seed sensitivity: some sampled selection must move.
  const auto c = generate_suite(worked_example_baseline(), perturb::default_banks(),
                                8, GenerationSeed{2027}, cfg());
  CHECK(a.families != c.families);
}

TEST_CASE("generate_suite: misleading family contradicts the baseline") {
  const auto suite = generate_suite(worked_example_baseline(),
                                    perturb::default_banks(), 8,
                                    GenerationSeed{2026}, cfg());
  const auto& misleading = suite.families.at(FamilyTag::M);
  bool right_directive = false;
  for (const auto& variant : misleading) {
    const auto tokens = intent::normalize_tokens(variant.items[0].text);
    if (std::find(tokens.begin(), tokens.end(), "right") != tokens.end()) {
      right_directive = true;
    }
  }
  CHECK(right_directive);
}

TEST_CASE("generate_suite: family subset filter") {
  const auto suite =
      generate_suite(worked_example_baseline(), perturb::default_banks(), 8,
                     GenerationSeed{2026}, cfg(), {FamilyTag::M});
  CHECK(suite.families.size() == 1);
  CHECK(suite.families.count(FamilyTag::M) == 1);
}

TEST_CASE("generate_suite: consistency assertion fires on a broken bank") {
  perturb::TemplateBanks banks = perturb::default_banks();
  perturb::Template bad;
  bad.family = FamilyTag::P;
  bad.intent_key = IntentLabel::TurnLeft;
  bad.pattern = "Actually, turn right.";
  banks.paraphrase[IntentLabel::TurnLeft] = {bad};

  try {
    generate_suite(worked_example_baseline(), banks, 2, GenerationSeed{1}, cfg());
    FAIL("expected ConsistencyError");
  } catch (const ConsistencyError& e) {
    CHECK(e.family == 'P');
    CHECK(e.k >= 1);
    CHECK(e.item_index == 0);
    CHECK(e.got == "TurnRight");
    CHECK(e.want == "TurnLeft");
  }
}

TEST_CASE("generate_suite: unknown-intent items fall back to global banks") {
  InstructionSequence baseline;
  baseline.route_id = "odd";
  baseline.items = {{"Boldly venture onward, friend.", 0.0}};
  CHECK(intent::classify_intent(baseline.items[0].text, cfg()) ==
        IntentLabel::Unknown);

  const auto suite = generate_suite(baseline, perturb::default_banks(), 8,
                                    GenerationSeed{2026}, cfg());
  CHECK(suite.fallback_items > 0);
  std::size_t total = 0;
  for (const auto& [family, variants] : suite.families) total += variants.size();
  CHECK(total == 32);
  // Paraphrase fallback preserves the original wording.
  for (const auto& variant : suite.families.at(FamilyTag::P)) {
    CHECK(variant.items[0].text.find("Boldly venture onward, friend.") !=
          std::string::npos);
  }
}

TEST_CASE("property: family constraints hold across seeds") {
  // The generation assertions must never fire for the bundled corpus and
  // banks, whatever the seed steers the noise edits into.
  const corpus::Corpus corpus = corpus::load_corpus(icr_test::data_dir() / "corpus");
  for (std::uint64_t seed : {1ull, 7ull, 99ull, 1234ull, 2026ull, 424242ull}) {
    for (const auto& route : corpus.routes) {
      const auto suite = generate_suite(route.baseline, perturb::default_banks(),
                                        8, GenerationSeed{seed}, cfg());
      const auto intents = intent::classify_sequence(route.baseline, cfg());
      for (const auto& variant : suite.families.at(FamilyTag::A)) {
        for (const auto& item : variant.items) {
          CHECK(!perturb::has_qualifier_token(item.text));
        }
      }
      for (const auto& variant : suite.families.at(FamilyTag::N)) {
        CHECK(intent::intent_consistent(variant, intents, cfg()));
      }
    }
  }
}

TEST_CASE("generate_corpus: files, manifest, and order independence") {
  TempDir out1("gen"), out2("gen");
  GenerateOptions options;
  options.k = 8;
  options.seed = GenerationSeed{2026};

  const SuiteManifest manifest = generate_corpus(
      two_routes(), perturb::default_banks(), options, cfg(), out1.path());

  // 2 routes x 32 variants + 2 baseline copies + manifest.
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out1.path())) {
    if (entry.is_regular_file()) ++files;
  }
  CHECK(files == 64 + 2 + 1);
  CHECK(manifest.entries.size() == 66);
  CHECK(manifest.failures.empty());
  CHECK(manifest.seed == 2026);
  CHECK(manifest.bank_version == "default-1");

  // Manifest hashes match bytes on disk.
  for (const auto& entry : manifest.entries) {
    const std::string bytes = icr_test::read_file(out1.path() / entry.path);
    CHECK(content_hash(bytes) == entry.content_hash);
  }

  // Worker count cannot change a single byte.
  GenerateOptions parallel = options;
  parallel.jobs = 8;
  generate_corpus(two_routes(), perturb::default_banks(), parallel, cfg(),
                  out2.path());
  for (const auto& entry : std::filesystem::directory_iterator(out1.path())) {
    const auto name = entry.path().filename();
    CHECK(icr_test::read_file(out1.path() / name) ==
          icr_test::read_file(out2.path() / name));
  }

  // Manifest serialization round-trips.
  const std::string bytes = serialize_manifest(manifest);
  const SuiteManifest back = parse_manifest(bytes);
  CHECK(serialize_manifest(back) == bytes);
}

TEST_CASE("generate_corpus: duplicate route ids rejected") {
  auto routes = two_routes();
  routes.push_back(routes[0]);
  TempDir out("gen");
  GenerateOptions options;
  CHECK_THROWS_AS(generate_corpus(routes, perturb::default_banks(), options,
                                  cfg(), out.path()),
                  DuplicateRouteError);
}

TEST_CASE("generate_corpus: fallback routes are flagged in the manifest") {
  auto routes = two_routes();
  routes[1].baseline.items[0].text = "Boldly venture onward, friend.";
  TempDir out("gen");
  GenerateOptions options;
  const SuiteManifest manifest = generate_corpus(
      routes, perturb::default_banks(), options, cfg(), out.path());
  CHECK(manifest.failures.empty());
  REQUIRE(manifest.flagged.size() == 1);
  CHECK(manifest.flagged[0].first == routes[1].route.route_id);
  CHECK(manifest.flagged[0].second > 0);
  const std::string bytes = icr_test::read_file(out.path() / "manifest.json");
  CHECK(bytes.find("fallback_items") != std::string::npos);
}

TEST_CASE("generate_corpus: per-route failures collected, not fatal") {
  auto routes = two_routes();
  routes[1].baseline.items[0].text = "Boldly venture onward, friend.";
  perturb::TemplateBanks banks = perturb::default_banks();
  banks.paraphrase_fallback.clear();  // force a failure for route 2 only

  TempDir out("gen");
  GenerateOptions options;
  const SuiteManifest manifest =
      generate_corpus(routes, banks, options, cfg(), out.path());
  REQUIRE(manifest.failures.size() == 1);
  CHECK(manifest.failures[0].route_id == routes[1].route.route_id);
  // The healthy route still emitted its full suite.
  std::size_t route1_files = 0;
  for (const auto& entry : manifest.entries) {
    if (entry.route_id == routes[0].route.route_id) ++route1_files;
  }
  CHECK(route1_files == 33);
}

TEST_CASE("validate_external_suite: accepts its own output") {
  TempDir out("gen");
  GenerateOptions options;
  const auto routes = two_routes();
  generate_corpus(routes, perturb::default_banks(), options, cfg(), out.path());

  for (const auto& route : routes) {
    const ValidationReport report =
        validate_external_suite(out.path(), route.baseline, cfg());
    CHECK(report.files.size() == 32);
    CHECK(report.n_failed == 0);
    CHECK(report.n_passed == 32);
  }
}

TEST_CASE("validate_external_suite: rejects constructed violations") {
  TempDir dir("validate");
  const auto routes = two_routes();
  const InstructionSequence& baseline = routes[0].baseline;

  // Intent-flipping "paraphrase".
  InstructionSequence flipped = baseline;
  flipped.provenance = Provenance::external("llm");
  flipped.items[1].text = "Proceed ahead and make a right turn.";
  save_instruction_file(flipped,
                        dir.path() / variant_file_name(baseline.route_id,
                                                       FamilyTag::P, 1));

  // Structure-altering variant (extra item).
  InstructionSequence extended = baseline;
  extended.provenance = Provenance::external("llm");
  extended.items.push_back({"Then stop.", 99.0});
  save_instruction_file(extended,
                        dir.path() / variant_file_name(baseline.route_id,
                                                       FamilyTag::P, 2));

  // Qualifier-bearing "ambiguity".
  InstructionSequence leaky = baseline;
  leaky.provenance = Provenance::external("llm");
  for (auto& item : leaky.items) item.text = "Make a turn up ahead.";
  leaky.items[0].text = "Make a left turn somewhere.";
  save_instruction_file(leaky,
                        dir.path() / variant_file_name(baseline.route_id,
                                                       FamilyTag::A, 1));

  // A healthy paraphrase produced by the toolkit itself.
  const auto suite = generate_suite(baseline, perturb::default_banks(), 1,
                                    GenerationSeed{2026}, cfg());
  save_instruction_file(suite.families.at(FamilyTag::P)[0],
                        dir.path() / variant_file_name(baseline.route_id,
                                                       FamilyTag::P, 3));

  // Unreadable candidate.
  icr_test::write_file(dir.path() / variant_file_name(baseline.route_id,
                                                      FamilyTag::N, 1),
                       "{not json");

  const ValidationReport report =
      validate_external_suite(dir.path(), baseline, cfg());
  REQUIRE(report.files.size() == 5);

  auto find = [&](const std::string& name) {
    const auto it = std::find_if(
        report.files.begin(), report.files.end(),
        [&](const FileValidation& fv) { return fv.file == name; });
    REQUIRE(it != report.files.end());
    return *it;
  };

  const auto flip = find(variant_file_name(baseline.route_id, FamilyTag::P, 1));
  CHECK(!flip.passed);
  CHECK(flip.reasons == std::vector<std::string>{kReasonIntentInconsistent});

  const auto extra = find(variant_file_name(baseline.route_id, FamilyTag::P, 2));
  CHECK(!extra.passed);
  CHECK(extra.reasons == std::vector<std::string>{kReasonStructureNotPreserved});

  const auto qualifier =
      find(variant_file_name(baseline.route_id, FamilyTag::A, 1));
  CHECK(!qualifier.passed);
  CHECK(qualifier.reasons == std::vector<std::string>{kReasonQualifierPresent});

  const auto healthy = find(variant_file_name(baseline.route_id, FamilyTag::P, 3));
  CHECK(healthy.passed);

  const auto broken = find(variant_file_name(baseline.route_id, FamilyTag::N, 1));
  CHECK(!broken.passed);
  CHECK(broken.reasons == std::vector<std::string>{kReasonSchemaInvalid});
}

TEST_CASE("corpus loader validates route pairing") {
  const corpus::Corpus corpus = corpus::load_corpus(icr_test::data_dir() / "corpus");
  CHECK(corpus.routes.size() == 6);
  CHECK(corpus.worlds.size() == 6);
  for (const auto& route : corpus.routes) {
    CHECK(route.route.route_id == route.baseline.route_id);
    const auto& world = corpus.worlds.at(route.route.route_id);
    CHECK(world.nodes.size() == route.baseline.items.size());
    CHECK(world.sim_seed == route.route.sim_seed);
  }
}
