#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "support.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/io.hpp"

using namespace toposcope;

namespace {
const std::filesystem::path kFixtures = TOPOSCOPE_FIXTURES_DIR;
}

TEST_CASE("site files") {
  SECTION("round-trip of the crown") {
    auto crown = builtin_site("crown");
    FinCat reloaded = site_from_json(site_to_json(*crown));
    CHECK(reloaded == *crown);
  }
  SECTION("identities auto-generate") {
    Json j = Json::parse(R"({
      "objects": ["dot", "star"],
      "morphisms": [{"id": "u", "src": "dot", "tgt": "star"}],
      "compose": []
    })");
    FinCat cat = site_from_json(j);
    CHECK(cat.morphisms.size() == 3);
    CHECK(cat.identity("dot") == "id_dot");
    CHECK(cat == *builtin_site("sierpinski"));
  }
  SECTION("unknown keys are rejected") {
    Json j = Json::parse(R"({"objects": ["a"], "extra": 1})");
    CHECK_THROWS_MATCHES(site_from_json(j), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::BadFormat;
                         }));
  }
  SECTION("fixture site with an explicit composite loads") {
    auto chain = load_site((kFixtures / "sites" / "chain.json").string());
    CHECK(*chain == support::make_chain_cat());
  }
  SECTION("builtin names win over paths") {
    CHECK(*load_site("crown") == *builtin_site("crown"));
    CHECK_THROWS_AS(load_site("missing_site"), Error);
  }
}

TEST_CASE("presheaf files") {
  SECTION("fixture double cover equals the builtin") {
    Presheaf loaded =
        load_presheaf((kFixtures / "presheaves" / "double_cover.json").string());
    Presheaf cover = builtin("crown_double_cover").sort("F2");
    CHECK(loaded.sets == cover.sets);
    CHECK(loaded.actions == cover.actions);
  }
  SECTION("round-trip through JSON") {
    Presheaf cover = builtin("crown_double_cover").sort("F2");
    Json j = presheaf_to_json(cover, "crown");
    Presheaf back = presheaf_from_json(j, ".");
    CHECK(back == cover);
  }
  SECTION("invalid actions are rejected on load") {
    Json j = Json::parse(R"({
      "site": "sierpinski",
      "sets": {"star": ["s"], "dot": ["d"]},
      "actions": {"u": {"s": "nowhere"}}
    })");
    CHECK_THROWS_AS(presheaf_from_json(j, "."), Error);
  }
}

TEST_CASE("transformation and subobject files") {
  Presheaf cover = builtin("crown_double_cover").sort("F2");
  SECTION("a natural transformation round-trips with inline endpoints") {
    NatTrans b = bang(cover);
    Json j;
    j["src"] = presheaf_to_json(b.src, "crown");
    j["tgt"] = presheaf_to_json(b.tgt, "crown");
    j["components"] = nat_components_to_json(b);
    NatTrans back = nat_from_json(j, ".");
    CHECK(back == b);
  }
  SECTION("naturality violations in files are rejected") {
    Presheaf constant = builtin("crown_constant2").sort("C2");
    Json j;
    j["src"] = presheaf_to_json(cover, "crown");
    j["tgt"] = presheaf_to_json(constant, "crown");
    Json comps = Json::object();
    for (const std::string& obj : cover.site->objects) {
      Json table = Json::object();
      for (const std::string& x : cover.at(obj)) table[x] = "0";
      comps[obj] = table;
    }
    // constant components break naturality against the twist
    comps["U"]["u1"] = "1";
    j["components"] = comps;
    CHECK_THROWS_MATCHES(nat_from_json(j, "."), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::NonNatural;
                         }));
  }
  SECTION("subobjects round-trip and closure is enforced") {
    Subobject s =
        validate_subobject(cover, {{"U", {"u1"}}, {"W1", {"1"}}, {"W2", {"1"}}});
    Json j;
    j["ambient"] = presheaf_to_json(cover, "crown");
    j["parts"] = sub_parts_to_json(s);
    CHECK(sub_from_json(j, ".") == s);
    j["parts"] = Json::parse(R"({"U": ["u0"]})");
    CHECK_THROWS_AS(sub_from_json(j, "."), Error);
  }
}

TEST_CASE("environment files") {
  SECTION("fixture environment loads and evaluates") {
    SemanticEnvironment env =
        load_environment((kFixtures / "envs" / "double_cover.json").string());
    CHECK(env.site->objects.size() == 4);
    CHECK(global_elements(env.sort("F2")).empty());
  }
  SECTION("builtin references resolve before files") {
    SemanticEnvironment env = load_environment("crown_double_cover");
    CHECK(env.name == "crown_double_cover");
  }
  SECTION("unknown references fail with UnknownBuiltin") {
    CHECK_THROWS_MATCHES(load_environment("nowhere.json"), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::UnknownBuiltin;
                         }));
  }
  SECTION("unknown keys in environments are rejected") {
    Json j = Json::parse(R"({"site": "crown", "sortz": {}})");
    CHECK_THROWS_AS(environment_from_json(j, "."), Error);
  }
}
