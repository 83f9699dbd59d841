#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toposcope/errors.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/semantics.hpp"
#include "toposcope/site.hpp"

namespace toposcope {

namespace detail {

inline std::shared_ptr<const FinCat> make_terminal_site() {
  RawCategory raw;
  raw.objects = {"pt"};
  raw.morphisms = {{"id_pt", "pt", "pt"}};
  raw.identities = {{"pt", "id_pt"}};
  return std::make_shared<const FinCat>(validate_category(raw));
}

inline std::shared_ptr<const FinCat> make_sierpinski_site() {
  RawCategory raw;
  raw.objects = {"dot", "star"};
  raw.morphisms = {{"id_dot", "dot", "dot"},
                   {"id_star", "star", "star"},
                   {"u", "dot", "star"}};
  raw.identities = {{"dot", "id_dot"}, {"star", "id_star"}};
  return std::make_shared<const FinCat>(validate_category(raw));
}

// Two arcs U, V glued along two intersections W1, W2: a finite combinatorial
// stand-in for the circle's standard two-chart cover.
inline std::shared_ptr<const FinCat> make_crown_site() {
  RawCategory raw;
  raw.objects = {"U", "V", "W1", "W2"};
  raw.morphisms = {{"id_U", "U", "U"},     {"id_V", "V", "V"},
                   {"id_W1", "W1", "W1"},  {"id_W2", "W2", "W2"},
                   {"w1U", "W1", "U"},     {"w1V", "W1", "V"},
                   {"w2U", "W2", "U"},     {"w2V", "W2", "V"}};
  raw.identities = {
      {"U", "id_U"}, {"V", "id_V"}, {"W1", "id_W1"}, {"W2", "id_W2"}};
  return std::make_shared<const FinCat>(validate_category(raw));
}

// Sections of the connected double cover over the crown: the restriction
// from V to W2 carries the twist, so the two local sheets never glue into a
// global one.
inline Presheaf make_double_cover(std::shared_ptr<const FinCat> crown) {
  std::map<std::string, std::vector<std::string>> sets = {
      {"U", {"u0", "u1"}},
      {"V", {"v0", "v1"}},
      {"W1", {"0", "1"}},
      {"W2", {"0", "1"}}};
  std::map<std::string, std::map<std::string, std::string>> actions = {
      {"w1U", {{"u0", "0"}, {"u1", "1"}}},
      {"w2U", {{"u0", "0"}, {"u1", "1"}}},
      {"w1V", {{"v0", "0"}, {"v1", "1"}}},
      {"w2V", {{"v0", "1"}, {"v1", "0"}}}};
  return validate_presheaf(std::move(crown), std::move(sets), std::move(actions));
}

inline Presheaf make_triple_cover(std::shared_ptr<const FinCat> crown) {
  std::map<std::string, std::vector<std::string>> sets = {
      {"U", {"u0", "u1", "u2"}},
      {"V", {"v0", "v1", "v2"}},
      {"W1", {"0", "1", "2"}},
      {"W2", {"0", "1", "2"}}};
  std::map<std::string, std::map<std::string, std::string>> actions = {
      {"w1U", {{"u0", "0"}, {"u1", "1"}, {"u2", "2"}}},
      {"w2U", {{"u0", "0"}, {"u1", "1"}, {"u2", "2"}}},
      {"w1V", {{"v0", "0"}, {"v1", "1"}, {"v2", "2"}}},
      // the 3-cycle twist: sheet j over V meets sheet j+1 over W2
      {"w2V", {{"v0", "1"}, {"v1", "2"}, {"v2", "0"}}}};
  return validate_presheaf(std::move(crown), std::move(sets), std::move(actions));
}

inline Presheaf make_constant2(std::shared_ptr<const FinCat> crown) {
  std::map<std::string, std::vector<std::string>> sets;
  for (const std::string& obj : crown->objects) sets[obj] = {"0", "1"};
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (const Morphism& m : crown->morphisms)
    actions[m.id] = {{"0", "0"}, {"1", "1"}};
  return validate_presheaf(std::move(crown), std::move(sets), std::move(actions));
}

}  // namespace detail

inline std::vector<std::string> builtin_site_names() {
  return {"crown", "sierpinski", "terminal"};
}

inline std::shared_ptr<const FinCat> builtin_site(const std::string& name) {
  static const auto sites = [] {
    std::map<std::string, std::shared_ptr<const FinCat>> m;
    m["terminal"] = detail::make_terminal_site();
    m["sierpinski"] = detail::make_sierpinski_site();
    m["crown"] = detail::make_crown_site();
    return m;
  }();
  auto it = sites.find(name);
  if (it == sites.end())
    throw Error(ErrorKind::UnknownBuiltin, "no builtin site '" + name + "'");
  return it->second;
}

inline std::vector<std::string> builtin_names() {
  return {"crown_constant2", "crown_double_cover", "crown_plus_one",
          "crown_triple_cover", "set01", "sierpinski"};
}

inline SemanticEnvironment builtin(const std::string& name) {
  if (name == "set01") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "Classical two-point sets: A = B = {0,1}, f the identity and g the "
        "constant map at 0.";
    env.site = builtin_site("terminal");
    env.signature.sorts = {"A", "B"};
    env.signature.functions["f"] = {{"A"}, "B"};
    env.signature.functions["g"] = {{"A"}, "B"};
    Presheaf two = validate_presheaf(env.site, {{"pt", {"0", "1"}}}, {});
    env.sorts["A"] = two;
    env.sorts["B"] = two;
    env.functions.emplace(
        "f", validate_nat(two, two, {{"pt", {{"0", "0"}, {"1", "1"}}}}));
    env.functions.emplace(
        "g", validate_nat(two, two, {{"pt", {{"0", "0"}, {"1", "0"}}}}));
    return validate_environment(std::move(env));
  }
  if (name == "sierpinski") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "Presheaves on the one-arrow category: Y is the representable at "
        "star, D collapses two upper elements to one lower element.";
    env.site = builtin_site("sierpinski");
    env.signature.sorts = {"D", "Y"};
    env.sorts["Y"] = validate_presheaf(
        env.site, {{"star", {"id_star"}}, {"dot", {"u"}}},
        {{"u", {{"id_star", "u"}}}});
    env.sorts["D"] = validate_presheaf(
        env.site, {{"star", {"a", "b"}}, {"dot", {"c"}}},
        {{"u", {{"a", "c"}, {"b", "c"}}}});
    return validate_environment(std::move(env));
  }
  if (name == "crown_double_cover") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "Sections of the connected double cover over the crown: internally "
        "inhabited with no global element.";
    env.site = builtin_site("crown");
    env.signature.sorts = {"F2"};
    env.sorts["F2"] = detail::make_double_cover(env.site);
    return validate_environment(std::move(env));
  }
  if (name == "crown_triple_cover") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "Sections of the connected triple cover over the crown, twisted by a "
        "3-cycle.";
    env.site = builtin_site("crown");
    env.signature.sorts = {"F3"};
    env.sorts["F3"] = detail::make_triple_cover(env.site);
    return validate_environment(std::move(env));
  }
  if (name == "crown_plus_one") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "The double cover with a disjoint global point added: F2 + 1 has "
        "exactly one global element.";
    env.site = builtin_site("crown");
    env.signature.sorts = {"F2plus1"};
    env.sorts["F2plus1"] =
        coproduct(detail::make_double_cover(env.site), terminal(env.site)).object;
    return validate_environment(std::move(env));
  }
  if (name == "crown_constant2") {
    SemanticEnvironment env;
    env.name = name;
    env.doc =
        "The constant two-element presheaf on the crown: two global elements, "
        "same stage sizes as the double cover.";
    env.site = builtin_site("crown");
    env.signature.sorts = {"C2"};
    env.sorts["C2"] = detail::make_constant2(env.site);
    return validate_environment(std::move(env));
  }
  throw Error(ErrorKind::UnknownBuiltin, "no builtin environment '" + name + "'");
}

}  // namespace toposcope
