#pragma once

#include <string>
#include <vector>

#include "toposcope/forcing.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/parser.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/semantics.hpp"
#include "toposcope/typecheck.hpp"

namespace toposcope {

struct Fact {
  std::string name;
  std::string value;
  std::string expected;
  bool ok = false;
};

struct Claim {
  std::string label;
  std::vector<Fact> facts;
  bool pass = false;
};

struct Report {
  std::vector<Claim> claims;
  bool pass = false;
};

namespace detail {

inline Fact fact(std::string name, std::string value, std::string expected) {
  bool ok = value == expected;
  return Fact{std::move(name), std::move(value), std::move(expected), ok};
}

inline void finish(Claim& c) {
  c.pass = true;
  for (const Fact& f : c.facts) c.pass = c.pass && f.ok;
}

}  // namespace detail

// Same objects, same names, same existence facts, different arrows.
inline Claim claim_meaning_beyond_names(const SemanticEnvironment& env) {
  Claim c;
  c.label =
      "meaning: same objects, names, and existence facts admit different arrows";
  const Presheaf& a = env.sort("A");
  const Presheaf& b = env.sort("B");
  c.facts.push_back(detail::fact(
      "global elements of A", std::to_string(global_elements(a).size()), "2"));
  c.facts.push_back(detail::fact(
      "global elements of B", std::to_string(global_elements(b).size()), "2"));
  c.facts.push_back(detail::fact(
      "A and B internally inhabited",
      is_inhabited_internally(a) && is_inhabited_internally(b) ? "true" : "false",
      "true"));
  c.facts.push_back(detail::fact(
      "f and g denote different arrows",
      env.functions.at("f") == env.functions.at("g") ? "false" : "true", "true"));
  detail::finish(c);
  return c;
}

// Adding a disjoint point changes the stock of names and nothing at the
// existence level.
inline Claim claim_names_beyond_the_rest(const Presheaf& cover) {
  Claim c;
  c.label = "name: a coproduct with 1 creates a name without changing existence";
  Presheaf plus_one = coproduct(cover, terminal(cover.site)).object;
  c.facts.push_back(detail::fact("global elements of the cover",
                                 std::to_string(global_elements(cover).size()),
                                 "0"));
  c.facts.push_back(detail::fact("global elements of cover + 1",
                                 std::to_string(global_elements(plus_one).size()),
                                 "1"));
  c.facts.push_back(detail::fact(
      "both internally inhabited",
      is_inhabited_internally(cover) && is_inhabited_internally(plus_one)
          ? "true"
          : "false",
      "true"));
  detail::finish(c);
  return c;
}

// Internal existence without a single global name, checked through both the
// epi criterion and the forcing evaluator.
inline Claim claim_existence_beyond_names(const SemanticEnvironment& env,
                                          const std::string& sort) {
  Claim c;
  c.label = "existence: internally inhabited yet without any global name";
  const Presheaf& a = env.sort(sort);
  c.facts.push_back(detail::fact("unique map to 1 is epi",
                                 is_inhabited_internally(a) ? "true" : "false",
                                 "true"));
  Formula f = typecheck(parse_formula("exists x:" + sort + ". true"),
                        env.signature, {});
  c.facts.push_back(detail::fact("forcing: exists x:" + sort + ". true",
                                 holds_globally(env, f) ? "true" : "false",
                                 "true"));
  c.facts.push_back(detail::fact(
      "global elements", std::to_string(global_elements(a).size()), "0"));
  detail::finish(c);
  return c;
}

// Non-isomorphic objects with the same name profile.
inline Claim claim_objects_beyond_profiles(const Presheaf& cover) {
  Claim c;
  c.label = "object: equal name profiles do not determine the object";
  Presheaf doubled = coproduct(cover, cover).object;
  c.facts.push_back(detail::fact(
      "cover and cover + cover isomorphic",
      find_isomorphism(cover, doubled) ? "true" : "false", "false"));
  c.facts.push_back(detail::fact(
      "global element counts",
      std::to_string(global_elements(cover).size()) + " vs " +
          std::to_string(global_elements(doubled).size()),
      "0 vs 0"));
  c.facts.push_back(detail::fact(
      "both internally inhabited",
      is_inhabited_internally(cover) && is_inhabited_internally(doubled)
          ? "true"
          : "false",
      "true"));
  detail::finish(c);
  return c;
}

inline Report demo_independence() {
  Report r;
  SemanticEnvironment set01 = builtin("set01");
  SemanticEnvironment crown = builtin("crown_double_cover");
  const Presheaf& cover = crown.sort("F2");
  r.claims.push_back(claim_meaning_beyond_names(set01));
  r.claims.push_back(claim_names_beyond_the_rest(cover));
  r.claims.push_back(claim_existence_beyond_names(crown, "F2"));
  r.claims.push_back(claim_objects_beyond_profiles(cover));
  r.pass = true;
  for (const Claim& c : r.claims) r.pass = r.pass && c.pass;
  return r;
}

inline std::string render_report(const Report& r) {
  std::string out;
  out += "independence of meaning, object, name, and existence\n";
  out += "====================================================\n\n";
  out += "  level     | notion    | reading in presheaves\n";
  out += "  ----------+-----------+--------------------------------------\n";
  out += "  object    | object    | the presheaf interpreting a sort\n";
  out += "  morphism  | meaning   | the arrow interpreting a term\n";
  out += "  element   | name      | a global element 1 -> A\n";
  out += "  internal  | existence | exists x:A. true in the internal logic\n\n";
  for (std::size_t i = 0; i < r.claims.size(); ++i) {
    const Claim& c = r.claims[i];
    out += "claim " + std::to_string(i + 1) + ": " + c.label + "\n";
    for (const Fact& f : c.facts) {
      out += std::string("  [") + (f.ok ? "ok" : "!!") + "] " + f.name + " = " +
             f.value;
      if (!f.ok) out += " (expected " + f.expected + ")";
      out += "\n";
    }
    out += std::string("  verdict: ") + (c.pass ? "PASS" : "FAIL") + "\n\n";
  }
  out += std::string("overall: ") + (r.pass ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace toposcope
