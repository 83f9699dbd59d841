#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/subobject.hpp"

using namespace toposcope;

namespace {

Presheaf f2() { return builtin("crown_double_cover").sort("F2"); }
Presheaf c2() { return builtin("crown_constant2").sort("C2"); }
Presheaf set_two() { return builtin("set01").sort("A"); }

}  // namespace

TEST_CASE("presheaf validation") {
  auto crown = builtin_site("crown");
  SECTION("the constant singleton presheaf is valid at every stage") {
    Presheaf one = terminal(crown);
    for (const std::string& obj : crown->objects)
      CHECK(one.at(obj) == std::vector<std::string>{"*"});
    CHECK(check_presheaf(one));
  }
  SECTION("the double cover validates") { CHECK(check_presheaf(f2())); }
  SECTION("identity action that is not the identity map is rejected") {
    auto site = builtin_site("terminal");
    CHECK_THROWS_MATCHES(
        validate_presheaf(site, {{"pt", {"0", "1"}}},
                          {{"id_pt", {{"0", "1"}, {"1", "0"}}}}),
        Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
          return e.kind() == ErrorKind::NonFunctorial;
        }));
  }
  SECTION("action landing outside its stage is rejected") {
    auto site = builtin_site("sierpinski");
    CHECK_THROWS_MATCHES(
        validate_presheaf(site, {{"star", {"s"}}, {"dot", {"d"}}},
                          {{"u", {{"s", "nope"}}}}),
        Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
          return e.kind() == ErrorKind::ActionTypeError;
        }));
  }
  SECTION("composite action disagreeing with its factors is rejected") {
    auto chain = std::make_shared<const FinCat>(support::make_chain_cat());
    std::map<std::string, std::vector<std::string>> sets = {
        {"a", {"0", "1"}}, {"b", {"0", "1"}}, {"c", {"0", "1"}}};
    std::map<std::string, std::map<std::string, std::string>> actions = {
        {"f", {{"0", "0"}, {"1", "1"}}},
        {"g", {{"0", "0"}, {"1", "1"}}},
        {"gf", {{"0", "1"}, {"1", "0"}}}};
    CHECK_THROWS_MATCHES(
        validate_presheaf(chain, sets, actions), Error,
        Catch::Matchers::Predicate<Error>(
            [](const Error& e) { return e.kind() == ErrorKind::NonFunctorial; }));
    actions.erase("gf");  // the composite action derives from the factors
    Presheaf p = validate_presheaf(chain, sets, actions);
    CHECK(p.act("gf", "0") == "0");
  }
}

TEST_CASE("terminal presheaf is terminal") {
  auto crown = builtin_site("crown");
  Presheaf one = terminal(crown);
  for (const Presheaf& a : {f2(), c2(), one})
    CHECK(enumerate_homs(a, one).size() == 1);
  // the empty presheaf is initial: one map out, none in from inhabited ones
  Presheaf empty = empty_presheaf(crown);
  CHECK(enumerate_homs(empty, f2()).size() == 1);
  CHECK(enumerate_homs(f2(), empty).empty());
}

TEST_CASE("global elements") {
  SECTION("a two-point set has two points") {
    CHECK(global_elements(set_two()).size() == 2);
  }
  SECTION("the twisted double cover has none, by brute force and by search") {
    Presheaf cover = f2();
    // oracle: check all sixteen candidate families directly on the tables
    int compatible = 0;
    for (std::string u : {"u0", "u1"})
      for (std::string v : {"v0", "v1"})
        for (std::string w1 : {"0", "1"})
          for (std::string w2 : {"0", "1"}) {
            bool ok = cover.act("w1U", u) == w1 && cover.act("w1V", v) == w1 &&
                      cover.act("w2U", u) == w2 && cover.act("w2V", v) == w2;
            if (ok) ++compatible;
          }
    CHECK(compatible == 0);
    CHECK(global_elements(cover).empty());
  }
  SECTION("the constant two-element presheaf has the two constant families") {
    std::vector<NatTrans> points = global_elements(c2());
    REQUIRE(points.size() == 2);
    for (const NatTrans& p : points) {
      const std::string& at_u = p.apply("U", "*");
      for (std::string obj : {"V", "W1", "W2"})
        CHECK(p.apply(obj, "*") == at_u);
    }
  }
  SECTION("product of counts") {
    Presheaf cover = f2();
    Presheaf constant = c2();
    auto count = [](const Presheaf& p) { return global_elements(p).size(); };
    CHECK(count(product(cover, constant).object) == count(cover) * count(constant));
    CHECK(count(product(constant, constant).object) ==
          count(constant) * count(constant));
  }
  SECTION("coproduct of counts on a connected site") {
    Presheaf cover = f2();
    Presheaf constant = c2();
    auto count = [](const Presheaf& p) { return global_elements(p).size(); };
    CHECK(count(coproduct(cover, constant).object) ==
          count(cover) + count(constant));
    CHECK(count(coproduct(constant, constant).object) == 2 * count(constant));
  }
}

TEST_CASE("epi, mono, inhabitedness") {
  auto crown = builtin_site("crown");
  Presheaf cover = f2();
  Presheaf empty = empty_presheaf(crown);
  SECTION("the unique map from the double cover to 1 is epi") {
    CHECK(is_epi(bang(cover)));
  }
  SECTION("identities are epi and mono") {
    CHECK(is_epi(identity_nat(cover)));
    CHECK(is_mono(identity_nat(cover)));
  }
  SECTION("the map from the empty presheaf to 1 is not epi") {
    CHECK_FALSE(is_epi(bang(empty)));
    CHECK(is_mono(bang(empty)));
  }
  SECTION("a constant map on a two-point set is not mono") {
    SemanticEnvironment env = builtin("set01");
    CHECK_FALSE(is_mono(env.functions.at("g")));
    CHECK(is_mono(env.functions.at("f")));
  }
  SECTION("subobject inclusions are mono") {
    // u1 restricts to sheet 1 on both intersections; no v survives
    std::map<std::string, std::set<std::string>> parts = {
        {"U", {"u1"}}, {"V", {}}, {"W1", {"1"}}, {"W2", {"1"}}};
    Subobject closed = validate_subobject(cover, parts);
    CHECK(is_mono(sub_inclusion(closed)));
  }
  SECTION("inhabitedness agrees with the epi criterion and with nonemptiness") {
    CHECK(is_inhabited_internally(cover));
    CHECK_FALSE(is_inhabited_internally(empty));
    CHECK(is_inhabited_internally(set_two()));
    std::mt19937 rng(7);
    for (int i = 0; i < 60; ++i) {
      Presheaf p = support::random_presheaf(crown, 3, rng);
      bool nonempty = true;
      for (const auto& [obj, labels] : p.sets) nonempty = nonempty && !labels.empty();
      CHECK(is_inhabited_internally(p) == nonempty);
      CHECK(is_epi(bang(p)) == nonempty);
    }
  }
}

TEST_CASE("products") {
  Presheaf cover = f2();
  SECTION("A x 1 is isomorphic to A") {
    Product p = product(cover, terminal(cover.site));
    CHECK(find_isomorphism(p.object, cover).has_value());
  }
  SECTION("stages multiply") {
    CHECK(product(cover, cover).object.at("U").size() == 4);
  }
  SECTION("in the one-object case the product is the cartesian product") {
    Presheaf two = set_two();
    Product p = product(two, two);
    CHECK(p.object.at("pt").size() == 4);
    CHECK(p.object.has_element("pt", "(0,1)"));
  }
  SECTION("pairing satisfies the projection laws and is unique") {
    Presheaf constant = c2();
    Product p = product(cover, constant);
    // maps into the product from the double cover
    std::vector<NatTrans> into_a = enumerate_homs(cover, cover);
    std::vector<NatTrans> into_b = enumerate_homs(cover, constant);
    REQUIRE(!into_a.empty());
    REQUIRE(!into_b.empty());
    for (std::size_t i = 0; i < std::min<std::size_t>(3, into_a.size()); ++i)
      for (std::size_t j = 0; j < std::min<std::size_t>(3, into_b.size()); ++j) {
        NatTrans paired = pairing(into_a[i], into_b[j]);
        CHECK(compose(p.proj1, paired) == into_a[i]);
        CHECK(compose(p.proj2, paired) == into_b[j]);
        int matching = 0;
        for (const NatTrans& q : enumerate_homs(cover, p.object))
          if (compose(p.proj1, q) == into_a[i] && compose(p.proj2, q) == into_b[j])
            ++matching;
        CHECK(matching == 1);
      }
  }
  SECTION("sites must match") {
    CHECK_THROWS_AS(product(f2(), set_two()), Error);
  }
}

TEST_CASE("coproducts") {
  Presheaf cover = f2();
  SECTION("adding a global point creates exactly one compatible family") {
    Presheaf plus_one = coproduct(cover, terminal(cover.site)).object;
    // oracle: walk all 3^4 families over the tagged stages directly
    int compatible = 0;
    for (const std::string& u : plus_one.at("U"))
      for (const std::string& v : plus_one.at("V"))
        for (const std::string& w1 : plus_one.at("W1"))
          for (const std::string& w2 : plus_one.at("W2")) {
            bool ok = plus_one.act("w1U", u) == w1 &&
                      plus_one.act("w1V", v) == w1 &&
                      plus_one.act("w2U", u) == w2 &&
                      plus_one.act("w2V", v) == w2;
            if (ok) ++compatible;
          }
    CHECK(compatible == 1);
    CHECK(global_elements(plus_one).size() == 1);
  }
  SECTION("empty + A is isomorphic to A") {
    Presheaf empty = empty_presheaf(cover.site);
    CHECK(find_isomorphism(coproduct(empty, cover).object, cover).has_value());
  }
  SECTION("stages add") {
    CHECK(coproduct(cover, cover).object.at("W1").size() == 4);
  }
  SECTION("injections are mono") {
    Coproduct c = coproduct(cover, c2());
    CHECK(is_mono(c.inj1));
    CHECK(is_mono(c.inj2));
  }
}

TEST_CASE("composition helpers") {
  Presheaf cover = f2();
  Presheaf constant = c2();
  std::vector<NatTrans> maps = enumerate_homs(cover, constant);
  REQUIRE(!maps.empty());
  const NatTrans& alpha = maps.front();
  SECTION("identity laws") {
    CHECK(compose(identity_nat(constant), alpha) == alpha);
    CHECK(compose(alpha, identity_nat(cover)) == alpha);
  }
  SECTION("terminal uniqueness") {
    CHECK(compose(bang(constant), alpha) == bang(cover));
  }
  SECTION("non-composable pairs are rejected") {
    CHECK_THROWS_AS(compose(alpha, alpha), Error);
  }
}

TEST_CASE("isomorphism search") {
  Presheaf cover = f2();
  Presheaf constant = c2();
  SECTION("every presheaf is isomorphic to itself via the identity") {
    auto self = find_isomorphism(cover, cover);
    REQUIRE(self.has_value());
    CHECK(*self == identity_nat(cover));
  }
  SECTION("stage cardinality obstruction") {
    CHECK_FALSE(find_isomorphism(cover, coproduct(cover, cover).object));
  }
  SECTION("cover vs constant: same stages, different global elements") {
    // oracle: try all 2^4 componentwise bijections by hand
    const std::vector<std::string> objs = {"U", "V", "W1", "W2"};
    int natural = 0;
    for (int mask = 0; mask < 16; ++mask) {
      std::map<std::string, std::map<std::string, std::string>> comps;
      for (std::size_t o = 0; o < objs.size(); ++o) {
        const auto& dom = cover.at(objs[o]);
        const auto& cod = constant.at(objs[o]);
        bool swap = mask & (1 << o);
        comps[objs[o]][dom[0]] = cod[swap ? 1 : 0];
        comps[objs[o]][dom[1]] = cod[swap ? 0 : 1];
      }
      if (check_naturality(NatTrans{cover, constant, comps})) ++natural;
    }
    CHECK(natural == 0);
    CHECK_FALSE(find_isomorphism(cover, constant));
  }
  SECTION("agreement with brute force on all small presheaves") {
    // all presheaves with stages <= 3 over the sierpinski and terminal sites
    auto brute_iso = [](const Presheaf& a, const Presheaf& b) {
      for (const std::string& obj : a.site->objects)
        if (a.at(obj).size() != b.at(obj).size()) return false;
      // odometer over tuples of componentwise bijections
      std::vector<std::string> objs = a.site->objects;
      std::vector<std::vector<int>> perms;  // flattened permutation choices
      std::vector<std::vector<std::vector<int>>> all_perms(objs.size());
      for (std::size_t o = 0; o < objs.size(); ++o) {
        std::vector<int> p(a.at(objs[o]).size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = int(i);
        do {
          all_perms[o].push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
      }
      std::vector<std::size_t> idx(objs.size(), 0);
      while (true) {
        std::map<std::string, std::map<std::string, std::string>> comps;
        for (std::size_t o = 0; o < objs.size(); ++o) {
          auto& table = comps[objs[o]];
          const auto& dom = a.at(objs[o]);
          const auto& cod = b.at(objs[o]);
          for (std::size_t i = 0; i < dom.size(); ++i)
            table[dom[i]] = cod[all_perms[o][idx[o]][i]];
        }
        if (check_naturality(NatTrans{a, b, comps})) return true;
        std::size_t o = 0;
        for (; o < objs.size(); ++o) {
          if (++idx[o] < all_perms[o].size()) break;
          idx[o] = 0;
        }
        if (o == objs.size()) return false;
      }
    };

    for (const char* site_name : {"sierpinski", "terminal"}) {
      auto site = builtin_site(site_name);
      // enumerate every presheaf with stages <= 3 (labels are canonical)
      std::vector<Presheaf> all;
      std::vector<std::string> objs = site->objects;
      std::vector<int> sizes(objs.size(), 0);
      while (true) {
        std::map<std::string, std::vector<std::string>> sets;
        for (std::size_t o = 0; o < objs.size(); ++o) {
          auto& labels = sets[objs[o]];
          for (int i = 0; i < sizes[o]; ++i) labels.push_back(std::to_string(i));
        }
        // actions for each non-identity morphism
        std::vector<const Morphism*> arrows;
        for (const Morphism& m : site->morphisms)
          if (site->identity(m.src) != m.id) arrows.push_back(&m);
        std::vector<std::map<std::string, std::string>> tables(arrows.size());
        std::function<void(std::size_t)> fill = [&](std::size_t k) {
          if (k == arrows.size()) {
            std::map<std::string, std::map<std::string, std::string>> actions;
            for (std::size_t i = 0; i < arrows.size(); ++i)
              actions[arrows[i]->id] = tables[i];
            try {
              all.push_back(validate_presheaf(site, sets, actions));
            } catch (const Error&) {
            }
            return;
          }
          const auto& dom = sets[arrows[k]->tgt];
          const auto& cod = sets[arrows[k]->src];
          if (dom.empty()) {
            tables[k] = {};
            fill(k + 1);
            return;
          }
          if (cod.empty()) return;
          std::vector<std::size_t> choice(dom.size(), 0);
          while (true) {
            for (std::size_t i = 0; i < dom.size(); ++i)
              tables[k][dom[i]] = cod[choice[i]];
            fill(k + 1);
            std::size_t i = 0;
            for (; i < dom.size(); ++i) {
              if (++choice[i] < cod.size()) break;
              choice[i] = 0;
            }
            if (i == dom.size()) break;
          }
        };
        fill(0);
        std::size_t o = 0;
        for (; o < objs.size(); ++o) {
          if (++sizes[o] <= 3) break;
          sizes[o] = 0;
        }
        if (o == objs.size()) break;
      }
      for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i; j < all.size(); ++j) {
          bool expected = brute_iso(all[i], all[j]);
          bool actual = find_isomorphism(all[i], all[j]).has_value();
          REQUIRE(expected == actual);
        }
    }
  }
}
