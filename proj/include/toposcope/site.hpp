#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"

namespace toposcope {

struct Morphism {
  std::string id;
  std::string src;
  std::string tgt;

  bool operator==(const Morphism&) const = default;
};

// A finite category with an explicit composition table. Objects and
// morphisms are kept sorted by id, so every enumeration downstream is
// deterministic. `composites` maps (g, f) to g-after-f and is total on
// composable pairs, identity rows included.
struct FinCat {
  std::vector<std::string> objects;
  std::vector<Morphism> morphisms;
  std::map<std::string, std::string> identities;  // object -> identity morphism
  std::map<std::pair<std::string, std::string>, std::string> composites;

  bool operator==(const FinCat&) const = default;

  bool has_object(const std::string& c) const {
    return std::binary_search(objects.begin(), objects.end(), c);
  }

  bool has_morphism(const std::string& id) const {
    auto it = std::lower_bound(
        morphisms.begin(), morphisms.end(), id,
        [](const Morphism& m, const std::string& s) { return m.id < s; });
    return it != morphisms.end() && it->id == id;
  }

  const Morphism& morphism(const std::string& id) const {
    auto it = std::lower_bound(
        morphisms.begin(), morphisms.end(), id,
        [](const Morphism& m, const std::string& s) { return m.id < s; });
    if (it == morphisms.end() || it->id != id)
      throw Error(ErrorKind::UnknownMorphism, "no morphism '" + id + "'");
    return *it;
  }

  const std::string& identity(const std::string& c) const {
    auto it = identities.find(c);
    if (it == identities.end())
      throw Error(ErrorKind::UnknownObject, "no object '" + c + "'");
    return it->second;
  }

  bool is_identity(const std::string& id) const {
    const Morphism& m = morphism(id);
    return identities.at(m.src) == id;
  }

  const std::string* try_compose(const std::string& g,
                                 const std::string& f) const {
    auto it = composites.find({g, f});
    return it == composites.end() ? nullptr : &it->second;
  }

  // g after f; throws if the pair is not composable.
  const std::string& compose(const std::string& g, const std::string& f) const {
    const std::string* r = try_compose(g, f);
    if (!r)
      throw Error(ErrorKind::IllTypedComposite,
                  "compose(" + g + ", " + f + ") is undefined");
    return *r;
  }

  std::vector<std::string> arrows_into(const std::string& c) const {
    if (!has_object(c))
      throw Error(ErrorKind::UnknownObject, "no object '" + c + "'");
    std::vector<std::string> out;
    for (const Morphism& m : morphisms)
      if (m.tgt == c) out.push_back(m.id);
    return out;
  }

  std::vector<std::string> arrows_from(const std::string& c) const {
    if (!has_object(c))
      throw Error(ErrorKind::UnknownObject, "no object '" + c + "'");
    std::vector<std::string> out;
    for (const Morphism& m : morphisms)
      if (m.src == c) out.push_back(m.id);
    return out;
  }
};

// Unvalidated category description. `identities` may name which listed
// morphism is the identity of each object; identity composition rows may be
// omitted from `composites` (they are derived).
struct RawCategory {
  std::vector<std::string> objects;
  std::vector<Morphism> morphisms;
  std::map<std::string, std::string> identities;
  std::vector<std::array<std::string, 3>> composites;  // {g, f, g-after-f}
};

inline FinCat validate_category(const RawCategory& raw) {
  FinCat cat;
  cat.objects = raw.objects;
  std::sort(cat.objects.begin(), cat.objects.end());
  if (std::adjacent_find(cat.objects.begin(), cat.objects.end()) !=
      cat.objects.end())
    throw Error(ErrorKind::BadFormat, "duplicate object id");
  for (const std::string& c : cat.objects)
    if (c.empty()) throw Error(ErrorKind::BadFormat, "empty object id");

  cat.morphisms = raw.morphisms;
  std::sort(cat.morphisms.begin(), cat.morphisms.end(),
            [](const Morphism& a, const Morphism& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < cat.morphisms.size(); ++i)
    if (cat.morphisms[i].id == cat.morphisms[i + 1].id)
      throw Error(ErrorKind::BadFormat,
                  "duplicate morphism id '" + cat.morphisms[i].id + "'");
  for (const Morphism& m : cat.morphisms) {
    if (m.id.empty()) throw Error(ErrorKind::BadFormat, "empty morphism id");
    if (!cat.has_object(m.src) || !cat.has_object(m.tgt))
      throw Error(ErrorKind::BadFormat, "morphism '" + m.id +
                                            "' references an unknown object");
  }

  // Identity assignment: every object needs one, typed c -> c.
  for (const auto& [c, id] : raw.identities) {
    if (!cat.has_object(c))
      throw Error(ErrorKind::BadFormat,
                  "identity declared for unknown object '" + c + "'");
    if (!cat.has_morphism(id))
      throw Error(ErrorKind::MissingIdentity,
                  "identity of '" + c + "' names unknown morphism '" + id + "'");
    const Morphism& m = cat.morphism(id);
    if (m.src != c || m.tgt != c)
      throw Error(ErrorKind::MissingIdentity,
                  "identity of '" + c + "' is not typed " + c + " -> " + c);
  }
  for (const std::string& c : cat.objects) {
    auto it = raw.identities.find(c);
    if (it == raw.identities.end())
      throw Error(ErrorKind::MissingIdentity,
                  "object '" + c + "' has no identity morphism");
    cat.identities[c] = it->second;
  }

  // Composition table: declared rows first, then identity rows.
  for (const auto& row : raw.composites) {
    const std::string &g = row[0], &f = row[1], &h = row[2];
    if (!cat.has_morphism(g) || !cat.has_morphism(f) || !cat.has_morphism(h))
      throw Error(ErrorKind::BadFormat, "compose row (" + g + ", " + f +
                                            ") -> " + h +
                                            " references an unknown morphism");
    const Morphism &mg = cat.morphism(g), &mf = cat.morphism(f),
                   &mh = cat.morphism(h);
    if (mf.tgt != mg.src)
      throw Error(ErrorKind::IllTypedComposite,
                  "compose(" + g + ", " + f + ") declared on a non-composable pair");
    if (mh.src != mf.src || mh.tgt != mg.tgt)
      throw Error(ErrorKind::IllTypedComposite,
                  "compose(" + g + ", " + f + ") = " + h +
                      " has source/target " + mh.src + " -> " + mh.tgt +
                      ", expected " + mf.src + " -> " + mg.tgt);
    auto [it, fresh] = cat.composites.insert({{g, f}, h});
    if (!fresh && it->second != h)
      throw Error(ErrorKind::BadFormat,
                  "conflicting compose rows for (" + g + ", " + f + ")");
  }
  for (const Morphism& m : cat.morphisms) {
    const std::string& id_src = cat.identities.at(m.src);
    const std::string& id_tgt = cat.identities.at(m.tgt);
    for (auto [key, want] :
         {std::pair{std::pair{id_tgt, m.id}, m.id},
          std::pair{std::pair{m.id, id_src}, m.id}}) {
      auto [it, fresh] = cat.composites.insert({key, want});
      if (!fresh && it->second != want)
        throw Error(ErrorKind::MissingIdentity,
                    "identity law fails: compose(" + key.first + ", " +
                        key.second + ") = " + it->second + ", expected " + want);
    }
  }

  // The table must cover composable pairs exactly.
  for (const Morphism& g : cat.morphisms)
    for (const Morphism& f : cat.morphisms) {
      if (f.tgt != g.src) continue;
      if (!cat.try_compose(g.id, f.id))
        throw Error(ErrorKind::IllTypedComposite,
                    "no composite declared for composable pair (" + g.id +
                        ", " + f.id + ")");
    }

  // Associativity: h(gf) = (hg)f on all composable triples.
  for (const Morphism& h : cat.morphisms)
    for (const Morphism& g : cat.morphisms) {
      if (g.tgt != h.src) continue;
      for (const Morphism& f : cat.morphisms) {
        if (f.tgt != g.src) continue;
        const std::string& left = cat.compose(h.id, cat.compose(g.id, f.id));
        const std::string& right = cat.compose(cat.compose(h.id, g.id), f.id);
        if (left != right)
          throw Error(ErrorKind::NonAssociative,
                      "associativity fails on (" + h.id + ", " + g.id + ", " +
                          f.id + "): " + left + " != " + right);
      }
    }

  return cat;
}

// A sieve on `target`: a set of morphisms into it, closed under
// precomposition.
struct Sieve {
  std::string target;
  std::set<std::string> members;

  bool operator==(const Sieve&) const = default;
};

inline bool is_closed_sieve(const FinCat& cat, const Sieve& s) {
  for (const std::string& f : s.members) {
    const Morphism& mf = cat.morphism(f);
    if (mf.tgt != s.target) return false;
    for (const std::string& g : cat.arrows_into(mf.src))
      if (!s.members.count(cat.compose(f, g))) return false;
  }
  return true;
}

inline Sieve maximal_sieve(const FinCat& cat, const std::string& c) {
  Sieve s{c, {}};
  for (const std::string& f : cat.arrows_into(c)) s.members.insert(f);
  return s;
}

// All sieves on c, ordered by (member count, lexicographic member list).
inline std::vector<Sieve> sieves_on(const FinCat& cat, const std::string& c) {
  std::vector<std::string> arrows = cat.arrows_into(c);  // throws UnknownObject
  if (arrows.size() > 24)
    throw Error(ErrorKind::BudgetExceeded,
                "too many arrows into '" + c + "' for sieve enumeration");
  std::vector<Sieve> out;
  for (std::uint32_t mask = 0; mask < (1u << arrows.size()); ++mask) {
    Sieve s{c, {}};
    for (std::size_t i = 0; i < arrows.size(); ++i)
      if (mask & (1u << i)) s.members.insert(arrows[i]);
    if (is_closed_sieve(cat, s)) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Sieve& a, const Sieve& b) {
    if (a.members.size() != b.members.size())
      return a.members.size() < b.members.size();
    return a.members < b.members;
  });
  return out;
}

// Omega's action along f: c -> d, sending a sieve S on d to
// { g into c | f . g lands in S }.
inline Sieve pullback_sieve(const FinCat& cat, const std::string& f,
                            const Sieve& s) {
  const Morphism& mf = cat.morphism(f);
  if (s.target != mf.tgt)
    throw Error(ErrorKind::TargetMismatch,
                "sieve on '" + s.target + "' pulled back along morphism into '" +
                    mf.tgt + "'");
  Sieve out{mf.src, {}};
  for (const std::string& g : cat.arrows_into(mf.src))
    if (s.members.count(cat.compose(f, g))) out.members.insert(g);
  return out;
}

inline std::string sieve_label(const Sieve& s) {
  std::string out = "{";
  bool first = true;
  for (const std::string& m : s.members) {
    if (!first) out += ",";
    out += m;
    first = false;
  }
  return out + "}";
}

}  // namespace toposcope
