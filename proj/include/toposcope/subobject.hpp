#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/site.hpp"

namespace toposcope {

// A subobject in canonical form: a restriction-closed pointwise subset of
// its ambient presheaf. `parts` has an entry for every object of the site.
struct Subobject {
  Presheaf ambient;
  std::map<std::string, std::set<std::string>> parts;

  const std::set<std::string>& at(const std::string& obj) const {
    auto it = parts.find(obj);
    if (it == parts.end())
      throw Error(ErrorKind::UnknownObject, "no part at '" + obj + "'");
    return it->second;
  }

  bool contains(const std::string& obj, const std::string& x) const {
    return at(obj).count(x) != 0;
  }

  friend bool operator==(const Subobject& a, const Subobject& b) {
    return a.parts == b.parts && a.ambient == b.ambient;
  }
};

inline bool is_restriction_closed(const Subobject& s) {
  const FinCat& cat = *s.ambient.site;
  for (const Morphism& m : cat.morphisms)
    for (const std::string& x : s.at(m.tgt))
      if (!s.contains(m.src, s.ambient.act(m.id, x))) return false;
  return true;
}

inline Subobject validate_subobject(
    Presheaf ambient, std::map<std::string, std::set<std::string>> parts) {
  Subobject s{std::move(ambient), std::move(parts)};
  const FinCat& cat = *s.ambient.site;
  for (const auto& [obj, elems] : s.parts) {
    if (!cat.has_object(obj))
      throw Error(ErrorKind::BadFormat,
                  "part declared at unknown object '" + obj + "'");
    for (const std::string& x : elems)
      if (!s.ambient.has_element(obj, x))
        throw Error(ErrorKind::TypeMismatch,
                    "part at '" + obj + "' contains foreign element '" + x + "'");
  }
  for (const std::string& obj : cat.objects) s.parts.try_emplace(obj);
  if (!is_restriction_closed(s))
    throw Error(ErrorKind::TypeMismatch,
                "parts are not closed under restriction");
  return s;
}

inline Subobject sub_top(const Presheaf& a) {
  Subobject s{a, {}};
  for (const auto& [obj, labels] : a.sets)
    s.parts[obj] = std::set<std::string>(labels.begin(), labels.end());
  return s;
}

inline Subobject sub_bottom(const Presheaf& a) {
  Subobject s{a, {}};
  for (const auto& entry : a.sets) s.parts.try_emplace(entry.first);
  return s;
}

inline void require_same_ambient(const Subobject& s, const Subobject& t) {
  if (!(s.ambient == t.ambient))
    throw Error(ErrorKind::AmbientMismatch,
                "subobjects live in different ambient presheaves");
}

inline bool sub_leq(const Subobject& s, const Subobject& t) {
  require_same_ambient(s, t);
  for (const auto& [obj, elems] : s.parts)
    for (const std::string& x : elems)
      if (!t.contains(obj, x)) return false;
  return true;
}

inline Subobject sub_meet(const Subobject& s, const Subobject& t) {
  require_same_ambient(s, t);
  Subobject out{s.ambient, {}};
  for (const auto& [obj, elems] : s.parts) {
    auto& part = out.parts[obj];
    for (const std::string& x : elems)
      if (t.contains(obj, x)) part.insert(x);
  }
  return out;
}

inline Subobject sub_join(const Subobject& s, const Subobject& t) {
  require_same_ambient(s, t);
  Subobject out{s.ambient, s.parts};
  for (const auto& [obj, elems] : t.parts)
    out.parts[obj].insert(elems.begin(), elems.end());
  return out;
}

// Heyting implication: a is in (S => T) at c iff every restriction of a
// that lands in S also lands in T.
inline Subobject sub_implies(const Subobject& s, const Subobject& t) {
  require_same_ambient(s, t);
  const Presheaf& a = s.ambient;
  const FinCat& cat = *a.site;
  Subobject out{a, {}};
  for (const std::string& obj : cat.objects) {
    auto& part = out.parts[obj];
    std::vector<std::string> arrows = cat.arrows_into(obj);
    for (const std::string& x : a.at(obj)) {
      bool ok = true;
      for (const std::string& f : arrows) {
        const std::string& y = a.act(f, x);
        if (s.contains(cat.morphism(f).src, y) &&
            !t.contains(cat.morphism(f).src, y)) {
          ok = false;
          break;
        }
      }
      if (ok) part.insert(x);
    }
  }
  return out;
}

inline Subobject sub_neg(const Subobject& s) {
  return sub_implies(s, sub_bottom(s.ambient));
}

// Equality of two parallel maps, interpreted as a subobject of their source.
inline Subobject equalizer_sub(const NatTrans& f, const NatTrans& g) {
  if (!(f.src == g.src) || !(f.tgt == g.tgt))
    throw Error(ErrorKind::TypeMismatch, "equalizer of non-parallel maps");
  Subobject out{f.src, {}};
  for (const auto& [obj, table] : f.components) {
    auto& part = out.parts[obj];
    for (const auto& [x, fx] : table)
      if (fx == g.apply(obj, x)) part.insert(x);
  }
  return out;
}

inline Subobject pullback_sub(const NatTrans& f, const Subobject& t) {
  if (!(t.ambient == f.tgt))
    throw Error(ErrorKind::TypeMismatch,
                "subobject is not of the map's target");
  Subobject out{f.src, {}};
  for (const auto& [obj, table] : f.components) {
    auto& part = out.parts[obj];
    for (const auto& [x, fx] : table)
      if (t.contains(obj, fx)) part.insert(x);
  }
  return out;
}

// Left adjoint to pullback along f: the pointwise image.
inline Subobject exists_along(const NatTrans& f, const Subobject& s) {
  if (!(s.ambient == f.src))
    throw Error(ErrorKind::TypeMismatch,
                "subobject is not of the map's source");
  Subobject out{f.tgt, {}};
  for (const std::string& obj : f.tgt.site->objects) out.parts.try_emplace(obj);
  for (const auto& [obj, elems] : s.parts)
    for (const std::string& x : elems) out.parts[obj].insert(f.apply(obj, x));
  return out;
}

// Right adjoint to pullback along f: b is in the part at c iff every
// f-preimage of every restriction of b lies in S.
inline Subobject forall_along(const NatTrans& f, const Subobject& s) {
  if (!(s.ambient == f.src))
    throw Error(ErrorKind::TypeMismatch,
                "subobject is not of the map's source");
  const Presheaf& a = f.src;
  const Presheaf& b = f.tgt;
  const FinCat& cat = *a.site;
  Subobject out{b, {}};
  for (const std::string& obj : cat.objects) {
    auto& part = out.parts[obj];
    std::vector<std::string> arrows = cat.arrows_into(obj);
    for (const std::string& y : b.at(obj)) {
      bool ok = true;
      for (const std::string& g : arrows) {
        const std::string& d = cat.morphism(g).src;
        const std::string& yd = b.act(g, y);
        for (const std::string& x : a.at(d)) {
          if (f.apply(d, x) == yd && !s.contains(d, x)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) part.insert(y);
    }
  }
  return out;
}

// The underlying presheaf of a subobject, with its mono into the ambient.
inline Presheaf sub_presheaf(const Subobject& s) {
  std::map<std::string, std::vector<std::string>> sets;
  for (const auto& [obj, elems] : s.parts)
    sets[obj] = std::vector<std::string>(elems.begin(), elems.end());
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (const Morphism& m : s.ambient.site->morphisms) {
    auto& table = actions[m.id];
    for (const std::string& x : s.at(m.tgt)) table[x] = s.ambient.act(m.id, x);
  }
  return validate_presheaf(s.ambient.site, std::move(sets), std::move(actions));
}

inline NatTrans sub_inclusion(const Subobject& s) {
  Presheaf p = sub_presheaf(s);
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const auto& [obj, labels] : p.sets) {
    auto& table = comps[obj];
    for (const std::string& x : labels) table[x] = x;
  }
  return NatTrans{std::move(p), s.ambient, std::move(comps)};
}

struct PullbackCone {
  Presheaf object;
  NatTrans leg1;
  NatTrans leg2;
};

inline PullbackCone pullback(const NatTrans& f, const NatTrans& g) {
  if (!(f.tgt == g.tgt))
    throw Error(ErrorKind::TypeMismatch, "pullback of maps with different targets");
  Product p = product(f.src, g.src);
  Subobject e = equalizer_sub(compose(f, p.proj1), compose(g, p.proj2));
  NatTrans incl = sub_inclusion(e);
  PullbackCone cone{incl.src, compose(p.proj1, incl), compose(p.proj2, incl)};
  return cone;
}

// The subobject classifier: sieves with pullback as the action.
struct OmegaTable {
  std::shared_ptr<const FinCat> site;
  std::map<std::string, std::vector<Sieve>> sieves;  // (count, lex) order
  Presheaf classifier;

  const Sieve& sieve_of(const std::string& obj, const std::string& label) const {
    for (const Sieve& s : sieves.at(obj))
      if (sieve_label(s) == label) return s;
    throw Error(ErrorKind::BadFormat,
                "no sieve labelled " + label + " on '" + obj + "'");
  }

  std::string max_label(const std::string& obj) const {
    return sieve_label(maximal_sieve(*site, obj));
  }
};

inline OmegaTable omega_table(std::shared_ptr<const FinCat> site) {
  OmegaTable t;
  t.site = site;
  std::map<std::string, std::vector<std::string>> sets;
  for (const std::string& c : site->objects) {
    t.sieves[c] = sieves_on(*site, c);
    auto& labels = sets[c];
    for (const Sieve& s : t.sieves[c]) labels.push_back(sieve_label(s));
  }
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (const Morphism& m : site->morphisms) {
    auto& table = actions[m.id];
    for (const Sieve& s : t.sieves[m.tgt])
      table[sieve_label(s)] = sieve_label(pullback_sieve(*site, m.id, s));
  }
  t.classifier = validate_presheaf(site, std::move(sets), std::move(actions));
  return t;
}

inline Presheaf omega(std::shared_ptr<const FinCat> site) {
  return omega_table(std::move(site)).classifier;
}

// true: 1 -> Omega, picking the maximal sieve at every stage.
inline NatTrans true_arrow(std::shared_ptr<const FinCat> site) {
  OmegaTable t = omega_table(site);
  Presheaf one = terminal(site);
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const std::string& c : site->objects) comps[c]["*"] = t.max_label(c);
  return NatTrans{std::move(one), std::move(t.classifier), std::move(comps)};
}

// Characteristic arrow of S: sends a to the sieve of arrows pulling a into S.
inline NatTrans char_map(const Subobject& s) {
  const Presheaf& a = s.ambient;
  const FinCat& cat = *a.site;
  OmegaTable t = omega_table(a.site);
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const std::string& obj : cat.objects) {
    auto& table = comps[obj];
    std::vector<std::string> arrows = cat.arrows_into(obj);
    for (const std::string& x : a.at(obj)) {
      Sieve sv{obj, {}};
      for (const std::string& f : arrows)
        if (s.contains(cat.morphism(f).src, a.act(f, x))) sv.members.insert(f);
      table[x] = sieve_label(sv);
    }
  }
  return NatTrans{a, std::move(t.classifier), std::move(comps)};
}

inline Subobject sub_from_char(const NatTrans& chi) {
  Presheaf om = omega(chi.src.site);
  if (!(chi.tgt == om))
    throw Error(ErrorKind::TypeMismatch,
                "map does not land in the subobject classifier");
  const FinCat& cat = *chi.src.site;
  Subobject out{chi.src, {}};
  for (const std::string& obj : cat.objects) {
    auto& part = out.parts[obj];
    std::string top = sieve_label(maximal_sieve(cat, obj));
    for (const std::string& x : chi.src.at(obj))
      if (chi.apply(obj, x) == top) part.insert(x);
  }
  return out;
}

// All subobjects of a presheaf, ordered by the per-stage bitmask odometer.
inline std::vector<Subobject> enumerate_subobjects(const Presheaf& a) {
  const FinCat& cat = *a.site;
  const auto& objs = cat.objects;
  for (const std::string& c : objs)
    if (a.at(c).size() > 20)
      throw Error(ErrorKind::BudgetExceeded,
                  "stage at '" + c + "' too large for subobject enumeration");
  std::vector<std::uint32_t> mask(objs.size(), 0);
  std::vector<Subobject> out;
  while (true) {
    Subobject s{a, {}};
    for (std::size_t o = 0; o < objs.size(); ++o) {
      auto& part = s.parts[objs[o]];
      const auto& labels = a.at(objs[o]);
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (mask[o] & (1u << i)) part.insert(labels[i]);
    }
    if (is_restriction_closed(s)) out.push_back(std::move(s));
    std::size_t o = 0;
    for (; o < objs.size(); ++o) {
      if (++mask[o] < (1u << a.at(objs[o]).size())) break;
      mask[o] = 0;
    }
    if (o == objs.size()) break;
  }
  return out;
}

}  // namespace toposcope
