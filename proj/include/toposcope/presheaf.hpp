#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"
#include "toposcope/site.hpp"

namespace toposcope {

// A presheaf on a finite site: a finite set of labelled elements per object
// and, per morphism f: c -> d, a restriction function sets(d) -> sets(c).
// `actions` is total on morphisms, identity rows included. Label vectors are
// sorted, so stage enumeration order is the label order.
struct Presheaf {
  std::shared_ptr<const FinCat> site;
  std::map<std::string, std::vector<std::string>> sets;
  std::map<std::string, std::map<std::string, std::string>> actions;

  const std::vector<std::string>& at(const std::string& obj) const {
    auto it = sets.find(obj);
    if (it == sets.end())
      throw Error(ErrorKind::UnknownObject, "no stage '" + obj + "'");
    return it->second;
  }

  bool has_element(const std::string& obj, const std::string& x) const {
    const auto& v = at(obj);
    return std::binary_search(v.begin(), v.end(), x);
  }

  const std::string& act(const std::string& mor, const std::string& x) const {
    auto it = actions.find(mor);
    if (it == actions.end())
      throw Error(ErrorKind::UnknownMorphism, "no action for '" + mor + "'");
    auto jt = it->second.find(x);
    if (jt == it->second.end())
      throw Error(ErrorKind::ActionTypeError,
                  "action '" + mor + "' undefined on '" + x + "'");
    return jt->second;
  }

  friend bool operator==(const Presheaf& a, const Presheaf& b) {
    if (a.sets != b.sets || a.actions != b.actions) return false;
    return a.site == b.site || (a.site && b.site && *a.site == *b.site);
  }
};

inline bool same_site(const Presheaf& a, const Presheaf& b) {
  return a.site == b.site || (a.site && b.site && *a.site == *b.site);
}

// Validates sets and actions against the site. Identity actions may be
// omitted; actions of composite morphisms may be omitted when derivable from
// the factors. Both functoriality laws are checked exhaustively.
inline Presheaf validate_presheaf(
    std::shared_ptr<const FinCat> site,
    std::map<std::string, std::vector<std::string>> sets,
    std::map<std::string, std::map<std::string, std::string>> actions) {
  if (!site) throw Error(ErrorKind::BadFormat, "presheaf without a site");
  Presheaf p;
  p.site = std::move(site);
  const FinCat& cat = *p.site;

  for (auto& [obj, labels] : sets) {
    if (!cat.has_object(obj))
      throw Error(ErrorKind::BadFormat,
                  "stage declared for unknown object '" + obj + "'");
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
      throw Error(ErrorKind::BadFormat,
                  "duplicate element label at stage '" + obj + "'");
  }
  p.sets = std::move(sets);
  for (const std::string& obj : cat.objects)
    p.sets.try_emplace(obj);  // absent stage = empty stage

  for (const auto& [mor, table] : actions)
    if (!cat.has_morphism(mor))
      throw Error(ErrorKind::BadFormat,
                  "action declared for unknown morphism '" + mor + "'");

  // Identity actions: fill when absent, reject anything but the identity map.
  for (const std::string& obj : cat.objects) {
    const std::string& id = cat.identity(obj);
    auto it = actions.find(id);
    std::map<std::string, std::string> want;
    for (const std::string& x : p.sets.at(obj)) want[x] = x;
    if (it == actions.end()) {
      actions[id] = std::move(want);
    } else if (it->second != want) {
      throw Error(ErrorKind::NonFunctorial,
                  "action of identity '" + id + "' is not the identity map");
    }
  }

  // An action out of an empty stage is uniquely the empty map.
  for (const Morphism& m : cat.morphisms)
    if (!actions.count(m.id) && p.sets.at(m.tgt).empty()) actions[m.id] = {};

  auto check_typing = [&](const std::string& mor,
                          const std::map<std::string, std::string>& table) {
    const Morphism& m = cat.morphism(mor);
    const auto& dom = p.sets.at(m.tgt);
    const auto& cod = p.sets.at(m.src);
    if (table.size() != dom.size())
      throw Error(ErrorKind::ActionTypeError,
                  "action '" + mor + "' is not defined on exactly the stage at '" +
                      m.tgt + "'");
    for (const auto& [x, y] : table) {
      if (!std::binary_search(dom.begin(), dom.end(), x))
        throw Error(ErrorKind::ActionTypeError, "action '" + mor +
                                                    "' defined on foreign element '" +
                                                    x + "'");
      if (!std::binary_search(cod.begin(), cod.end(), y))
        throw Error(ErrorKind::ActionTypeError,
                    "action '" + mor + "' sends '" + x + "' outside the stage at '" +
                        m.src + "'");
    }
  };
  for (const auto& [mor, table] : actions) check_typing(mor, table);

  // Derive actions of composites whose factors are known.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [pair, h] : cat.composites) {
      const auto& [g, f] = pair;
      if (actions.count(h) || !actions.count(f) || !actions.count(g)) continue;
      std::map<std::string, std::string> table;
      for (const auto& [x, gx] : actions.at(g)) table[x] = actions.at(f).at(gx);
      check_typing(h, table);
      actions[h] = std::move(table);
      changed = true;
    }
  }
  for (const Morphism& m : cat.morphisms)
    if (!actions.count(m.id))
      throw Error(ErrorKind::ActionTypeError,
                  "no action given for morphism '" + m.id + "'");

  // Contravariant functoriality on every composable pair.
  for (const auto& [pair, h] : cat.composites) {
    const auto& [g, f] = pair;
    for (const auto& [x, gx] : actions.at(g)) {
      if (actions.at(f).at(gx) != actions.at(h).at(x))
        throw Error(ErrorKind::NonFunctorial,
                    "functoriality fails on compose(" + g + ", " + f +
                        ") at element '" + x + "'");
    }
  }

  p.actions = std::move(actions);
  return p;
}

inline bool check_presheaf(const Presheaf& p) {
  try {
    validate_presheaf(p.site, p.sets, p.actions);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline Presheaf terminal(std::shared_ptr<const FinCat> site) {
  std::map<std::string, std::vector<std::string>> sets;
  for (const std::string& c : site->objects) sets[c] = {"*"};
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (const Morphism& m : site->morphisms) actions[m.id] = {{"*", "*"}};
  return validate_presheaf(std::move(site), std::move(sets), std::move(actions));
}

inline Presheaf empty_presheaf(std::shared_ptr<const FinCat> site) {
  return validate_presheaf(std::move(site), {}, {});
}

// A natural transformation, stored as one component function per object.
struct NatTrans {
  Presheaf src;
  Presheaf tgt;
  std::map<std::string, std::map<std::string, std::string>> components;

  const std::string& apply(const std::string& obj, const std::string& x) const {
    auto it = components.find(obj);
    if (it == components.end())
      throw Error(ErrorKind::UnknownObject, "no component at '" + obj + "'");
    auto jt = it->second.find(x);
    if (jt == it->second.end())
      throw Error(ErrorKind::TypeMismatch,
                  "component at '" + obj + "' undefined on '" + x + "'");
    return jt->second;
  }

  friend bool operator==(const NatTrans& a, const NatTrans& b) {
    return a.components == b.components && a.src == b.src && a.tgt == b.tgt;
  }
};

inline bool check_naturality(const NatTrans& n) {
  const FinCat& cat = *n.src.site;
  for (const Morphism& m : cat.morphisms)
    for (const std::string& x : n.src.at(m.tgt)) {
      // tgt.act(f) . component(d) == component(c) . src.act(f) for f: c -> d
      if (n.tgt.act(m.id, n.apply(m.tgt, x)) !=
          n.apply(m.src, n.src.act(m.id, x)))
        return false;
    }
  return true;
}

inline NatTrans validate_nat(
    Presheaf src, Presheaf tgt,
    std::map<std::string, std::map<std::string, std::string>> components) {
  if (!same_site(src, tgt))
    throw Error(ErrorKind::SiteMismatch,
                "natural transformation between presheaves on different sites");
  NatTrans n{std::move(src), std::move(tgt), std::move(components)};
  const FinCat& cat = *n.src.site;
  for (const auto& [obj, table] : n.components)
    if (!cat.has_object(obj))
      throw Error(ErrorKind::BadFormat,
                  "component declared at unknown object '" + obj + "'");
  for (const std::string& obj : cat.objects) {
    auto it = n.components.find(obj);
    const auto& dom = n.src.at(obj);
    if (it == n.components.end()) {
      if (!dom.empty())
        throw Error(ErrorKind::TypeMismatch,
                    "missing component at '" + obj + "'");
      n.components[obj] = {};
      continue;
    }
    if (it->second.size() != dom.size())
      throw Error(ErrorKind::TypeMismatch,
                  "component at '" + obj + "' is not defined on exactly the stage");
    for (const auto& [x, y] : it->second) {
      if (!n.src.has_element(obj, x))
        throw Error(ErrorKind::TypeMismatch, "component at '" + obj +
                                                 "' defined on foreign element '" +
                                                 x + "'");
      if (!n.tgt.has_element(obj, y))
        throw Error(ErrorKind::TypeMismatch,
                    "component at '" + obj + "' sends '" + x +
                        "' outside the target stage");
    }
  }
  if (!check_naturality(n))
    throw Error(ErrorKind::NonNatural, "naturality square fails");
  return n;
}

inline NatTrans identity_nat(const Presheaf& a) {
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const auto& [obj, labels] : a.sets) {
    auto& table = comps[obj];
    for (const std::string& x : labels) table[x] = x;
  }
  return NatTrans{a, a, std::move(comps)};
}

// The unique map A -> 1.
inline NatTrans bang(const Presheaf& a) {
  Presheaf one = terminal(a.site);
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const auto& [obj, labels] : a.sets) {
    auto& table = comps[obj];
    for (const std::string& x : labels) table[x] = "*";
  }
  return NatTrans{a, std::move(one), std::move(comps)};
}

inline NatTrans compose(const NatTrans& after, const NatTrans& before) {
  if (!(before.tgt == after.src))
    throw Error(ErrorKind::TypeMismatch,
                "composition of non-composable transformations");
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const auto& [obj, table] : before.components) {
    auto& out = comps[obj];
    for (const auto& [x, y] : table) out[x] = after.apply(obj, y);
  }
  return NatTrans{before.src, after.tgt, std::move(comps)};
}

namespace detail {

// Index-based view used by the hom-set search.
struct Indexed {
  std::vector<std::string> objs;
  std::vector<std::vector<std::string>> labels;
  std::vector<std::vector<int>> arrow_map;  // per arrow: tgt-stage index -> src-stage index
  std::vector<std::pair<int, int>> arrow_ends;  // per arrow: (src obj idx, tgt obj idx)
  std::vector<std::string> arrow_ids;

  int obj_index(const std::string& c) const {
    return int(std::lower_bound(objs.begin(), objs.end(), c) - objs.begin());
  }
};

inline Indexed index_presheaf(const Presheaf& p) {
  Indexed ix;
  ix.objs = p.site->objects;
  ix.labels.resize(ix.objs.size());
  for (std::size_t o = 0; o < ix.objs.size(); ++o)
    ix.labels[o] = p.at(ix.objs[o]);
  for (const Morphism& m : p.site->morphisms) {
    if (p.site->identity(m.src) == m.id && m.src == m.tgt) continue;
    int so = ix.obj_index(m.src), to = ix.obj_index(m.tgt);
    std::vector<int> map(ix.labels[to].size());
    for (std::size_t i = 0; i < ix.labels[to].size(); ++i) {
      const std::string& y = p.act(m.id, ix.labels[to][i]);
      const auto& cod = ix.labels[so];
      map[i] = int(std::lower_bound(cod.begin(), cod.end(), y) - cod.begin());
    }
    ix.arrow_map.push_back(std::move(map));
    ix.arrow_ends.push_back({so, to});
    ix.arrow_ids.push_back(m.id);
  }
  return ix;
}

// Backtracking enumeration of natural maps A -> B in lexicographic component
// order. Naturality is enforced incrementally: each constraint is evaluated
// as soon as both of its slots are assigned.
inline std::vector<NatTrans> search_nat(const Presheaf& a, const Presheaf& b,
                                        bool bijective, std::size_t limit) {
  if (!same_site(a, b))
    throw Error(ErrorKind::SiteMismatch,
                "hom-set between presheaves on different sites");
  Indexed ia = index_presheaf(a), ib = index_presheaf(b);
  const std::size_t nobj = ia.objs.size();

  std::vector<std::pair<int, int>> slots;  // (object idx, element idx)
  std::vector<std::vector<int>> slot_of(nobj);
  for (std::size_t o = 0; o < nobj; ++o) {
    slot_of[o].resize(ia.labels[o].size());
    for (std::size_t i = 0; i < ia.labels[o].size(); ++i) {
      slot_of[o][i] = int(slots.size());
      slots.push_back({int(o), int(i)});
    }
  }
  if (bijective)
    for (std::size_t o = 0; o < nobj; ++o)
      if (ia.labels[o].size() != ib.labels[o].size()) return {};

  // Constraint k for arrow m and element i at tgt(m):
  //   comp[src][ia.map[i]] == ib.map[comp[tgt][i]].
  // Attach it to the later of its two slots.
  struct Check {
    int arrow;
    int tgt_elem;
  };
  std::vector<std::vector<Check>> checks(slots.size());
  for (std::size_t ar = 0; ar < ia.arrow_map.size(); ++ar) {
    auto [so, to] = ia.arrow_ends[ar];
    for (std::size_t i = 0; i < ia.arrow_map[ar].size(); ++i) {
      int s1 = slot_of[to][i];
      int s2 = slot_of[so][ia.arrow_map[ar][i]];
      checks[std::max(s1, s2)].push_back({int(ar), int(i)});
    }
  }

  std::vector<std::vector<int>> comp(nobj);
  for (std::size_t o = 0; o < nobj; ++o)
    comp[o].assign(ia.labels[o].size(), -1);
  std::vector<std::vector<char>> used(nobj);
  for (std::size_t o = 0; o < nobj; ++o)
    used[o].assign(ib.labels[o].size(), 0);

  std::vector<NatTrans> results;
  auto emit = [&]() {
    std::map<std::string, std::map<std::string, std::string>> comps;
    for (std::size_t o = 0; o < nobj; ++o) {
      auto& table = comps[ia.objs[o]];
      for (std::size_t i = 0; i < ia.labels[o].size(); ++i)
        table[ia.labels[o][i]] = ib.labels[o][comp[o][i]];
    }
    results.push_back(NatTrans{a, b, std::move(comps)});
  };

  auto consistent = [&](int slot) {
    for (const Check& ck : checks[slot]) {
      auto [so, to] = ia.arrow_ends[ck.arrow];
      int lhs = comp[so][ia.arrow_map[ck.arrow][ck.tgt_elem]];
      int rhs = ib.arrow_map[ck.arrow][comp[to][ck.tgt_elem]];
      if (lhs != rhs) return false;
    }
    return true;
  };

  // Iterative depth-first search over slots. A slot holding a value when
  // visited means we are backtracking into it and resume past that value.
  std::size_t depth = 0;
  while (true) {
    if (depth == slots.size()) {
      emit();
      if (limit && results.size() >= limit) return results;
      if (slots.empty()) return results;
      --depth;
      continue;
    }
    auto [o, i] = slots[depth];
    int start = 0;
    if (comp[o][i] >= 0) {
      if (bijective) used[o][comp[o][i]] = 0;
      start = comp[o][i] + 1;
      comp[o][i] = -1;
    }
    bool advanced = false;
    for (int v = start; v < int(ib.labels[o].size()); ++v) {
      if (bijective && used[o][v]) continue;
      comp[o][i] = v;
      if (consistent(slot_of[o][i])) {
        if (bijective) used[o][v] = 1;
        ++depth;
        advanced = true;
        break;
      }
      comp[o][i] = -1;
    }
    if (!advanced) {
      if (depth == 0) return results;
      --depth;
    }
  }
}

}  // namespace detail

// All natural transformations A -> B, deterministically ordered.
inline std::vector<NatTrans> enumerate_homs(const Presheaf& a,
                                            const Presheaf& b) {
  return detail::search_nat(a, b, false, 0);
}

// Global elements 1 -> A, i.e. compatible families of stage elements.
inline std::vector<NatTrans> global_elements(const Presheaf& a) {
  return detail::search_nat(terminal(a.site), a, false, 0);
}

inline bool is_epi(const NatTrans& n) {
  for (const auto& [obj, labels] : n.tgt.sets) {
    std::vector<std::string> image;
    for (const auto& [x, y] : n.components.at(obj)) image.push_back(y);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image.size() != labels.size()) return false;
  }
  return true;
}

inline bool is_mono(const NatTrans& n) {
  for (const auto& [obj, table] : n.components) {
    std::vector<std::string> image;
    for (const auto& [x, y] : table) image.push_back(y);
    std::sort(image.begin(), image.end());
    if (std::adjacent_find(image.begin(), image.end()) != image.end())
      return false;
  }
  return true;
}

// Internal inhabitedness: the unique map A -> 1 is an epimorphism. In a
// presheaf topos this is pointwise surjectivity, i.e. every stage nonempty.
inline bool is_inhabited_internally(const Presheaf& a) {
  return is_epi(bang(a));
}

inline std::string pair_label(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

struct Product {
  Presheaf object;
  NatTrans proj1;
  NatTrans proj2;
};

inline Product product(const Presheaf& a, const Presheaf& b) {
  if (!same_site(a, b))
    throw Error(ErrorKind::SiteMismatch, "product of presheaves on different sites");
  Presheaf p;
  p.site = a.site;
  std::map<std::string, std::map<std::string, std::string>> pr1, pr2;
  for (const std::string& obj : a.site->objects) {
    auto& labels = p.sets[obj];
    auto& t1 = pr1[obj];
    auto& t2 = pr2[obj];
    for (const std::string& x : a.at(obj))
      for (const std::string& y : b.at(obj)) {
        std::string l = pair_label(x, y);
        labels.push_back(l);
        t1[l] = x;
        t2[l] = y;
      }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
      throw Error(ErrorKind::BadFormat, "pair label collision at '" + obj + "'");
  }
  for (const Morphism& m : a.site->morphisms) {
    auto& table = p.actions[m.id];
    for (const std::string& l : p.at(m.tgt))
      table[l] =
          pair_label(a.act(m.id, pr1.at(m.tgt).at(l)), b.act(m.id, pr2.at(m.tgt).at(l)));
  }
  NatTrans proj1{p, a, std::move(pr1)};
  NatTrans proj2{p, b, std::move(pr2)};
  return Product{std::move(p), std::move(proj1), std::move(proj2)};
}

// <f, g>: X -> A x B for f: X -> A, g: X -> B.
inline NatTrans pairing(const NatTrans& f, const NatTrans& g) {
  if (!(f.src == g.src))
    throw Error(ErrorKind::TypeMismatch, "pairing of maps with different sources");
  Product p = product(f.tgt, g.tgt);
  std::map<std::string, std::map<std::string, std::string>> comps;
  for (const auto& [obj, table] : f.components) {
    auto& out = comps[obj];
    for (const auto& [x, fx] : table) out[x] = pair_label(fx, g.apply(obj, x));
  }
  return NatTrans{f.src, std::move(p.object), std::move(comps)};
}

struct Coproduct {
  Presheaf object;
  NatTrans inj1;
  NatTrans inj2;
};

inline Coproduct coproduct(const Presheaf& a, const Presheaf& b) {
  if (!same_site(a, b))
    throw Error(ErrorKind::SiteMismatch,
                "coproduct of presheaves on different sites");
  Presheaf s;
  s.site = a.site;
  std::map<std::string, std::map<std::string, std::string>> in1, in2;
  for (const std::string& obj : a.site->objects) {
    auto& labels = s.sets[obj];
    auto& t1 = in1[obj];
    auto& t2 = in2[obj];
    for (const std::string& x : a.at(obj)) {
      labels.push_back("inl:" + x);
      t1[x] = "inl:" + x;
    }
    for (const std::string& y : b.at(obj)) {
      labels.push_back("inr:" + y);
      t2[y] = "inr:" + y;
    }
    std::sort(labels.begin(), labels.end());
  }
  for (const Morphism& m : a.site->morphisms) {
    auto& table = s.actions[m.id];
    for (const std::string& x : a.at(m.tgt))
      table["inl:" + x] = "inl:" + a.act(m.id, x);
    for (const std::string& y : b.at(m.tgt))
      table["inr:" + y] = "inr:" + b.act(m.id, y);
  }
  NatTrans inj1{a, s, std::move(in1)};
  NatTrans inj2{b, s, std::move(in2)};
  return Coproduct{std::move(s), std::move(inj1), std::move(inj2)};
}

// Exact isomorphism test: backtracking over componentwise bijections with
// incremental naturality pruning, after cheap fingerprint rejection.
inline std::optional<NatTrans> find_isomorphism(const Presheaf& a,
                                                const Presheaf& b) {
  if (!same_site(a, b))
    throw Error(ErrorKind::SiteMismatch,
                "isomorphism test between presheaves on different sites");
  for (const std::string& obj : a.site->objects)
    if (a.at(obj).size() != b.at(obj).size()) return std::nullopt;
  if (global_elements(a).size() != global_elements(b).size())
    return std::nullopt;
  std::vector<NatTrans> found = detail::search_nat(a, b, true, 1);
  if (found.empty()) return std::nullopt;
  return std::move(found.front());
}

}  // namespace toposcope
