#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/site.hpp"

namespace toposcope {

struct SearchBounds {
  std::shared_ptr<const FinCat> site;
  int max_stage_size = 2;
  bool prune = false;
  std::uint64_t budget = 1'000'000;
};

namespace detail {

// Candidate presheaves are enumerated as integer tables: stage sizes in
// object-id order, then one action table per non-identity morphism in
// morphism-id order, each table cycling lexicographically.
struct SearchView {
  std::shared_ptr<const FinCat> site;
  std::vector<std::string> objs;
  struct Arrow {
    std::string id;
    int src;
    int tgt;
  };
  std::vector<Arrow> arrows;
  // Rows (g, f, h) of the composition table with g and f both non-identity;
  // h_index is -1 when h is an identity.
  struct Row {
    int g;
    int f;
    int h_index;
    int h_obj;
  };
  std::vector<Row> rows;

  explicit SearchView(std::shared_ptr<const FinCat> s) : site(std::move(s)) {
    objs = site->objects;
    std::map<std::string, int> arrow_index;
    for (const Morphism& m : site->morphisms) {
      if (site->identity(m.src) == m.id) continue;
      arrow_index[m.id] = int(arrows.size());
      int so = obj_index(m.src), to = obj_index(m.tgt);
      arrows.push_back({m.id, so, to});
    }
    for (const auto& [pair, h] : site->composites) {
      auto g = arrow_index.find(pair.first);
      auto f = arrow_index.find(pair.second);
      if (g == arrow_index.end() || f == arrow_index.end()) continue;
      auto hi = arrow_index.find(h);
      const Morphism& mh = site->morphism(h);
      rows.push_back({g->second, f->second,
                      hi == arrow_index.end() ? -1 : hi->second,
                      obj_index(mh.src)});
    }
  }

  int obj_index(const std::string& c) const {
    return int(std::lower_bound(objs.begin(), objs.end(), c) - objs.begin());
  }
};

using Table = std::vector<int>;  // action: tgt-stage index -> src-stage index

inline bool non_decreasing(const Table& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] < t[i - 1]) return false;
  return true;
}

// Values appear in first-use order 0,1,2,...: the canonical form of a
// function under relabelling of its codomain.
inline bool is_rgs(const Table& t) {
  int seen = 0;
  for (int v : t) {
    if (v > seen) return false;
    if (v == seen) ++seen;
  }
  return true;
}

// Canonical form under relabelling of both sides: sorted values starting at
// 0 with unit steps and weakly decreasing fiber sizes.
inline bool is_partition_form(const Table& t, int nvals) {
  if (t.empty()) return true;
  if (t[0] != 0 || !non_decreasing(t)) return false;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] > t[i - 1] + 1) return false;
  std::vector<int> count(nvals, 0);
  for (int v : t) ++count[v];
  for (std::size_t v = 1; v < count.size(); ++v)
    if (count[v] > count[v - 1]) return false;
  return true;
}

enum class TableMode { All, DomainCanonical, CodomainCanonical, BothCanonical };

// With pruning on, each stage's relabelling freedom is spent at most once
// while walking the arrows in id order; every presheaf keeps at least one
// representative among the candidates generated this way.
inline std::vector<TableMode> table_modes(const SearchView& view, bool prune) {
  std::vector<TableMode> modes(view.arrows.size(), TableMode::All);
  if (!prune) return modes;
  std::vector<bool> free_stage(view.objs.size(), true);
  for (std::size_t a = 0; a < view.arrows.size(); ++a) {
    int dom = view.arrows[a].tgt;  // action maps the tgt stage to the src stage
    int cod = view.arrows[a].src;
    if (dom == cod) {
      free_stage[dom] = false;
      continue;
    }
    bool df = free_stage[dom], cf = free_stage[cod];
    if (df && cf) {
      modes[a] = TableMode::BothCanonical;
      free_stage[dom] = free_stage[cod] = false;
    } else if (df) {
      modes[a] = TableMode::DomainCanonical;
      free_stage[dom] = false;
    } else if (cf) {
      modes[a] = TableMode::CodomainCanonical;
      free_stage[cod] = false;
    }
  }
  return modes;
}

inline std::vector<Table> admissible_tables(int domain_size, int codomain_size,
                                            TableMode mode) {
  std::vector<Table> out;
  if (domain_size == 0) {
    out.push_back({});
    return out;
  }
  if (codomain_size == 0) return out;
  Table t(domain_size, 0);
  while (true) {
    bool ok = true;
    switch (mode) {
      case TableMode::All: break;
      case TableMode::DomainCanonical: ok = non_decreasing(t); break;
      case TableMode::CodomainCanonical: ok = is_rgs(t); break;
      case TableMode::BothCanonical: ok = is_partition_form(t, codomain_size); break;
    }
    if (ok) out.push_back(t);
    int i = domain_size - 1;
    while (i >= 0 && ++t[i] == codomain_size) t[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

struct Candidate {
  const std::vector<int>* sizes;
  const std::vector<const Table*>* tables;
};

inline bool functorial(const SearchView& view, const std::vector<int>& sizes,
                       const std::vector<const Table*>& tables) {
  for (const SearchView::Row& row : view.rows) {
    const Table& tg = *tables[row.g];
    const Table& tf = *tables[row.f];
    int n = sizes[view.arrows[row.g].tgt];
    for (int x = 0; x < n; ++x) {
      int via = tf[tg[x]];
      int direct = row.h_index < 0 ? x : (*tables[row.h_index])[x];
      if (via != direct) return false;
    }
  }
  return true;
}

inline std::uint64_t count_global_families(const SearchView& view,
                                           const std::vector<int>& sizes,
                                           const std::vector<const Table*>& tables) {
  for (int s : sizes)
    if (s == 0) return 0;
  std::vector<int> family(sizes.size(), 0);
  std::uint64_t count = 0;
  while (true) {
    bool ok = true;
    for (std::size_t a = 0; a < view.arrows.size(); ++a) {
      if ((*tables[a])[family[view.arrows[a].tgt]] !=
          family[view.arrows[a].src]) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
    int o = int(sizes.size()) - 1;
    while (o >= 0 && ++family[o] == sizes[o]) family[o--] = 0;
    if (o < 0) break;
  }
  return count;
}

inline Presheaf materialize(const SearchView& view, const std::vector<int>& sizes,
                            const std::vector<const Table*>& tables) {
  std::map<std::string, std::vector<std::string>> sets;
  for (std::size_t o = 0; o < view.objs.size(); ++o) {
    auto& labels = sets[view.objs[o]];
    for (int i = 0; i < sizes[o]; ++i) labels.push_back(std::to_string(i));
  }
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (std::size_t a = 0; a < view.arrows.size(); ++a) {
    auto& table = actions[view.arrows[a].id];
    for (std::size_t i = 0; i < tables[a]->size(); ++i)
      table[std::to_string(i)] = std::to_string((*tables[a])[i]);
  }
  return validate_presheaf(view.site, std::move(sets), std::move(actions));
}

// Enumerates all candidates within the bounds in deterministic order,
// calling fn on each functorial one. Returns false when the budget ran out.
template <class Fn>
inline bool enumerate_candidates(const SearchView& view, const SearchBounds& b,
                                 std::uint64_t& examined, Fn&& fn) {
  std::vector<TableMode> modes = table_modes(view, b.prune);
  const int nobj = int(view.objs.size());
  const int narr = int(view.arrows.size());
  std::vector<int> sizes(nobj, 0);
  examined = 0;
  while (true) {
    std::vector<std::vector<Table>> lists(narr);
    bool feasible = true;
    for (int a = 0; a < narr && feasible; ++a) {
      lists[a] = admissible_tables(sizes[view.arrows[a].tgt],
                                   sizes[view.arrows[a].src], modes[a]);
      if (lists[a].empty()) feasible = false;
    }
    if (feasible) {
      std::vector<std::size_t> idx(narr, 0);
      std::vector<const Table*> chosen(narr);
      while (true) {
        if (examined >= b.budget) return false;
        ++examined;
        for (int a = 0; a < narr; ++a) chosen[a] = &lists[a][idx[a]];
        if (functorial(view, sizes, chosen)) fn(sizes, chosen);
        int a = narr - 1;
        while (a >= 0 && ++idx[a] == lists[a].size()) idx[a--] = 0;
        if (a < 0) break;
      }
    }
    int o = nobj - 1;
    while (o >= 0 && ++sizes[o] > b.max_stage_size) sizes[o--] = 0;
    if (o < 0) return true;
  }
}

inline void check_bounds(const SearchBounds& b) {
  if (!b.site) throw Error(ErrorKind::BadFormat, "search without a site");
  if (b.max_stage_size < 0 || b.max_stage_size > 9)
    throw Error(ErrorKind::BadFormat,
                "max stage size must be between 0 and 9");
  if (b.budget == 0)
    throw Error(ErrorKind::BadFormat, "candidate budget must be positive");
}

}  // namespace detail

// All presheaves within the bounds that are internally inhabited yet have no
// global element; one representative per isomorphism class when pruning.
// Every result is revalidated through the public predicates before it is
// returned.
inline std::vector<Presheaf> search_inhabited_no_point(const SearchBounds& b) {
  detail::check_bounds(b);
  detail::SearchView view(b.site);
  std::vector<Presheaf> results;
  std::uint64_t examined = 0;
  bool complete = detail::enumerate_candidates(
      view, b, examined,
      [&](const std::vector<int>& sizes,
          const std::vector<const detail::Table*>& tables) {
        for (int s : sizes)
          if (s == 0) return;
        if (detail::count_global_families(view, sizes, tables) != 0) return;
        Presheaf p = detail::materialize(view, sizes, tables);
        if (!is_inhabited_internally(p) || !global_elements(p).empty())
          throw Error(ErrorKind::BadFormat,
                      "search predicates disagree with presheaf predicates");
        if (b.prune) {
          for (const Presheaf& kept : results)
            if (find_isomorphism(kept, p)) return;
        }
        results.push_back(std::move(p));
      });
  if (!complete)
    throw Error(ErrorKind::BudgetExceeded,
                "candidate budget exhausted after " + std::to_string(examined) +
                    " candidates; " + std::to_string(results.size()) +
                    " partial results");
  return results;
}

// Pairs of non-isomorphic presheaves agreeing on the name profile
// (global-element count, internal inhabitedness). Candidates are reduced to
// isomorphism-class representatives as they are found; each fresh class is
// paired with every earlier class of the same profile.
inline std::vector<std::pair<Presheaf, Presheaf>> search_noniso_same_profile(
    const SearchBounds& b) {
  detail::check_bounds(b);
  detail::SearchView view(b.site);
  struct Profile {
    bool inhabited;
    std::uint64_t points;
    bool operator<(const Profile& o) const {
      return std::tie(inhabited, points) < std::tie(o.inhabited, o.points);
    }
  };
  std::map<Profile, std::vector<Presheaf>> classes;
  std::vector<std::pair<Presheaf, Presheaf>> pairs;
  std::uint64_t examined = 0;
  bool complete = detail::enumerate_candidates(
      view, b, examined,
      [&](const std::vector<int>& sizes,
          const std::vector<const detail::Table*>& tables) {
        bool inhabited = true;
        for (int s : sizes)
          if (s == 0) inhabited = false;
        Profile prof{inhabited,
                     detail::count_global_families(view, sizes, tables)};
        Presheaf p = detail::materialize(view, sizes, tables);
        auto& reps = classes[prof];
        for (const Presheaf& rep : reps)
          if (find_isomorphism(rep, p)) return;  // known class
        for (const Presheaf& rep : reps) pairs.emplace_back(rep, p);
        reps.push_back(std::move(p));
      });
  if (!complete)
    throw Error(ErrorKind::BudgetExceeded,
                "candidate budget exhausted after " + std::to_string(examined) +
                    " candidates; " + std::to_string(pairs.size()) +
                    " partial pairs");
  return pairs;
}

}  // namespace toposcope
