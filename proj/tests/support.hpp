#pragma once

#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "toposcope/ast.hpp"
#include "toposcope/forcing.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/semantics.hpp"
#include "toposcope/site.hpp"
#include "toposcope/subobject.hpp"

namespace support {

namespace ts = toposcope;

// Walking composable pair a -> b -> c with an explicit composite.
inline ts::FinCat make_chain_cat() {
  ts::RawCategory raw;
  raw.objects = {"a", "b", "c"};
  raw.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}, {"id_c", "c", "c"},
                   {"f", "a", "b"},    {"g", "b", "c"},    {"gf", "a", "c"}};
  raw.identities = {{"a", "id_a"}, {"b", "id_b"}, {"c", "id_c"}};
  raw.composites = {{{"g", "f", "gf"}}};
  return ts::validate_category(raw);
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(TOPOSCOPE_CLI_PATH) + " " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  CliResult result;
  if (!pipe) return result;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe))
    result.out.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Terminal-site environment with a binary function, a constant, and a
// unary relation.
inline ts::SemanticEnvironment xor_env() {
  ts::SemanticEnvironment env;
  env.name = "xor_env";
  env.site = ts::builtin_site("terminal");
  env.signature.sorts = {"A"};
  env.signature.functions["xor"] = {{"A", "A"}, "A"};
  env.signature.functions["c"] = {{}, "A"};
  env.signature.relations["P"] = {"A"};
  ts::Presheaf two = ts::validate_presheaf(env.site, {{"pt", {"0", "1"}}}, {});
  env.sorts["A"] = two;
  ts::Presheaf square = ts::product(two, two).object;
  env.functions.emplace(
      "xor", ts::validate_nat(square, two,
                              {{"pt",
                                {{"(0,0)", "0"},
                                 {"(0,1)", "1"},
                                 {"(1,0)", "1"},
                                 {"(1,1)", "0"}}}}));
  env.functions.emplace(
      "c", ts::validate_nat(ts::terminal(env.site), two, {{"pt", {{"*", "0"}}}}));
  env.relations.emplace("P", ts::validate_subobject(two, {{"pt", {"1"}}}));
  return ts::validate_environment(std::move(env));
}

// Crown environment with relations over the double cover: a unary sheet
// predicate and the binary diagonal.
inline ts::SemanticEnvironment crown_rel_env() {
  ts::SemanticEnvironment env;
  env.name = "crown_rel_env";
  env.site = ts::builtin_site("crown");
  env.signature.sorts = {"F2"};
  env.signature.relations["P"] = {"F2"};
  env.signature.relations["D"] = {"F2", "F2"};
  ts::Presheaf cover = ts::builtin("crown_double_cover").sort("F2");
  env.sorts["F2"] = cover;
  env.relations.emplace(
      "P", ts::validate_subobject(
               cover, {{"U", {"u1"}}, {"W1", {"1"}}, {"W2", {"1"}}}));
  ts::Product square = ts::product(cover, cover);
  env.relations.emplace("D", ts::equalizer_sub(square.proj1, square.proj2));
  return ts::validate_environment(std::move(env));
}

// ---- term and formula generation --------------------------------------

inline ts::Term make_var(const std::string& name) {
  ts::Term t;
  t.kind = ts::Term::Kind::Var;
  t.name = name;
  return t;
}

inline ts::Term make_app(const std::string& name, std::vector<ts::Term> args) {
  ts::Term t;
  t.kind = ts::Term::Kind::App;
  t.name = name;
  t.args = std::move(args);
  return t;
}

// Terms of application depth <= 1 over the context: variables, constants,
// and single applications to variables or constants.
inline std::map<std::string, std::vector<ts::Term>> shallow_terms(
    const ts::Signature& sig, const ts::Context& ctx) {
  std::map<std::string, std::vector<ts::Term>> by_sort;
  std::map<std::string, std::vector<ts::Term>> leaves;
  for (const auto& [var, sort] : ctx) {
    by_sort[sort].push_back(make_var(var));
    leaves[sort].push_back(make_var(var));
  }
  for (const auto& [name, fn] : sig.functions)
    if (fn.args.empty()) {
      by_sort[fn.result].push_back(make_var(name));  // parses as a bare identifier
      leaves[fn.result].push_back(make_var(name));
    }
  for (const auto& [name, fn] : sig.functions) {
    if (fn.args.empty()) continue;
    std::vector<std::vector<ts::Term>> pools;
    bool feasible = true;
    for (const std::string& s : fn.args) {
      auto it = leaves.find(s);
      if (it == leaves.end() || it->second.empty()) {
        feasible = false;
        break;
      }
      pools.push_back(it->second);
    }
    if (!feasible) continue;
    std::vector<std::size_t> idx(pools.size(), 0);
    while (true) {
      std::vector<ts::Term> args;
      for (std::size_t i = 0; i < pools.size(); ++i) args.push_back(pools[i][idx[i]]);
      by_sort[fn.result].push_back(make_app(name, std::move(args)));
      std::size_t i = 0;
      for (; i < pools.size(); ++i) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
      if (i == pools.size()) break;
    }
  }
  return by_sort;
}

inline ts::Formula make_node(ts::Formula::Kind kind,
                             std::vector<ts::Formula> children) {
  ts::Formula f;
  f.kind = kind;
  f.children = std::move(children);
  return f;
}

inline std::vector<ts::Formula> atoms(const ts::Signature& sig,
                                      const ts::Context& ctx) {
  std::vector<ts::Formula> out;
  ts::Formula t;
  t.kind = ts::Formula::Kind::True;
  out.push_back(t);
  ts::Formula fls;
  fls.kind = ts::Formula::Kind::False;
  out.push_back(fls);
  auto terms = shallow_terms(sig, ctx);
  for (const auto& [sort, pool] : terms)
    for (const ts::Term& lhs : pool)
      for (const ts::Term& rhs : pool) {
        ts::Formula eq;
        eq.kind = ts::Formula::Kind::Eq;
        eq.terms = {lhs, rhs};
        out.push_back(std::move(eq));
      }
  for (const auto& [name, args] : sig.relations) {
    std::vector<std::vector<ts::Term>> pools;
    bool feasible = true;
    for (const std::string& s : args) {
      auto it = terms.find(s);
      if (it == terms.end() || it->second.empty()) {
        feasible = false;
        break;
      }
      pools.push_back(it->second);
    }
    if (!feasible) continue;
    std::vector<std::size_t> idx(pools.size(), 0);
    while (true) {
      ts::Formula rel;
      rel.kind = ts::Formula::Kind::Rel;
      rel.name = name;
      for (std::size_t i = 0; i < pools.size(); ++i)
        rel.terms.push_back(pools[i][idx[i]]);
      out.push_back(std::move(rel));
      if (pools.empty()) break;
      std::size_t i = 0;
      for (; i < pools.size(); ++i) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
      if (i == pools.size()) break;
    }
  }
  return out;
}

// Exhaustive corpus of depth <= 2: atoms, one connective over atoms, and one
// quantifier over the atoms of the extended context.
inline std::vector<ts::Formula> exhaustive_depth2(const ts::Signature& sig,
                                                  const ts::Context& ctx) {
  std::vector<ts::Formula> out = atoms(sig, ctx);
  std::vector<ts::Formula> base = out;
  for (const ts::Formula& a : base)
    out.push_back(make_node(ts::Formula::Kind::Not, {a}));
  for (auto kind : {ts::Formula::Kind::And, ts::Formula::Kind::Or,
                    ts::Formula::Kind::Implies})
    for (const ts::Formula& a : base)
      for (const ts::Formula& b : base) out.push_back(make_node(kind, {a, b}));
  for (auto kind : {ts::Formula::Kind::Exists, ts::Formula::Kind::Forall})
    for (const std::string& sort : sig.sorts) {
      ts::Context extended = ctx;
      extended.push_back({"zz", sort});
      for (const ts::Formula& body : atoms(sig, extended)) {
        ts::Formula q;
        q.kind = kind;
        q.name = "zz";
        q.sort = sort;
        q.children = {body};
        out.push_back(std::move(q));
      }
    }
  return out;
}

inline ts::Formula random_formula(const ts::Signature& sig, const ts::Context& ctx,
                                  int depth, std::mt19937& rng, int& fresh) {
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  if (depth == 0) {
    std::vector<ts::Formula> pool = atoms(sig, ctx);
    return pool[pick(pool.size())];
  }
  switch (pick(7)) {
    case 0: {
      std::vector<ts::Formula> pool = atoms(sig, ctx);
      return pool[pick(pool.size())];
    }
    case 1:
      return make_node(ts::Formula::Kind::Not,
                       {random_formula(sig, ctx, depth - 1, rng, fresh)});
    case 2:
      return make_node(ts::Formula::Kind::And,
                       {random_formula(sig, ctx, depth - 1, rng, fresh),
                        random_formula(sig, ctx, depth - 1, rng, fresh)});
    case 3:
      return make_node(ts::Formula::Kind::Or,
                       {random_formula(sig, ctx, depth - 1, rng, fresh),
                        random_formula(sig, ctx, depth - 1, rng, fresh)});
    case 4:
      return make_node(ts::Formula::Kind::Implies,
                       {random_formula(sig, ctx, depth - 1, rng, fresh),
                        random_formula(sig, ctx, depth - 1, rng, fresh)});
    default: {
      ts::Formula q;
      q.kind = pick(2) ? ts::Formula::Kind::Exists : ts::Formula::Kind::Forall;
      q.sort = sig.sorts[pick(sig.sorts.size())];
      q.name = "q" + std::to_string(fresh++);
      ts::Context extended = ctx;
      extended.push_back({q.name, q.sort});
      q.children = {random_formula(sig, extended, depth - 1, rng, fresh)};
      return q;
    }
  }
}

// ---- cross-semantics comparison ----------------------------------------

// Checks subobject semantics against forcing on every stage and every
// binding of the context; returns the number of points compared.
inline std::size_t agreement_points(const ts::SemanticEnvironment& env,
                                    const ts::Context& ctx,
                                    const ts::Formula& typed, bool& agree) {
  ts::Subobject sub = ts::interpret_formula(env, ctx, typed);
  ts::ForcingEvaluator evaluator(env);
  std::size_t points = 0;
  agree = true;
  for (const std::string& obj : env.site->objects) {
    std::vector<std::vector<std::string>> pools;
    for (const auto& [var, sort] : ctx) pools.push_back(env.sort(sort).at(obj));
    std::vector<std::size_t> idx(pools.size(), 0);
    bool empty_pool = false;
    for (const auto& pool : pools)
      if (pool.empty()) empty_pool = true;
    if (empty_pool) continue;
    while (true) {
      std::map<std::string, std::string> bindings;
      for (std::size_t i = 0; i < pools.size(); ++i)
        bindings[ctx[i].first] = pools[i][idx[i]];
      bool lhs = sub.contains(obj, ts::context_tuple_label(ctx, bindings));
      bool rhs = evaluator.forces(ts::Stage{obj, bindings}, typed);
      ++points;
      if (lhs != rhs) {
        agree = false;
        return points;
      }
      if (pools.empty()) break;
      std::size_t i = 0;
      for (; i < pools.size(); ++i) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
      if (i == pools.size()) break;
    }
  }
  return points;
}

// Default comparison context per environment: one variable per sort, at
// most two variables.
inline ts::Context default_context(const ts::SemanticEnvironment& env) {
  ts::Context ctx;
  const char* names[] = {"x", "y"};
  std::size_t i = 0;
  for (const std::string& sort : env.signature.sorts) {
    if (i >= 2) break;
    ctx.push_back({names[i++], sort});
  }
  return ctx;
}

// ---- random structures --------------------------------------------------

inline ts::Subobject random_subobject(const ts::Presheaf& a, std::mt19937& rng) {
  std::map<std::string, std::set<std::string>> parts;
  std::bernoulli_distribution coin(0.5);
  for (const auto& [obj, labels] : a.sets) {
    parts.try_emplace(obj);
    for (const std::string& x : labels)
      if (coin(rng)) parts[obj].insert(x);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const ts::Morphism& m : a.site->morphisms)
      for (const std::string& x : parts[m.tgt])
        if (parts[m.src].insert(a.act(m.id, x)).second) changed = true;
  }
  return ts::validate_subobject(a, std::move(parts));
}

inline ts::Presheaf random_presheaf(std::shared_ptr<const ts::FinCat> site,
                                    int max_size, std::mt19937& rng) {
  std::uniform_int_distribution<int> size_dist(0, max_size);
  std::map<std::string, std::vector<std::string>> sets;
  for (const std::string& obj : site->objects) {
    int n = size_dist(rng);
    auto& labels = sets[obj];
    for (int i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i));
  }
  // a morphism with an empty source stage forces an empty target stage
  bool changed = true;
  while (changed) {
    changed = false;
    for (const ts::Morphism& m : site->morphisms)
      if (sets[m.src].empty() && !sets[m.tgt].empty()) {
        sets[m.tgt].clear();
        changed = true;
      }
  }
  std::map<std::string, std::map<std::string, std::string>> actions;
  for (const ts::Morphism& m : site->morphisms) {
    if (site->identity(m.src) == m.id) continue;
    auto& table = actions[m.id];
    const auto& cod = sets[m.src];
    for (const std::string& x : sets[m.tgt]) {
      if (cod.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, cod.size() - 1);
      table[x] = cod[pick(rng)];
    }
  }
  return ts::validate_presheaf(std::move(site), std::move(sets), std::move(actions));
}

}  // namespace support
