#pragma once

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "toposcope/ast.hpp"
#include "toposcope/errors.hpp"
#include "toposcope/parser.hpp"
#include "toposcope/semantics.hpp"

namespace toposcope {

// A forcing stage: an object of the site together with elements interpreting
// the free variables there.
struct Stage {
  std::string object;
  std::map<std::string, std::string> bindings;
};

// Kripke-Joyal forcing for presheaves, trivial topology: disjunction and
// existence are stagewise, implication and universals quantify over all
// arrows into the stage. Evaluation is memoized per (subformula, stage,
// environment restricted to free variables); with a Grothendieck topology
// the existential and disjunction clauses would instead search a cover.
class ForcingEvaluator {
 public:
  explicit ForcingEvaluator(const SemanticEnvironment& env) : env_(env) {}

  void set_trace(std::ostream* sink) { trace_ = sink; }

  bool forces(const Stage& stage, const Formula& typed) {
    if (!env_.site->has_object(stage.object))
      throw Error(ErrorKind::UnknownObject,
                  "no stage object '" + stage.object + "'");
    std::map<std::string, std::string> scope = free_var_sorts(typed);
    std::map<std::string, std::string> bound;
    for (const auto& [var, sort] : scope) {
      auto it = stage.bindings.find(var);
      if (it == stage.bindings.end())
        throw Error(ErrorKind::UnboundVariable,
                    "stage does not bind free variable '" + var + "'");
      if (!env_.sort(sort).has_element(stage.object, it->second))
        throw Error(ErrorKind::SortMismatch,
                    "'" + it->second + "' is not an element of " + sort +
                        " at stage '" + stage.object + "'");
      bound[var] = it->second;
    }
    scope_ = std::move(scope);
    reset_caches();
    return eval(stage.object, typed, bound);
  }

  // A closed formula holds globally when every stage of the site forces it.
  bool holds_globally(const Formula& typed) {
    if (!free_vars(typed).empty())
      throw Error(ErrorKind::UnboundVariable,
                  "global evaluation needs a closed formula");
    scope_.clear();
    reset_caches();
    for (const std::string& obj : env_.site->objects)
      if (!eval(obj, typed, {})) return false;
    return true;
  }

 private:
  using Env = std::map<std::string, std::string>;

  const SemanticEnvironment& env_;
  std::ostream* trace_ = nullptr;
  int depth_ = 0;
  std::map<std::string, std::string> scope_;  // variable -> sort
  std::map<const Formula*, std::set<std::string>> free_cache_;
  std::map<std::tuple<const Formula*, std::string, std::string>, bool> memo_;

  // Caches are keyed by node address, which is only stable while one
  // top-level formula is being evaluated; both reset on every entry.
  void reset_caches() {
    memo_.clear();
    free_cache_.clear();
  }

  const std::set<std::string>& free_of(const Formula& f) {
    auto it = free_cache_.find(&f);
    if (it == free_cache_.end())
      it = free_cache_.emplace(&f, free_vars(f)).first;
    return it->second;
  }

  std::string env_key(const Formula& f, const Env& env) {
    std::string key;
    for (const std::string& v : free_of(f)) {
      key += v;
      key += '=';
      key += env.at(v);
      key += ';';
    }
    return key;
  }

  Env restrict_env(const Env& env, const std::string& mor) {
    Env out;
    for (const auto& [var, elem] : env)
      out[var] = env_.sort(scope_.at(var)).act(mor, elem);
    return out;
  }

  std::string eval_term(const std::string& obj, const Term& t, const Env& env) {
    if (t.kind == Term::Kind::Var) {
      auto it = env.find(t.name);
      if (it == env.end())
        throw Error(ErrorKind::UnboundVariable,
                    "variable '" + t.name + "' is not bound at this stage");
      return it->second;
    }
    auto fn = env_.functions.find(t.name);
    if (fn == env_.functions.end())
      throw Error(ErrorKind::MissingInterpretation,
                  "function '" + t.name + "' has no interpretation");
    std::string tuple = "*";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      std::string v = eval_term(obj, t.args[i], env);
      tuple = i == 0 ? v : pair_label(tuple, v);
    }
    return fn->second.apply(obj, tuple);
  }

  void trace_line(const std::string& obj, const Formula& f, const Env& env,
                  const char* note) {
    if (!trace_) return;
    for (int i = 0; i < depth_; ++i) *trace_ << "  ";
    *trace_ << obj << " |- " << print(f);
    if (!env.empty()) {
      *trace_ << "  [";
      bool first = true;
      for (const auto& [v, e] : env) {
        if (!first) *trace_ << ", ";
        *trace_ << v << "=" << e;
        first = false;
      }
      *trace_ << "]";
    }
    *trace_ << "  " << note << "\n";
  }

  bool eval(const std::string& obj, const Formula& f, const Env& env) {
    Env trimmed;
    for (const std::string& v : free_of(f)) trimmed[v] = env.at(v);
    auto key = std::make_tuple(&f, obj, env_key(f, trimmed));
    if (!trace_) {
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    trace_line(obj, f, trimmed, "?");
    ++depth_;
    bool result = eval_raw(obj, f, trimmed);
    --depth_;
    trace_line(obj, f, trimmed, result ? "=> forced" : "=> not forced");
    memo_[key] = result;
    return result;
  }

  bool eval_raw(const std::string& obj, const Formula& f, const Env& env) {
    switch (f.kind) {
      case Formula::Kind::True:
        return true;
      case Formula::Kind::False:
        return false;
      case Formula::Kind::Rel: {
        auto rel = env_.relations.find(f.name);
        if (rel == env_.relations.end())
          throw Error(ErrorKind::MissingInterpretation,
                      "relation '" + f.name + "' has no interpretation");
        std::string tuple = "*";
        for (std::size_t i = 0; i < f.terms.size(); ++i) {
          std::string v = eval_term(obj, f.terms[i], env);
          tuple = i == 0 ? v : pair_label(tuple, v);
        }
        return rel->second.contains(obj, tuple);
      }
      case Formula::Kind::Eq:
        return eval_term(obj, f.terms.at(0), env) ==
               eval_term(obj, f.terms.at(1), env);
      case Formula::Kind::And:
        return eval(obj, f.children.at(0), env) &&
               eval(obj, f.children.at(1), env);
      case Formula::Kind::Or:
        return eval(obj, f.children.at(0), env) ||
               eval(obj, f.children.at(1), env);
      case Formula::Kind::Implies: {
        for (const std::string& mor : env_.site->arrows_into(obj)) {
          const std::string& d = env_.site->morphism(mor).src;
          Env restricted = restrict_env(env, mor);
          if (eval(d, f.children.at(0), restricted) &&
              !eval(d, f.children.at(1), restricted))
            return false;
        }
        return true;
      }
      case Formula::Kind::Not: {
        for (const std::string& mor : env_.site->arrows_into(obj)) {
          const std::string& d = env_.site->morphism(mor).src;
          if (eval(d, f.children.at(0), restrict_env(env, mor))) return false;
        }
        return true;
      }
      case Formula::Kind::Exists: {
        const Presheaf& dom = env_.sort(f.sort);
        std::string saved_sort;
        auto prev = scope_.find(f.name);
        bool had = prev != scope_.end();
        if (had) saved_sort = prev->second;
        scope_[f.name] = f.sort;
        bool found = false;
        for (const std::string& witness : dom.at(obj)) {
          Env extended = env;
          extended[f.name] = witness;
          if (eval(obj, f.children.at(0), extended)) {
            found = true;
            break;
          }
        }
        if (had) scope_[f.name] = saved_sort; else scope_.erase(f.name);
        return found;
      }
      case Formula::Kind::Forall: {
        const Presheaf& dom = env_.sort(f.sort);
        std::string saved_sort;
        auto prev = scope_.find(f.name);
        bool had = prev != scope_.end();
        if (had) saved_sort = prev->second;
        scope_[f.name] = f.sort;
        bool ok = true;
        for (const std::string& mor : env_.site->arrows_into(obj)) {
          const std::string& d = env_.site->morphism(mor).src;
          Env restricted = restrict_env(env, mor);
          for (const std::string& witness : dom.at(d)) {
            Env extended = restricted;
            extended[f.name] = witness;
            if (!eval(d, f.children.at(0), extended)) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
        }
        if (had) scope_[f.name] = saved_sort; else scope_.erase(f.name);
        return ok;
      }
    }
    throw Error(ErrorKind::BadFormat, "unreachable formula kind");
  }
};

inline bool forces(const SemanticEnvironment& env, const Stage& stage,
                   const Formula& typed) {
  ForcingEvaluator e(env);
  return e.forces(stage, typed);
}

inline bool holds_globally(const SemanticEnvironment& env,
                           const Formula& typed) {
  ForcingEvaluator e(env);
  return e.holds_globally(typed);
}

}  // namespace toposcope
