#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "toposcope/errors.hpp"

namespace toposcope {

// A multi-sorted first-order signature. Constants are 0-ary functions.
struct Signature {
  std::vector<std::string> sorts;
  struct Func {
    std::vector<std::string> args;
    std::string result;
    bool operator==(const Func&) const = default;
  };
  std::map<std::string, Func> functions;
  std::map<std::string, std::vector<std::string>> relations;

  bool operator==(const Signature&) const = default;

  bool has_sort(const std::string& s) const {
    for (const std::string& t : sorts)
      if (t == s) return true;
    return false;
  }
};

inline void validate_signature(const Signature& sig) {
  std::set<std::string> seen;
  for (const std::string& s : sig.sorts)
    if (!seen.insert(s).second)
      throw Error(ErrorKind::BadFormat, "duplicate sort '" + s + "'");
  for (const auto& [name, f] : sig.functions) {
    for (const std::string& s : f.args)
      if (!sig.has_sort(s))
        throw Error(ErrorKind::BadFormat,
                    "function '" + name + "' uses unknown sort '" + s + "'");
    if (!sig.has_sort(f.result))
      throw Error(ErrorKind::BadFormat,
                  "function '" + name + "' uses unknown sort '" + f.result + "'");
  }
  for (const auto& [name, args] : sig.relations) {
    if (sig.functions.count(name))
      throw Error(ErrorKind::BadFormat,
                  "'" + name + "' is both a function and a relation");
    for (const std::string& s : args)
      if (!sig.has_sort(s))
        throw Error(ErrorKind::BadFormat,
                    "relation '" + name + "' uses unknown sort '" + s + "'");
  }
}

// Terms: a variable reference or a function application. The parser emits
// bare identifiers as Var; typechecking rewrites constants into 0-ary App
// nodes and fills `sort`. Structural equality ignores spans and sorts.
struct Term {
  enum class Kind { Var, App };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<Term> args;
  Span span{};
  std::string sort;

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.args == b.args;
  }
};

struct Formula {
  enum class Kind {
    True,
    False,
    Rel,      // name, terms
    Eq,       // terms = {lhs, rhs}
    Not,      // children = {body}
    And,      // children = {lhs, rhs}
    Or,
    Implies,
    Exists,   // name = bound variable, sort = its sort, children = {body}
    Forall,
  };
  Kind kind = Kind::True;
  std::string name;
  std::string sort;
  std::vector<Term> terms;
  std::vector<Formula> children;
  Span span{};

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.kind == b.kind && a.name == b.name && a.sort == b.sort &&
           a.terms == b.terms && a.children == b.children;
  }
};

// Ordered typing context; later entries shadow earlier ones.
using Context = std::vector<std::pair<std::string, std::string>>;

inline void collect_free_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var)
    out.insert(t.name);
  else
    for (const Term& a : t.args) collect_free_vars(a, out);
}

inline void collect_free_vars(const Formula& f, std::set<std::string>& out) {
  for (const Term& t : f.terms) collect_free_vars(t, out);
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) {
    std::set<std::string> body;
    collect_free_vars(f.children.at(0), body);
    body.erase(f.name);
    out.insert(body.begin(), body.end());
  } else {
    for (const Formula& c : f.children) collect_free_vars(c, out);
  }
}

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  collect_free_vars(f, out);
  return out;
}

// Sorts of free variables, read off a typechecked formula.
inline void collect_free_var_sorts(const Term& t,
                                   std::map<std::string, std::string>& out) {
  if (t.kind == Term::Kind::Var)
    out[t.name] = t.sort;
  else
    for (const Term& a : t.args) collect_free_var_sorts(a, out);
}

inline void collect_free_var_sorts(const Formula& f,
                                   std::map<std::string, std::string>& out) {
  for (const Term& t : f.terms) collect_free_var_sorts(t, out);
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) {
    std::map<std::string, std::string> body;
    collect_free_var_sorts(f.children.at(0), body);
    body.erase(f.name);
    out.insert(body.begin(), body.end());
  } else {
    for (const Formula& c : f.children) collect_free_var_sorts(c, out);
  }
}

inline std::map<std::string, std::string> free_var_sorts(const Formula& f) {
  std::map<std::string, std::string> out;
  collect_free_var_sorts(f, out);
  return out;
}

namespace detail {

inline std::string fresh_name(const std::string& base,
                              const std::set<std::string>& taken) {
  std::string candidate = base;
  int i = 0;
  while (taken.count(candidate)) candidate = base + "_" + std::to_string(i++);
  return candidate;
}

}  // namespace detail

inline Term substitute(const Term& t, const std::string& var,
                       const Term& replacement) {
  if (t.kind == Term::Kind::Var)
    return t.name == var ? replacement : t;
  Term out = t;
  for (Term& a : out.args) a = substitute(a, var, replacement);
  return out;
}

// Capture-avoiding substitution of a term for a free variable.
inline Formula substitute(const Formula& f, const std::string& var,
                          const Term& replacement) {
  Formula out = f;
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return out;
    case Formula::Kind::Rel:
    case Formula::Kind::Eq:
      for (Term& t : out.terms) t = substitute(t, var, replacement);
      return out;
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      for (Formula& c : out.children) c = substitute(c, var, replacement);
      return out;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (f.name == var) return out;  // bound here, nothing free below
      std::set<std::string> incoming;
      collect_free_vars(replacement, incoming);
      if (incoming.count(f.name)) {
        std::set<std::string> taken = incoming;
        collect_free_vars(f.children.at(0), taken);
        taken.insert(var);
        std::string fresh = detail::fresh_name(f.name, taken);
        Term v;
        v.kind = Term::Kind::Var;
        v.name = fresh;
        v.sort = f.sort;
        out.name = fresh;
        out.children[0] = substitute(f.children.at(0), f.name, v);
      }
      out.children[0] = substitute(out.children.at(0), var, replacement);
      return out;
    }
  }
  return out;
}

}  // namespace toposcope
