#pragma once

#include <string>

#include "toposcope/ast.hpp"
#include "toposcope/errors.hpp"

namespace toposcope {

// Annotates every subterm with its sort. Bare identifiers resolve to context
// variables first (innermost binding wins), then to 0-ary functions.
inline Term typecheck_term(const Term& t, const Signature& sig,
                           const Context& ctx) {
  Term out = t;
  if (t.kind == Term::Kind::Var) {
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
      if (it->first == t.name) {
        out.sort = it->second;
        return out;
      }
    auto fn = sig.functions.find(t.name);
    if (fn == sig.functions.end())
      throw Error(ErrorKind::UnboundVariable, t.span,
                  "unbound variable '" + t.name + "'");
    if (!fn->second.args.empty())
      throw Error(ErrorKind::ArityMismatch, t.span,
                  "function '" + t.name + "' expects " +
                      std::to_string(fn->second.args.size()) +
                      " arguments, got 0");
    out.kind = Term::Kind::App;
    out.sort = fn->second.result;
    return out;
  }
  auto fn = sig.functions.find(t.name);
  if (fn == sig.functions.end())
    throw Error(ErrorKind::UnboundVariable, t.span,
                "unknown function symbol '" + t.name + "'");
  if (fn->second.args.size() != t.args.size())
    throw Error(ErrorKind::ArityMismatch, t.span,
                "function '" + t.name + "' expects " +
                    std::to_string(fn->second.args.size()) + " arguments, got " +
                    std::to_string(t.args.size()));
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    out.args[i] = typecheck_term(t.args[i], sig, ctx);
    if (out.args[i].sort != fn->second.args[i])
      throw Error(ErrorKind::SortMismatch, t.args[i].span,
                  "argument " + std::to_string(i + 1) + " of '" + t.name +
                      "' has sort " + out.args[i].sort + ", expected " +
                      fn->second.args[i]);
  }
  out.sort = fn->second.result;
  return out;
}

inline Formula typecheck(const Formula& f, const Signature& sig,
                         const Context& ctx) {
  Formula out = f;
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return out;
    case Formula::Kind::Rel: {
      auto rel = sig.relations.find(f.name);
      if (rel == sig.relations.end())
        throw Error(ErrorKind::UnboundVariable, f.span,
                    "unknown relation symbol '" + f.name + "'");
      if (rel->second.size() != f.terms.size())
        throw Error(ErrorKind::ArityMismatch, f.span,
                    "relation '" + f.name + "' expects " +
                        std::to_string(rel->second.size()) + " arguments, got " +
                        std::to_string(f.terms.size()));
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        out.terms[i] = typecheck_term(f.terms[i], sig, ctx);
        if (out.terms[i].sort != rel->second[i])
          throw Error(ErrorKind::SortMismatch, f.terms[i].span,
                      "argument " + std::to_string(i + 1) + " of '" + f.name +
                          "' has sort " + out.terms[i].sort + ", expected " +
                          rel->second[i]);
      }
      return out;
    }
    case Formula::Kind::Eq: {
      out.terms[0] = typecheck_term(f.terms.at(0), sig, ctx);
      out.terms[1] = typecheck_term(f.terms.at(1), sig, ctx);
      if (out.terms[0].sort != out.terms[1].sort)
        throw Error(ErrorKind::SortMismatch, f.span,
                    "equation between sorts " + out.terms[0].sort + " and " +
                        out.terms[1].sort);
      return out;
    }
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      for (std::size_t i = 0; i < f.children.size(); ++i)
        out.children[i] = typecheck(f.children[i], sig, ctx);
      return out;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (!sig.has_sort(f.sort))
        throw Error(ErrorKind::SortMismatch, f.span,
                    "unknown sort '" + f.sort + "' in binder");
      Context extended = ctx;
      extended.push_back({f.name, f.sort});
      out.children[0] = typecheck(f.children.at(0), sig, extended);
      return out;
    }
  }
  return out;
}

}  // namespace toposcope
