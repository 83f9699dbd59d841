#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toposcope/ast.hpp"
#include "toposcope/errors.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/subobject.hpp"

namespace toposcope {

// A signature interpreted in presheaves over a fixed site: sorts become
// presheaves, function symbols natural transformations out of the product of
// their argument sorts, relation symbols subobjects of that product.
struct SemanticEnvironment {
  std::string name;
  std::string doc;
  std::shared_ptr<const FinCat> site;
  Signature signature;
  std::map<std::string, Presheaf> sorts;
  std::map<std::string, NatTrans> functions;
  std::map<std::string, Subobject> relations;

  const Presheaf& sort(const std::string& s) const {
    auto it = sorts.find(s);
    if (it == sorts.end())
      throw Error(ErrorKind::MissingInterpretation,
                  "sort '" + s + "' has no interpretation");
    return it->second;
  }
};

// Left-nested product of sort interpretations; empty list gives the
// terminal presheaf and a single sort gives the presheaf itself.
inline Presheaf arg_product(const SemanticEnvironment& env,
                            const std::vector<std::string>& sorts) {
  if (sorts.empty()) return terminal(env.site);
  Presheaf acc = env.sort(sorts[0]);
  for (std::size_t i = 1; i < sorts.size(); ++i)
    acc = product(acc, env.sort(sorts[i])).object;
  return acc;
}

inline SemanticEnvironment validate_environment(SemanticEnvironment env) {
  validate_signature(env.signature);
  if (!env.site) throw Error(ErrorKind::BadFormat, "environment without a site");
  for (const std::string& s : env.signature.sorts) {
    auto it = env.sorts.find(s);
    if (it == env.sorts.end())
      throw Error(ErrorKind::MissingInterpretation,
                  "sort '" + s + "' has no interpretation");
    if (!(it->second.site == env.site || *it->second.site == *env.site))
      throw Error(ErrorKind::SiteMismatch,
                  "sort '" + s + "' lives on a different site");
  }
  for (const auto& [name, p] : env.sorts)
    if (!env.signature.has_sort(name))
      throw Error(ErrorKind::BadFormat,
                  "interpretation for undeclared sort '" + name + "'");
  for (const auto& [name, fn] : env.signature.functions) {
    auto it = env.functions.find(name);
    if (it == env.functions.end())
      throw Error(ErrorKind::MissingInterpretation,
                  "function '" + name + "' has no interpretation");
    if (!(it->second.src == arg_product(env, fn.args)))
      throw Error(ErrorKind::TypeMismatch,
                  "interpretation of '" + name +
                      "' is not defined on the product of its argument sorts");
    if (!(it->second.tgt == env.sort(fn.result)))
      throw Error(ErrorKind::TypeMismatch,
                  "interpretation of '" + name + "' does not land in sort " +
                      fn.result);
    if (!check_naturality(it->second))
      throw Error(ErrorKind::NonNatural,
                  "interpretation of '" + name + "' is not natural");
  }
  for (const auto& [name, fn] : env.functions)
    if (!env.signature.functions.count(name))
      throw Error(ErrorKind::BadFormat,
                  "interpretation for undeclared function '" + name + "'");
  for (const auto& [name, args] : env.signature.relations) {
    auto it = env.relations.find(name);
    if (it == env.relations.end())
      throw Error(ErrorKind::MissingInterpretation,
                  "relation '" + name + "' has no interpretation");
    if (!(it->second.ambient == arg_product(env, args)))
      throw Error(ErrorKind::TypeMismatch,
                  "interpretation of '" + name +
                      "' is not a subobject of the product of its argument sorts");
    if (!is_restriction_closed(it->second))
      throw Error(ErrorKind::TypeMismatch,
                  "interpretation of '" + name + "' is not restriction-closed");
  }
  for (const auto& [name, s] : env.relations)
    if (!env.signature.relations.count(name))
      throw Error(ErrorKind::BadFormat,
                  "interpretation for undeclared relation '" + name + "'");
  return env;
}

inline std::vector<std::string> context_sorts(const Context& ctx) {
  std::vector<std::string> out;
  for (const auto& [var, sort] : ctx) out.push_back(sort);
  return out;
}

inline Presheaf interpret_context(const SemanticEnvironment& env,
                                  const Context& ctx) {
  return arg_product(env, context_sorts(ctx));
}

// Projection of the i-th context variable out of the left-nested product.
inline NatTrans context_projection(const SemanticEnvironment& env,
                                   const Context& ctx, std::size_t index) {
  if (ctx.empty() || index >= ctx.size())
    throw Error(ErrorKind::BadFormat, "context projection out of range");
  if (ctx.size() == 1) return identity_nat(env.sort(ctx[0].second));
  Context prefix(ctx.begin(), ctx.end() - 1);
  Product p = product(interpret_context(env, prefix), env.sort(ctx.back().second));
  if (index + 1 == ctx.size()) return p.proj2;
  return compose(context_projection(env, prefix, index), p.proj1);
}

// The projection that forgets the last context variable.
inline NatTrans context_weakening(const SemanticEnvironment& env,
                                  const Context& ctx) {
  if (ctx.empty())
    throw Error(ErrorKind::BadFormat, "cannot weaken the empty context");
  Context prefix(ctx.begin(), ctx.end() - 1);
  if (prefix.empty()) return bang(env.sort(ctx.back().second));
  return product(interpret_context(env, prefix), env.sort(ctx.back().second)).proj1;
}

inline NatTrans interpret_term(const SemanticEnvironment& env,
                               const Context& ctx, const Term& t);

// Tupling of interpreted terms into the left-nested product of their sorts.
inline NatTrans interpret_tuple(const SemanticEnvironment& env,
                                const Context& ctx,
                                const std::vector<Term>& terms) {
  if (terms.empty()) return bang(interpret_context(env, ctx));
  NatTrans acc = interpret_term(env, ctx, terms[0]);
  for (std::size_t i = 1; i < terms.size(); ++i)
    acc = pairing(acc, interpret_term(env, ctx, terms[i]));
  return acc;
}

inline NatTrans interpret_term(const SemanticEnvironment& env,
                               const Context& ctx, const Term& t) {
  if (t.kind == Term::Kind::Var) {
    for (std::size_t i = ctx.size(); i-- > 0;)
      if (ctx[i].first == t.name) return context_projection(env, ctx, i);
    throw Error(ErrorKind::UnboundVariable, t.span,
                "variable '" + t.name + "' is not in the context");
  }
  auto it = env.functions.find(t.name);
  if (it == env.functions.end())
    throw Error(ErrorKind::MissingInterpretation,
                "function '" + t.name + "' has no interpretation");
  return compose(it->second, interpret_tuple(env, ctx, t.args));
}

inline Subobject interpret_formula(const SemanticEnvironment& env,
                                   const Context& ctx, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return sub_top(interpret_context(env, ctx));
    case Formula::Kind::False:
      return sub_bottom(interpret_context(env, ctx));
    case Formula::Kind::Rel: {
      auto it = env.relations.find(f.name);
      if (it == env.relations.end())
        throw Error(ErrorKind::MissingInterpretation,
                    "relation '" + f.name + "' has no interpretation");
      return pullback_sub(interpret_tuple(env, ctx, f.terms), it->second);
    }
    case Formula::Kind::Eq:
      return equalizer_sub(interpret_term(env, ctx, f.terms.at(0)),
                           interpret_term(env, ctx, f.terms.at(1)));
    case Formula::Kind::Not:
      return sub_neg(interpret_formula(env, ctx, f.children.at(0)));
    case Formula::Kind::And:
      return sub_meet(interpret_formula(env, ctx, f.children.at(0)),
                      interpret_formula(env, ctx, f.children.at(1)));
    case Formula::Kind::Or:
      return sub_join(interpret_formula(env, ctx, f.children.at(0)),
                      interpret_formula(env, ctx, f.children.at(1)));
    case Formula::Kind::Implies:
      return sub_implies(interpret_formula(env, ctx, f.children.at(0)),
                         interpret_formula(env, ctx, f.children.at(1)));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      Context extended = ctx;
      extended.push_back({f.name, f.sort});
      Subobject body = interpret_formula(env, extended, f.children.at(0));
      NatTrans proj = context_weakening(env, extended);
      return f.kind == Formula::Kind::Exists ? exists_along(proj, body)
                                             : forall_along(proj, body);
    }
  }
  throw Error(ErrorKind::BadFormat, "unreachable formula kind");
}

// <id, [[t]]> : [[ctx]] -> [[ctx, x : sort(t)]]; degenerates to [[t]] itself
// on the empty context.
inline NatTrans context_extension(const SemanticEnvironment& env,
                                  const Context& ctx, const Term& t) {
  NatTrans tt = interpret_term(env, ctx, t);
  if (ctx.empty()) return tt;
  return pairing(identity_nat(interpret_context(env, ctx)), tt);
}

// The element of [[ctx]] at a stage named by per-variable bindings.
inline std::string context_tuple_label(
    const Context& ctx, const std::map<std::string, std::string>& bindings) {
  if (ctx.empty()) return "*";
  std::string acc = bindings.at(ctx[0].first);
  for (std::size_t i = 1; i < ctx.size(); ++i)
    acc = pair_label(acc, bindings.at(ctx[i].first));
  return acc;
}

}  // namespace toposcope
