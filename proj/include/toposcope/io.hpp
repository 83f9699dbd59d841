#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "toposcope/errors.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/presheaf.hpp"
#include "toposcope/semantics.hpp"
#include "toposcope/site.hpp"
#include "toposcope/subobject.hpp"

namespace toposcope {

using Json = nlohmann::json;

namespace detail {

inline void require_object(const Json& j, const char* what) {
  if (!j.is_object())
    throw Error(ErrorKind::BadFormat, std::string(what) + " must be a JSON object");
}

inline void check_keys(const Json& j, const std::set<std::string>& allowed,
                       const char* what) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw Error(ErrorKind::BadFormat,
                  std::string("unknown key '") + key + "' in " + what);
}

inline std::string string_field(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error(ErrorKind::BadFormat,
                std::string(what) + " needs a string field '" + key + "'");
  return j.at(key).get<std::string>();
}

inline Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::BadFormat, "cannot open '" + path.string() + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::BadFormat,
                "invalid JSON in '" + path.string() + "': " + e.what());
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::BadFormat, "cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

}  // namespace detail

inline RawCategory raw_category_from_json(const Json& j) {
  detail::require_object(j, "site document");
  detail::check_keys(j, {"objects", "morphisms", "identities", "compose"},
                     "site document");
  RawCategory raw;
  if (!j.contains("objects") || !j.at("objects").is_array())
    throw Error(ErrorKind::BadFormat, "site document needs an 'objects' array");
  for (const Json& o : j.at("objects")) {
    if (!o.is_string())
      throw Error(ErrorKind::BadFormat, "object ids must be strings");
    raw.objects.push_back(o.get<std::string>());
  }
  if (j.contains("morphisms")) {
    if (!j.at("morphisms").is_array())
      throw Error(ErrorKind::BadFormat, "'morphisms' must be an array");
    for (const Json& m : j.at("morphisms")) {
      detail::require_object(m, "morphism entry");
      detail::check_keys(m, {"id", "src", "tgt"}, "morphism entry");
      raw.morphisms.push_back({detail::string_field(m, "id", "morphism entry"),
                               detail::string_field(m, "src", "morphism entry"),
                               detail::string_field(m, "tgt", "morphism entry")});
    }
  }
  if (j.contains("identities")) {
    detail::require_object(j.at("identities"), "'identities'");
    for (const auto& [obj, id] : j.at("identities").items()) {
      if (!id.is_string())
        throw Error(ErrorKind::BadFormat, "identity ids must be strings");
      raw.identities[obj] = id.get<std::string>();
    }
  }
  if (j.contains("compose")) {
    if (!j.at("compose").is_array())
      throw Error(ErrorKind::BadFormat, "'compose' must be an array");
    for (const Json& row : j.at("compose")) {
      if (!row.is_array() || row.size() != 3 || !row.at(0).is_string() ||
          !row.at(1).is_string() || !row.at(2).is_string())
        throw Error(ErrorKind::BadFormat,
                    "compose rows must be [g, f, gf] string triples");
      raw.composites.push_back({row.at(0).get<std::string>(),
                                row.at(1).get<std::string>(),
                                row.at(2).get<std::string>()});
    }
  }
  // Identities auto-generate as id_<object> unless declared.
  for (const std::string& obj : raw.objects) {
    if (raw.identities.count(obj)) continue;
    std::string id = "id_" + obj;
    bool present = false;
    for (const Morphism& m : raw.morphisms)
      if (m.id == id) {
        present = true;
        break;
      }
    if (!present) raw.morphisms.push_back({id, obj, obj});
    raw.identities[obj] = id;
  }
  return raw;
}

inline FinCat site_from_json(const Json& j) {
  return validate_category(raw_category_from_json(j));
}

inline Json site_to_json(const FinCat& cat) {
  Json j;
  j["objects"] = cat.objects;
  Json morphisms = Json::array();
  for (const Morphism& m : cat.morphisms)
    morphisms.push_back({{"id", m.id}, {"src", m.src}, {"tgt", m.tgt}});
  j["morphisms"] = std::move(morphisms);
  Json identities = Json::object();
  for (const auto& [obj, id] : cat.identities) identities[obj] = id;
  j["identities"] = std::move(identities);
  Json compose = Json::array();
  for (const auto& [pair, h] : cat.composites) {
    // identity rows are derived, keep the file minimal
    if (cat.identity(cat.morphism(pair.first).src) == pair.first ||
        cat.identity(cat.morphism(pair.second).src) == pair.second)
      continue;
    compose.push_back({pair.first, pair.second, h});
  }
  j["compose"] = std::move(compose);
  return j;
}

// Resolves site references: builtin names first, then file paths.
inline std::shared_ptr<const FinCat> load_site(
    const std::string& ref, const std::filesystem::path& base_dir = ".") {
  for (const std::string& name : builtin_site_names())
    if (name == ref) return builtin_site(ref);
  std::filesystem::path path(ref);
  if (path.is_relative()) path = base_dir / path;
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::BadFormat,
                "'" + ref + "' is neither a builtin site nor a file");
  return std::make_shared<const FinCat>(site_from_json(detail::load_json_file(path)));
}

inline Presheaf presheaf_from_json(
    const Json& j, const std::filesystem::path& base_dir,
    std::shared_ptr<const FinCat> default_site = nullptr) {
  detail::require_object(j, "presheaf document");
  detail::check_keys(j, {"site", "sets", "actions"}, "presheaf document");
  std::shared_ptr<const FinCat> site = default_site;
  if (j.contains("site"))
    site = load_site(detail::string_field(j, "site", "presheaf document"),
                     base_dir);
  if (!site)
    throw Error(ErrorKind::BadFormat, "presheaf document without a site");
  std::map<std::string, std::vector<std::string>> sets;
  if (j.contains("sets")) {
    detail::require_object(j.at("sets"), "'sets'");
    for (const auto& [obj, labels] : j.at("sets").items()) {
      if (!labels.is_array())
        throw Error(ErrorKind::BadFormat, "stage sets must be arrays");
      for (const Json& l : labels) {
        if (!l.is_string())
          throw Error(ErrorKind::BadFormat, "element labels must be strings");
        sets[obj].push_back(l.get<std::string>());
      }
      sets.try_emplace(obj);
    }
  }
  std::map<std::string, std::map<std::string, std::string>> actions;
  if (j.contains("actions")) {
    detail::require_object(j.at("actions"), "'actions'");
    for (const auto& [mor, table] : j.at("actions").items()) {
      detail::require_object(table, "action table");
      for (const auto& [x, y] : table.items()) {
        if (!y.is_string())
          throw Error(ErrorKind::BadFormat, "action values must be strings");
        actions[mor][x] = y.get<std::string>();
      }
      actions.try_emplace(mor);
    }
  }
  return validate_presheaf(std::move(site), std::move(sets), std::move(actions));
}

inline Json presheaf_to_json(const Presheaf& p, const std::string& site_ref) {
  Json j;
  j["site"] = site_ref;
  Json sets = Json::object();
  for (const auto& [obj, labels] : p.sets) sets[obj] = labels;
  j["sets"] = std::move(sets);
  Json actions = Json::object();
  for (const auto& [mor, table] : p.actions) {
    if (p.site->identity(p.site->morphism(mor).src) == mor) continue;
    Json t = Json::object();
    for (const auto& [x, y] : table) t[x] = y;
    actions[mor] = std::move(t);
  }
  j["actions"] = std::move(actions);
  return j;
}

inline Presheaf load_presheaf(const std::string& ref,
                              const std::filesystem::path& base_dir = ".") {
  std::filesystem::path path(ref);
  if (path.is_relative()) path = base_dir / path;
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::BadFormat, "no presheaf file '" + ref + "'");
  return presheaf_from_json(detail::load_json_file(path), path.parent_path());
}

// Either a string reference to a presheaf file or an inline presheaf object.
inline Presheaf resolve_presheaf(const Json& ref_or_inline,
                                 const std::filesystem::path& base_dir,
                                 std::shared_ptr<const FinCat> default_site) {
  if (ref_or_inline.is_string())
    return load_presheaf(ref_or_inline.get<std::string>(), base_dir);
  return presheaf_from_json(ref_or_inline, base_dir, std::move(default_site));
}

inline NatTrans nat_from_json(const Json& j,
                              const std::filesystem::path& base_dir,
                              std::shared_ptr<const FinCat> default_site = nullptr,
                              const Presheaf* src = nullptr,
                              const Presheaf* tgt = nullptr) {
  detail::require_object(j, "natural transformation document");
  detail::check_keys(j, {"src", "tgt", "components"},
                     "natural transformation document");
  Presheaf s, t;
  if (j.contains("src"))
    s = resolve_presheaf(j.at("src"), base_dir, default_site);
  else if (src)
    s = *src;
  else
    throw Error(ErrorKind::BadFormat,
                "natural transformation without a source");
  if (j.contains("tgt"))
    t = resolve_presheaf(j.at("tgt"), base_dir, default_site);
  else if (tgt)
    t = *tgt;
  else
    throw Error(ErrorKind::BadFormat,
                "natural transformation without a target");
  if (!j.contains("components"))
    throw Error(ErrorKind::BadFormat,
                "natural transformation needs 'components'");
  std::map<std::string, std::map<std::string, std::string>> comps;
  detail::require_object(j.at("components"), "'components'");
  for (const auto& [obj, table] : j.at("components").items()) {
    detail::require_object(table, "component table");
    for (const auto& [x, y] : table.items()) {
      if (!y.is_string())
        throw Error(ErrorKind::BadFormat, "component values must be strings");
      comps[obj][x] = y.get<std::string>();
    }
    comps.try_emplace(obj);
  }
  return validate_nat(std::move(s), std::move(t), std::move(comps));
}

inline Json nat_components_to_json(const NatTrans& n) {
  Json comps = Json::object();
  for (const auto& [obj, table] : n.components) {
    Json t = Json::object();
    for (const auto& [x, y] : table) t[x] = y;
    comps[obj] = std::move(t);
  }
  return comps;
}

inline Subobject sub_from_json(const Json& j,
                               const std::filesystem::path& base_dir,
                               std::shared_ptr<const FinCat> default_site = nullptr,
                               const Presheaf* ambient = nullptr) {
  detail::require_object(j, "subobject document");
  detail::check_keys(j, {"ambient", "parts"}, "subobject document");
  Presheaf a;
  if (j.contains("ambient"))
    a = resolve_presheaf(j.at("ambient"), base_dir, default_site);
  else if (ambient)
    a = *ambient;
  else
    throw Error(ErrorKind::BadFormat, "subobject without an ambient presheaf");
  std::map<std::string, std::set<std::string>> parts;
  if (j.contains("parts")) {
    detail::require_object(j.at("parts"), "'parts'");
    for (const auto& [obj, elems] : j.at("parts").items()) {
      if (!elems.is_array())
        throw Error(ErrorKind::BadFormat, "subobject parts must be arrays");
      for (const Json& e : elems) {
        if (!e.is_string())
          throw Error(ErrorKind::BadFormat, "part elements must be strings");
        parts[obj].insert(e.get<std::string>());
      }
      parts.try_emplace(obj);
    }
  }
  return validate_subobject(std::move(a), std::move(parts));
}

inline Json sub_parts_to_json(const Subobject& s) {
  Json parts = Json::object();
  for (const auto& [obj, elems] : s.parts)
    parts[obj] = std::vector<std::string>(elems.begin(), elems.end());
  return parts;
}

inline SemanticEnvironment environment_from_json(
    const Json& j, const std::filesystem::path& base_dir) {
  detail::require_object(j, "environment document");
  detail::check_keys(j, {"name", "doc", "site", "sorts", "functions", "relations"},
                     "environment document");
  SemanticEnvironment env;
  if (j.contains("name")) env.name = detail::string_field(j, "name", "environment");
  if (j.contains("doc")) env.doc = detail::string_field(j, "doc", "environment");
  env.site = load_site(detail::string_field(j, "site", "environment"), base_dir);
  if (j.contains("sorts")) {
    detail::require_object(j.at("sorts"), "'sorts'");
    for (const auto& [name, ref] : j.at("sorts").items()) {
      env.signature.sorts.push_back(name);
      env.sorts.emplace(name, resolve_presheaf(ref, base_dir, env.site));
    }
  }
  if (j.contains("functions")) {
    detail::require_object(j.at("functions"), "'functions'");
    for (const auto& [name, fj] : j.at("functions").items()) {
      detail::require_object(fj, "function entry");
      detail::check_keys(fj, {"args", "result", "nat"}, "function entry");
      Signature::Func fn;
      if (!fj.contains("args") || !fj.at("args").is_array())
        throw Error(ErrorKind::BadFormat,
                    "function '" + name + "' needs an 'args' array");
      for (const Json& a : fj.at("args")) fn.args.push_back(a.get<std::string>());
      fn.result = detail::string_field(fj, "result", "function entry");
      env.signature.functions[name] = fn;
      if (!fj.contains("nat"))
        throw Error(ErrorKind::BadFormat,
                    "function '" + name + "' needs a 'nat' interpretation");
      Presheaf src = arg_product(env, fn.args);
      Presheaf tgt = env.sort(fn.result);
      if (fj.at("nat").is_string()) {
        env.functions.emplace(
            name, nat_from_json(
                      detail::load_json_file(base_dir / fj.at("nat").get<std::string>()),
                      base_dir, env.site, &src, &tgt));
      } else {
        env.functions.emplace(
            name, nat_from_json(fj.at("nat"), base_dir, env.site, &src, &tgt));
      }
    }
  }
  if (j.contains("relations")) {
    detail::require_object(j.at("relations"), "'relations'");
    for (const auto& [name, rj] : j.at("relations").items()) {
      detail::require_object(rj, "relation entry");
      detail::check_keys(rj, {"args", "sub"}, "relation entry");
      if (!rj.contains("args") || !rj.at("args").is_array())
        throw Error(ErrorKind::BadFormat,
                    "relation '" + name + "' needs an 'args' array");
      std::vector<std::string> args;
      for (const Json& a : rj.at("args")) args.push_back(a.get<std::string>());
      env.signature.relations[name] = args;
      if (!rj.contains("sub"))
        throw Error(ErrorKind::BadFormat,
                    "relation '" + name + "' needs a 'sub' interpretation");
      Presheaf ambient = arg_product(env, args);
      if (rj.at("sub").is_string()) {
        env.relations.emplace(
            name, sub_from_json(
                      detail::load_json_file(base_dir / rj.at("sub").get<std::string>()),
                      base_dir, env.site, &ambient));
      } else {
        env.relations.emplace(
            name, sub_from_json(rj.at("sub"), base_dir, env.site, &ambient));
      }
    }
  }
  return validate_environment(std::move(env));
}

// Environment references resolve builtins first, then file paths.
inline SemanticEnvironment load_environment(
    const std::string& ref, const std::filesystem::path& base_dir = ".") {
  for (const std::string& name : builtin_names())
    if (name == ref) return builtin(ref);
  std::filesystem::path path(ref);
  if (path.is_relative()) path = base_dir / path;
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::UnknownBuiltin,
                "'" + ref + "' is neither a builtin environment nor a file");
  return environment_from_json(detail::load_json_file(path), path.parent_path());
}

// Writes site.json, one presheaf file per sort, and env.json with function
// and relation interpretations inlined as components/parts.
inline void export_environment(const SemanticEnvironment& env,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_json_file(dir / "site.json", site_to_json(*env.site));
  Json j;
  if (!env.name.empty()) j["name"] = env.name;
  if (!env.doc.empty()) j["doc"] = env.doc;
  j["site"] = "site.json";
  Json sorts = Json::object();
  for (const auto& [name, p] : env.sorts) {
    std::string file = "sort_" + name + ".json";
    detail::write_json_file(dir / file, presheaf_to_json(p, "site.json"));
    sorts[name] = file;
  }
  j["sorts"] = std::move(sorts);
  Json functions = Json::object();
  for (const auto& [name, fn] : env.signature.functions) {
    Json fj;
    fj["args"] = fn.args;
    fj["result"] = fn.result;
    fj["nat"] = Json{{"components", nat_components_to_json(env.functions.at(name))}};
    functions[name] = std::move(fj);
  }
  if (!functions.empty()) j["functions"] = std::move(functions);
  Json relations = Json::object();
  for (const auto& [name, args] : env.signature.relations) {
    Json rj;
    rj["args"] = args;
    rj["sub"] = Json{{"parts", sub_parts_to_json(env.relations.at(name))}};
    relations[name] = std::move(rj);
  }
  if (!relations.empty()) j["relations"] = std::move(relations);
  detail::write_json_file(dir / "env.json", j);
}

}  // namespace toposcope
