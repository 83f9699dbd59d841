#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toposcope/demo.hpp"
#include "toposcope/errors.hpp"
#include "toposcope/forcing.hpp"
#include "toposcope/gallery.hpp"
#include "toposcope/io.hpp"
#include "toposcope/parser.hpp"
#include "toposcope/subobject.hpp"
#include "toposcope/typecheck.hpp"
#include "toposcope/witness.hpp"

namespace toposcope {

namespace detail {

// Formula arguments: literal text, @file, or a path to a .fol file.
inline std::string read_formula_arg(const std::string& arg) {
  std::string path;
  if (!arg.empty() && arg[0] == '@')
    path = arg.substr(1);
  else if (arg.size() > 4 && arg.substr(arg.size() - 4) == ".fol" &&
           std::filesystem::exists(arg))
    path = arg;
  if (path.empty()) return arg;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadFormat, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline int expectation_exit(std::uint64_t count, bool expect_nonempty,
                            bool expect_empty) {
  if (expect_nonempty && count == 0) return 1;
  if (expect_empty && count != 0) return 1;
  return 0;
}

inline Json report_to_json(const Report& r) {
  Json claims = Json::array();
  for (const Claim& c : r.claims) {
    Json facts = Json::array();
    for (const Fact& f : c.facts)
      facts.push_back({{"name", f.name},
                       {"value", f.value},
                       {"expected", f.expected},
                       {"ok", f.ok}});
    claims.push_back({{"label", c.label}, {"facts", std::move(facts)}, {"pass", c.pass}});
  }
  return Json{{"claims", std::move(claims)}, {"pass", r.pass}};
}

inline Json profile_json(const Presheaf& p) {
  Json stages = Json::object();
  for (const auto& [obj, labels] : p.sets) stages[obj] = labels.size();
  return Json{{"stages", std::move(stages)},
              {"global_elements", global_elements(p).size()},
              {"inhabited", is_inhabited_internally(p)}};
}

inline std::string stage_sizes(const Presheaf& p) {
  std::string out;
  for (const auto& [obj, labels] : p.sets) {
    if (!out.empty()) out += ",";
    out += obj + "=" + std::to_string(labels.size());
  }
  return out;
}

}  // namespace detail

// Exit codes: 0 success, 1 failed checks or expectations, 2 usage and
// formula syntax errors, 3 validation and input errors.
inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"workbench for the internal logic of finite presheaf toposes"};
  app.fallthrough();
  bool json_out = false, trace = false, expect_nonempty = false,
       expect_empty = false;
  app.add_flag("--json", json_out, "machine-readable output");
  app.add_flag("--trace", trace, "print forcing derivations");
  app.add_flag("--expect-nonempty", expect_nonempty,
               "exit 1 when the checked fact is empty or false");
  app.add_flag("--expect-empty", expect_empty,
               "exit 1 when the checked fact is nonempty or true");

  std::string env_ref, site_ref, stage, formula_arg, out_dir, nat_file;
  std::string arg_a, arg_b;
  int max_size = 2;
  std::uint64_t budget = 1'000'000;
  bool prune = false;
  std::size_t limit = 0;

  CLI::App* env_cmd = app.add_subcommand("env", "semantic environments");
  CLI::App* env_load = env_cmd->add_subcommand("load", "validate and summarize");
  env_load->add_option("ref", env_ref, "builtin name or file")->required();
  CLI::App* env_export =
      env_cmd->add_subcommand("export", "write a builtin to JSON files");
  env_export->add_option("name", arg_a, "builtin environment name")->required();
  env_export->add_option("--out", out_dir, "output directory")->required();

  CLI::App* check = app.add_subcommand("check", "facts about one presheaf or map");
  CLI::App* check_ge =
      check->add_subcommand("global-elements", "count maps 1 -> A");
  check_ge->add_option("--env", env_ref, "resolve names against this environment");
  check_ge->add_option("name", arg_a, "sort name or presheaf file")->required();
  CLI::App* check_inh = check->add_subcommand("inhabited", "internal inhabitedness");
  check_inh->add_option("--env", env_ref, "resolve names against this environment");
  check_inh->add_option("name", arg_a, "sort name or presheaf file")->required();
  CLI::App* check_epi = check->add_subcommand("epi", "pointwise surjectivity");
  check_epi->add_option("--env", env_ref, "resolve names against this environment");
  check_epi->add_option("name", arg_a, "function symbol or transformation file");
  check_epi->add_option("--nat", nat_file, "transformation file");
  CLI::App* check_mono = check->add_subcommand("mono", "pointwise injectivity");
  check_mono->add_option("--env", env_ref, "resolve names against this environment");
  check_mono->add_option("name", arg_a, "function symbol or transformation file");
  check_mono->add_option("--nat", nat_file, "transformation file");

  CLI::App* eval = app.add_subcommand("eval", "force a closed formula at a stage");
  eval->add_option("--env", env_ref)->required();
  eval->add_option("--stage", stage, "object of the site")->required();
  eval->add_option("formula", formula_arg, "formula text, @file, or .fol file")
      ->required();

  CLI::App* eval_global =
      app.add_subcommand("eval-global", "force a closed formula at every stage");
  eval_global->add_option("--env", env_ref)->required();
  eval_global->add_option("formula", formula_arg)->required();

  CLI::App* iso = app.add_subcommand("iso", "decide natural isomorphism");
  iso->add_option("--env", env_ref, "resolve names against this environment");
  iso->add_option("a", arg_a, "sort name or presheaf file")->required();
  iso->add_option("b", arg_b, "sort name or presheaf file")->required();

  CLI::App* omega_cmd =
      app.add_subcommand("omega", "sieve tables of the subobject classifier");
  omega_cmd->add_option("--site", site_ref, "builtin site name or file")->required();

  CLI::App* search = app.add_subcommand("search", "bounded witness searches");
  CLI::App* search_inp = search->add_subcommand(
      "inhabited-no-point", "internally inhabited presheaves without global elements");
  CLI::App* search_pairs = search->add_subcommand(
      "noniso-same-profile", "non-isomorphic presheaves with equal name profiles");
  for (CLI::App* s : {search_inp, search_pairs}) {
    s->add_option("--site", site_ref)->required();
    s->add_option("--max-size", max_size, "stage size bound")->required();
    s->add_flag("--prune", prune, "one representative per isomorphism class");
    s->add_option("--budget", budget, "candidate budget");
    s->add_option("--out", out_dir, "write results as presheaf JSON files");
    s->add_option("--limit", limit, "cap listed (and for pairs, written) results");
  }

  CLI::App* demo = app.add_subcommand("demo", "end-to-end reproductions");
  CLI::App* demo_ind = demo->add_subcommand(
      "independence",
      "meaning, object, name, and existence do not determine one another");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto resolve_presheaf_arg =
        [&](const std::string& name) -> Presheaf {
      if (!env_ref.empty()) {
        SemanticEnvironment env = load_environment(env_ref);
        auto it = env.sorts.find(name);
        if (it != env.sorts.end()) return it->second;
      }
      if (std::filesystem::exists(name)) return load_presheaf(name);
      throw Error(ErrorKind::BadFormat,
                  "'" + name + "' names neither a sort nor a presheaf file");
    };

    if (*env_load) {
      SemanticEnvironment env = load_environment(env_ref);
      if (json_out) {
        Json sorts = Json::object();
        for (const auto& [name, p] : env.sorts)
          sorts[name] = detail::profile_json(p);
        Json j{{"name", env.name},
               {"doc", env.doc},
               {"objects", env.site->objects},
               {"morphisms", env.site->morphisms.size()},
               {"sorts", std::move(sorts)}};
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "environment: " << env.name << "\n";
        if (!env.doc.empty()) std::cout << "  " << env.doc << "\n";
        std::cout << "site: " << env.site->objects.size() << " objects, "
                  << env.site->morphisms.size() << " morphisms\n";
        for (const auto& [name, p] : env.sorts)
          std::cout << "sort " << name << ": stages " << detail::stage_sizes(p)
                    << ", global elements " << global_elements(p).size()
                    << ", inhabited "
                    << (is_inhabited_internally(p) ? "true" : "false") << "\n";
      }
      return 0;
    }

    if (*env_export) {
      SemanticEnvironment env = builtin(arg_a);
      export_environment(env, out_dir);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "env.json").string()
                << "\n";
      return 0;
    }

    if (*check_ge) {
      Presheaf p = resolve_presheaf_arg(arg_a);
      std::vector<NatTrans> points = global_elements(p);
      if (json_out) {
        Json elems = Json::array();
        for (const NatTrans& n : points) elems.push_back(nat_components_to_json(n));
        std::cout << Json{{"count", points.size()}, {"elements", std::move(elems)}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << points.size() << "\n";
      }
      return detail::expectation_exit(points.size(), expect_nonempty, expect_empty);
    }

    if (*check_inh) {
      Presheaf p = resolve_presheaf_arg(arg_a);
      bool inhabited = is_inhabited_internally(p);
      if (json_out)
        std::cout << Json{{"inhabited", inhabited}}.dump(2) << "\n";
      else
        std::cout << (inhabited ? "true" : "false") << "\n";
      return detail::expectation_exit(inhabited ? 1 : 0, expect_nonempty,
                                      expect_empty);
    }

    if (*check_epi || *check_mono) {
      std::optional<NatTrans> nat;
      if (!nat_file.empty()) {
        nat = nat_from_json(detail::load_json_file(nat_file),
                            std::filesystem::path(nat_file).parent_path());
      } else if (!arg_a.empty()) {
        if (!env_ref.empty()) {
          SemanticEnvironment env = load_environment(env_ref);
          auto it = env.functions.find(arg_a);
          if (it != env.functions.end()) nat = it->second;
        }
        if (!nat && std::filesystem::exists(arg_a))
          nat = nat_from_json(detail::load_json_file(arg_a),
                              std::filesystem::path(arg_a).parent_path());
      }
      if (!nat)
        throw Error(ErrorKind::BadFormat,
                    "no transformation given; use a function symbol or --nat");
      bool result = *check_epi ? is_epi(*nat) : is_mono(*nat);
      if (json_out)
        std::cout << Json{{*check_epi ? "epi" : "mono", result}}.dump(2) << "\n";
      else
        std::cout << (result ? "true" : "false") << "\n";
      return detail::expectation_exit(result ? 1 : 0, expect_nonempty, expect_empty);
    }

    if (*eval || *eval_global) {
      SemanticEnvironment env = load_environment(env_ref);
      Formula parsed = parse_formula(detail::read_formula_arg(formula_arg));
      Formula typed = typecheck(parsed, env.signature, {});
      ForcingEvaluator evaluator(env);
      if (trace && !json_out) evaluator.set_trace(&std::cout);
      bool result = *eval ? evaluator.forces(Stage{stage, {}}, typed)
                          : evaluator.holds_globally(typed);
      if (json_out) {
        Json j{{"formula", print(typed)}, {"result", result}};
        if (*eval) j["stage"] = stage;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << (result ? "true" : "false") << "\n";
      }
      return detail::expectation_exit(result ? 1 : 0, expect_nonempty, expect_empty);
    }

    if (*iso) {
      Presheaf a = resolve_presheaf_arg(arg_a);
      Presheaf b = resolve_presheaf_arg(arg_b);
      std::optional<NatTrans> witness = find_isomorphism(a, b);
      if (json_out) {
        Json j{{"isomorphic", witness.has_value()}};
        j["witness"] = witness ? nat_components_to_json(*witness) : Json();
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << (witness ? "isomorphic" : "not isomorphic") << "\n";
      }
      return detail::expectation_exit(witness ? 1 : 0, expect_nonempty, expect_empty);
    }

    if (*omega_cmd) {
      OmegaTable table = omega_table(load_site(site_ref));
      if (json_out) {
        Json counts = Json::object();
        Json sieves = Json::object();
        for (const std::string& obj : table.site->objects) {
          counts[obj] = table.sieves.at(obj).size();
          Json list = Json::array();
          for (const Sieve& s : table.sieves.at(obj))
            list.push_back(std::vector<std::string>(s.members.begin(),
                                                    s.members.end()));
          sieves[obj] = std::move(list);
        }
        std::cout << Json{{"order", table.site->objects},
                          {"counts", std::move(counts)},
                          {"sieves", std::move(sieves)}}
                         .dump(2)
                  << "\n";
      } else {
        std::string counts;
        for (const std::string& obj : table.site->objects) {
          if (!counts.empty()) counts += ",";
          counts += std::to_string(table.sieves.at(obj).size());
        }
        std::cout << "sieve counts: " << counts << "\n";
        for (const std::string& obj : table.site->objects) {
          std::cout << obj << ":";
          for (const Sieve& s : table.sieves.at(obj))
            std::cout << " " << sieve_label(s);
          std::cout << "\n";
        }
      }
      return 0;
    }

    if (*search_inp) {
      SearchBounds bounds{load_site(site_ref), max_size, prune, budget};
      std::vector<Presheaf> found = search_inhabited_no_point(bounds);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < found.size(); ++i)
          detail::write_json_file(
              std::filesystem::path(out_dir) /
                  ("witness_" + std::to_string(i) + ".json"),
              presheaf_to_json(found[i], site_ref));
      }
      if (json_out) {
        Json list = Json::array();
        for (const Presheaf& p : found) list.push_back(presheaf_to_json(p, site_ref));
        std::cout << Json{{"count", found.size()}, {"witnesses", std::move(list)}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << "found " << found.size()
                  << " inhabited presheaves without global elements\n";
        std::size_t shown = 0;
        for (const Presheaf& p : found) {
          if (limit && shown >= limit) {
            std::cout << "  ...\n";
            break;
          }
          std::cout << "  witness " << shown << ": stages "
                    << detail::stage_sizes(p) << "\n";
          ++shown;
        }
      }
      return detail::expectation_exit(found.size(), expect_nonempty, expect_empty);
    }

    if (*search_pairs) {
      SearchBounds bounds{load_site(site_ref), max_size, prune, budget};
      auto pairs = search_noniso_same_profile(bounds);
      std::size_t cap = limit ? std::min(limit, pairs.size()) : pairs.size();
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < cap; ++i) {
          detail::write_json_file(std::filesystem::path(out_dir) /
                                      ("pair_" + std::to_string(i) + "_a.json"),
                                  presheaf_to_json(pairs[i].first, site_ref));
          detail::write_json_file(std::filesystem::path(out_dir) /
                                      ("pair_" + std::to_string(i) + "_b.json"),
                                  presheaf_to_json(pairs[i].second, site_ref));
        }
      }
      if (json_out) {
        Json list = Json::array();
        for (std::size_t i = 0; i < cap; ++i)
          list.push_back({{"a", presheaf_to_json(pairs[i].first, site_ref)},
                          {"b", presheaf_to_json(pairs[i].second, site_ref)}});
        std::cout << Json{{"count", pairs.size()}, {"pairs", std::move(list)}}.dump(2)
                  << "\n";
      } else {
        std::cout << "found " << pairs.size()
                  << " non-isomorphic pairs with equal name profiles\n";
        for (std::size_t i = 0; i < cap; ++i)
          std::cout << "  pair " << i << ": " << detail::stage_sizes(pairs[i].first)
                    << "  vs  " << detail::stage_sizes(pairs[i].second) << "\n";
        if (cap < pairs.size()) std::cout << "  ...\n";
      }
      return detail::expectation_exit(pairs.size(), expect_nonempty, expect_empty);
    }

    if (*demo_ind) {
      Report r = demo_independence();
      if (json_out)
        std::cout << detail::report_to_json(r).dump(2) << "\n";
      else
        std::cout << render_report(r);
      return r.pass ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::SyntaxError ? 2 : 3;
  }
  return 2;
}

}  // namespace toposcope
