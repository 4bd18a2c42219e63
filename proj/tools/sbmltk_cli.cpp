#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sbmltk/frontend.hpp"
#include "sbmltk/text.hpp"

using namespace sbmltk;

namespace {

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
}

ModelDocument load(const std::string& path) { return load_model_text(read_input(path)); }

Format parse_format(const std::string& name) {
  if (name == "tsv") return Format::Tsv;
  if (name == "dot") return Format::Dot;
  return Format::Json;
}

std::string default_rules_path() {
  if (const char* env = std::getenv("SBMLTK_SBO_RULES")) return env;
  return SBMLTK_DEFAULT_RULES;
}

int emit(const Payload& p) {
  std::cout << p.body << std::flush;
  return p.status < 400 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBML model toolkit"};
  app.require_subcommand(1);
  std::string format = "json";
  std::string db_dir;

  // shorthand
  auto* sh = app.add_subcommand("shorthand", "Compile or decompile shorthand SBML");
  sh->require_subcommand(1);
  std::string sh_input;
  auto* sh_compile = sh->add_subcommand("compile", "Shorthand to SBML");
  sh_compile->add_option("input", sh_input, "Shorthand file or -")->required();
  auto* sh_decompile = sh->add_subcommand("decompile", "SBML to shorthand");
  sh_decompile->add_option("input", sh_input, "SBML file or -")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "Validate a model");
  std::string model_path;
  validate->add_option("model", model_path)->required();

  // diff
  auto* diff = app.add_subcommand("diff", "Semantic difference of two models");
  std::string left_path, right_path;
  diff->add_option("left", left_path)->required();
  diff->add_option("right", right_path)->required();
  diff->add_option("--format", format)->check(CLI::IsMember({"json", "tsv"}));
  diff->add_option("--db", db_dir, "Annotation database for equivalences");

  // merge
  auto* merge = app.add_subcommand("merge", "Merge models in order");
  std::vector<std::string> model_paths;
  std::string policy = "fail";
  merge->add_option("models", model_paths)->required()->expected(1, -1);
  merge->add_option("--policy", policy, "fail, left, right or file=PATH");
  merge->add_option("--format", format, "conflict report format")->check(CLI::IsMember({"json", "tsv"}));
  merge->add_option("--db", db_dir);

  // split
  auto* split = app.add_subcommand("split", "Extract a self-contained submodel");
  std::vector<std::string> seeds;
  bool expand = false;
  split->add_option("model", model_path)->required();
  split->add_option("--seeds", seeds)->required()->delimiter(',');
  split->add_flag("--expand-reactions", expand);

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Edit MIRIAM annotations");
  annotate->require_subcommand(1);
  std::string element, qualifier = "is", uri;
  auto add_annotate = [&](const char* name, const char* help) {
    auto* sub = annotate->add_subcommand(name, help);
    sub->add_option("model", model_path)->required();
    sub->add_option("--element", element)->required();
    sub->add_option("--qualifier", qualifier);
    sub->add_option("--uri", uri)->required();
    return sub;
  };
  auto* annotate_set = add_annotate("set", "Add an annotation");
  auto* annotate_remove = add_annotate("remove", "Remove an annotation");

  // balance
  auto* balance = app.add_subcommand("balance", "Balance kinetic parameters and insert modular rate laws");
  std::string data_path, report_path;
  double rt = BalancingConfig::defaults().rt;
  bool no_pseudo = false;
  balance->add_option("model", model_path)->required();
  balance->add_option("--data", data_path, "Data TSV");
  balance->add_option("--report", report_path, "Write the balance report TSV here");
  balance->add_option("--rt", rt, "RT in kJ/mol");
  balance->add_flag("--no-pseudo", no_pseudo);
  balance->add_option("--format", format)->check(CLI::IsMember({"json", "tsv"}));

  // sbo
  auto* sbo = app.add_subcommand("sbo", "Assign SBO terms to kinetic laws");
  std::string rules_path;
  sbo->add_option("model", model_path)->required();
  sbo->add_option("--rules", rules_path, "Rule table TSV");
  sbo->add_option("--format", format)->check(CLI::IsMember({"json", "tsv"}));

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster models by annotation similarity");
  double threshold = 0.3;
  std::string dot_path;
  cluster->add_option("models", model_paths)->required()->expected(1, -1);
  cluster->add_option("--threshold", threshold);
  cluster->add_option("--dot", dot_path, "Write the similarity graph as DOT here");
  cluster->add_option("--format", format)->check(CLI::IsMember({"json", "tsv", "dot"}));
  cluster->add_option("--db", db_dir);

  // viz
  auto* viz = app.add_subcommand("viz", "Reaction network as DOT");
  bool no_modifiers = false, no_clusters = false;
  viz->add_option("model", model_path)->required();
  viz->add_flag("--no-modifiers", no_modifiers);
  viz->add_flag("--no-compartments", no_clusters);

  // annodb
  auto* annodb = app.add_subcommand("annodb", "Annotation database");
  annodb->require_subcommand(1);
  auto* ingest = annodb->add_subcommand("ingest", "Ingest an entity TSV");
  std::string ingest_path;
  ingest->add_option("--db", db_dir)->required();
  ingest->add_option("input", ingest_path)->required();
  auto* search = annodb->add_subcommand("search", "Search by name or identifier");
  std::string name, ns, id;
  bool exact = false;
  search->add_option("--db", db_dir)->required();
  auto* name_opt = search->add_option("--name", name);
  search->add_flag("--exact", exact);
  auto* ns_opt = search->add_option("--ns", ns);
  search->add_option("--id", id);
  name_opt->excludes(ns_opt);

  // store
  auto* store = app.add_subcommand("store", "Content-addressed model store");
  store->require_subcommand(1);
  std::string store_dir, hash;
  auto* store_put = store->add_subcommand("put", "Store a model and print its handle");
  store_put->add_option("--store", store_dir)->required();
  store_put->add_option("model", model_path)->required();
  auto* store_get = store->add_subcommand("get", "Print a stored model");
  store_get->add_option("--store", store_dir)->required();
  store_get->add_option("hash", hash)->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--host", host);
  serve->add_option("--store", store_dir)->required();
  serve->add_option("--db", db_dir);
  serve->add_option("--rules", rules_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Format fmt = parse_format(format);
  try {
    std::unique_ptr<AnnotationStore> db;
    if (!db_dir.empty()) db = std::make_unique<AnnotationStore>(db_dir);

    if (*sh_compile) return emit(api::compile_shorthand(read_input(sh_input)));
    if (*sh_decompile) return emit(api::decompile_sbml(read_input(sh_input)));
    if (*validate) {
      auto p = api::validate(load(model_path));
      emit(p);
      return p.body.find("\"valid\": true") != std::string::npos ? 0 : 2;
    }
    if (*diff) return emit(api::diff(load(left_path), load(right_path), db.get(), fmt));
    if (*merge) {
      MergePolicy mp;
      if (policy == "left") mp = MergePolicy::left();
      else if (policy == "right") mp = MergePolicy::right();
      else if (policy.rfind("file=", 0) == 0) mp = parse_merge_policy(read_input(policy.substr(5)));
      else if (policy != "fail") throw Error(ErrorCode::MalformedPolicy, "policy must be fail, left, right or file=PATH");
      std::vector<ModelDocument> docs;
      for (const auto& path : model_paths) docs.push_back(load(path));
      try {
        return emit(api::merge(docs, mp, db.get()));
      } catch (const MergeConflictError& e) {
        std::cout << error_payload(e, fmt).body << std::flush;
        return 3;
      }
    }
    if (*split) return emit(api::split(load(model_path), {seeds.begin(), seeds.end()}, expand));
    if (*annotate_set) return emit(api::annotate_set(load(model_path), element, qualifier, uri));
    if (*annotate_remove) return emit(api::annotate_remove(load(model_path), element, qualifier, uri));
    if (*balance) {
      auto config = BalancingConfig::defaults();
      config.rt = rt;
      if (no_pseudo) config = config.without_pseudo();
      auto doc = load(model_path);
      auto data = data_path.empty() ? std::string() : read_input(data_path);
      if (!report_path.empty()) write_file(report_path, api::balance(doc, data, config, Format::Tsv).body);
      return emit(api::balance(doc, data, config, fmt));
    }
    if (*sbo) {
      auto rules = parse_sbo_rules(read_input(rules_path.empty() ? default_rules_path() : rules_path));
      return emit(api::sbo(load(model_path), rules, fmt));
    }
    if (*cluster) {
      std::vector<LabeledModel> models;
      for (const auto& path : model_paths) models.push_back({std::filesystem::path(path).stem().string(), load(path)});
      if (!dot_path.empty()) write_file(dot_path, api::cluster(models, threshold, db.get(), Format::Dot).body);
      return emit(api::cluster(models, threshold, db.get(), fmt));
    }
    if (*viz) return emit(api::visualize(load(model_path), {!no_modifiers, !no_clusters}));
    if (*ingest) return emit(api::ingest(*db, read_input(ingest_path)));
    if (*search) {
      if (!name.empty()) return emit(api::search_name(*db, name, exact));
      if (ns.empty() || id.empty()) throw CLI::RequiredError("--name or --ns with --id");
      return emit(api::search_id(*db, ns, id));
    }
    if (*store_put) return emit(api::stored(ModelStore(store_dir).put(read_input(model_path))));
    if (*store_get) {
      std::cout << ModelStore(store_dir).get_bytes(hash) << std::flush;
      return 0;
    }
    if (*serve) {
      ModelStore models(store_dir);
      auto rules = parse_sbo_rules(read_input(rules_path.empty() ? default_rules_path() : rules_path));
      Service service(models, db.get(), std::move(rules));
      serve_http(service, host, port, [&](int bound) {
        std::cout << "listening on " << host << ":" << bound << std::endl;
      });
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << error_payload(e).body;
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
