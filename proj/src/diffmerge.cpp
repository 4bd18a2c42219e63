#include "sbmltk/diffmerge.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "json.hpp"
#include "sbmltk/text.hpp"

namespace sbmltk {

using Json = nlohmann::ordered_json;

std::string_view diff_kind_name(DiffKind kind) {
  switch (kind) {
    case DiffKind::Added: return "added";
    case DiffKind::Removed: return "removed";
    case DiffKind::Changed: return "changed";
  }
  return "changed";
}

bool DiffReport::header_changed() const {
  return std::any_of(entries.begin(), entries.end(), [](const DiffEntry& e) { return e.path == "model"; });
}

std::size_t DiffReport::count(DiffKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const DiffEntry& e) { return e.kind == kind; }));
}

namespace {

// ---------------------------------------------------------------------------
// Attribute tables

std::string render_bool(bool v) { return v ? "true" : "false"; }
std::string render_sbo(const SboTerm& sbo) { return sbo.value_or(""); }

std::string render_side(std::vector<SpeciesReference> refs) {
  std::sort(refs.begin(), refs.end(),
            [](const SpeciesReference& x, const SpeciesReference& y) { return x.species < y.species; });
  std::string out;
  for (const auto& ref : refs) {
    if (!out.empty()) out += " + ";
    if (ref.stoichiometry != 1.0) out += format_real(ref.stoichiometry) + " ";
    out += ref.species;
  }
  return out;
}

std::string render_modifiers(std::vector<std::string> mods) {
  std::sort(mods.begin(), mods.end());
  std::string out;
  for (const auto& m : mods) {
    if (!out.empty()) out += ", ";
    out += m;
  }
  return out;
}

std::string render_law(const Reaction& r) {
  if (!r.kinetic_law) return "";
  std::string out = print_infix(*r.kinetic_law);
  auto locals = r.local_parameters;
  std::sort(locals.begin(), locals.end(), [](const Parameter& x, const Parameter& y) { return x.id < y.id; });
  for (std::size_t i = 0; i < locals.size(); ++i) {
    out += i ? ", " : " : ";
    out += locals[i].id + "=" + format_real(locals[i].value);
    if (locals[i].sbo) out += " {" + *locals[i].sbo + "}";
  }
  return out;
}

template <typename T>
struct Attribute {
  const char* name;
  std::function<std::string(const T&)> render;
  std::function<void(T&, const T&)> assign;
};

#define SBMLTK_ATTR(T, NAME, FIELD, RENDER) \
  Attribute<T> { NAME, [](const T& x) { return RENDER(x.FIELD); }, [](T& d, const T& s) { d.FIELD = s.FIELD; } }

std::string same(const std::string& s) { return s; }

const std::vector<Attribute<ModelDocument>>& header_attributes() {
  static const std::vector<Attribute<ModelDocument>> table = {
      SBMLTK_ATTR(ModelDocument, "id", id, same),
      SBMLTK_ATTR(ModelDocument, "name", name, same),
      SBMLTK_ATTR(ModelDocument, "level", level, std::to_string),
      SBMLTK_ATTR(ModelDocument, "version", version, std::to_string),
  };
  return table;
}

const std::vector<Attribute<Compartment>>& compartment_attributes() {
  static const std::vector<Attribute<Compartment>> table = {
      SBMLTK_ATTR(Compartment, "name", name, same),
      SBMLTK_ATTR(Compartment, "size", size, format_real),
      SBMLTK_ATTR(Compartment, "sbo", sbo, render_sbo),
  };
  return table;
}

const std::vector<Attribute<Species>>& species_attributes() {
  static const std::vector<Attribute<Species>> table = {
      SBMLTK_ATTR(Species, "name", name, same),
      SBMLTK_ATTR(Species, "compartment", compartment, same),
      SBMLTK_ATTR(Species, "initial_amount", initial_amount, format_real),
      SBMLTK_ATTR(Species, "boundary", boundary, render_bool),
      SBMLTK_ATTR(Species, "constant", constant, render_bool),
      SBMLTK_ATTR(Species, "sbo", sbo, render_sbo),
  };
  return table;
}

const std::vector<Attribute<Parameter>>& parameter_attributes() {
  static const std::vector<Attribute<Parameter>> table = {
      SBMLTK_ATTR(Parameter, "value", value, format_real),
      SBMLTK_ATTR(Parameter, "sbo", sbo, render_sbo),
  };
  return table;
}

void assign_law(Reaction& dst, const Reaction& src) {
  auto previous = std::move(dst.local_parameters);
  dst.kinetic_law = src.kinetic_law;
  dst.local_parameters = src.local_parameters;
  for (auto& local : dst.local_parameters) {
    for (const auto& old : previous) {
      if (old.id == local.id) local.annotations.merge(old.annotations);
    }
  }
}

const std::vector<Attribute<Reaction>>& reaction_attributes() {
  static const std::vector<Attribute<Reaction>> table = {
      SBMLTK_ATTR(Reaction, "name", name, same),
      SBMLTK_ATTR(Reaction, "reversible", reversible, render_bool),
      SBMLTK_ATTR(Reaction, "reactants", reactants, render_side),
      SBMLTK_ATTR(Reaction, "products", products, render_side),
      SBMLTK_ATTR(Reaction, "modifiers", modifiers, render_modifiers),
      Attribute<Reaction>{"kinetic_law", render_law, assign_law},
      SBMLTK_ATTR(Reaction, "law_sbo", kinetic_law_sbo, render_sbo),
      SBMLTK_ATTR(Reaction, "sbo", sbo, render_sbo),
  };
  return table;
}

#undef SBMLTK_ATTR

/// Attribute names that may appear in a path's conflicts.
std::set<std::string> conflict_attributes(std::string_view path) {
  std::set<std::string> names;
  auto add = [&](const auto& table) {
    for (const auto& a : table) names.insert(a.name);
  };
  auto prefix = path.substr(0, path.find('/'));
  if (path == "model") add(header_attributes());
  else if (prefix == "compartment") add(compartment_attributes());
  else if (prefix == "species") add(species_attributes());
  else if (prefix == "parameter") add(parameter_attributes());
  else if (prefix == "reaction") add(reaction_attributes());
  return names;
}

// ---------------------------------------------------------------------------
// Alignment: rewrite b into a's id space

using Multiset = std::map<std::string, double>;

Multiset multiset(const std::vector<SpeciesReference>& refs, const std::map<std::string, std::string>* rename) {
  Multiset out;
  for (const auto& ref : refs) {
    auto id = ref.species;
    if (rename) {
      auto it = rename->find(id);
      if (it != rename->end()) id = it->second;
    }
    out[id] += ref.stoichiometry;
  }
  return out;
}

struct Alignment {
  MatchResult matching;
  ModelDocument mapped;  // b with every id and reference in a's id space
  std::vector<RenameRecord> renames;
};

template <typename T>
void collect_ids(const std::vector<T>& items, std::unordered_set<std::string>& out) {
  for (const auto& item : items) out.insert(item.id);
}

std::string map_id(const std::map<std::string, std::string>& rename, const std::string& id) {
  auto it = rename.find(id);
  return it == rename.end() ? id : it->second;
}

Alignment align(const ModelDocument& a, const ModelDocument& b, const EquivalenceOracle* equivalence,
                std::size_t source) {
  MatchOptions opts;
  opts.equivalence = equivalence;
  auto first = match_elements(a, b, opts);
  std::map<std::string, std::string> species_map;
  for (const auto& m : first.matches) {
    if (m.kind == ElementKind::Species) species_map[m.right] = m.left;
  }
  opts.admit = [&](ElementKind kind, std::string_view left, std::string_view right) {
    if (kind != ElementKind::Reaction) return true;
    const auto* ra = a.find_reaction(left);
    const auto* rb = b.find_reaction(right);
    return multiset(ra->reactants, nullptr) == multiset(rb->reactants, &species_map) &&
           multiset(ra->products, nullptr) == multiset(rb->products, &species_map);
  };

  Alignment al;
  al.matching = match_elements(a, b, opts);

  std::map<std::string, std::string> rename;
  for (const auto& m : al.matching.matches) rename[m.right] = m.left;

  std::unordered_set<std::string> taken;
  collect_ids(a.compartments, taken);
  collect_ids(a.species, taken);
  collect_ids(a.parameters, taken);
  collect_ids(a.reactions, taken);
  std::unordered_set<std::string> a_ids = taken;
  std::unordered_set<std::string> b_ids;
  collect_ids(b.compartments, b_ids);
  collect_ids(b.species, b_ids);
  collect_ids(b.parameters, b_ids);
  collect_ids(b.reactions, b_ids);

  auto place = [&](ElementKind kind, const std::string& id) {
    if (rename.count(id)) return;
    if (!a_ids.count(id)) {
      rename[id] = id;
      taken.insert(id);
      return;
    }
    auto base = id + "__m" + std::to_string(source);
    auto candidate = base;
    for (int n = 2; taken.count(candidate) || b_ids.count(candidate); ++n) {
      candidate = base + "_" + std::to_string(n);
    }
    taken.insert(candidate);
    rename[id] = candidate;
    al.renames.push_back({source, kind, id, candidate});
  };
  for (const auto& c : b.compartments) place(ElementKind::Compartment, c.id);
  for (const auto& s : b.species) place(ElementKind::Species, s.id);
  for (const auto& p : b.parameters) place(ElementKind::Parameter, p.id);
  for (const auto& r : b.reactions) place(ElementKind::Reaction, r.id);

  al.mapped = b;
  auto& m = al.mapped;
  for (auto& c : m.compartments) c.id = map_id(rename, c.id);
  for (auto& s : m.species) {
    s.id = map_id(rename, s.id);
    s.compartment = map_id(rename, s.compartment);
  }
  for (auto& p : m.parameters) p.id = map_id(rename, p.id);
  for (auto& r : m.reactions) {
    r.id = map_id(rename, r.id);
    for (auto& ref : r.reactants) ref.species = map_id(rename, ref.species);
    for (auto& ref : r.products) ref.species = map_id(rename, ref.species);
    for (auto& mod : r.modifiers) mod = map_id(rename, mod);
    if (r.kinetic_law) {
      auto law_map = rename;
      for (const auto& local : r.local_parameters) law_map.erase(local.id);
      r.kinetic_law = rename_symbols(*r.kinetic_law, law_map);
    }
  }
  return al;
}

template <typename T>
const T* find_same(const std::vector<T>& items, const std::string& id) {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

template <typename T>
std::vector<AttributeDelta> compare(const T& left, const T& right, const std::vector<Attribute<T>>& table,
                                    bool with_annotations) {
  std::vector<AttributeDelta> deltas;
  for (const auto& attr : table) {
    auto l = attr.render(left);
    auto r = attr.render(right);
    if (l != r) deltas.push_back({attr.name, std::move(l), std::move(r)});
  }
  if constexpr (requires { left.annotations; }) {
    if (with_annotations && !(left.annotations == right.annotations)) {
      deltas.push_back({"annotations", left.annotations.to_text(), right.annotations.to_text()});
    }
  }
  return deltas;
}

template <typename T>
void diff_kind(ElementKind kind, const std::vector<T>& left, const std::vector<T>& mapped,
               const std::vector<T>& original, const std::vector<Attribute<T>>& table, DiffReport& report) {
  for (const auto& l : left) {
    const auto* r = find_same(mapped, l.id);
    if (!r) {
      report.entries.push_back({element_path(kind, l.id), DiffKind::Removed, {}});
      continue;
    }
    auto deltas = compare(l, *r, table, true);
    if (!deltas.empty()) report.entries.push_back({element_path(kind, l.id), DiffKind::Changed, std::move(deltas)});
  }
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    if (!find_same(left, mapped[i].id)) {
      report.entries.push_back({element_path(kind, original[i].id), DiffKind::Added, {}});
    }
  }
}

}  // namespace

DiffReport diff_models(const ModelDocument& a, const ModelDocument& b, const EquivalenceOracle* equivalence) {
  auto al = align(a, b, equivalence, 2);
  DiffReport report;
  report.matching = al.matching.matches;
  auto header = compare(a, b, header_attributes(), false);
  if (!header.empty()) report.entries.push_back({"model", DiffKind::Changed, std::move(header)});
  diff_kind(ElementKind::Compartment, a.compartments, al.mapped.compartments, b.compartments,
            compartment_attributes(), report);
  diff_kind(ElementKind::Species, a.species, al.mapped.species, b.species, species_attributes(), report);
  diff_kind(ElementKind::Parameter, a.parameters, al.mapped.parameters, b.parameters, parameter_attributes(),
            report);
  diff_kind(ElementKind::Reaction, a.reactions, al.mapped.reactions, b.reactions, reaction_attributes(), report);
  return report;
}

std::string diff_to_json(const DiffReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json deltas = Json::array();
    for (const auto& d : e.deltas) deltas.push_back({{"attribute", d.attribute}, {"left", d.left}, {"right", d.right}});
    entries.push_back({{"path", e.path}, {"kind", diff_kind_name(e.kind)}, {"deltas", std::move(deltas)}});
  }
  Json matching = Json::array();
  for (const auto& m : report.matching) {
    matching.push_back({{"left", m.left_path()},
                        {"right", m.right_path()},
                        {"score", m.score},
                        {"basis", match_basis_name(m.basis)}});
  }
  Json doc = {{"model_changed", !report.empty()},
              {"header_changed", report.header_changed()},
              {"summary",
               {{"added", report.count(DiffKind::Added)},
                {"removed", report.count(DiffKind::Removed)},
                {"changed", report.count(DiffKind::Changed)}}},
              {"entries", std::move(entries)},
              {"matching", std::move(matching)}};
  return doc.dump(2) + "\n";
}

std::string diff_to_tsv(const DiffReport& report) {
  std::string out = "path\tkind\tattribute\tleft\tright\n";
  for (const auto& e : report.entries) {
    auto kind = std::string(diff_kind_name(e.kind));
    if (e.deltas.empty()) {
      out += tsv_escape(e.path) + "\t" + kind + "\t\t\t\n";
      continue;
    }
    for (const auto& d : e.deltas) {
      out += tsv_escape(e.path) + "\t" + kind + "\t" + d.attribute + "\t" + tsv_escape(d.left) + "\t" +
             tsv_escape(d.right) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Merge

namespace {

std::optional<MergeChoice> parse_choice(std::string_view word, bool allow_fail) {
  if (word == "left") return MergeChoice::Left;
  if (word == "right") return MergeChoice::Right;
  if (word == "fail" && allow_fail) return MergeChoice::Fail;
  return std::nullopt;
}

}  // namespace

MergePolicy parse_merge_policy(std::string_view text) {
  MergePolicy policy;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto content = trim(lines[i]);
    if (content.empty() || content.front() == '#') continue;
    auto where = "policy line " + std::to_string(i + 1) + ": ";
    auto fields = split(content, '\t');
    if (fields.size() == 2 && trim(fields[0]) == "default") {
      auto choice = parse_choice(trim(fields[1]), true);
      if (!choice) throw Error(ErrorCode::MalformedPolicy, where + "default must be fail, left or right");
      policy.fallback = *choice;
      continue;
    }
    if (fields.size() != 3) throw Error(ErrorCode::MalformedPolicy, where + "expected path, attribute, choice");
    auto path = std::string(trim(fields[0]));
    auto attribute = std::string(trim(fields[1]));
    auto choice = parse_choice(trim(fields[2]), false);
    if (!choice) throw Error(ErrorCode::MalformedPolicy, where + "override must be left or right");
    if (!conflict_attributes(path).count(attribute)) {
      throw Error(ErrorCode::MalformedPolicy, where + "'" + attribute + "' cannot conflict on " + path);
    }
    policy.overrides[{path, attribute}] = *choice;
  }
  return policy;
}

std::string conflicts_to_json(const ConflictReport& report) {
  Json list = Json::array();
  for (const auto& c : report.conflicts) {
    list.push_back({{"path", c.path}, {"attribute", c.attribute}, {"left", c.left}, {"right", c.right}});
  }
  return Json{{"conflicts", std::move(list)}}.dump(2) + "\n";
}

std::string conflicts_to_tsv(const ConflictReport& report) {
  std::string out = "path\tattribute\tleft\tright\n";
  for (const auto& c : report.conflicts) {
    out += tsv_escape(c.path) + "\t" + c.attribute + "\t" + tsv_escape(c.left) + "\t" + tsv_escape(c.right) + "\n";
  }
  return out;
}

MergeConflictError::MergeConflictError(ConflictReport report)
    : Error(ErrorCode::MergeConflict,
            std::to_string(report.conflicts.size()) + " merge conflict(s), first on " +
                (report.conflicts.empty() ? std::string("?")
                                          : report.conflicts.front().path + " " + report.conflicts.front().attribute)),
      report_(std::move(report)) {}

std::string renames_to_json(const std::vector<RenameRecord>& renames) {
  Json list = Json::array();
  for (const auto& r : renames) {
    list.push_back({{"source", r.source}, {"kind", element_kind_name(r.kind)}, {"from", r.from}, {"to", r.to}});
  }
  return list.dump(2);
}

namespace {

class PairMerger {
 public:
  PairMerger(const MergePolicy& policy, MergeResult& result) : policy_(policy), result_(result) {}

  ModelDocument merge(const ModelDocument& acc, const ModelDocument& b, std::size_t source,
                      const EquivalenceOracle* equivalence) {
    auto al = align(acc, b, equivalence, source);
    ModelDocument out = acc;
    resolve("model", out, al.mapped, header_attributes());
    unify(ElementKind::Compartment, out.compartments, al.mapped.compartments, compartment_attributes());
    unify(ElementKind::Species, out.species, al.mapped.species, species_attributes());
    unify(ElementKind::Parameter, out.parameters, al.mapped.parameters, parameter_attributes());
    unify(ElementKind::Reaction, out.reactions, al.mapped.reactions, reaction_attributes());
    for (auto& r : out.reactions) {
      if (!r.kinetic_law) {
        r.local_parameters.clear();
        r.kinetic_law_sbo.reset();
      }
    }
    if (!conflicts_.empty()) throw MergeConflictError({std::move(conflicts_)});
    result_.renames.insert(result_.renames.end(), al.renames.begin(), al.renames.end());
    require_valid(out);
    return out;
  }

 private:
  template <typename T>
  void resolve(const std::string& path, T& into, const T& from, const std::vector<Attribute<T>>& table) {
    for (const auto& attr : table) {
      auto l = attr.render(into);
      auto r = attr.render(from);
      if (l == r) continue;
      auto choice = policy_.fallback;
      auto it = policy_.overrides.find({path, attr.name});
      if (it != policy_.overrides.end()) choice = it->second;
      Conflict c{path, attr.name, std::move(l), std::move(r)};
      if (choice == MergeChoice::Fail) {
        conflicts_.push_back(std::move(c));
        continue;
      }
      if (choice == MergeChoice::Right) attr.assign(into, from);
      result_.resolved.push_back(std::move(c));
    }
  }

  template <typename T>
  void unify(ElementKind kind, std::vector<T>& into, const std::vector<T>& mapped,
             const std::vector<Attribute<T>>& table) {
    std::size_t original = into.size();
    for (const auto& item : mapped) {
      T* target = nullptr;
      for (std::size_t i = 0; i < original; ++i) {
        if (into[i].id == item.id) target = &into[i];
      }
      if (!target) {
        into.push_back(item);
        continue;
      }
      resolve(element_path(kind, target->id), *target, item, table);
      target->annotations.merge(item.annotations);
      if constexpr (std::is_same_v<T, Reaction>) {
        if (render_law(*target) == render_law(item)) {
          for (auto& local : target->local_parameters) {
            if (const auto* other = item.find_local(local.id)) local.annotations.merge(other->annotations);
          }
        }
      }
    }
  }

  const MergePolicy& policy_;
  MergeResult& result_;
  std::vector<Conflict> conflicts_;
};

}  // namespace

MergeResult merge_models(const std::vector<ModelDocument>& models, const MergePolicy& policy,
                         const EquivalenceOracle* equivalence) {
  if (models.empty()) throw Error(ErrorCode::InvalidModel, "merge needs at least one model");
  for (const auto& m : models) require_valid(m);
  MergeResult result;
  result.document = models.front();
  for (std::size_t k = 1; k < models.size(); ++k) {
    PairMerger merger(policy, result);
    result.document = merger.merge(result.document, models[k], k + 1, equivalence);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Split

ModelDocument split_model(const ModelDocument& doc, const std::set<std::string>& seeds, bool expand_reactions) {
  require_valid(doc);
  for (const auto& seed : seeds) {
    if (!doc.has_element(seed)) throw Error(ErrorCode::NoSuchElement, "no element " + seed);
  }
  std::set<std::string> keep = seeds;
  if (expand_reactions) {
    for (const auto& r : doc.reactions) {
      auto touches = [&](const std::string& s) { return seeds.count(s) && doc.find_species(s); };
      bool hit = std::any_of(r.reactants.begin(), r.reactants.end(), [&](const auto& x) { return touches(x.species); }) ||
                 std::any_of(r.products.begin(), r.products.end(), [&](const auto& x) { return touches(x.species); }) ||
                 std::any_of(r.modifiers.begin(), r.modifiers.end(), touches);
      if (hit) keep.insert(r.id);
    }
  }
  for (bool grew = true; grew;) {
    grew = false;
    auto pull = [&](const std::string& id) { grew |= keep.insert(id).second; };
    for (const auto& r : doc.reactions) {
      if (!keep.count(r.id)) continue;
      for (const auto& x : r.reactants) pull(x.species);
      for (const auto& x : r.products) pull(x.species);
      for (const auto& m : r.modifiers) pull(m);
      if (r.kinetic_law) {
        std::set<std::string> symbols;
        collect_symbols(*r.kinetic_law, symbols);
        for (const auto& s : symbols) {
          if (!r.find_local(s)) pull(s);
        }
      }
    }
    for (const auto& s : doc.species) {
      if (keep.count(s.id)) pull(s.compartment);
    }
  }
  ModelDocument out;
  out.id = doc.id;
  out.name = doc.name;
  out.level = doc.level;
  out.version = doc.version;
  auto filter = [&](const auto& from, auto& to) {
    for (const auto& item : from) {
      if (keep.count(item.id)) to.push_back(item);
    }
  };
  filter(doc.compartments, out.compartments);
  filter(doc.species, out.species);
  filter(doc.parameters, out.parameters);
  filter(doc.reactions, out.reactions);
  return out;
}

}  // namespace sbmltk
