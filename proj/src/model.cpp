#include "sbmltk/model.hpp"

#include <cmath>
#include <regex>
#include <set>
#include <unordered_map>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

bool valid_sbo(const SboTerm& sbo) {
  static const std::regex pattern("SBO:[0-9]{7}");
  return !sbo || std::regex_match(*sbo, pattern);
}

}  // namespace

const Parameter* Reaction::find_local(std::string_view local_id) const {
  return find_by_id(local_parameters, local_id);
}

const Compartment* ModelDocument::find_compartment(std::string_view key) const {
  return find_by_id(compartments, key);
}
const Species* ModelDocument::find_species(std::string_view key) const {
  return find_by_id(species, key);
}
const Parameter* ModelDocument::find_parameter(std::string_view key) const {
  return find_by_id(parameters, key);
}
const Reaction* ModelDocument::find_reaction(std::string_view key) const {
  return find_by_id(reactions, key);
}

bool ModelDocument::has_element(std::string_view key) const {
  return find_compartment(key) || find_species(key) || find_parameter(key) || find_reaction(key);
}

std::size_t ModelDocument::species_index(std::string_view key) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i].id == key) return i;
  }
  return std::string_view::npos;
}

bool ModelDocument::empty() const {
  return compartments.empty() && species.empty() && parameters.empty() && reactions.empty();
}

std::string_view element_kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::Compartment: return "compartment";
    case ElementKind::Species: return "species";
    case ElementKind::Parameter: return "parameter";
    case ElementKind::Reaction: return "reaction";
  }
  return "element";
}

std::string element_path(ElementKind kind, std::string_view id) {
  return std::string(element_kind_name(kind)) + "/" + std::string(id);
}

std::size_t ValidationReport::error_count() const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.severity == Severity::Error;
  return n;
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& f : findings) {
    if (f.severity != Severity::Error) continue;
    if (!out.empty()) out += "; ";
    out += f.path.empty() ? f.message : f.path + ": " + f.message;
  }
  return out;
}

InvalidModelError::InvalidModelError(ValidationReport report)
    : Error(ErrorCode::InvalidModel, "invalid model: " + report.summary()),
      report_(std::move(report)) {}

void require_valid(const ModelDocument& doc) {
  auto report = validate_model(doc);
  if (!report.ok()) throw InvalidModelError(std::move(report));
}

namespace {

class Validator {
 public:
  explicit Validator(const ModelDocument& doc) : doc_(doc) {}

  ValidationReport run() {
    if (doc_.empty()) warn("empty-model", "", "empty model");
    if (!doc_.id.empty() && !is_identifier(doc_.id)) {
      error("invalid-id", "model", "invalid identifier '" + doc_.id + "'");
    }
    for (const auto& c : doc_.compartments) check_compartment(c);
    for (const auto& s : doc_.species) check_species(s);
    for (const auto& p : doc_.parameters) {
      check_parameter(p, element_path(ElementKind::Parameter, p.id));
      note_id(p.id, element_path(ElementKind::Parameter, p.id));
    }
    for (const auto& r : doc_.reactions) check_reaction(r);
    return std::move(report_);
  }

 private:
  void error(std::string code, std::string path, std::string message) {
    report_.findings.push_back({Severity::Error, std::move(code), std::move(path), std::move(message)});
  }
  void warn(std::string code, std::string path, std::string message) {
    report_.findings.push_back(
        {Severity::Warning, std::move(code), std::move(path), std::move(message)});
  }

  void note_id(const std::string& id, const std::string& path) {
    if (!is_identifier(id)) error("invalid-id", path, "invalid identifier '" + id + "'");
    if (!seen_.insert(id).second) error("duplicate-id", path, "duplicate id " + id);
  }

  void check_common(const AnnotationSet& annotations, const SboTerm& sbo, const std::string& path) {
    if (!valid_sbo(sbo)) error("invalid-sbo", path, "malformed SBO term " + *sbo);
    for (const auto& entry : annotations) {
      if (entry.qualifier.kind == QualifierKind::Other &&
          (!is_identifier(entry.qualifier.text) || Qualifier::parse(entry.qualifier.text).kind !=
                                                        QualifierKind::Other)) {
        error("invalid-qualifier", path, "malformed qualifier '" + entry.qualifier.text + "'");
      }
      if (!is_normalized_uri(entry.uri)) {
        error("invalid-annotation", path, "annotation URI not normalized: " + entry.uri);
      }
    }
  }

  void check_compartment(const Compartment& c) {
    auto path = element_path(ElementKind::Compartment, c.id);
    note_id(c.id, path);
    if (!std::isfinite(c.size) || c.size <= 0.0) {
      error("invalid-size", path, "compartment size must be finite and positive");
    }
    check_common(c.annotations, c.sbo, path);
  }

  void check_species(const Species& s) {
    auto path = element_path(ElementKind::Species, s.id);
    note_id(s.id, path);
    if (!doc_.find_compartment(s.compartment)) {
      error("unknown-compartment", path, "unknown compartment " + s.compartment);
    }
    if (!std::isfinite(s.initial_amount) || s.initial_amount < 0.0) {
      error("invalid-amount", path, "initial amount must be finite and non-negative");
    }
    check_common(s.annotations, s.sbo, path);
  }

  void check_parameter(const Parameter& p, const std::string& path) {
    if (!std::isfinite(p.value)) error("non-finite-value", path, "parameter value must be finite");
    check_common(p.annotations, p.sbo, path);
  }

  void check_participants(const std::vector<SpeciesReference>& refs, const std::string& role,
                          const std::string& path) {
    std::set<std::string> listed;
    for (const auto& ref : refs) {
      if (!doc_.find_species(ref.species)) {
        error("unknown-species", path, "unknown " + role + " species " + ref.species);
      }
      if (!std::isfinite(ref.stoichiometry) || ref.stoichiometry <= 0.0) {
        error("invalid-stoichiometry", path, "stoichiometry of " + ref.species + " must be positive");
      }
      if (!listed.insert(ref.species).second) {
        error("duplicate-participant", path, ref.species + " listed twice as " + role);
      }
    }
  }

  void check_expression_numbers(const Expression& e, const std::string& path) {
    if (e.kind() == ExprKind::Number && !std::isfinite(e.value())) {
      error("non-finite-value", path, "non-finite number in kinetic law");
    }
    for (const auto& child : e.children()) check_expression_numbers(child, path);
  }

  void check_reaction(const Reaction& r) {
    auto path = element_path(ElementKind::Reaction, r.id);
    note_id(r.id, path);
    check_participants(r.reactants, "reactant", path);
    check_participants(r.products, "product", path);
    std::set<std::string> modifiers;
    for (const auto& m : r.modifiers) {
      if (!doc_.find_species(m)) error("unknown-species", path, "unknown modifier species " + m);
      if (!modifiers.insert(m).second) error("duplicate-participant", path, m + " listed twice as modifier");
    }
    std::set<std::string> locals;
    for (const auto& p : r.local_parameters) {
      auto local_path = path + "/parameter/" + p.id;
      if (!is_identifier(p.id)) error("invalid-id", local_path, "invalid identifier '" + p.id + "'");
      if (!locals.insert(p.id).second) error("duplicate-id", local_path, "duplicate local id " + p.id);
      check_parameter(p, local_path);
    }
    if (!valid_sbo(r.kinetic_law_sbo)) {
      error("invalid-sbo", path, "malformed SBO term " + *r.kinetic_law_sbo);
    }
    check_common(r.annotations, r.sbo, path);
    if (!r.kinetic_law) {
      if (!r.local_parameters.empty() || r.kinetic_law_sbo) {
        error("orphan-kinetic-law-data", path, "local parameters or law SBO term without a kinetic law");
      }
      return;
    }
    check_expression_numbers(*r.kinetic_law, path);
    std::set<std::string> symbols;
    collect_symbols(*r.kinetic_law, symbols);
    for (const auto& symbol : symbols) {
      bool resolved = locals.count(symbol) || doc_.find_parameter(symbol) ||
                      doc_.find_species(symbol) || doc_.find_compartment(symbol);
      if (!resolved) error("unresolved-symbol", path, "unresolved symbol " + symbol);
    }
  }

  const ModelDocument& doc_;
  ValidationReport report_;
  std::set<std::string> seen_;
};

}  // namespace

ValidationReport validate_model(const ModelDocument& doc) { return Validator(doc).run(); }

StoichiometricMatrix stoichiometric_matrix(const ModelDocument& doc) {
  require_valid(doc);
  StoichiometricMatrix n;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& s : doc.species) {
    row_of.emplace(s.id, n.species.size());
    n.species.push_back(s.id);
  }
  for (const auto& r : doc.reactions) n.reactions.push_back(r.id);
  n.entries.assign(n.rows() * n.cols(), 0.0);
  for (std::size_t col = 0; col < doc.reactions.size(); ++col) {
    const auto& r = doc.reactions[col];
    for (const auto& ref : r.reactants) n.entries[row_of.at(ref.species) * n.cols() + col] -= ref.stoichiometry;
    for (const auto& ref : r.products) n.entries[row_of.at(ref.species) * n.cols() + col] += ref.stoichiometry;
  }
  return n;
}

}  // namespace sbmltk
