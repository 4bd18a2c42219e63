#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/annotation.hpp"
#include "sbmltk/error.hpp"
#include "sbmltk/expression.hpp"

namespace sbmltk {

using SboTerm = std::optional<std::string>;  // "SBO:0000042"

struct Compartment {
  std::string id;
  std::string name;
  double size = 1.0;
  AnnotationSet annotations;
  SboTerm sbo;

  bool operator==(const Compartment&) const = default;
};

struct Species {
  std::string id;
  std::string name;
  std::string compartment;
  double initial_amount = 0.0;
  bool boundary = false;
  bool constant = false;
  AnnotationSet annotations;
  SboTerm sbo;

  bool operator==(const Species&) const = default;
};

struct Parameter {
  std::string id;
  double value = 0.0;
  AnnotationSet annotations;
  SboTerm sbo;

  bool operator==(const Parameter&) const = default;
};

struct SpeciesReference {
  std::string species;
  double stoichiometry = 1.0;

  bool operator==(const SpeciesReference&) const = default;
};

struct Reaction {
  std::string id;
  std::string name;
  bool reversible = false;
  std::vector<SpeciesReference> reactants;
  std::vector<SpeciesReference> products;
  std::vector<std::string> modifiers;
  std::optional<Expression> kinetic_law;
  std::vector<Parameter> local_parameters;
  AnnotationSet annotations;
  SboTerm sbo;
  SboTerm kinetic_law_sbo;  // sboTerm carried by the <kineticLaw> element

  const Parameter* find_local(std::string_view local_id) const;

  bool operator==(const Reaction&) const = default;
};

/// The SBML subset handled by every module. Plain value type: operations take
/// it by const reference and return new documents.
struct ModelDocument {
  std::string id;
  std::string name;
  int level = 2;
  int version = 4;
  std::vector<Compartment> compartments;
  std::vector<Species> species;
  std::vector<Parameter> parameters;
  std::vector<Reaction> reactions;

  const Compartment* find_compartment(std::string_view id) const;
  const Species* find_species(std::string_view id) const;
  const Parameter* find_parameter(std::string_view id) const;
  const Reaction* find_reaction(std::string_view id) const;
  bool has_element(std::string_view id) const;

  std::size_t species_index(std::string_view id) const;  // npos if absent
  bool empty() const;

  bool operator==(const ModelDocument&) const = default;
};

enum class ElementKind { Compartment, Species, Parameter, Reaction };

std::string_view element_kind_name(ElementKind kind);

/// Paths used in reports: "species/glc", "reaction/r1",
/// "reaction/r1/parameter/kf", or "model" for the header.
std::string element_path(ElementKind kind, std::string_view id);

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return error_count() == 0; }
  std::size_t error_count() const;
  std::size_t warning_count() const;
  std::string summary() const;

  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_model(const ModelDocument& doc);

class InvalidModelError : public Error {
 public:
  explicit InvalidModelError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Throws InvalidModelError when validation reports errors.
void require_valid(const ModelDocument& doc);

// ---------------------------------------------------------------------------
// Stoichiometry

/// Net stoichiometry n_ri: products positive, reactants negative.
struct StoichiometricMatrix {
  std::vector<std::string> species;
  std::vector<std::string> reactions;
  std::vector<double> entries;  // row-major, species x reactions

  double at(std::size_t species_row, std::size_t reaction_col) const {
    return entries[species_row * reactions.size() + reaction_col];
  }
  std::size_t rows() const { return species.size(); }
  std::size_t cols() const { return reactions.size(); }
};

/// Throws InvalidModelError if `doc` does not validate.
StoichiometricMatrix stoichiometric_matrix(const ModelDocument& doc);

}  // namespace sbmltk
