#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk {

enum class RateLawClass {
  MassActionIrreversible,
  MassActionReversible,
  MichaelisMentenIrreversible,
  ModularReversible,
  Unknown,
};

enum class ParameterRole {
  ForwardRateConstant,
  ReverseRateConstant,
  CatalyticConstant,
  MichaelisConstant,
  MaximalVelocity,
  InhibitionConstant,
  ActivationConstant,
};

/// "mass-action-irreversible", "forward-rate-constant", ...
std::string_view rate_law_class_token(RateLawClass c);
std::string_view parameter_role_token(ParameterRole r);

/// Order-insensitive printed form: sums and products flattened, operands
/// sorted, repeated factors merged into exponents.
std::string canonical_form(const Expression& e);

struct Classification {
  RateLawClass law = RateLawClass::Unknown;
  std::map<std::string, ParameterRole> roles;  // parameter symbol -> role
};

/// Throws Error(NoKineticLaw) when the reaction has no law.
Classification classify_rate_law(const Reaction& reaction, const ModelDocument& doc);

struct SboRuleTable {
  std::map<RateLawClass, std::string> laws;
  std::map<ParameterRole, std::string> roles;
};

/// TSV rows `law  <class-token>  SBO:nnnnnnn` or `role  <role-token>  SBO:nnnnnnn`;
/// optional header, `#` comments. Throws Error(MalformedRuleTable).
SboRuleTable parse_sbo_rules(std::string_view tsv);

struct SboLogEntry {
  std::string path;    // "reaction/r1", "reaction/r1/parameter/kf", "parameter/kf"
  std::string target;  // class or role token
  std::string sbo;     // id from the table
  bool assigned = false;
  std::string existing;  // previous value when skipped

  bool operator==(const SboLogEntry&) const = default;
};

struct SboAssignment {
  ModelDocument document;
  std::vector<SboLogEntry> log;
};

/// Sets law and parameter SBO terms for classified reactions; existing terms
/// are kept and logged as skipped.
SboAssignment assign_sbo_terms(const ModelDocument& doc, const SboRuleTable& rules);

/// Columns: path, target, sbo, action (assigned|skipped), existing.
std::string sbo_log_tsv(const std::vector<SboLogEntry>& log);

}  // namespace sbmltk
