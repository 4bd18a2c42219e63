#include "sbmltk/sbo_assign.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "sbmltk/balancing.hpp"
#include "sbmltk/text.hpp"

namespace sbmltk {

std::string_view rate_law_class_token(RateLawClass c) {
  switch (c) {
    case RateLawClass::MassActionIrreversible: return "mass-action-irreversible";
    case RateLawClass::MassActionReversible: return "mass-action-reversible";
    case RateLawClass::MichaelisMentenIrreversible: return "michaelis-menten-irreversible";
    case RateLawClass::ModularReversible: return "modular-reversible";
    case RateLawClass::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view parameter_role_token(ParameterRole r) {
  switch (r) {
    case ParameterRole::ForwardRateConstant: return "forward-rate-constant";
    case ParameterRole::ReverseRateConstant: return "reverse-rate-constant";
    case ParameterRole::CatalyticConstant: return "catalytic-constant";
    case ParameterRole::MichaelisConstant: return "michaelis-constant";
    case ParameterRole::MaximalVelocity: return "maximal-velocity";
    case ParameterRole::InhibitionConstant: return "inhibition-constant";
    case ParameterRole::ActivationConstant: return "activation-constant";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct Canon {
  enum Kind { Num, Sym, Sum, Prod, Pow } kind = Num;
  double value = 0.0;
  std::string name;
  std::vector<std::pair<double, Canon>> items;  // Sum: (sign, term); Prod: (exponent, factor); Pow: base, exponent
  std::string key;
};

Canon make_num(double v) {
  Canon c;
  c.kind = Canon::Num;
  c.value = v;
  c.key = format_real(v);
  return c;
}

Canon make_sym(const std::string& name) {
  Canon c;
  c.kind = Canon::Sym;
  c.name = name;
  c.key = name;
  return c;
}

bool item_less(const std::pair<double, Canon>& a, const std::pair<double, Canon>& b) {
  if (a.second.key != b.second.key) return a.second.key < b.second.key;
  return a.first < b.first;
}

Canon make_sum(std::vector<std::pair<double, Canon>> parts) {
  std::vector<std::pair<double, Canon>> flat;
  for (auto& [sign, term] : parts) {
    if (term.kind == Canon::Sum) {
      for (auto& [s, t] : term.items) flat.emplace_back(sign * s, std::move(t));
    } else {
      flat.emplace_back(sign, std::move(term));
    }
  }
  if (flat.size() == 1 && flat[0].first == 1.0) return std::move(flat[0].second);
  std::sort(flat.begin(), flat.end(), item_less);
  Canon c;
  c.kind = Canon::Sum;
  c.key = "(+";
  for (const auto& [sign, term] : flat) c.key += (sign < 0 ? " -" : " +") + term.key;
  c.key += ")";
  c.items = std::move(flat);
  return c;
}

Canon make_prod(std::vector<std::pair<double, Canon>> parts) {
  std::vector<std::pair<double, Canon>> flat;
  for (auto& [exponent, factor] : parts) {
    if (factor.kind == Canon::Prod) {
      for (auto& [e, f] : factor.items) flat.emplace_back(exponent * e, std::move(f));
    } else {
      flat.emplace_back(exponent, std::move(factor));
    }
  }
  std::map<std::string, std::pair<double, Canon>> merged;
  for (auto& [exponent, factor] : flat) {
    std::string key = factor.key;
    auto it = merged.find(key);
    if (it == merged.end()) merged.emplace(std::move(key), std::make_pair(exponent, std::move(factor)));
    else it->second.first += exponent;
  }
  std::vector<std::pair<double, Canon>> items;
  for (auto& [key, item] : merged) {
    if (item.first != 0.0) items.push_back(std::move(item));
  }
  if (items.empty()) return make_num(1.0);
  if (items.size() == 1 && items[0].first == 1.0) return std::move(items[0].second);
  Canon c;
  c.kind = Canon::Prod;
  c.key = "(*";
  for (const auto& [exponent, factor] : items) c.key += " " + factor.key + "^" + format_real(exponent);
  c.key += ")";
  c.items = std::move(items);
  return c;
}

Canon canon(const Expression& e) {
  switch (e.kind()) {
    case ExprKind::Number: return make_num(e.value());
    case ExprKind::Symbol: return make_sym(e.name());
    case ExprKind::Neg: return make_sum({{-1.0, canon(e.lhs())}});
    case ExprKind::Add: return make_sum({{1.0, canon(e.lhs())}, {1.0, canon(e.rhs())}});
    case ExprKind::Sub: return make_sum({{1.0, canon(e.lhs())}, {-1.0, canon(e.rhs())}});
    case ExprKind::Mul: return make_prod({{1.0, canon(e.lhs())}, {1.0, canon(e.rhs())}});
    case ExprKind::Div: return make_prod({{1.0, canon(e.lhs())}, {-1.0, canon(e.rhs())}});
    case ExprKind::Pow: {
      auto base = canon(e.lhs());
      auto exponent = canon(e.rhs());
      if (exponent.kind == Canon::Num) return make_prod({{exponent.value, std::move(base)}});
      Canon c;
      c.kind = Canon::Pow;
      c.key = "(^ " + base.key + " " + exponent.key + ")";
      c.items = {{1.0, std::move(base)}, {1.0, std::move(exponent)}};
      return c;
    }
  }
  return make_num(0.0);
}

// ---------------------------------------------------------------------------
// Pattern matching

class Matcher {
 public:
  Matcher(const Reaction& r, const ModelDocument& doc) : r_(r), doc_(doc) {
    for (const auto& ref : r.reactants) reactants_[ref.species] += ref.stoichiometry;
    for (const auto& ref : r.products) products_[ref.species] += ref.stoichiometry;
  }

  Classification run() {
    auto c = canon(*r_.kinetic_law);
    Classification out;
    if (auto k = mass_action(c, reactants_)) {
      out.law = RateLawClass::MassActionIrreversible;
      out.roles[*k] = ParameterRole::ForwardRateConstant;
    } else if (reversible_mass_action(c, out)) {
      out.law = RateLawClass::MassActionReversible;
    } else if (michaelis_menten(c, out)) {
      out.law = RateLawClass::MichaelisMentenIrreversible;
    } else if (modular(c, out)) {
      out.law = RateLawClass::ModularReversible;
    } else {
      out = {};
    }
    return out;
  }

 private:
  bool is_species(const std::string& s) const { return doc_.find_species(s) != nullptr; }
  bool is_parameter(const std::string& s) const {
    return r_.find_local(s) != nullptr || doc_.find_parameter(s) != nullptr;
  }
  bool is_parameter_sym(const Canon& c) const { return c.kind == Canon::Sym && is_parameter(c.name); }

  // Symbol -> exponent for a product of plain symbols.
  static std::optional<std::map<std::string, double>> monomial(const Canon& c) {
    std::map<std::string, double> out;
    if (c.kind == Canon::Sym) {
      out[c.name] = 1.0;
      return out;
    }
    if (c.kind != Canon::Prod) return std::nullopt;
    for (const auto& [exponent, factor] : c.items) {
      if (factor.kind != Canon::Sym) return std::nullopt;
      out[factor.name] = exponent;
    }
    return out;
  }

  // k * prod(s^m) with species exponents equal to `participants`.
  std::optional<std::string> mass_action(const Canon& c, const std::map<std::string, double>& participants) const {
    auto m = monomial(c);
    if (!m) return std::nullopt;
    std::map<std::string, double> species;
    std::optional<std::string> constant;
    for (const auto& [sym, exponent] : *m) {
      if (is_species(sym)) {
        species[sym] = exponent;
      } else if (is_parameter(sym) && exponent == 1.0 && !constant) {
        constant = sym;
      } else {
        return std::nullopt;
      }
    }
    if (!constant || species != participants) return std::nullopt;
    return constant;
  }

  bool reversible_mass_action(const Canon& c, Classification& out) const {
    if (c.kind != Canon::Sum || c.items.size() != 2 || products_.empty()) return false;
    for (int order = 0; order < 2; ++order) {
      const auto& plus = c.items[static_cast<std::size_t>(order)];
      const auto& minus = c.items[static_cast<std::size_t>(1 - order)];
      if (plus.first != 1.0 || minus.first != -1.0) continue;
      auto kf = mass_action(plus.second, reactants_);
      auto kr = mass_action(minus.second, products_);
      if (kf && kr && *kf != *kr) {
        out.roles[*kf] = ParameterRole::ForwardRateConstant;
        out.roles[*kr] = ParameterRole::ReverseRateConstant;
        return true;
      }
    }
    return false;
  }

  // V * S / (K + S) with a single substrate of stoichiometry 1.
  bool michaelis_menten(const Canon& c, Classification& out) const {
    if (reactants_.size() != 1 || reactants_.begin()->second != 1.0) return false;
    const auto& s = reactants_.begin()->first;
    if (c.kind != Canon::Prod || c.items.size() != 3) return false;
    std::optional<std::string> v, k;
    bool substrate = false;
    for (const auto& [exponent, factor] : c.items) {
      if (exponent == 1.0 && factor.kind == Canon::Sym && factor.name == s) {
        substrate = true;
      } else if (exponent == 1.0 && is_parameter_sym(factor)) {
        v = factor.name;
      } else if (exponent == -1.0 && factor.kind == Canon::Sum && factor.items.size() == 2) {
        for (int order = 0; order < 2; ++order) {
          const auto& a = factor.items[static_cast<std::size_t>(order)];
          const auto& b = factor.items[static_cast<std::size_t>(1 - order)];
          if (a.first == 1.0 && b.first == 1.0 && is_parameter_sym(a.second) && b.second.kind == Canon::Sym &&
              b.second.name == s) {
            k = a.second.name;
          }
        }
      }
    }
    if (!substrate || !v || !k || *v == *k) return false;
    out.roles[*v] = ParameterRole::MaximalVelocity;
    out.roles[*k] = ParameterRole::MichaelisConstant;
    return true;
  }

  void collect(const Canon& c, std::vector<const Canon*>& out) const {
    out.push_back(&c);
    for (const auto& [w, child] : c.items) collect(child, out);
  }

  // Recognized by rebuilding the template for every consistent assignment of
  // the law's parameter symbols and comparing canonical forms.
  bool modular(const Canon& c, Classification& out) const {
    std::map<std::string, double> net;
    for (const auto& [s, n] : reactants_) net[s] -= n;
    for (const auto& [s, n] : products_) net[s] += n;
    std::vector<const Canon*> nodes;
    collect(c, nodes);

    ModularNames names;
    std::set<std::string> assigned;
    for (const auto* node : nodes) {
      if (node->kind != Canon::Prod || node->items.size() != 2) continue;
      for (int order = 0; order < 2; ++order) {
        const auto& sp = node->items[static_cast<std::size_t>(order)];
        const auto& k = node->items[static_cast<std::size_t>(1 - order)];
        if (sp.second.kind == Canon::Sym && is_species(sp.second.name) && is_parameter_sym(k.second) &&
            sp.first == -k.first && sp.first > 0) {
          auto [it, fresh] = names.km.emplace(sp.second.name, k.second.name);
          if (!fresh && it->second != k.second.name) return false;
          assigned.insert(k.second.name);
        }
      }
    }
    for (const auto& [s, n] : net) {
      if (n != 0.0 && !names.km.count(s)) return false;
    }
    for (auto it = names.km.begin(); it != names.km.end();) {
      it = net.count(it->first) && net.at(it->first) != 0.0 ? std::next(it) : names.km.erase(it);
    }

    std::vector<std::pair<std::string, std::string>> regulators;  // modifier, constant
    for (const auto& m : r_.modifiers) {
      for (const auto* node : nodes) {
        if (node->kind != Canon::Sum || node->items.size() != 2) continue;
        const auto& a = node->items[0];
        const auto& b = node->items[1];
        if (a.first != 1.0 || b.first != 1.0) continue;
        std::optional<std::string> k;
        if (a.second.key == m && is_parameter_sym(b.second)) k = b.second.name;
        if (b.second.key == m && is_parameter_sym(a.second)) k = a.second.name;
        if (k && !assigned.count(*k)) {
          regulators.emplace_back(m, *k);
          assigned.insert(*k);
          break;
        }
      }
    }
    if (regulators.size() > 8) return false;

    std::set<std::string> symbols;
    collect_symbols(*r_.kinetic_law, symbols);
    std::vector<std::string> rest;
    for (const auto& s : symbols) {
      if (is_species(s)) continue;
      if (!is_parameter(s)) return false;
      if (!assigned.count(s)) rest.push_back(s);
    }
    if (rest.size() != 3) return false;

    std::sort(rest.begin(), rest.end());
    do {
      names.enzyme = rest[0];
      names.kcat_fwd = rest[1];
      names.kcat_rev = rest[2];
      for (std::size_t mask = 0; mask < (std::size_t{1} << regulators.size()); ++mask) {
        names.regulation.clear();
        for (std::size_t i = 0; i < regulators.size(); ++i) {
          auto type = (mask >> i) & 1 ? QuantityType::KA : QuantityType::KI;
          names.regulation.push_back({regulators[i].first, type, regulators[i].second});
        }
        if (canon(modular_rate_law(doc_, r_, names)).key != c.key) continue;
        out.roles[names.kcat_fwd] = ParameterRole::CatalyticConstant;
        out.roles[names.kcat_rev] = ParameterRole::CatalyticConstant;
        for (const auto& [s, k] : names.km) out.roles[k] = ParameterRole::MichaelisConstant;
        for (const auto& reg : names.regulation) {
          out.roles[reg.constant] =
              reg.type == QuantityType::KA ? ParameterRole::ActivationConstant : ParameterRole::InhibitionConstant;
        }
        return true;
      }
    } while (std::next_permutation(rest.begin(), rest.end()));
    return false;
  }

  const Reaction& r_;
  const ModelDocument& doc_;
  std::map<std::string, double> reactants_, products_;
};

}  // namespace

std::string canonical_form(const Expression& e) { return canon(e).key; }

Classification classify_rate_law(const Reaction& reaction, const ModelDocument& doc) {
  if (!reaction.kinetic_law) {
    throw Error(ErrorCode::NoKineticLaw, "reaction " + reaction.id + " has no kinetic law");
  }
  return Matcher(reaction, doc).run();
}

// ---------------------------------------------------------------------------
// Rule table

SboRuleTable parse_sbo_rules(std::string_view tsv) {
  static const std::regex sbo_pattern("SBO:[0-9]{7}");
  SboRuleTable table;
  auto lines = split_lines(tsv);
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto content = trim(lines[i]);
    if (content.empty() || content.front() == '#') continue;
    auto where = "rule line " + std::to_string(i + 1) + ": ";
    auto fields = split(lines[i], '\t');
    bool header = first && to_lower(trim(fields[0])) == "target";
    first = false;
    if (header) continue;
    if (fields.size() != 3) throw Error(ErrorCode::MalformedRuleTable, where + "expected 3 tab-separated fields");
    auto target = to_lower(trim(fields[0]));
    auto pattern = to_lower(trim(fields[1]));
    std::string sbo(trim(fields[2]));
    if (!std::regex_match(sbo, sbo_pattern)) {
      throw Error(ErrorCode::MalformedRuleTable, where + "malformed SBO id '" + sbo + "'");
    }
    bool known = false;
    if (target == "law") {
      for (auto c : {RateLawClass::MassActionIrreversible, RateLawClass::MassActionReversible,
                     RateLawClass::MichaelisMentenIrreversible, RateLawClass::ModularReversible}) {
        if (rate_law_class_token(c) != pattern) continue;
        if (!table.laws.emplace(c, sbo).second) throw Error(ErrorCode::MalformedRuleTable, where + "duplicate rule " + pattern);
        known = true;
      }
    } else if (target == "role") {
      for (int r = 0; r <= static_cast<int>(ParameterRole::ActivationConstant); ++r) {
        auto role = static_cast<ParameterRole>(r);
        if (parameter_role_token(role) != pattern) continue;
        if (!table.roles.emplace(role, sbo).second) throw Error(ErrorCode::MalformedRuleTable, where + "duplicate rule " + pattern);
        known = true;
      }
    } else {
      throw Error(ErrorCode::MalformedRuleTable, where + "target must be 'law' or 'role'");
    }
    if (!known) throw Error(ErrorCode::MalformedRuleTable, where + "unknown pattern '" + pattern + "'");
  }
  return table;
}

// ---------------------------------------------------------------------------
// Assignment

SboAssignment assign_sbo_terms(const ModelDocument& doc, const SboRuleTable& rules) {
  require_valid(doc);
  SboAssignment out{doc, {}};
  auto apply = [&](SboTerm& slot, std::string path, std::string_view target, const std::string& sbo) {
    SboLogEntry entry{std::move(path), std::string(target), sbo, !slot.has_value(), slot.value_or("")};
    if (!slot) slot = sbo;
    out.log.push_back(std::move(entry));
  };
  for (auto& r : out.document.reactions) {
    if (!r.kinetic_law) continue;
    auto cls = classify_rate_law(r, doc);
    if (cls.law == RateLawClass::Unknown) continue;
    auto path = element_path(ElementKind::Reaction, r.id);
    if (auto it = rules.laws.find(cls.law); it != rules.laws.end()) {
      apply(r.kinetic_law_sbo, path, rate_law_class_token(cls.law), it->second);
    }
    for (const auto& [symbol, role] : cls.roles) {
      auto it = rules.roles.find(role);
      if (it == rules.roles.end()) continue;
      auto local = std::find_if(r.local_parameters.begin(), r.local_parameters.end(),
                                [&](const Parameter& p) { return p.id == symbol; });
      if (local != r.local_parameters.end()) {
        apply(local->sbo, path + "/parameter/" + symbol, parameter_role_token(role), it->second);
        continue;
      }
      auto global = std::find_if(out.document.parameters.begin(), out.document.parameters.end(),
                                 [&](const Parameter& p) { return p.id == symbol; });
      if (global != out.document.parameters.end()) {
        apply(global->sbo, element_path(ElementKind::Parameter, symbol), parameter_role_token(role), it->second);
      }
    }
  }
  return out;
}

std::string sbo_log_tsv(const std::vector<SboLogEntry>& log) {
  std::string out = "path\ttarget\tsbo\taction\texisting\n";
  for (const auto& e : log) {
    out += e.path + "\t" + e.target + "\t" + e.sbo + "\t" + (e.assigned ? "assigned" : "skipped") + "\t" + e.existing +
           "\n";
  }
  return out;
}

}  // namespace sbmltk
