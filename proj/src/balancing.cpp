#include "sbmltk/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace {

const std::vector<QuantityInfo>& info_table() {
  using T = QuantityType;
  constexpr auto M = Scale::Multiplicative;
  constexpr auto A = Scale::Additive;
  static const std::vector<QuantityInfo> table = {
      {T::StdChemPotential, "mu0", "standard chemical potential", A, "kJ/mol", true, false, true},
      {T::VelocityConst, "kV", "catalytic rate constant geometric mean", M, "1/s", true, true, false},
      {T::KM, "KM", "Michaelis constant", M, "mM", true, true, true},
      {T::KA, "KA", "activation constant", M, "mM", true, true, true},
      {T::KI, "KI", "inhibitory constant", M, "mM", true, true, true},
      {T::Conc, "c", "concentration", M, "mM", true, false, true},
      {T::EnzymeConc, "u", "concentration of enzyme", M, "mM", true, true, false},
      {T::Keq, "Keq", "equilibrium constant", M, "dimensionless", false, true, false},
      {T::KcatFwd, "kcat+", "forward catalytic rate constant", M, "1/s", false, true, false},
      {T::KcatRev, "kcat-", "reverse catalytic rate constant", M, "1/s", false, true, false},
      {T::VmaxFwd, "Vmax+", "forward maximal velocity", M, "mM/s", false, true, false},
      {T::VmaxRev, "Vmax-", "reverse maximal velocity", M, "mM/s", false, true, false},
      {T::ChemPotential, "mu", "chemical potential", A, "kJ/mol", false, false, true},
      {T::ReactionAffinity, "A", "reaction affinity", A, "kJ/mol", false, true, false},
  };
  return table;
}

std::string fold(std::string_view text) {
  std::string out;
  for (char c : to_lower(trim(text))) out += (c == '_' || c == ' ') ? ' ' : c;
  return out;
}

}  // namespace

const QuantityInfo& quantity_info(QuantityType type) {
  return info_table()[static_cast<std::size_t>(type)];
}

const std::vector<QuantityType>& all_quantity_types() {
  static const std::vector<QuantityType> types = [] {
    std::vector<QuantityType> out;
    for (const auto& info : info_table()) out.push_back(info.type);
    return out;
  }();
  return types;
}

QuantityType parse_quantity_type(std::string_view text) {
  static const std::map<std::string, QuantityType> aliases = [] {
    std::map<std::string, QuantityType> m;
    for (const auto& info : info_table()) {
      m[fold(info.token)] = info.type;
      m[fold(info.name)] = info.type;
    }
    m["inhibition constant"] = QuantityType::KI;
    m["enzyme concentration"] = QuantityType::EnzymeConc;
    m["kcatf"] = QuantityType::KcatFwd;
    m["kcatr"] = QuantityType::KcatRev;
    m["substrate catalytic rate constant"] = QuantityType::KcatFwd;
    m["product catalytic rate constant"] = QuantityType::KcatRev;
    m["vmaxf"] = QuantityType::VmaxFwd;
    m["vmaxr"] = QuantityType::VmaxRev;
    m["velocity constant"] = QuantityType::VelocityConst;
    return m;
  }();
  auto it = aliases.find(fold(text));
  if (it == aliases.end()) {
    throw Error(ErrorCode::UnknownQuantityType, "unknown quantity type '" + std::string(text) + "'");
  }
  return it->second;
}

std::string QuantityInstance::label() const {
  std::string out(quantity_info(type).token);
  out += '[';
  out += reaction;
  if (!reaction.empty() && !species.empty()) out += ',';
  out += species;
  out += ']';
  return out;
}

BalancingConfig BalancingConfig::defaults() {
  BalancingConfig c;
  c.priors = {
      {QuantityType::StdChemPotential, {0.0, 500.0}}, {QuantityType::VelocityConst, {10.0, 1.0}},
      {QuantityType::KM, {0.1, 1.0}},                 {QuantityType::KA, {0.1, 1.0}},
      {QuantityType::KI, {0.1, 1.0}},                 {QuantityType::Conc, {0.1, 1.0}},
      {QuantityType::EnzymeConc, {0.0001, 1.0}},
  };
  c.pseudo = {
      {QuantityType::Keq, {1.0, 2.0}},         {QuantityType::KcatFwd, {10.0, 2.0}},
      {QuantityType::KcatRev, {10.0, 2.0}},    {QuantityType::VmaxFwd, {0.001, 2.0}},
      {QuantityType::VmaxRev, {0.001, 2.0}},   {QuantityType::ChemPotential, {0.0, 20.0}},
      {QuantityType::ReactionAffinity, {0.0, 20.0}},
  };
  return c;
}

BalancingConfig BalancingConfig::without_pseudo() const {
  auto c = *this;
  c.pseudo.clear();
  return c;
}

// ---------------------------------------------------------------------------
// Data

std::vector<DataRow> parse_balancing_data(std::string_view tsv) {
  std::vector<DataRow> rows;
  auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto content = trim(lines[i]);
    if (content.empty() || content.front() == '#') continue;
    auto where = "data line " + std::to_string(i + 1) + ": ";
    auto fields = split(lines[i], '\t');
    if (rows.empty() && fold(fields[0]) == "quantitytype") continue;
    if (fields.size() < 5 || fields.size() > 6) {
      throw Error(ErrorCode::MalformedData, where + "expected 5 or 6 tab-separated fields");
    }
    DataRow row;
    row.line = i + 1;
    try {
      row.instance.type = parse_quantity_type(fields[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::UnknownQuantityType, where + e.what());
    }
    auto id = [](std::string_view f) {
      f = trim(f);
      return f == "-" ? std::string() : std::string(f);
    };
    row.instance.reaction = id(fields[1]);
    row.instance.species = id(fields[2]);
    const auto& info = quantity_info(row.instance.type);
    auto value = parse_real(fields[3]);
    auto std = parse_real(fields[4]);
    if (!value || !std::isfinite(*value)) throw Error(ErrorCode::MalformedData, where + "value is not a number");
    if (!std || !std::isfinite(*std) || *std <= 0.0) {
      throw Error(ErrorCode::MalformedData, where + "std must be a positive number");
    }
    row.unit = fields.size() == 6 ? std::string(trim(fields[5])) : std::string();
    if (!row.unit.empty() && row.unit != info.unit) {
      throw Error(ErrorCode::UnitMismatch,
                  where + std::string(info.token) + " expects " + std::string(info.unit) + ", got " + row.unit);
    }
    if (info.scale == Scale::Multiplicative && *value <= 0.0) {
      throw Error(ErrorCode::NonPositiveValueForLogScale, where + std::string(info.token) + " must be positive");
    }
    row.value = *value;
    row.std = *std;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Problem construction

const QuantityInstance& BalancingProblem::instance(std::size_t row) const {
  return row < basics.size() ? basics[row] : derived.at(row - basics.size());
}

std::optional<std::size_t> BalancingProblem::row_of(const QuantityInstance& inst) const {
  for (std::size_t i = 0; i < rows(); ++i) {
    if (instance(i) == inst) return i;
  }
  return std::nullopt;
}

BalancingProblem build_problem(const ModelDocument& doc, std::string_view data_tsv, const BalancingConfig& config) {
  return build_problem(doc, parse_balancing_data(data_tsv), config);
}

namespace {

void check_instance(const ModelDocument& doc, const DataRow& row) {
  const auto& inst = row.instance;
  const auto& info = quantity_info(inst.type);
  auto where = "data line " + std::to_string(row.line) + ": ";
  if (info.needs_reaction != !inst.reaction.empty() || info.needs_species != !inst.species.empty()) {
    throw Error(ErrorCode::UnknownElementId,
                where + std::string(info.token) + " needs " +
                    (info.needs_reaction && info.needs_species ? "a reaction and a species"
                     : info.needs_reaction                     ? "a reaction id only"
                                                               : "a species id only"));
  }
  if (!inst.reaction.empty() && !doc.find_reaction(inst.reaction)) {
    throw Error(ErrorCode::UnknownElementId, where + "unknown reaction " + inst.reaction);
  }
  if (!inst.species.empty() && !doc.find_species(inst.species)) {
    throw Error(ErrorCode::UnknownElementId, where + "unknown species " + inst.species);
  }
}

}  // namespace

BalancingProblem build_problem(const ModelDocument& doc, const std::vector<DataRow>& data,
                               const BalancingConfig& config) {
  BalancingProblem p;
  p.rt = config.rt;
  p.stoichiometry = stoichiometric_matrix(doc);  // validates
  const auto& n = p.stoichiometry;
  if (!(config.rt > 0.0) || !std::isfinite(config.rt)) throw Error(ErrorCode::MalformedData, "RT must be positive");

  // Regulation pairs: configured ones plus any KI/KA the data mentions.
  std::set<std::pair<std::string, std::string>> inhibitors, activators;
  auto add_regulation = [&](const std::string& rxn, const std::string& sp, QuantityType type, std::string where) {
    const auto* r = doc.find_reaction(rxn);
    if (!r) throw Error(ErrorCode::UnknownElementId, where + "unknown reaction " + rxn);
    if (std::find(r->modifiers.begin(), r->modifiers.end(), sp) == r->modifiers.end()) {
      throw Error(ErrorCode::UnknownElementId, where + sp + " is not a modifier of " + rxn);
    }
    (type == QuantityType::KI ? inhibitors : activators).emplace(rxn, sp);
  };
  for (const auto& reg : config.regulation) {
    if (reg.type != QuantityType::KI && reg.type != QuantityType::KA) {
      throw Error(ErrorCode::UnknownQuantityType, "regulation must be KI or KA");
    }
    add_regulation(reg.reaction, reg.species, reg.type, "");
  }
  for (const auto& row : data) {
    check_instance(doc, row);
    if (row.instance.type == QuantityType::KI || row.instance.type == QuantityType::KA) {
      add_regulation(row.instance.reaction, row.instance.species, row.instance.type,
                     "data line " + std::to_string(row.line) + ": ");
    }
  }

  using T = QuantityType;
  for (const auto& s : doc.species) p.basics.push_back({T::StdChemPotential, "", s.id});
  for (const auto& r : doc.reactions) p.basics.push_back({T::VelocityConst, r.id, ""});
  for (std::size_t j = 0; j < n.cols(); ++j) {
    for (std::size_t i = 0; i < n.rows(); ++i) {
      if (n.at(i, j) != 0.0) p.basics.push_back({T::KM, n.reactions[j], n.species[i]});
    }
  }
  auto add_pairs = [&](T type, const std::set<std::pair<std::string, std::string>>& pairs) {
    for (const auto& r : doc.reactions) {
      for (const auto& s : doc.species) {
        if (pairs.count({r.id, s.id})) p.basics.push_back({type, r.id, s.id});
      }
    }
  };
  add_pairs(T::KA, activators);
  add_pairs(T::KI, inhibitors);
  for (const auto& s : doc.species) p.basics.push_back({T::Conc, "", s.id});
  for (const auto& r : doc.reactions) p.basics.push_back({T::EnzymeConc, r.id, ""});

  for (T type : {T::Keq, T::KcatFwd, T::KcatRev, T::VmaxFwd, T::VmaxRev}) {
    for (const auto& r : doc.reactions) p.derived.push_back({type, r.id, ""});
  }
  for (const auto& s : doc.species) p.derived.push_back({T::ChemPotential, "", s.id});
  for (const auto& r : doc.reactions) p.derived.push_back({T::ReactionAffinity, r.id, ""});

  // Priors.
  auto nb = p.basics.size();
  p.prior_mean.resize(static_cast<Eigen::Index>(nb));
  p.prior_std.resize(static_cast<Eigen::Index>(nb));
  for (std::size_t k = 0; k < nb; ++k) {
    auto type = p.basics[k].type;
    auto it = config.priors.find(type);
    if (it == config.priors.end()) {
      throw Error(ErrorCode::MalformedData, "no prior configured for " + std::string(quantity_info(type).token));
    }
    const auto& d = it->second;
    bool mult = quantity_info(type).scale == Scale::Multiplicative;
    if (!(d.std > 0.0) || (mult && !(d.median > 0.0))) {
      throw Error(ErrorCode::MalformedData, "invalid prior for " + std::string(quantity_info(type).token));
    }
    p.prior_median.push_back(d.median);
    p.prior_mean[static_cast<Eigen::Index>(k)] = mult ? std::log(d.median) : d.median;
    p.prior_std[static_cast<Eigen::Index>(k)] = d.std;
  }

  // Dependence matrix.
  auto rows = static_cast<Eigen::Index>(p.rows());
  auto cols = static_cast<Eigen::Index>(nb);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(rows, cols);
  q.topRows(cols).setIdentity();
  std::map<QuantityInstance, Eigen::Index> col;
  for (std::size_t k = 0; k < nb; ++k) col[p.basics[k]] = static_cast<Eigen::Index>(k);
  auto row_index = [&](T type, const std::string& rxn, const std::string& sp) {
    for (std::size_t k = 0; k < p.derived.size(); ++k) {
      const auto& d = p.derived[k];
      if (d.type == type && d.reaction == rxn && d.species == sp) return static_cast<Eigen::Index>(nb + k);
    }
    return Eigen::Index{-1};
  };
  for (std::size_t j = 0; j < n.cols(); ++j) {
    const auto& rxn = n.reactions[j];
    auto keq = row_index(T::Keq, rxn, "");
    auto kf = row_index(T::KcatFwd, rxn, "");
    auto kr = row_index(T::KcatRev, rxn, "");
    auto vf = row_index(T::VmaxFwd, rxn, "");
    auto vr = row_index(T::VmaxRev, rxn, "");
    auto aff = row_index(T::ReactionAffinity, rxn, "");
    auto kv = col.at({T::VelocityConst, rxn, ""});
    auto u = col.at({T::EnzymeConc, rxn, ""});
    for (std::size_t i = 0; i < n.rows(); ++i) {
      double nij = n.at(i, j);
      if (nij == 0.0) continue;
      const auto& sp = n.species[i];
      auto mu0 = col.at({T::StdChemPotential, "", sp});
      auto km = col.at({T::KM, rxn, sp});
      auto c = col.at({T::Conc, "", sp});
      q(keq, mu0) += -nij / p.rt;
      // half of (ln Keq - sum n ln KM), with ln Keq expanded on mu0
      q(kf, mu0) += -0.5 * nij / p.rt;
      q(kf, km) += -0.5 * nij;
      q(kr, mu0) += 0.5 * nij / p.rt;
      q(kr, km) += 0.5 * nij;
      // A = -sum n (mu0 + RT ln c)
      q(aff, mu0) += -nij;
      q(aff, c) += -nij * p.rt;
    }
    q(kf, kv) += 1.0;
    q(kr, kv) += 1.0;
    q.row(vf) = q.row(kf);
    q(vf, u) += 1.0;
    q.row(vr) = q.row(kr);
    q(vr, u) += 1.0;
  }
  for (const auto& s : doc.species) {
    auto mu = row_index(T::ChemPotential, "", s.id);
    q(mu, col.at({T::StdChemPotential, "", s.id})) = 1.0;
    q(mu, col.at({T::Conc, "", s.id})) = p.rt;
  }
  p.q_matrix = std::move(q);

  // Observations.
  std::set<std::size_t> observed;
  for (const auto& row : data) {
    auto r = p.row_of(row.instance);
    if (!r) {
      throw Error(ErrorCode::UnknownElementId, "data line " + std::to_string(row.line) + ": " +
                                                   row.instance.label() + " is not a quantity of this model");
    }
    bool mult = quantity_info(row.instance.type).scale == Scale::Multiplicative;
    p.data.push_back({row.instance, *r, row.value, mult ? std::log(row.value) : row.value, row.std, false});
    observed.insert(*r);
  }
  for (std::size_t k = 0; k < p.derived.size(); ++k) {
    const auto& inst = p.derived[k];
    auto it = config.pseudo.find(inst.type);
    if (it == config.pseudo.end() || observed.count(nb + k)) continue;
    const auto& d = it->second;
    bool mult = quantity_info(inst.type).scale == Scale::Multiplicative;
    if (!(d.std > 0.0) || (mult && !(d.median > 0.0))) {
      throw Error(ErrorCode::MalformedData, "invalid pseudo value for " + std::string(quantity_info(inst.type).token));
    }
    p.pseudo.push_back({inst, nb + k, d.median, mult ? std::log(d.median) : d.median, d.std, true});
  }
  return p;
}

// ---------------------------------------------------------------------------
// Posterior

double BalancedSet::median(std::size_t row) const {
  auto m = mean[static_cast<Eigen::Index>(row)];
  return quantity_info(instances.at(row).type).scale == Scale::Multiplicative ? std::exp(m) : m;
}

std::optional<std::size_t> BalancedSet::row_of(const QuantityInstance& inst) const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i] == inst) return i;
  }
  return std::nullopt;
}

BalancedSet balance(const BalancingProblem& p) {
  const auto nb = static_cast<Eigen::Index>(p.basics.size());
  std::vector<const Observation*> obs;
  for (const auto& o : p.data) obs.push_back(&o);
  for (const auto& o : p.pseudo) obs.push_back(&o);
  const auto m = static_cast<Eigen::Index>(obs.size());

  // Whitened coordinates q = mu0 + D z with z ~ N(0, I) a priori, so an
  // empty observation set leaves mu0 and D^2 untouched bit for bit.
  const Eigen::VectorXd& d = p.prior_std;
  Eigen::MatrixXd a(m, nb);
  Eigen::VectorXd b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& o = *obs[static_cast<std::size_t>(k)];
    if (!(o.std > 0.0)) throw Error(ErrorCode::SingularSystem, "observation std must be positive");
    auto qrow = p.q_matrix.row(static_cast<Eigen::Index>(o.row));
    a.row(k) = qrow.cwiseProduct(d.transpose()) / o.std;
    b[k] = (o.y - qrow.dot(p.prior_mean)) / o.std;
  }
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(nb, nb);
  if (m > 0) precision.noalias() += a.transpose() * a;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "posterior precision is not positive definite");
  Eigen::VectorXd z = m > 0 ? Eigen::VectorXd(llt.solve(a.transpose() * b)) : Eigen::VectorXd::Zero(nb);
  Eigen::MatrixXd cov_z = llt.solve(Eigen::MatrixXd::Identity(nb, nb));
  if (!z.allFinite() || !cov_z.allFinite()) throw Error(ErrorCode::NumericalFailure, "non-finite posterior");

  BalancedSet out;
  Eigen::VectorXd q_mean = p.prior_mean + d.cwiseProduct(z);
  Eigen::MatrixXd cov = d.asDiagonal() * cov_z * d.asDiagonal();
  cov = 0.5 * (cov + cov.transpose());
  out.mean.resize(static_cast<Eigen::Index>(p.rows()));
  out.mean.head(nb) = q_mean;
  auto derived = p.q_matrix.bottomRows(static_cast<Eigen::Index>(p.derived.size()));
  out.mean.tail(derived.rows()) = derived * q_mean;
  out.std.resize(out.mean.size());
  out.std.head(nb) = cov.diagonal().cwiseSqrt();
  for (Eigen::Index k = 0; k < derived.rows(); ++k) {
    out.std[nb + k] = std::sqrt(std::max(0.0, double(derived.row(k) * cov * derived.row(k).transpose())));
  }
  out.cov = std::move(cov);
  for (std::size_t r = 0; r < p.rows(); ++r) out.instances.push_back(p.instance(r));
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

double ConsistencyReport::max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

ConsistencyReport consistency_report(const BalancingProblem& p, const BalancedSet& b) {
  ConsistencyReport report;
  const auto& n = p.stoichiometry;
  auto value = [&](QuantityType type, const std::string& rxn, const std::string& sp) {
    auto row = b.row_of({type, rxn, sp});
    return row ? b.mean[static_cast<Eigen::Index>(*row)] : 0.0;
  };
  if (n.cols() > 0 && n.rows() > 0) {
    Eigen::MatrixXd dense(static_cast<Eigen::Index>(n.rows()), static_cast<Eigen::Index>(n.cols()));
    for (std::size_t i = 0; i < n.rows(); ++i) {
      for (std::size_t j = 0; j < n.cols(); ++j) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = n.at(i, j);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
    if (lu.rank() < dense.cols()) {
      Eigen::MatrixXd kernel = lu.kernel();
      for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n.cols(); ++j) {
          sum += kernel(static_cast<Eigen::Index>(j), c) * value(QuantityType::Keq, n.reactions[j], "");
        }
        report.wegscheider.push_back(std::abs(sum));
      }
    }
  }
  for (std::size_t j = 0; j < n.cols(); ++j) {
    const auto& rxn = n.reactions[j];
    double km_sum = 0.0;
    for (std::size_t i = 0; i < n.rows(); ++i) {
      if (n.at(i, j) != 0.0) km_sum += n.at(i, j) * value(QuantityType::KM, rxn, n.species[i]);
    }
    double kf = value(QuantityType::KcatFwd, rxn, "");
    double kr = value(QuantityType::KcatRev, rxn, "");
    double u = value(QuantityType::EnzymeConc, rxn, "");
    report.haldane.push_back(std::abs(kf - kr - value(QuantityType::Keq, rxn, "") + km_sum));
    report.vmax.push_back(std::abs(value(QuantityType::VmaxFwd, rxn, "") - kf - u));
    report.vmax.push_back(std::abs(value(QuantityType::VmaxRev, rxn, "") - kr - u));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rate laws

namespace {

Expression power_of(Expression base, double exponent) {
  if (exponent == 1.0) return base;
  return pow(std::move(base), Expression::number(exponent));
}

std::map<std::string, double> net_stoichiometry(const Reaction& r) {
  std::map<std::string, double> net;
  for (const auto& ref : r.reactants) net[ref.species] -= ref.stoichiometry;
  for (const auto& ref : r.products) net[ref.species] += ref.stoichiometry;
  return net;
}

Expression product(const std::vector<Expression>& factors) {
  if (factors.empty()) return Expression::number(1.0);
  auto out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = out * factors[i];
  return out;
}

}  // namespace

Expression modular_rate_law(const ModelDocument& doc, const Reaction& r, const ModularNames& names) {
  auto net = net_stoichiometry(r);
  std::vector<Expression> fwd, rev, sat_s, sat_p;
  for (const auto& s : doc.species) {
    auto it = net.find(s.id);
    if (it == net.end() || it->second == 0.0) continue;
    auto km = names.km.find(s.id);
    if (km == names.km.end()) throw Error(ErrorCode::IncompleteBalance, "no KM symbol for " + s.id);
    auto ratio = Expression::symbol(s.id) / Expression::symbol(km->second);
    auto sat = Expression::number(1.0) + ratio;
    double order = std::abs(it->second);
    (it->second < 0 ? fwd : rev).push_back(power_of(ratio, order));
    (it->second < 0 ? sat_s : sat_p).push_back(power_of(sat, order));
  }
  auto numerator = Expression::symbol(names.kcat_fwd) * product(fwd) - Expression::symbol(names.kcat_rev) * product(rev);
  auto denominator = product(sat_s) + product(sat_p) - Expression::number(1.0);
  auto law = Expression::symbol(names.enzyme) * (numerator / denominator);
  for (const auto& reg : names.regulation) {
    auto x = Expression::symbol(reg.species);
    auto k = Expression::symbol(reg.constant);
    law = law * (reg.type == QuantityType::KA ? x / (k + x) : k / (k + x));
  }
  return law;
}

ModelDocument apply_balanced(const ModelDocument& doc, const BalancedSet& b, const BalancingConfig&) {
  require_valid(doc);
  ModelDocument out = doc;
  std::set<std::string> globals;
  for (const auto& c : doc.compartments) globals.insert(c.id);
  for (const auto& s : doc.species) globals.insert(s.id);
  for (const auto& p : doc.parameters) globals.insert(p.id);
  for (const auto& r : doc.reactions) globals.insert(r.id);
  auto local_name = [&](std::string base) {
    while (globals.count(base)) base += "_";
    return base;
  };
  auto median_of = [&](const QuantityInstance& inst) {
    auto row = b.row_of(inst);
    if (!row) throw Error(ErrorCode::IncompleteBalance, "balanced set lacks " + inst.label());
    return b.median(*row);
  };

  for (auto& r : out.reactions) {
    using T = QuantityType;
    std::vector<Parameter> locals;
    auto add_local = [&](const std::string& base, double value) {
      auto id = local_name(base);
      locals.push_back({id, value, {}, {}});
      return id;
    };
    ModularNames names;
    names.enzyme = add_local("u", median_of({T::EnzymeConc, r.id, ""}));
    names.kcat_fwd = add_local("kcat_f", median_of({T::KcatFwd, r.id, ""}));
    names.kcat_rev = add_local("kcat_r", median_of({T::KcatRev, r.id, ""}));
    auto net = net_stoichiometry(r);
    for (const auto& s : doc.species) {
      if (net.count(s.id) && net[s.id] != 0.0) names.km[s.id] = add_local("KM_" + s.id, median_of({T::KM, r.id, s.id}));
    }
    for (const auto& m : r.modifiers) {
      if (auto row = b.row_of({T::KA, r.id, m})) {
        names.regulation.push_back({m, T::KA, add_local("KA_" + m, b.median(*row))});
      }
      if (auto row = b.row_of({T::KI, r.id, m})) {
        names.regulation.push_back({m, T::KI, add_local("KI_" + m, b.median(*row))});
      }
    }
    r.kinetic_law = modular_rate_law(doc, r, names);
    r.local_parameters = std::move(locals);
    r.kinetic_law_sbo.reset();
  }
  require_valid(out);
  return out;
}

std::string balance_report_tsv(const BalancingProblem& p, const BalancedSet& b) {
  std::string out = "instance\tprior_median\tdata_value\tposterior_median\tposterior_ln_std\n";
  for (std::size_t row = 0; row < p.rows(); ++row) {
    const auto& inst = p.instance(row);
    std::string prior;
    if (row < p.basics.size()) {
      prior = format_real(p.prior_median[row]);
    } else {
      for (const auto& o : p.pseudo) {
        if (o.row == row) prior = format_real(o.value);
      }
    }
    std::string data;
    for (const auto& o : p.data) {
      if (o.row != row) continue;
      if (!data.empty()) data += ';';
      data += format_real(o.value);
    }
    out += inst.label() + "\t" + prior + "\t" + data + "\t" + format_real(b.median(row)) + "\t" +
           format_real(b.std[static_cast<Eigen::Index>(row)]) + "\n";
  }
  return out;
}

}  // namespace sbmltk
