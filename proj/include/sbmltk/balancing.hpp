#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk {

enum class QuantityType {
  // basic
  StdChemPotential,
  VelocityConst,
  KM,
  KA,
  KI,
  Conc,
  EnzymeConc,
  // derived
  Keq,
  KcatFwd,
  KcatRev,
  VmaxFwd,
  VmaxRev,
  ChemPotential,
  ReactionAffinity,
};

enum class Scale { Multiplicative, Additive };

struct QuantityInfo {
  QuantityType type;
  std::string_view token;  // "KM", "kcat+", "mu0", ...
  std::string_view name;   // "Michaelis constant", ...
  Scale scale;
  std::string_view unit;
  bool basic;
  bool needs_reaction;
  bool needs_species;
};

const QuantityInfo& quantity_info(QuantityType type);
const std::vector<QuantityType>& all_quantity_types();
/// Accepts tokens and names, case-insensitively. Throws Error(UnknownQuantityType).
QuantityType parse_quantity_type(std::string_view text);

struct QuantityInstance {
  QuantityType type = QuantityType::KM;
  std::string reaction;
  std::string species;

  /// "KM[r1,A]", "c[A]", "kV[r1]".
  std::string label() const;
  auto operator<=>(const QuantityInstance&) const = default;
};

/// Median in natural units plus spread: ln-std for multiplicative types,
/// kJ/mol std for additive ones (where the median is the mean).
struct Distribution {
  double median = 1.0;
  double std = 1.0;
};

struct Regulation {
  std::string reaction;
  std::string species;
  QuantityType type = QuantityType::KI;  // KI or KA
};

struct BalancingConfig {
  double rt = 2.4790;  // kJ/mol at 298.15 K
  std::map<QuantityType, Distribution> priors;  // basic types
  std::map<QuantityType, Distribution> pseudo;  // enabled derived types
  std::vector<Regulation> regulation;

  static BalancingConfig defaults();
  BalancingConfig without_pseudo() const;
};

struct Observation {
  QuantityInstance instance;
  std::size_t row = 0;  // row of Q
  double value = 0.0;   // natural units as given
  double y = 0.0;       // on the quantity's scale (ln for multiplicative)
  double std = 1.0;
  bool pseudo = false;
};

struct DataRow {
  QuantityInstance instance;
  double value = 0.0;
  double std = 0.0;
  std::string unit;
  std::size_t line = 0;
};

/// Data TSV: QuantityType, ReactionID, SpeciesID, Value, Std, Unit; optional
/// header row, `#` comments, empty or "-" ids. Throws Error(UnknownQuantityType,
/// UnitMismatch, NonPositiveValueForLogScale or MalformedData).
std::vector<DataRow> parse_balancing_data(std::string_view tsv);

struct BalancingProblem {
  std::vector<QuantityInstance> basics;
  std::vector<QuantityInstance> derived;
  Eigen::MatrixXd q_matrix;  // (basics + derived) x basics, identity on top
  Eigen::VectorXd prior_mean;
  Eigen::VectorXd prior_std;
  std::vector<double> prior_median;  // natural units, exactly as configured
  std::vector<Observation> data;
  std::vector<Observation> pseudo;
  double rt = 2.4790;
  StoichiometricMatrix stoichiometry;

  std::size_t rows() const { return basics.size() + derived.size(); }
  const QuantityInstance& instance(std::size_t row) const;
  std::optional<std::size_t> row_of(const QuantityInstance& instance) const;
};

/// Throws InvalidModelError, Error(UnknownElementId) and the data errors above.
BalancingProblem build_problem(const ModelDocument& doc, std::string_view data_tsv,
                               const BalancingConfig& config = BalancingConfig::defaults());
BalancingProblem build_problem(const ModelDocument& doc, const std::vector<DataRow>& data,
                               const BalancingConfig& config = BalancingConfig::defaults());

struct BalancedSet {
  Eigen::VectorXd mean;     // every row of Q, on the quantity's scale
  Eigen::VectorXd std;      // every row of Q
  Eigen::MatrixXd cov;      // basics x basics
  std::vector<QuantityInstance> instances;

  /// exp(mean) for multiplicative rows, mean for additive ones.
  double median(std::size_t row) const;
  std::optional<std::size_t> row_of(const QuantityInstance& instance) const;
};

/// Gaussian update of the basics. Throws Error(SingularSystem) or
/// Error(NumericalFailure).
BalancedSet balance(const BalancingProblem& problem);

struct ConsistencyReport {
  std::vector<double> wegscheider;  // per null-space basis vector of N
  std::vector<double> haldane;      // per reaction
  std::vector<double> vmax;         // per reaction, forward and reverse

  static double max_of(const std::vector<double>& v);
};

ConsistencyReport consistency_report(const BalancingProblem& problem, const BalancedSet& balanced);

/// Parameter symbols of one modular rate law. `km` maps each species with
/// nonzero net stoichiometry to its constant; `regulation` lists modifier
/// factors in application order.
struct ModularNames {
  struct Regulator {
    std::string species;
    QuantityType type = QuantityType::KI;  // KI or KA
    std::string constant;
  };
  std::string enzyme;
  std::string kcat_fwd;
  std::string kcat_rev;
  std::map<std::string, std::string> km;
  std::vector<Regulator> regulation;
};

/// u*(kf*prod(s/KM)^|n| - kr*prod(p/KM)^n) / (prod(1+s/KM)^|n| + prod(1+p/KM)^n - 1)
/// times KI/(KI+x) or x/(KA+x) per regulator; species taken in document order.
Expression modular_rate_law(const ModelDocument& doc, const Reaction& reaction, const ModularNames& names);

/// Replaces every kinetic law by the common modular rate law with balanced
/// local parameters. Throws Error(IncompleteBalance) or InvalidModelError.
ModelDocument apply_balanced(const ModelDocument& doc, const BalancedSet& balanced,
                             const BalancingConfig& config = BalancingConfig::defaults());

/// Columns: instance, prior_median, data_value, posterior_median, posterior_ln_std.
std::string balance_report_tsv(const BalancingProblem& problem, const BalancedSet& balanced);

}  // namespace sbmltk
