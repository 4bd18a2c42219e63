#include "sbmltk/sbml_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr std::string_view kBqBiolNs = "http://biomodels.net/biology-qualifiers/";
constexpr std::string_view kBqModelNs = "http://biomodels.net/model-qualifiers/";
constexpr std::string_view kMathNs = "http://www.w3.org/1998/Math/MathML";

// ---------------------------------------------------------------------------
// Reading

using Namespaces = std::map<std::string, std::string>;  // prefix -> URI

struct QName {
  std::string ns;
  std::string local;
};

bool is_markup_child(const std::string& key) {
  return key == "<xmlattr>" || key == "<xmlcomment>" || key == "<xmltext>";
}

Namespaces scoped(const Namespaces& outer, const pt::ptree& node) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return outer;
  Namespaces inner = outer;
  for (const auto& [key, value] : *attrs) {
    if (key == "xmlns") inner[""] = value.data();
    else if (key.starts_with("xmlns:")) inner[key.substr(6)] = value.data();
  }
  return inner;
}

QName resolve(const std::string& raw, const Namespaces& ns) {
  auto colon = raw.find(':');
  std::string prefix = colon == std::string::npos ? "" : raw.substr(0, colon);
  std::string local = colon == std::string::npos ? raw : raw.substr(colon + 1);
  auto it = ns.find(prefix);
  return {it == ns.end() ? "" : it->second, local};
}

std::optional<std::string> plain_attribute(const pt::ptree& node, const std::string& name) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  auto it = attrs->find(name);
  if (it == attrs->not_found()) return std::nullopt;
  return it->second.data();
}

class SbmlReader {
 public:
  SbmlReadResult read(std::string_view xml) {
    pt::ptree tree;
    try {
      // <sep/> splits the two halves of an e-notation or rational <cn>; the
      // property tree would otherwise concatenate the surrounding text.
      static const std::regex sep(R"(<(?:[A-Za-z_][\w.-]*:)?sep\s*/>)");
      std::istringstream in{std::regex_replace(std::string(xml), sep, " ")};
      pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
      throw Error(ErrorCode::XmlSyntax,
                  "XML syntax error at line " + std::to_string(e.line()) + ": " + e.message());
    }

    const pt::ptree* root = nullptr;
    Namespaces ns;
    for (const auto& [key, child] : tree) {
      if (is_markup_child(key)) continue;
      auto scope = scoped(ns, child);
      if (resolve(key, scope).local != "sbml") {
        throw Error(ErrorCode::XmlSyntax, "root element is <" + key + ">, expected <sbml>");
      }
      root = &child;
      ns = scope;
    }
    if (!root) throw Error(ErrorCode::XmlSyntax, "document has no root element");

    auto level = int_attribute(*root, "level");
    auto version = int_attribute(*root, "version");
    if (!level || (*level != 2 && *level != 3)) {
      throw Error(ErrorCode::UnsupportedSbmlLevel,
                  "unsupported SBML level " + (level ? std::to_string(*level) : std::string("(missing)")));
    }
    result_.document.level = *level;
    result_.document.version = version.value_or(1);

    bool have_model = false;
    for (const auto& [key, child] : *root) {
      if (is_markup_child(key)) continue;
      auto scope = scoped(ns, child);
      auto name = resolve(key, scope).local;
      if (name == "model" && !have_model) {
        have_model = true;
        read_model(child, scope);
      } else if (name != "notes") {
        warn("unsupported element <" + key + "> under <sbml> dropped");
      }
    }
    check_references();
    return std::move(result_);
  }

 private:
  void warn(std::string message) { result_.warnings.push_back(std::move(message)); }

  std::optional<int> int_attribute(const pt::ptree& node, const std::string& name) {
    auto raw = plain_attribute(node, name);
    if (!raw) return std::nullopt;
    int value = 0;
    auto text = trim(*raw);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::XmlSyntax, "attribute " + name + " is not an integer: " + *raw);
    }
    return value;
  }

  std::optional<double> real_attribute(const pt::ptree& node, const std::string& name) {
    auto raw = plain_attribute(node, name);
    if (!raw) return std::nullopt;
    auto value = parse_real(*raw);
    if (!value) throw Error(ErrorCode::XmlSyntax, "attribute " + name + " is not a number: " + *raw);
    return value;
  }

  std::optional<bool> bool_attribute(const pt::ptree& node, const std::string& name) {
    auto raw = plain_attribute(node, name);
    if (!raw) return std::nullopt;
    auto text = trim(*raw);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw Error(ErrorCode::XmlSyntax, "attribute " + name + " is not a boolean: " + *raw);
  }

  std::string required(const pt::ptree& node, const std::string& name, const std::string& element) {
    auto value = plain_attribute(node, name);
    if (!value) {
      throw Error(ErrorCode::BrokenReference, "<" + element + "> lacks required attribute " + name);
    }
    return std::string(trim(*value));
  }

  SboTerm sbo_attribute(const pt::ptree& node) {
    auto raw = plain_attribute(node, "sboTerm");
    if (!raw) return std::nullopt;
    return std::string(trim(*raw));
  }

  template <typename Fn>
  void for_children(const pt::ptree& node, const Namespaces& ns, Fn&& fn) {
    for (const auto& [key, child] : node) {
      if (is_markup_child(key)) continue;
      auto scope = scoped(ns, child);
      auto qname = resolve(key, scope);
      last_ns_ = qname.ns;
      fn(qname.local, key, child, scope);
    }
  }

  void read_model(const pt::ptree& node, const Namespaces& ns) {
    auto& doc = result_.document;
    doc.id = std::string(trim(plain_attribute(node, "id").value_or("")));
    doc.name = plain_attribute(node, "name").value_or("");
    for_children(node, ns, [&](const std::string& name, const std::string& key,
                               const pt::ptree& child, const Namespaces& scope) {
      if (name == "listOfCompartments") {
        read_list(child, scope, "compartment", [&](const pt::ptree& n, const Namespaces& s) {
          read_compartment(n, s);
        });
      } else if (name == "listOfSpecies") {
        read_list(child, scope, "species",
                  [&](const pt::ptree& n, const Namespaces& s) { read_species(n, s); });
      } else if (name == "listOfParameters") {
        read_list(child, scope, "parameter", [&](const pt::ptree& n, const Namespaces& s) {
          doc.parameters.push_back(read_parameter(n, s, "parameter"));
        });
      } else if (name == "listOfReactions") {
        read_list(child, scope, "reaction",
                  [&](const pt::ptree& n, const Namespaces& s) { read_reaction(n, s); });
      } else if (name != "notes") {
        warn("unsupported element <" + key + "> under <model> dropped");
      }
    });
  }

  template <typename Fn>
  void read_list(const pt::ptree& node, const Namespaces& ns, const std::string& item, Fn&& fn) {
    for_children(node, ns, [&](const std::string& name, const std::string& key,
                               const pt::ptree& child, const Namespaces& scope) {
      if (name == item) fn(child, scope);
      else if (name != "notes" && name != "annotation") warn("unsupported element <" + key + "> dropped");
    });
  }

  // Returns the annotation set of an element; also warns on other children.
  AnnotationSet read_element_children(const pt::ptree& node, const Namespaces& ns,
                                      const std::string& element,
                                      const std::vector<std::string>& handled = {}) {
    AnnotationSet annotations;
    for_children(node, ns, [&](const std::string& name, const std::string& key,
                               const pt::ptree& child, const Namespaces& scope) {
      if (name == "annotation") {
        read_annotation(child, scope, element, annotations);
      } else if (name == "notes") {
        // free-form XHTML, not carried
      } else if (std::find(handled.begin(), handled.end(), name) == handled.end()) {
        warn("unsupported element <" + key + "> in " + element + " dropped");
      }
    });
    return annotations;
  }

  void read_annotation(const pt::ptree& node, const Namespaces& ns, const std::string& element,
                       AnnotationSet& out) {
    for_children(node, ns, [&](const std::string& name, const std::string&, const pt::ptree& rdf,
                               const Namespaces& rdf_scope) {
      if (last_ns_ != kRdfNs || name != "RDF") {
        warn("non-RDF annotation content in " + element + " dropped");
        return;
      }
      for_children(rdf, rdf_scope, [&](const std::string& dname, const std::string&,
                                       const pt::ptree& description, const Namespaces& dscope) {
        if (dname != "Description") {
          warn("unsupported RDF node in " + element + " dropped");
          return;
        }
        read_description(description, dscope, element, out);
      });
    });
  }

  void read_description(const pt::ptree& node, const Namespaces& ns, const std::string& element,
                        AnnotationSet& out) {
    for (const auto& [key, qualifier_node] : node) {
      if (is_markup_child(key)) continue;
      auto scope = scoped(ns, qualifier_node);
      auto qname = resolve(key, scope);
      if (qname.ns != kBqBiolNs && qname.ns != kBqModelNs) {
        warn("unsupported annotation " + key + " in " + element + " dropped");
        continue;
      }
      auto qualifier = Qualifier::parse(qname.local);
      for (const auto& [container_key, container] : qualifier_node) {
        if (is_markup_child(container_key)) continue;
        auto cscope = scoped(scope, container);
        for (const auto& [li_key, li] : container) {
          if (is_markup_child(li_key)) continue;
          auto li_name = resolve(li_key, scoped(cscope, li));
          if (li_name.local != "li") continue;
          auto resource = rdf_resource(li, scoped(cscope, li));
          if (!resource) continue;
          try {
            out.insert(qualifier, *resource);
          } catch (const Error&) {
            warn("unrecognized annotation URI " + *resource + " in " + element + " dropped");
          }
        }
      }
    }
  }

  std::optional<std::string> rdf_resource(const pt::ptree& li, const Namespaces& ns) {
    auto attrs = li.get_child_optional("<xmlattr>");
    if (!attrs) return std::nullopt;
    for (const auto& [key, value] : *attrs) {
      auto qname = resolve(key, ns);
      if (qname.local == "resource" && (qname.ns == kRdfNs || key.find(':') != std::string::npos)) {
        return value.data();
      }
    }
    return std::nullopt;
  }

  void read_compartment(const pt::ptree& node, const Namespaces& ns) {
    Compartment c;
    c.id = required(node, "id", "compartment");
    c.name = plain_attribute(node, "name").value_or("");
    c.size = real_attribute(node, "size").value_or(1.0);
    c.sbo = sbo_attribute(node);
    c.annotations = read_element_children(node, ns, "compartment " + c.id);
    result_.document.compartments.push_back(std::move(c));
  }

  void read_species(const pt::ptree& node, const Namespaces& ns) {
    Species s;
    s.id = required(node, "id", "species");
    s.name = plain_attribute(node, "name").value_or("");
    s.compartment = required(node, "compartment", "species");
    if (auto amount = real_attribute(node, "initialAmount")) {
      s.initial_amount = *amount;
    } else if (auto conc = real_attribute(node, "initialConcentration")) {
      s.initial_amount = *conc;
    }
    s.boundary = bool_attribute(node, "boundaryCondition").value_or(false);
    s.constant = bool_attribute(node, "constant").value_or(false);
    s.sbo = sbo_attribute(node);
    s.annotations = read_element_children(node, ns, "species " + s.id);
    result_.document.species.push_back(std::move(s));
  }

  Parameter read_parameter(const pt::ptree& node, const Namespaces& ns, const std::string& element) {
    Parameter p;
    p.id = required(node, "id", element);
    auto value = real_attribute(node, "value");
    if (!value) warn(element + " " + p.id + " has no value; using 0");
    p.value = value.value_or(0.0);
    p.sbo = sbo_attribute(node);
    p.annotations = read_element_children(node, ns, element + " " + p.id);
    return p;
  }

  std::vector<SpeciesReference> read_references(const pt::ptree& node, const Namespaces& ns,
                                                const std::string& reaction) {
    std::vector<SpeciesReference> refs;
    read_list(node, ns, "speciesReference", [&](const pt::ptree& n, const Namespaces& s) {
      SpeciesReference ref;
      ref.species = required(n, "species", "speciesReference");
      ref.stoichiometry = real_attribute(n, "stoichiometry").value_or(1.0);
      read_element_children(n, s, "species reference in " + reaction);
      refs.push_back(std::move(ref));
    });
    return refs;
  }

  void read_reaction(const pt::ptree& node, const Namespaces& ns) {
    Reaction r;
    r.id = required(node, "id", "reaction");
    r.name = plain_attribute(node, "name").value_or("");
    r.reversible = bool_attribute(node, "reversible").value_or(true);
    r.sbo = sbo_attribute(node);
    auto label = "reaction " + r.id;
    for_children(node, ns, [&](const std::string& name, const std::string& key,
                               const pt::ptree& child, const Namespaces& scope) {
      if (name == "listOfReactants") {
        r.reactants = read_references(child, scope, r.id);
      } else if (name == "listOfProducts") {
        r.products = read_references(child, scope, r.id);
      } else if (name == "listOfModifiers") {
        read_list(child, scope, "modifierSpeciesReference",
                  [&](const pt::ptree& n, const Namespaces&) {
                    r.modifiers.push_back(required(n, "species", "modifierSpeciesReference"));
                  });
      } else if (name == "kineticLaw") {
        read_kinetic_law(child, scope, r);
      } else if (name == "annotation") {
        read_annotation(child, scope, label, r.annotations);
      } else if (name != "notes") {
        warn("unsupported element <" + key + "> in " + label + " dropped");
      }
    });
    result_.document.reactions.push_back(std::move(r));
  }

  void read_kinetic_law(const pt::ptree& node, const Namespaces& ns, Reaction& r) {
    std::optional<Expression> law;
    std::vector<Parameter> locals;
    bool unsupported = false;
    auto label = "kinetic law of " + r.id;
    for_children(node, ns, [&](const std::string& name, const std::string& key,
                               const pt::ptree& child, const Namespaces& scope) {
      if (name == "math") {
        try {
          law = read_math(child, scope);
        } catch (const UnsupportedMath& e) {
          warn("unsupported MathML in " + label + " (" + e.what + "); kinetic law dropped");
          unsupported = true;
        }
      } else if (name == "listOfParameters" || name == "listOfLocalParameters") {
        for_children(child, scope, [&](const std::string& pname, const std::string& pkey,
                                       const pt::ptree& p, const Namespaces& pscope) {
          if (pname == "parameter" || pname == "localParameter") {
            locals.push_back(read_parameter(p, pscope, "local parameter"));
          } else {
            warn("unsupported element <" + pkey + "> in " + label + " dropped");
          }
        });
      } else if (name != "notes" && name != "annotation") {
        warn("unsupported element <" + key + "> in " + label + " dropped");
      }
    });
    if (unsupported || !law) {
      if (!unsupported) warn(label + " has no <math>; kinetic law dropped");
      return;
    }
    r.kinetic_law = std::move(law);
    r.local_parameters = std::move(locals);
    r.kinetic_law_sbo = sbo_attribute(node);
  }

  struct UnsupportedMath {
    std::string what;
  };

  Expression read_math(const pt::ptree& node, const Namespaces& ns) {
    std::vector<Expression> items;
    for_children(node, ns, [&](const std::string& name, const std::string&, const pt::ptree& child,
                               const Namespaces& scope) { items.push_back(read_math_node(name, child, scope)); });
    if (items.size() != 1) throw UnsupportedMath{"math must hold exactly one expression"};
    return items.front();
  }

  Expression read_math_node(const std::string& name, const pt::ptree& node, const Namespaces& ns) {
    if (name == "ci") {
      auto text = std::string(trim(node.data()));
      if (!is_identifier(text)) throw UnsupportedMath{"<ci> with non-identifier '" + text + "'"};
      return Expression::symbol(text);
    }
    if (name == "cn") return read_cn(node);
    if (name != "apply") throw UnsupportedMath{"<" + name + ">"};

    std::string op;
    std::vector<Expression> args;
    for_children(node, ns, [&](const std::string& child_name, const std::string&,
                               const pt::ptree& child, const Namespaces& scope) {
      if (op.empty()) op = child_name;
      else args.push_back(read_math_node(child_name, child, scope));
    });
    auto fold = [&](ExprKind kind) {
      if (args.empty()) throw UnsupportedMath{"<" + op + "/> without operands"};
      Expression acc = args.front();
      for (std::size_t i = 1; i < args.size(); ++i) acc = Expression::binary(kind, acc, args[i]);
      return acc;
    };
    if (op == "plus") return fold(ExprKind::Add);
    if (op == "times") return fold(ExprKind::Mul);
    if (op == "minus") {
      if (args.size() == 1) return Expression::negate(args.front());
      if (args.size() == 2) return args[0] - args[1];
      throw UnsupportedMath{"<minus/> with " + std::to_string(args.size()) + " operands"};
    }
    if (op == "divide" || op == "power") {
      if (args.size() != 2) throw UnsupportedMath{"<" + op + "/> needs two operands"};
      return Expression::binary(op == "divide" ? ExprKind::Div : ExprKind::Pow, args[0], args[1]);
    }
    throw UnsupportedMath{"operator <" + op + "/>"};
  }

  Expression read_cn(const pt::ptree& node) {
    auto type = plain_attribute(node, "type").value_or("real");
    std::istringstream words(node.data());
    std::vector<std::string> parts;
    for (std::string w; words >> w;) parts.push_back(w);
    auto number = [&](const std::string& token) {
      auto v = parse_real(token);
      if (!v || !std::isfinite(*v)) throw UnsupportedMath{"<cn> value '" + token + "'"};
      return *v;
    };
    if (type == "real" || type == "integer" || type == "double") {
      if (parts.size() != 1) throw UnsupportedMath{"malformed <cn>"};
      return Expression::number(number(parts[0]));
    }
    if (type == "e-notation" && parts.size() == 2) {
      auto v = number(parts[0]) * std::pow(10.0, number(parts[1]));
      if (!std::isfinite(v)) throw UnsupportedMath{"<cn> overflow"};
      return Expression::number(v);
    }
    if (type == "rational" && parts.size() == 2) {
      auto den = number(parts[1]);
      if (den == 0.0) throw UnsupportedMath{"rational <cn> with zero denominator"};
      return Expression::number(number(parts[0]) / den);
    }
    throw UnsupportedMath{"<cn type=\"" + type + "\">"};
  }

  void check_references() {
    const auto& doc = result_.document;
    for (const auto& s : doc.species) {
      if (!doc.find_compartment(s.compartment)) {
        throw Error(ErrorCode::BrokenReference,
                    "species " + s.id + " references unknown compartment " + s.compartment);
      }
    }
    for (const auto& r : doc.reactions) {
      auto check = [&](const std::string& id) {
        if (!doc.find_species(id)) {
          throw Error(ErrorCode::BrokenReference,
                      "reaction " + r.id + " references unknown species " + id);
        }
      };
      for (const auto& ref : r.reactants) check(ref.species);
      for (const auto& ref : r.products) check(ref.species);
      for (const auto& m : r.modifiers) check(m);
    }
  }

  SbmlReadResult result_;
  std::string last_ns_;  // namespace of the element most recently visited by for_children
};

// ---------------------------------------------------------------------------
// Writing

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  explicit XmlWriter(int indent) : indent_(indent) {}

  XmlWriter& open(std::string_view tag) {
    flush_pending();
    line_start();
    out_ += '<';
    out_ += tag;
    stack_.emplace_back(tag);
    pending_ = true;
    return *this;
  }

  XmlWriter& attr(std::string_view name, std::string_view value) {
    out_ += ' ';
    out_ += name;
    out_ += "=\"";
    out_ += xml_escape(value);
    out_ += '"';
    return *this;
  }

  void close() {
    auto tag = stack_.back();
    stack_.pop_back();
    if (pending_) {
      out_ += "/>\n";
      pending_ = false;
      return;
    }
    line_start();
    out_ += "</" + tag + ">\n";
  }

  void text_element(std::string_view tag, std::string_view text) {
    flush_pending();
    line_start();
    out_ += '<';
    out_ += tag;
    out_ += '>';
    out_ += xml_escape(text);
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }

  void raw(std::string_view text) { out_ += text; }

  std::string take() { return std::move(out_); }

 private:
  void flush_pending() {
    if (pending_) {
      out_ += ">\n";
      pending_ = false;
    }
  }
  void line_start() { out_.append(stack_.size() * static_cast<std::size_t>(indent_), ' '); }

  int indent_;
  std::string out_;
  std::vector<std::string> stack_;
  bool pending_ = false;
};

std::string_view math_op(ExprKind kind) {
  switch (kind) {
    case ExprKind::Add: return "plus";
    case ExprKind::Sub: return "minus";
    case ExprKind::Mul: return "times";
    case ExprKind::Div: return "divide";
    case ExprKind::Pow: return "power";
    case ExprKind::Neg: return "minus";
    default: return "";
  }
}

void write_math_node(XmlWriter& w, const Expression& e) {
  switch (e.kind()) {
    case ExprKind::Number:
      w.text_element("cn", format_real(e.value()));
      return;
    case ExprKind::Symbol:
      w.text_element("ci", e.name());
      return;
    default:
      w.open("apply");
      w.open(math_op(e.kind()));
      w.close();
      for (const auto& child : e.children()) write_math_node(w, child);
      w.close();
  }
}

class SbmlWriter {
 public:
  SbmlWriter(const ModelDocument& doc, const SbmlSerializationOptions& opts)
      : doc_(doc), opts_(opts), w_(opts.indent) {}

  std::string write() {
    w_.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    auto ns = opts_.level == 2
                  ? "http://www.sbml.org/sbml/level2/version" + std::to_string(opts_.version)
                  : "http://www.sbml.org/sbml/level3/version" + std::to_string(opts_.version) + "/core";
    w_.open("sbml")
        .attr("xmlns", ns)
        .attr("level", std::to_string(opts_.level))
        .attr("version", std::to_string(opts_.version));
    w_.open("model");
    if (!doc_.id.empty()) w_.attr("id", doc_.id);
    if (!doc_.name.empty()) w_.attr("name", doc_.name);

    if (!doc_.compartments.empty()) {
      w_.open("listOfCompartments");
      for (const auto& c : doc_.compartments) write_compartment(c);
      w_.close();
    }
    if (!doc_.species.empty()) {
      w_.open("listOfSpecies");
      for (const auto& s : doc_.species) write_species(s);
      w_.close();
    }
    if (!doc_.parameters.empty()) {
      w_.open("listOfParameters");
      for (const auto& p : doc_.parameters) write_parameter(p, "parameter");
      w_.close();
    }
    if (!doc_.reactions.empty()) {
      w_.open("listOfReactions");
      for (const auto& r : doc_.reactions) write_reaction(r);
      w_.close();
    }
    w_.close();  // model
    w_.close();  // sbml
    return w_.take();
  }

 private:
  bool l3() const { return opts_.level == 3; }

  void head(std::string_view tag, const std::string& id, const AnnotationSet& annotations,
            std::string_view meta_scope = {}) {
    w_.open(tag);
    if (!annotations.empty()) w_.attr("metaid", metaid(id, meta_scope));
    w_.attr("id", id);
  }

  static std::string metaid(const std::string& id, std::string_view scope) {
    return scope.empty() ? "meta_" + id : "meta_" + std::string(scope) + "_" + id;
  }

  void write_annotation(const std::string& id, const AnnotationSet& annotations,
                        std::string_view meta_scope = {}) {
    if (annotations.empty()) return;
    w_.open("annotation");
    w_.open("rdf:RDF")
        .attr("xmlns:rdf", kRdfNs)
        .attr("xmlns:bqbiol", kBqBiolNs)
        .attr("xmlns:bqmodel", kBqModelNs);
    w_.open("rdf:Description").attr("rdf:about", "#" + metaid(id, meta_scope));
    auto it = annotations.begin();
    while (it != annotations.end()) {
      const auto qualifier = it->qualifier;
      auto prefix = qualifier.kind == QualifierKind::IsDescribedBy ? "bqmodel:" : "bqbiol:";
      w_.open(prefix + qualifier.name());
      w_.open("rdf:Bag");
      for (; it != annotations.end() && it->qualifier == qualifier; ++it) {
        w_.open("rdf:li").attr("rdf:resource", "https://" + it->uri);
        w_.close();
      }
      w_.close();
      w_.close();
    }
    w_.close();
    w_.close();
    w_.close();
  }

  void write_compartment(const Compartment& c) {
    head("compartment", c.id, c.annotations);
    if (!c.name.empty()) w_.attr("name", c.name);
    if (c.sbo) w_.attr("sboTerm", *c.sbo);
    w_.attr("size", format_real(c.size));
    if (l3()) w_.attr("constant", "true");
    write_annotation(c.id, c.annotations);
    w_.close();
  }

  void write_species(const Species& s) {
    head("species", s.id, s.annotations);
    if (!s.name.empty()) w_.attr("name", s.name);
    if (s.sbo) w_.attr("sboTerm", *s.sbo);
    w_.attr("compartment", s.compartment);
    w_.attr("initialAmount", format_real(s.initial_amount));
    if (l3()) w_.attr("hasOnlySubstanceUnits", "false");
    w_.attr("boundaryCondition", s.boundary ? "true" : "false");
    w_.attr("constant", s.constant ? "true" : "false");
    write_annotation(s.id, s.annotations);
    w_.close();
  }

  void write_parameter(const Parameter& p, std::string_view tag, std::string_view meta_scope = {}) {
    head(tag, p.id, p.annotations, meta_scope);
    if (p.sbo) w_.attr("sboTerm", *p.sbo);
    w_.attr("value", format_real(p.value));
    if (l3() && tag == "parameter") w_.attr("constant", "true");
    write_annotation(p.id, p.annotations, meta_scope);
    w_.close();
  }

  void write_references(std::string_view list, const std::vector<SpeciesReference>& refs) {
    if (refs.empty()) return;
    w_.open(list);
    for (const auto& ref : refs) {
      w_.open("speciesReference").attr("species", ref.species);
      w_.attr("stoichiometry", format_real(ref.stoichiometry));
      if (l3()) w_.attr("constant", "true");
      w_.close();
    }
    w_.close();
  }

  void write_reaction(const Reaction& r) {
    head("reaction", r.id, r.annotations);
    if (!r.name.empty()) w_.attr("name", r.name);
    if (r.sbo) w_.attr("sboTerm", *r.sbo);
    w_.attr("reversible", r.reversible ? "true" : "false");
    if (l3() && opts_.version == 1) w_.attr("fast", "false");
    write_annotation(r.id, r.annotations);
    write_references("listOfReactants", r.reactants);
    write_references("listOfProducts", r.products);
    if (!r.modifiers.empty()) {
      w_.open("listOfModifiers");
      for (const auto& m : r.modifiers) {
        w_.open("modifierSpeciesReference").attr("species", m);
        w_.close();
      }
      w_.close();
    }
    if (r.kinetic_law) {
      w_.open("kineticLaw");
      if (r.kinetic_law_sbo) w_.attr("sboTerm", *r.kinetic_law_sbo);
      w_.open("math").attr("xmlns", kMathNs);
      write_math_node(w_, *r.kinetic_law);
      w_.close();
      if (!r.local_parameters.empty()) {
        w_.open(l3() ? "listOfLocalParameters" : "listOfParameters");
        for (const auto& p : r.local_parameters) {
          write_parameter(p, l3() ? "localParameter" : "parameter", r.id);
        }
        w_.close();
      }
      w_.close();
    }
    w_.close();
  }

  const ModelDocument& doc_;
  const SbmlSerializationOptions& opts_;
  XmlWriter w_;
};

}  // namespace

SbmlSerializationOptions SbmlSerializationOptions::for_document(const ModelDocument& doc) {
  SbmlSerializationOptions opts;
  opts.level = doc.level;
  opts.version = doc.version;
  return opts;
}

SbmlReadResult read_sbml_with_warnings(std::string_view xml) { return SbmlReader().read(xml); }

ModelDocument read_sbml(std::string_view xml) { return read_sbml_with_warnings(xml).document; }

std::string write_sbml(const ModelDocument& doc, const SbmlSerializationOptions& opts) {
  if ((opts.level != 2 && opts.level != 3) || opts.version < 1) {
    throw Error(ErrorCode::UnsupportedSbmlLevel, "cannot write SBML level " +
                                                     std::to_string(opts.level) + " version " +
                                                     std::to_string(opts.version));
  }
  require_valid(doc);
  return SbmlWriter(doc, opts).write();
}

std::string write_canonical_sbml(const ModelDocument& doc) {
  return write_sbml(doc, SbmlSerializationOptions::for_document(doc));
}

}  // namespace sbmltk
