#include "sbmltk/shorthand.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "sbmltk/text.hpp"

namespace sbmltk {

ShorthandError::ShorthandError(ErrorCode code, std::size_t line, std::size_t column,
                               std::string expected)
    : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                      expected),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

bool valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    if (c >= 0x80) {
      if ((c >> 5) == 0x6) extra = 1;
      else if ((c >> 4) == 0xE) extra = 2;
      else if ((c >> 3) == 0x1E) extra = 3;
      else return false;
    }
    if (i + extra >= text.size() + (extra == 0 ? 1 : 0) && extra > 0) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

// Removes a trailing `#` comment that is not inside a quoted name.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted && c == '\\') {
      ++i;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& expected) const {
    throw ShorthandError(ErrorCode::SyntaxError, line_, pos_ + 1, expected);
  }

  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return line_; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool peek(std::string_view token) {
    skip_ws();
    return text_.substr(pos_).starts_with(token);
  }

  bool accept(std::string_view token) {
    if (!peek(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("'" + std::string(token) + "'");
  }

  bool peek_identifier() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    auto c = static_cast<unsigned char>(text_[pos_]);
    return std::isalpha(c) || c == '_';
  }

  bool peek_number() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    auto c = static_cast<unsigned char>(text_[pos_]);
    return std::isdigit(c) || c == '.' || ((c == '-' || c == '+') && pos_ + 1 < text_.size() &&
                                           (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
                                            text_[pos_ + 1] == '.'));
  }

  std::string identifier(const std::string& what = "identifier") {
    if (!peek_identifier()) fail(what);
    auto start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double number(const std::string& what = "number") {
    skip_ws();
    auto start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      bool exp_sign = (c == '-' || c == '+') && pos_ > start &&
                      (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    auto value = parse_real(text_.substr(start, pos_ - start));
    if (!value || !std::isfinite(*value)) {
      pos_ = start;
      fail(what);
    }
    return *value;
  }

  int digits(const std::string& what) {
    skip_ws();
    auto start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || pos_ - start > 6) {
      pos_ = start;
      fail(what);
    }
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  std::optional<std::string> quoted() {
    if (!peek("\"")) return std::nullopt;
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) fail("closing '\"'");
    ++pos_;
    return out;
  }

  // A run of non-blank characters.
  std::string word(const std::string& what) {
    skip_ws();
    auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t') ++pos_;
    if (pos_ == start) fail(what);
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect_end() {
    if (!at_end()) fail("end of line");
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

enum class Section { None, Compartments, Species, Parameters, Reactions, Annotations };

struct PendingAnnotation {
  std::size_t line;
  std::size_t column;
  std::string target;
  std::string key;
  std::string value;
};

class ShorthandParser {
 public:
  ModelDocument parse(std::string_view source) {
    if (!valid_utf8(source)) throw ShorthandError(ErrorCode::SyntaxError, 1, 1, "valid UTF-8 text");
    auto lines = split_lines(source);
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::size_t number = i + 1;
      auto content = strip_comment(lines[i]);
      if (trim(content).empty()) continue;
      Cursor cur(content, number);
      if (!header_seen) {
        parse_header(cur);
        header_seen = true;
        continue;
      }
      if (cur.peek("@")) {
        directive(cur);
      } else {
        body_line(cur);
      }
    }
    if (!header_seen) throw ShorthandError(ErrorCode::SyntaxError, 1, 1, "'@model:' header");
    close_reaction(lines.size() + 1);
    apply_annotations();
    return std::move(doc_);
  }

 private:
  void parse_header(Cursor& cur) {
    cur.expect("@model:");
    auto level = cur.digits("SBML level");
    if (level != 2 && level != 3) cur.fail("SBML level 2 or 3");
    cur.expect(".");
    auto version = cur.digits("SBML version");
    if (version < 1) cur.fail("positive SBML version");
    if (cur.accept(".")) cur.digits("shorthand revision");
    doc_.level = level;
    doc_.version = version;
    cur.expect("=");
    if (cur.peek_identifier()) doc_.id = cur.identifier("model id");
    if (auto name = cur.quoted()) doc_.name = *name;
    cur.expect_end();
  }

  void directive(Cursor& cur) {
    auto line = cur.line();
    auto column = cur.column();
    if (cur.accept("@rxn=")) {
      if (section_ != Section::Reactions) cur.fail("@rxn= inside the @reactions section");
      close_reaction(line);
      Reaction r;
      r.id = cur.identifier("reaction id");
      claim_id(r.id, line, column + 5);
      if (auto name = cur.quoted()) r.name = *name;
      cur.expect_end();
      doc_.reactions.push_back(std::move(r));
      rxn_line_ = line;
      rxn_state_ = RxnState::AwaitEquation;
      return;
    }
    cur.advance(1);
    auto name = cur.identifier("section name");
    static const std::map<std::string, Section, std::less<>> sections = {
        {"compartments", Section::Compartments}, {"species", Section::Species},
        {"parameters", Section::Parameters},     {"reactions", Section::Reactions},
        {"annotations", Section::Annotations},
    };
    auto it = sections.find(name);
    if (it == sections.end()) {
      throw ShorthandError(ErrorCode::UnknownSection, line, column, "known section, got @" + name);
    }
    cur.expect_end();
    close_reaction(line);
    section_ = it->second;
  }

  void body_line(Cursor& cur) {
    switch (section_) {
      case Section::None:
        cur.fail("section header");
      case Section::Compartments:
        return compartment_line(cur);
      case Section::Species:
        return species_line(cur);
      case Section::Parameters:
        return parameter_line(cur);
      case Section::Reactions:
        return reaction_line(cur);
      case Section::Annotations:
        return annotation_line(cur);
    }
  }

  void claim_id(const std::string& id, std::size_t line, std::size_t column) {
    if (!ids_.insert(id).second) {
      throw ShorthandError(ErrorCode::DuplicateId, line, column, "unique id, '" + id + "' redefined");
    }
  }

  void compartment_line(Cursor& cur) {
    Compartment c;
    cur.skip_ws();
    auto column = cur.column();
    c.id = cur.identifier("compartment id");
    claim_id(c.id, cur.line(), column);
    cur.expect("=");
    c.size = cur.number("compartment size");
    if (auto name = cur.quoted()) c.name = *name;
    cur.expect_end();
    doc_.compartments.push_back(std::move(c));
  }

  void species_line(Cursor& cur) {
    Species s;
    s.compartment = cur.identifier("compartment id");
    cur.expect(":");
    cur.skip_ws();
    auto column = cur.column();
    s.id = cur.identifier("species id");
    claim_id(s.id, cur.line(), column);
    cur.expect("=");
    s.initial_amount = cur.number("initial amount");
    bool have_name = false;
    while (!cur.at_end()) {
      if (cur.peek("\"")) {
        if (have_name) cur.fail("end of line");
        s.name = *cur.quoted();
        have_name = true;
        continue;
      }
      auto flag = cur.identifier("flag 'b' or 'c'");
      if (flag == "b" && !s.boundary) s.boundary = true;
      else if (flag == "c" && !s.constant) s.constant = true;
      else cur.fail("flag 'b' or 'c'");
    }
    doc_.species.push_back(std::move(s));
  }

  void parameter_line(Cursor& cur) {
    Parameter p;
    cur.skip_ws();
    auto column = cur.column();
    p.id = cur.identifier("parameter id");
    claim_id(p.id, cur.line(), column);
    cur.expect("=");
    p.value = cur.number("parameter value");
    cur.expect_end();
    doc_.parameters.push_back(std::move(p));
  }

  std::vector<SpeciesReference> side(Cursor& cur) {
    std::vector<SpeciesReference> refs;
    if (!cur.peek_identifier() && !cur.peek_number()) return refs;
    for (;;) {
      SpeciesReference ref;
      if (cur.peek_number()) ref.stoichiometry = cur.number("stoichiometric coefficient");
      ref.species = cur.identifier("species id");
      refs.push_back(std::move(ref));
      if (!cur.accept("+")) return refs;
    }
  }

  void reaction_line(Cursor& cur) {
    auto& r = doc_.reactions.empty() ? dummy_ : doc_.reactions.back();
    switch (rxn_state_) {
      case RxnState::None:
        cur.fail("'@rxn=' reaction block");
      case RxnState::AwaitEquation: {
        r.reactants = side(cur);
        if (cur.accept("<->")) r.reversible = true;
        else if (cur.accept("->")) r.reversible = false;
        else cur.fail("'->' or '<->'");
        r.products = side(cur);
        if (cur.accept(":")) {
          do {
            r.modifiers.push_back(cur.identifier("modifier species id"));
          } while (cur.accept(","));
        }
        cur.expect_end();
        rxn_state_ = RxnState::AwaitLaw;
        return;
      }
      case RxnState::AwaitLaw: {
        cur.skip_ws();
        auto offset = cur.pos();
        auto text = cur.rest();
        auto colon = text.find(':');
        auto law_text = text.substr(0, colon);
        try {
          r.kinetic_law = parse_infix(law_text);
        } catch (const InfixParseError& e) {
          throw ShorthandError(ErrorCode::SyntaxError, cur.line(), offset + e.column(), e.expected());
        }
        if (colon != std::string_view::npos) {
          cur.advance(colon + 1);
          std::set<std::string> locals;
          do {
            Parameter p;
            cur.skip_ws();
            auto column = cur.column();
            p.id = cur.identifier("local parameter id");
            if (!locals.insert(p.id).second) {
              throw ShorthandError(ErrorCode::DuplicateId, cur.line(), column,
                                   "unique local id, '" + p.id + "' redefined");
            }
            cur.expect("=");
            p.value = cur.number("local parameter value");
            r.local_parameters.push_back(std::move(p));
          } while (cur.accept(","));
          cur.expect_end();
        }
        rxn_state_ = RxnState::Done;
        return;
      }
      case RxnState::Done:
        cur.fail("'@rxn=' or a section header");
    }
  }

  void close_reaction(std::size_t) {
    if (rxn_state_ == RxnState::AwaitEquation) {
      throw ShorthandError(ErrorCode::DanglingReactionBlock, rxn_line_, 1,
                           "equation line after @rxn=" + doc_.reactions.back().id);
    }
    rxn_state_ = RxnState::None;
  }

  void annotation_line(Cursor& cur) {
    PendingAnnotation a;
    a.line = cur.line();
    cur.skip_ws();
    a.column = cur.column();
    a.target = cur.identifier("element id");
    if (cur.accept("/")) a.target += "/" + cur.identifier("local parameter id");
    a.key = cur.word("qualifier, 'sbo' or 'law-sbo'");
    a.value = cur.word("annotation value");
    cur.expect_end();
    pending_.push_back(std::move(a));
  }

  struct Target {
    AnnotationSet* annotations = nullptr;
    SboTerm* sbo = nullptr;
    SboTerm* law_sbo = nullptr;
  };

  Target find_target(const std::string& target) {
    auto slash = target.find('/');
    if (slash != std::string::npos) {
      for (auto& r : doc_.reactions) {
        if (r.id != target.substr(0, slash)) continue;
        for (auto& p : r.local_parameters) {
          if (p.id == target.substr(slash + 1)) return {&p.annotations, &p.sbo, nullptr};
        }
      }
      return {};
    }
    for (auto& c : doc_.compartments) if (c.id == target) return {&c.annotations, &c.sbo, nullptr};
    for (auto& s : doc_.species) if (s.id == target) return {&s.annotations, &s.sbo, nullptr};
    for (auto& p : doc_.parameters) if (p.id == target) return {&p.annotations, &p.sbo, nullptr};
    for (auto& r : doc_.reactions) if (r.id == target) return {&r.annotations, &r.sbo, &r.kinetic_law_sbo};
    return {};
  }

  void apply_annotations() {
    for (const auto& a : pending_) {
      auto target = find_target(a.target);
      if (!target.annotations) {
        throw ShorthandError(ErrorCode::SyntaxError, a.line, a.column, "known element, got " + a.target);
      }
      if (a.key == "sbo") {
        *target.sbo = a.value;
      } else if (a.key == "law-sbo") {
        if (!target.law_sbo) {
          throw ShorthandError(ErrorCode::SyntaxError, a.line, a.column, "reaction id for law-sbo");
        }
        *target.law_sbo = a.value;
      } else {
        try {
          target.annotations->insert(Qualifier::parse(a.key), a.value);
        } catch (const Error& e) {
          throw ShorthandError(ErrorCode::SyntaxError, a.line, a.column, e.what());
        }
      }
    }
  }

  enum class RxnState { None, AwaitEquation, AwaitLaw, Done };

  ModelDocument doc_;
  Section section_ = Section::None;
  RxnState rxn_state_ = RxnState::None;
  std::size_t rxn_line_ = 0;
  std::set<std::string> ids_;
  std::vector<PendingAnnotation> pending_;
  Reaction dummy_;
};

// ---------------------------------------------------------------------------
// Printing

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string print_side(const std::vector<SpeciesReference>& refs) {
  std::string out;
  for (const auto& ref : refs) {
    if (!out.empty()) out += " + ";
    if (ref.stoichiometry != 1.0) out += format_real(ref.stoichiometry) + " ";
    out += ref.species;
  }
  return out;
}

void print_annotations(std::string& out, const std::string& target, const AnnotationSet& annotations,
                       const SboTerm& sbo, const SboTerm& law_sbo = std::nullopt) {
  if (sbo) out += "  " + target + " sbo " + *sbo + "\n";
  if (law_sbo) out += "  " + target + " law-sbo " + *law_sbo + "\n";
  for (const auto& entry : annotations) {
    out += "  " + target + " " + entry.qualifier.name() + " " + entry.uri + "\n";
  }
}

}  // namespace

ModelDocument parse_shorthand(std::string_view source) { return ShorthandParser().parse(source); }

std::string print_shorthand(const ModelDocument& doc) {
  require_valid(doc);
  std::string out = "@model:" + std::to_string(doc.level) + "." + std::to_string(doc.version) + ".1=" + doc.id;
  if (!doc.name.empty()) out += " " + quote(doc.name);
  out += "\n";

  if (!doc.compartments.empty()) {
    out += "@compartments\n";
    for (const auto& c : doc.compartments) {
      out += "  " + c.id + "=" + format_real(c.size);
      if (!c.name.empty()) out += " " + quote(c.name);
      out += "\n";
    }
  }
  if (!doc.species.empty()) {
    out += "@species\n";
    for (const auto& s : doc.species) {
      out += "  " + s.compartment + ":" + s.id + "=" + format_real(s.initial_amount);
      if (s.boundary) out += " b";
      if (s.constant) out += " c";
      if (!s.name.empty()) out += " " + quote(s.name);
      out += "\n";
    }
  }
  if (!doc.parameters.empty()) {
    out += "@parameters\n";
    for (const auto& p : doc.parameters) out += "  " + p.id + "=" + format_real(p.value) + "\n";
  }
  if (!doc.reactions.empty()) {
    out += "@reactions\n";
    for (const auto& r : doc.reactions) {
      out += "@rxn=" + r.id;
      if (!r.name.empty()) out += " " + quote(r.name);
      out += "\n  ";
      auto lhs = print_side(r.reactants);
      auto rhs = print_side(r.products);
      out += lhs;
      if (!lhs.empty()) out += " ";
      out += r.reversible ? "<->" : "->";
      if (!rhs.empty()) out += " " + rhs;
      if (!r.modifiers.empty()) {
        out += " : ";
        for (std::size_t i = 0; i < r.modifiers.size(); ++i) {
          if (i) out += ", ";
          out += r.modifiers[i];
        }
      }
      out += "\n";
      if (r.kinetic_law) {
        out += "  " + print_infix(*r.kinetic_law);
        if (!r.local_parameters.empty()) {
          out += " : ";
          for (std::size_t i = 0; i < r.local_parameters.size(); ++i) {
            if (i) out += ", ";
            out += r.local_parameters[i].id + "=" + format_real(r.local_parameters[i].value);
          }
        }
        out += "\n";
      }
    }
  }

  std::string notes;
  for (const auto& c : doc.compartments) print_annotations(notes, c.id, c.annotations, c.sbo);
  for (const auto& s : doc.species) print_annotations(notes, s.id, s.annotations, s.sbo);
  for (const auto& p : doc.parameters) print_annotations(notes, p.id, p.annotations, p.sbo);
  for (const auto& r : doc.reactions) {
    print_annotations(notes, r.id, r.annotations, r.sbo, r.kinetic_law_sbo);
    for (const auto& p : r.local_parameters) {
      print_annotations(notes, r.id + "/" + p.id, p.annotations, p.sbo);
    }
  }
  if (!notes.empty()) out += "@annotations\n" + notes;
  return out;
}

}  // namespace sbmltk
