#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gmc/chain.hpp"

namespace gmc {

/// One parsed problem: operand definitions plus exactly one assignment.
struct ProblemFile {
  std::vector<Operand> definitions;
  Chain assignment;
  std::vector<std::string> warnings;
};

namespace detail {

/// Cursor over a single statement with location-aware errors.
struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
  bool consume_word(const char* w) {
    skip_ws();
    std::size_t len = std::string(w).size();
    if (s.compare(pos, len, w) != 0) return false;
    pos += len;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ", col " +
                    std::to_string(pos + 1) + ": " + msg);
  }
  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected '") + c + "' " + what);
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos;
    if (pos < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected an identifier");
    return s.substr(start, pos - start);
  }

  Dim integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (start == pos) fail("expected an integer");
    return std::stoll(s.substr(start, pos - start));
  }

  bool starts_number() {
    return std::isdigit(static_cast<unsigned char>(peek()));
  }
};

/// Postfix modifier: ^T, ^-1 or ^-T.
inline bool try_modifier(Cursor& c, UnaryMod& out) {
  c.skip_ws();
  if (c.pos >= c.s.size() || c.s[c.pos] != '^') return false;
  std::size_t p = c.pos + 1;
  if (p < c.s.size() && c.s[p] == 'T') {
    out = UnaryMod::Transpose;
    c.pos = p + 1;
    return true;
  }
  if (p + 1 < c.s.size() && c.s[p] == '-' && c.s[p + 1] == '1') {
    out = UnaryMod::Inverse;
    c.pos = p + 2;
    return true;
  }
  if (p + 1 < c.s.size() && c.s[p] == '-' && c.s[p + 1] == 'T') {
    out = UnaryMod::InverseTranspose;
    c.pos = p + 2;
    return true;
  }
  c.fail("expected ^T, ^-1 or ^-T after '^'");
}

inline std::vector<Factor> parse_expr_factors(
    Cursor& c, const std::map<std::string, Operand>& operands,
    std::vector<std::string>& warnings);

inline std::vector<Factor> parse_factor_group(
    Cursor& c, const std::map<std::string, Operand>& operands,
    std::vector<std::string>& warnings) {
  if (c.starts_number())
    c.fail("scalar literals are not supported; chains contain matrices and "
           "vectors only");
  if (c.consume('(')) {
    std::vector<Factor> group = parse_expr_factors(c, operands, warnings);
    c.expect(')', "to close the group");
    UnaryMod m;
    bool modified = false;
    UnaryMod total = UnaryMod::None;
    while (try_modifier(c, m)) {
      total = compose(total, m);
      modified = true;
    }
    if (modified) {
      if (group.size() != 1)
        c.fail("modifiers on parenthesized products are not supported; "
               "apply ^T/^-1/^-T to single operands");
      group[0].mod = compose(group[0].mod, total);
      effective_shape(group[0]); // surfaces NonSquareInverse early
    } else if (group.size() > 1) {
      warnings.push_back(
          "line " + std::to_string(c.line) +
          ": parentheses around products are ignored; the solver chooses "
          "the parenthesization");
    }
    return group;
  }
  std::string name = c.identifier();
  auto it = operands.find(name);
  if (it == operands.end())
    throw Error(ErrorKind::UndefinedSymbol,
                "line " + std::to_string(c.line) + ": '" + name +
                    "' is not a defined operand");
  Factor f{it->second, UnaryMod::None};
  UnaryMod m;
  while (try_modifier(c, m)) f.mod = compose(f.mod, m);
  effective_shape(f);
  return {f};
}

inline std::vector<Factor> parse_expr_factors(
    Cursor& c, const std::map<std::string, Operand>& operands,
    std::vector<std::string>& warnings) {
  std::vector<Factor> factors = parse_factor_group(c, operands, warnings);
  while (true) {
    char next = c.peek();
    if (next == '*') {
      c.consume('*');
      std::vector<Factor> more = parse_factor_group(c, operands, warnings);
      factors.insert(factors.end(), more.begin(), more.end());
    } else if (next == '+') {
      throw Error(ErrorKind::UnsupportedOperator,
                  "line " + std::to_string(c.line) +
                      ": '+' is out of scope; inputs are product chains");
    } else {
      break;
    }
  }
  return factors;
}

inline Operand parse_definition_line(const std::string& line, int lineno) {
  Cursor c{line, 0, lineno};
  if (!c.consume_word("Matrix")) c.fail("expected 'Matrix'");
  std::string name = c.identifier();
  c.expect('(', "before the row count");
  Dim rows = c.integer();
  if (!c.consume(','))
    c.fail("size needs rows and columns: (rows, cols)");
  Dim cols = c.integer();
  c.expect(')', "after the column count");
  c.expect('<', "to open the property list");
  PropertySet props;
  if (c.peek() != '>') {
    while (true) {
      std::string pname = c.identifier();
      auto p = property_from_string(pname);
      if (!p)
        throw Error(ErrorKind::UnknownProperty,
                    "line " + std::to_string(lineno) + ": unknown property '" +
                        pname + "'");
      props.insert(*p);
      if (!c.consume(',')) break;
    }
  }
  c.expect('>', "to close the property list");
  if (!c.done()) c.fail("trailing input after definition");
  return Operand(name, Shape(rows, cols), props);
}

} // namespace detail

/// Parses operand definition lines ("Matrix <name> (<rows>, <cols>) <Props>"),
/// one definition per line, '#' comments, blank lines ignored.
inline std::vector<Operand> parse_definitions(const std::string& text) {
  std::vector<Operand> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    bool blank = true;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (blank) continue;
    Operand op = detail::parse_definition_line(line, lineno);
    for (const Operand& prev : out)
      if (prev.name == op.name)
        throw Error(ErrorKind::DuplicateName,
                    "line " + std::to_string(lineno) + ": operand '" + op.name +
                        "' is defined twice");
    out.push_back(std::move(op));
  }
  return out;
}

/// Parses "<target> := <factor> (* <factor>)+" against a resolved operand
/// table. Stacked and parenthesized modifiers normalize to a single UnaryMod;
/// '+' is rejected as out of scope; chain validation (length, conformance)
/// is delegated to make_chain.
inline Chain parse_assignment(const std::string& text,
                              const std::vector<Operand>& operands,
                              std::vector<std::string>* warnings = nullptr,
                              int lineno = 1) {
  std::map<std::string, Operand> table;
  for (const Operand& op : operands) table.emplace(op.name, op);
  std::vector<std::string> local_warnings;
  detail::Cursor c{text, 0, lineno};
  std::string target = c.identifier();
  if (table.count(target))
    throw Error(ErrorKind::DuplicateName,
                "line " + std::to_string(lineno) + ": assignment target '" +
                    target + "' is already an operand name");
  if (!(c.consume(':') && c.consume('=')))
    c.fail("expected ':=' after the target name");
  std::vector<Factor> factors =
      detail::parse_expr_factors(c, table, local_warnings);
  if (!c.done()) c.fail("trailing input after the chain");
  if (warnings)
    warnings->insert(warnings->end(), local_warnings.begin(),
                     local_warnings.end());
  return make_chain(target, std::move(factors));
}

/// Parses a whole problem file: any number of Matrix definitions and exactly
/// one assignment.
inline ProblemFile parse_problem(const std::string& text) {
  ProblemFile pf;
  std::string definition_lines;
  std::string assignment_line;
  int assignment_lineno = 0;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = line;
    if (auto h = stripped.find('#'); h != std::string::npos) stripped.erase(h);
    bool blank = true;
    for (char ch : stripped)
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (blank) continue;
    detail::Cursor probe{stripped, 0, lineno};
    if (probe.consume_word("Matrix")) {
      definition_lines += stripped + "\n";
    } else {
      if (assignment_lineno != 0)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(lineno) +
                        ": a problem file holds exactly one assignment");
      assignment_line = stripped;
      assignment_lineno = lineno;
    }
  }
  if (assignment_lineno == 0)
    throw Error(ErrorKind::SyntaxError, "problem file has no assignment");
  pf.definitions = parse_definitions(definition_lines);
  pf.assignment = parse_assignment(assignment_line, pf.definitions,
                                   &pf.warnings, assignment_lineno);
  return pf;
}

/// Canonical rendering; parse_problem(print_problem(pf)) reproduces pf.
inline std::string print_problem(const ProblemFile& pf) {
  std::string out;
  for (const Operand& op : pf.definitions) {
    out += "Matrix " + op.name + " (" + std::to_string(op.shape.rows) + ", " +
           std::to_string(op.shape.cols) + ") <" + op.properties.str() + ">\n";
  }
  out += pf.assignment.target + " :=";
  for (const Factor& f : pf.assignment.factors)
    out += " " + f.operand.name + std::string(mod_suffix(f.mod)) +
           (&f == &pf.assignment.factors.back() ? "" : " *");
  out += "\n";
  return out;
}

} // namespace gmc
