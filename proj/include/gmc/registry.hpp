#pragma once

#include <array>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gmc/kernel.hpp"

namespace gmc {

/// Immutable, declaration-ordered kernel collection with a per-root-shape
/// index so candidate lookup does not scan unrelated patterns. Declaration
/// order is the deterministic tie-break everywhere.
class Registry {
public:
  const std::vector<KernelPtr>& kernels() const { return kernels_; }
  std::size_t size() const { return kernels_.size(); }

  KernelPtr find(const std::string& name) const {
    for (const KernelPtr& k : kernels_)
      if (k->name == name) return k;
    return nullptr;
  }

  void add(Kernel k) {
    if (find(k.name))
      throw Error(ErrorKind::DuplicateKernelName,
                  "kernel " + k.name + " declared twice");
    int idx = static_cast<int>(kernels_.size());
    const PatternInfo& info = pattern_info(k.pattern);
    bucket(info.left_mod, info.right_mod, info.same_operand).push_back(idx);
    kernels_.push_back(std::make_shared<const Kernel>(std::move(k)));
  }

  /// All kernels whose pattern matches syntactically and whose constraints
  /// hold; declaration order. Empty result means the expression is not
  /// computable with this registry.
  std::vector<Match> match(const ExprPtr& expr) const {
    std::vector<Match> out;
    if (expr->kind() != Expr::Kind::Product) return out;
    detail::SideView l = detail::side_view(expr->left());
    detail::SideView r = detail::side_view(expr->right());
    const std::vector<int>& plain = bucket(l.mod, r.mod, false);
    const std::vector<int>& same = bucket(l.mod, r.mod, true);
    // merge the two declaration-ordered buckets
    std::size_t pi = 0, si = 0;
    while (pi < plain.size() || si < same.size()) {
      int idx;
      if (si == same.size() ||
          (pi < plain.size() && plain[pi] < same[si]))
        idx = plain[pi++];
      else
        idx = same[si++];
      const KernelPtr& k = kernels_[idx];
      if (auto b = bind_kernel(*k, expr)) out.push_back(Match{k, *b});
    }
    return out;
  }

private:
  std::vector<int>& bucket(UnaryMod l, UnaryMod r, bool same) {
    return index_[static_cast<int>(l) * 8 + static_cast<int>(r) * 2 + same];
  }
  const std::vector<int>& bucket(UnaryMod l, UnaryMod r, bool same) const {
    return index_[static_cast<int>(l) * 8 + static_cast<int>(r) * 2 + same];
  }

  std::vector<KernelPtr> kernels_;
  std::array<std::vector<int>, 32> index_;
};

struct BestMatch {
  KernelPtr kernel;
  Binding binding;
  CostValue cost = CostValue::unreachable();
};

/// Minimal-cost match, ties resolved by declaration order (strict-improvement
/// comparison keeps the first). No match is reported as unreachable cost.
inline std::optional<BestMatch> best_match(const ExprPtr& expr,
                                           const Registry& registry,
                                           const CostMetric& metric) {
  std::optional<BestMatch> best;
  for (Match& m : registry.match(expr)) {
    CostValue c = metric.eval(m.kernel->name, m.kernel->cost, m.binding.dims);
    if (!best || c < best->cost)
      best = BestMatch{m.kernel, m.binding, c};
  }
  return best;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line,
                                             int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (char c : line) {
    if (c == '"') {
      in_quotes = !in_quotes;
      cur += c;
    } else if (!in_quotes && std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        fields.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (in_quotes)
    throw Error(ErrorKind::InvalidKernelSpec,
                "line " + std::to_string(lineno) + ": unterminated quote");
  if (!cur.empty()) fields.push_back(cur);
  return fields;
}

inline Constraint parse_constraint(const std::string& tok, int lineno,
                                   PatternShape pattern) {
  auto at = tok.find('@');
  if (at == std::string::npos || at + 2 != tok.size())
    throw Error(ErrorKind::InvalidKernelSpec,
                "line " + std::to_string(lineno) + ": bad constraint '" + tok +
                    "' (expected Prop@X or Prop@Y)");
  Constraint c;
  c.role = tok[at + 1];
  if (c.role != 'X' && c.role != 'Y')
    throw Error(ErrorKind::InvalidKernelSpec,
                "line " + std::to_string(lineno) + ": unknown role in '" + tok +
                    "'");
  if (c.role == 'Y' && pattern_info(pattern).same_operand)
    throw Error(ErrorKind::InvalidKernelSpec,
                "line " + std::to_string(lineno) +
                    ": pattern has no Y role for constraint '" + tok + "'");
  std::string what = tok.substr(0, at);
  if (what == "ColVector") {
    c.kind = Constraint::Kind::ColVector;
  } else if (what == "RowVector") {
    c.kind = Constraint::Kind::RowVector;
  } else if (auto p = property_from_string(what)) {
    c.kind = Constraint::Kind::Prop;
    c.property = *p;
  } else {
    throw Error(ErrorKind::InvalidKernelSpec,
                "line " + std::to_string(lineno) + ": unknown property '" +
                    what + "'");
  }
  return c;
}

} // namespace detail

/// Parses the line-oriented registry document format:
///   kernel <NAME> pattern=<shape> [constraints=<Prop@role,...>]
///          cost=<polynomial in m,n,k> [template="<call text>"]
///          [exec=<family>] [out=A|B|OUT] [flags=key:value,...]
inline Registry load_registry(const std::string& document) {
  Registry reg;
  std::istringstream in(document);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // strip comments, but leave '#' inside quoted templates alone
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.erase(i);
        break;
      }
    }
    std::vector<std::string> fields = detail::split_fields(line, lineno);
    if (fields.empty()) continue;
    if (fields[0] != "kernel")
      throw Error(ErrorKind::InvalidKernelSpec,
                  "line " + std::to_string(lineno) + ": expected 'kernel', got '" +
                      fields[0] + "'");
    if (fields.size() < 2)
      throw Error(ErrorKind::InvalidKernelSpec,
                  "line " + std::to_string(lineno) + ": missing kernel name");
    Kernel k;
    k.name = fields[1];
    bool have_pattern = false, have_cost = false;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const std::string& f = fields[i];
      auto eq = f.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) + ": bad field '" + f + "'");
      std::string key = f.substr(0, eq);
      std::string val = f.substr(eq + 1);
      if (key == "pattern") {
        auto p = pattern_from_token(val);
        if (!p)
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) + ": unknown pattern '" +
                          val + "'");
        k.pattern = *p;
        have_pattern = true;
      } else if (key == "cost") {
        k.cost = CostFormula::parse(val);
        have_cost = true;
      } else if (key == "constraints") {
        if (!have_pattern)
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) +
                          ": constraints before pattern");
        std::stringstream cs(val);
        std::string tok;
        while (std::getline(cs, tok, ','))
          if (!tok.empty())
            k.constraints.push_back(
                detail::parse_constraint(tok, lineno, k.pattern));
      } else if (key == "template") {
        if (val.size() < 2 || val.front() != '"' || val.back() != '"')
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) +
                          ": template must be quoted");
        k.call_template = val.substr(1, val.size() - 2);
      } else if (key == "exec") {
        k.exec = val;
      } else if (key == "out") {
        if (val == "A") k.out_slot = 'A';
        else if (val == "B") k.out_slot = 'B';
        else if (val == "OUT") k.out_slot = 'O';
        else
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) + ": out must be A, B or OUT");
      } else if (key == "flags") {
        std::stringstream fs(val);
        std::string tok;
        while (std::getline(fs, tok, ',')) {
          auto colon = tok.find(':');
          if (colon == std::string::npos)
            throw Error(ErrorKind::InvalidKernelSpec,
                        "line " + std::to_string(lineno) + ": bad flag '" + tok +
                            "'");
          k.flags.emplace_back(tok.substr(0, colon), tok.substr(colon + 1));
        }
      } else {
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) + ": unknown field '" + key +
                        "'");
      }
    }
    if (!have_pattern || !have_cost)
      throw Error(ErrorKind::InvalidKernelSpec,
                  "line " + std::to_string(lineno) +
                      ": kernel needs pattern= and cost=");
    // reject formulas that can go negative on small dimensions
    for (Dim probe : {Dim{1}, Dim{2}, Dim{5}})
      if (k.cost.eval(Dims{probe, probe, probe}) < 0)
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) + ": cost formula '" +
                        k.cost.text() + "' is negative at size " +
                        std::to_string(probe));
    reg.add(std::move(k));
  }
  return reg;
}

} // namespace gmc
