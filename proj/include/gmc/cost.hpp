#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gmc/errors.hpp"
#include "gmc/shape.hpp"

namespace gmc {

/// Result/contraction dimensions of one kernel invocation: the output is
/// m x n and k is the contracted dimension.
struct Dims {
  Dim m = 1;
  Dim n = 1;
  Dim k = 1;
};

/// A metric value: a nonnegative scalar, a fixed-arity vector compared
/// lexicographically, or the unreachable sentinel that absorbs addition and
/// compares greater than every finite value.
class CostValue {
public:
  static CostValue unreachable() {
    CostValue c;
    c.unreachable_ = true;
    return c;
  }
  static CostValue scalar(double v) {
    CostValue c;
    c.values_ = {v};
    return c;
  }
  static CostValue vector(std::vector<double> v) {
    CostValue c;
    c.values_ = std::move(v);
    return c;
  }

  bool is_unreachable() const { return unreachable_; }
  bool is_scalar() const { return !unreachable_ && values_.size() == 1; }

  double scalar_value() const {
    if (!is_scalar())
      throw Error(ErrorKind::ShapeMismatch, "cost value is not scalar");
    return values_[0];
  }
  const std::vector<double>& values() const { return values_; }

  CostValue operator+(const CostValue& o) const {
    if (unreachable_ || o.unreachable_) return unreachable();
    if (values_.size() != o.values_.size())
      throw Error(ErrorKind::ShapeMismatch, "cost arity mismatch in addition");
    CostValue r = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] += o.values_[i];
    return r;
  }

  /// Total order: lexicographic on the components, unreachable maximal.
  int compare(const CostValue& o) const {
    if (unreachable_ && o.unreachable_) return 0;
    if (unreachable_) return 1;
    if (o.unreachable_) return -1;
    if (values_.size() != o.values_.size())
      throw Error(ErrorKind::ShapeMismatch, "cost arity mismatch in comparison");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < o.values_[i]) return -1;
      if (values_[i] > o.values_[i]) return 1;
    }
    return 0;
  }

  friend bool operator<(const CostValue& a, const CostValue& b) {
    return a.compare(b) < 0;
  }
  friend bool operator==(const CostValue& a, const CostValue& b) {
    return a.compare(b) == 0;
  }
  friend bool operator<=(const CostValue& a, const CostValue& b) {
    return a.compare(b) <= 0;
  }

  std::string str() const {
    if (unreachable_) return "inf";
    std::string out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) out += ",";
      out += format_number(values_[i]);
    }
    if (values_.size() > 1) return "(" + out + ")";
    return out;
  }

  static std::string format_number(double v) {
    // FLOP counts are integers in practice; keep them readable and the
    // output byte-stable.
    if (std::floor(v) == v && std::fabs(v) < 9.0e15) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.0f", v);
      return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
  }

private:
  bool unreachable_ = false;
  std::vector<double> values_;
};

/// Polynomial in m, n, k with rational coefficients, e.g. "2*m*n*k" or
/// "(1/3)*m^3+2*m^2*n". This is the cost language of registry files.
class CostFormula {
public:
  CostFormula() = default;

  static CostFormula parse(const std::string& text) {
    CostFormula f;
    f.text_ = text;
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty())
      throw Error(ErrorKind::InvalidKernelSpec, "empty cost formula");
    std::size_t pos = 0;
    f.terms_.push_back(parse_term(s, pos));
    while (pos < s.size()) {
      if (s[pos] != '+')
        throw Error(ErrorKind::InvalidKernelSpec,
                    "bad cost formula '" + text + "' near '" + s.substr(pos) + "'");
      ++pos;
      f.terms_.push_back(parse_term(s, pos));
    }
    return f;
  }

  double eval(const Dims& d) const {
    if (d.m < 1 || d.n < 1 || d.k < 1)
      throw Error(ErrorKind::NonPositiveDimension,
                  "cost formula evaluated at nonpositive dimensions");
    double total = 0;
    for (const Term& t : terms_)
      total += t.coeff * ipow(d.m, t.em) * ipow(d.n, t.en) * ipow(d.k, t.ek);
    return total;
  }

  const std::string& text() const { return text_; }

private:
  struct Term {
    double coeff = 1;
    int em = 0, en = 0, ek = 0;
  };

  static double ipow(Dim base, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<double>(base);
    return r;
  }

  static Term parse_term(const std::string& s, std::size_t& pos) {
    Term t;
    bool saw_factor = false;
    while (pos < s.size()) {
      char c = s[pos];
      if (c == 'm' || c == 'n' || c == 'k') {
        ++pos;
        int e = 1;
        if (pos < s.size() && s[pos] == '^') {
          ++pos;
          e = parse_int(s, pos);
        }
        (c == 'm' ? t.em : c == 'n' ? t.en : t.ek) += e;
        saw_factor = true;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.coeff *= parse_number(s, pos);
        saw_factor = true;
      } else if (c == '(') {
        ++pos;
        double num = parse_number(s, pos);
        if (pos >= s.size() || s[pos] != '/')
          throw Error(ErrorKind::InvalidKernelSpec,
                      "expected '/' in rational coefficient");
        ++pos;
        double den = parse_number(s, pos);
        if (pos >= s.size() || s[pos] != ')')
          throw Error(ErrorKind::InvalidKernelSpec,
                      "expected ')' in rational coefficient");
        ++pos;
        if (den == 0)
          throw Error(ErrorKind::InvalidKernelSpec, "zero denominator");
        t.coeff *= num / den;
        saw_factor = true;
      } else {
        break;
      }
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!saw_factor)
      throw Error(ErrorKind::InvalidKernelSpec, "empty term in cost formula");
    return t;
  }

  static int parse_int(const std::string& s, std::size_t& pos) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (start == pos)
      throw Error(ErrorKind::InvalidKernelSpec, "expected integer exponent");
    return std::stoi(s.substr(start, pos - start));
  }

  static double parse_number(const std::string& s, std::size_t& pos) {
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
            s[pos] == 'e' || s[pos] == 'E' ||
            ((s[pos] == '+' || s[pos] == '-') && pos > start &&
             (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
      ++pos;
    if (start == pos)
      throw Error(ErrorKind::InvalidKernelSpec, "expected number");
    return std::stod(s.substr(start, pos - start));
  }

  std::string text_;
  std::vector<Term> terms_;
};

/// A pluggable cost metric. Metrics see the kernel name, its cost formula and
/// the binding dimensions, and must return values supporting addition and a
/// total order.
struct CostMetric {
  std::string name;
  CostValue zero = CostValue::scalar(0);
  std::function<CostValue(const std::string& kernel, const CostFormula& cost,
                          const Dims& dims)>
      eval;
};

/// FLOP counting: evaluates the kernel's cost polynomial. A multiply-add pair
/// counts as 2 FLOPs, matching the 2mnk convention for a general product.
/// Values are rounded to the nearest integer: FLOP counts are integral, and
/// integer-valued costs make summation exact regardless of the order in
/// which a plan's calls are added up.
inline CostMetric flop_metric() {
  CostMetric m;
  m.name = "flops";
  m.zero = CostValue::scalar(0);
  m.eval = [](const std::string&, const CostFormula& cost, const Dims& d) {
    return CostValue::scalar(std::nearbyint(cost.eval(d)));
  };
  return m;
}

/// Table-driven measured costs. Performance is not composable (cache state
/// couples adjacent kernel invocations), so summed table entries remain an
/// approximation of end-to-end time; they are still closer than FLOPs.
///
/// Document format, one record per line:
///   fallback nearest|error
///   cost <KERNEL> m=<int> n=<int> k=<int> value=<float>
inline CostMetric table_metric(const std::string& document) {
  struct Entry {
    Dims dims;
    double value;
  };
  auto table = std::make_shared<std::map<std::string, std::vector<Entry>>>();
  bool nearest = false;
  bool saw_fallback = false;

  std::istringstream in(document);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "fallback") {
      std::string mode;
      ls >> mode;
      if (mode == "nearest")
        nearest = true;
      else if (mode == "error")
        nearest = false;
      else
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) +
                        ": fallback must be nearest or error");
      saw_fallback = true;
    } else if (word == "cost") {
      std::string kernel;
      if (!(ls >> kernel))
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) + ": missing kernel name");
      Entry e{};
      bool have_value = false;
      std::string field;
      while (ls >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos)
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) + ": bad field '" +
                          field + "'");
        std::string key = field.substr(0, eq);
        std::string val = field.substr(eq + 1);
        if (key == "m") e.dims.m = std::stoll(val);
        else if (key == "n") e.dims.n = std::stoll(val);
        else if (key == "k") e.dims.k = std::stoll(val);
        else if (key == "value") {
          e.value = std::stod(val);
          have_value = true;
        } else
          throw Error(ErrorKind::InvalidKernelSpec,
                      "line " + std::to_string(lineno) + ": unknown field '" +
                          key + "'");
      }
      if (!have_value)
        throw Error(ErrorKind::InvalidKernelSpec,
                    "line " + std::to_string(lineno) + ": missing value=");
      (*table)[kernel].push_back(e);
    } else {
      throw Error(ErrorKind::InvalidKernelSpec,
                  "line " + std::to_string(lineno) + ": unknown record '" +
                      word + "'");
    }
  }
  if (!saw_fallback)
    throw Error(ErrorKind::InvalidKernelSpec,
                "cost table must declare a fallback rule");

  CostMetric m;
  m.name = "table";
  m.zero = CostValue::scalar(0);
  m.eval = [table, nearest](const std::string& kernel, const CostFormula&,
                            const Dims& d) {
    auto it = table->find(kernel);
    if (it == table->end() || it->second.empty())
      throw Error(ErrorKind::MissingEntry,
                  "no cost table entries for kernel " + kernel);
    const Entry* best = nullptr;
    Dim best_dist = 0;
    for (const Entry& e : it->second) {
      Dim dist = std::llabs(e.dims.m - d.m) + std::llabs(e.dims.n - d.n) +
                 std::llabs(e.dims.k - d.k);
      if (!best || dist < best_dist) {
        best = &e;
        best_dist = dist;
      }
    }
    if (best_dist != 0 && !nearest)
      throw Error(ErrorKind::MissingEntry,
                  "no exact cost table entry for " + kernel + " at m=" +
                      std::to_string(d.m) + " n=" + std::to_string(d.n) +
                      " k=" + std::to_string(d.k));
    return CostValue::scalar(best->value);
  };
  return m;
}

/// Lexicographic (FLOPs, kernel invocations) metric: minimizes FLOPs first
/// and breaks exact FLOP ties in favor of fewer calls.
inline CostMetric flops_then_calls_metric() {
  CostMetric m;
  m.name = "flops-calls";
  m.zero = CostValue::vector({0, 0});
  m.eval = [](const std::string&, const CostFormula& cost, const Dims& d) {
    return CostValue::vector({std::nearbyint(cost.eval(d)), 1});
  };
  return m;
}

} // namespace gmc
