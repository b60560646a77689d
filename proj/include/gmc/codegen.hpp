#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "gmc/solver.hpp"

namespace gmc {

/// One line per call: `<out> := <expr>   # <kernel>, cost=<value>`.
inline std::string emit_text_plan(const Plan& plan) {
  std::string out;
  for (const KernelCall& call : plan.calls)
    out += call.output + " := " + call.expr_str() + "   # " + call.kernel +
           ", cost=" + call.cost.str() + "\n";
  return out;
}

namespace detail {

inline std::string substitute(std::string tmpl, const std::string& a,
                              const std::string& b, const std::string& out) {
  auto replace_all = [&](const std::string& slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = tmpl.find(slot, pos)) != std::string::npos) {
      tmpl.replace(pos, slot.size(), value);
      pos += value.size();
    }
  };
  replace_all("{A}", a);
  replace_all("{B}", b);
  replace_all("{OUT}", out);
  return tmpl;
}

} // namespace detail

/// Instantiates each kernel's call template with concrete buffer names.
/// In-place kernels overwrite the buffer of one input; when that input's
/// value is still needed by a later call, a copy into the output buffer is
/// emitted first and the call runs on the copy. Overwrites are annotated.
inline std::string emit_blas_calls(const Plan& plan) {
  std::map<std::string, std::string> buffer; // value name -> buffer name
  std::string out;
  for (std::size_t ci = 0; ci < plan.calls.size(); ++ci) {
    const KernelCall& call = plan.calls[ci];
    if (!call.kernel_def || call.kernel_def->call_template.empty())
      throw Error(ErrorKind::MissingTemplate,
                  "kernel " + call.kernel + " has no call template");
    auto buf_of = [&](const std::string& name) {
      auto it = buffer.find(name);
      return it == buffer.end() ? name : it->second;
    };
    std::string lbuf = buf_of(call.left);
    std::string rbuf = buf_of(call.right);
    std::string obuf = call.output;

    char slot = call.kernel_def->out_slot;
    if (slot == 'A' || slot == 'B') {
      const std::string& consumed = slot == 'A' ? call.left : call.right;
      std::string& consumed_buf = slot == 'A' ? lbuf : rbuf;
      const std::string& other_buf = slot == 'A' ? rbuf : lbuf;
      bool used_later = false;
      for (std::size_t cj = ci + 1; cj < plan.calls.size(); ++cj)
        if (plan.calls[cj].left == consumed || plan.calls[cj].right == consumed)
          used_later = true;
      // copy when the overwritten value is read again later, or when both
      // inputs sit in the same buffer (in-place kernels reject aliasing)
      if (used_later || consumed_buf == other_buf) {
        out += "copy!(" + consumed_buf + ", " + call.output + ")\n";
        consumed_buf = call.output;
      }
      obuf = consumed_buf;
      buffer[call.output] = obuf;
    }
    out += detail::substitute(call.kernel_def->call_template, lbuf, rbuf, obuf);
    if (obuf != call.output) out += "   # " + call.output + " in " + obuf;
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structured IR
// ---------------------------------------------------------------------------

inline const char* mod_token(UnaryMod m) {
  switch (m) {
  case UnaryMod::None: return "none";
  case UnaryMod::Transpose: return "transpose";
  case UnaryMod::Inverse: return "inverse";
  case UnaryMod::InverseTranspose: return "inverse_transpose";
  }
  return "none";
}

inline UnaryMod mod_from_token(const std::string& s) {
  for (UnaryMod m : {UnaryMod::None, UnaryMod::Transpose, UnaryMod::Inverse,
                     UnaryMod::InverseTranspose})
    if (s == mod_token(m)) return m;
  throw Error(ErrorKind::InvalidIr, "unknown modifier token '" + s + "'");
}

namespace detail {

inline nlohmann::json cost_to_json(const CostValue& c) {
  if (c.is_scalar()) return c.scalar_value();
  nlohmann::json arr = nlohmann::json::array();
  for (double v : c.values()) arr.push_back(v);
  return arr;
}

inline CostValue cost_from_json(const nlohmann::json& j) {
  if (j.is_number()) return CostValue::scalar(j.get<double>());
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& e : j) v.push_back(e.get<double>());
    return CostValue::vector(std::move(v));
  }
  throw Error(ErrorKind::InvalidIr, "cost must be a number or an array");
}

} // namespace detail

/// Machine-readable plan document (versioned JSON). Field order is
/// alphabetical and stable, so identical plans serialize byte-identically.
inline std::string emit_ir(const Plan& plan) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["target"] = plan.target;
  doc["result_shape"] = {plan.result_shape.rows, plan.result_shape.cols};
  doc["total_cost"] = detail::cost_to_json(plan.total_cost);
  nlohmann::json calls = nlohmann::json::array();
  for (const KernelCall& c : plan.calls) {
    nlohmann::json jc;
    jc["kernel"] = c.kernel;
    jc["inputs"] = {{{"name", c.left}, {"mod", mod_token(c.left_mod)}},
                    {{"name", c.right}, {"mod", mod_token(c.right_mod)}}};
    jc["output"] = c.output;
    jc["out_shape"] = {c.out_shape.rows, c.out_shape.cols};
    jc["dims"] = {{"m", c.dims.m}, {"n", c.dims.n}, {"k", c.dims.k}};
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [key, value] : c.flags) flags[key] = value;
    jc["flags"] = flags;
    jc["cost"] = detail::cost_to_json(c.cost);
    calls.push_back(std::move(jc));
  }
  doc["calls"] = std::move(calls);
  return doc.dump(2) + "\n";
}

/// Inverse of emit_ir. The parsed plan carries no kernel definitions, so it
/// can be inspected and re-emitted but not executed.
inline Plan parse_ir(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidIr, e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1)
      throw Error(ErrorKind::InvalidIr, "unsupported IR version");
    Plan plan;
    plan.target = doc.at("target").get<std::string>();
    plan.result_shape = Shape(doc.at("result_shape").at(0).get<Dim>(),
                              doc.at("result_shape").at(1).get<Dim>());
    plan.total_cost = detail::cost_from_json(doc.at("total_cost"));
    for (const auto& jc : doc.at("calls")) {
      KernelCall c;
      c.kernel = jc.at("kernel").get<std::string>();
      c.left = jc.at("inputs").at(0).at("name").get<std::string>();
      c.left_mod = mod_from_token(jc.at("inputs").at(0).at("mod").get<std::string>());
      c.right = jc.at("inputs").at(1).at("name").get<std::string>();
      c.right_mod = mod_from_token(jc.at("inputs").at(1).at("mod").get<std::string>());
      c.output = jc.at("output").get<std::string>();
      c.out_shape = Shape(jc.at("out_shape").at(0).get<Dim>(),
                          jc.at("out_shape").at(1).get<Dim>());
      c.dims.m = jc.at("dims").at("m").get<Dim>();
      c.dims.n = jc.at("dims").at("n").get<Dim>();
      c.dims.k = jc.at("dims").at("k").get<Dim>();
      for (const auto& [key, value] : jc.at("flags").items())
        c.flags.emplace_back(key, value.get<std::string>());
      c.cost = detail::cost_from_json(jc.at("cost"));
      plan.calls.push_back(std::move(c));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidIr, e.what());
  }
}

/// Structural equality over the serialized fields (kernel definitions and
/// flag ordering are not part of a plan's identity).
inline bool plans_equal(const Plan& a, const Plan& b) {
  auto sorted_flags = [](const KernelCall& c) {
    auto f = c.flags;
    std::sort(f.begin(), f.end());
    return f;
  };
  if (a.target != b.target || !(a.result_shape == b.result_shape) ||
      !(a.total_cost == b.total_cost) || a.calls.size() != b.calls.size())
    return false;
  for (std::size_t i = 0; i < a.calls.size(); ++i) {
    const KernelCall& x = a.calls[i];
    const KernelCall& y = b.calls[i];
    if (x.kernel != y.kernel || x.left != y.left || x.left_mod != y.left_mod ||
        x.right != y.right || x.right_mod != y.right_mod ||
        x.output != y.output || !(x.out_shape == y.out_shape) ||
        x.dims.m != y.dims.m || x.dims.n != y.dims.n || x.dims.k != y.dims.k ||
        !(x.cost == y.cost) || sorted_flags(x) != sorted_flags(y))
      return false;
  }
  return true;
}

} // namespace gmc
