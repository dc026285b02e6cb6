#pragma once

// File formats of the command-line tool: measure and inner-function JSON,
// zeros CSV, and the JSON writer for reports.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "onecomp/companion.hpp"
#include "onecomp/level_set.hpp"

namespace onecomp::cli {

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range input (exit status 2).
class InputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

inline std::string line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(p.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError(p.string() + ": cannot write");
  out << content;
}

inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(source + ": " + line_column(text, at) + ": " + msg);
  }
}

/// Parses a whole decimal string; nullopt on any leftover characters.
inline std::optional<double> decimal(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

/// A real given as a decimal string or a JSON number.
inline double real(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (auto d = decimal(v.get<std::string>())) return *d;
  }
  throw InputError(where + ": expected a decimal number");
}

inline void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) throw InputError(where + ": unknown field \"" + k + "\"");
  }
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw InputError(where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

inline SingularMeasure measure_from_json(const Json& j, const std::string& where = "measure") {
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind == "atoms") {
    only_keys(j, {"kind", "atoms", "tail_mass", "accumulation"}, where);
    std::vector<Atom> atoms;
    const auto& list = field(j, "atoms", where);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string w = where + ".atoms[" + std::to_string(i) + "]";
      only_keys(list[i], {"theta", "mass"}, w);
      atoms.push_back({real(field(list[i], "theta", w), w + ".theta"), real(field(list[i], "mass", w), w + ".mass")});
    }
    const double tail = j.contains("tail_mass") ? real(j["tail_mass"], where + ".tail_mass") : 0.0;
    std::vector<double> acc;
    if (j.contains("accumulation")) {
      for (std::size_t i = 0; i < j["accumulation"].size(); ++i) {
        acc.push_back(real(j["accumulation"][i], where + ".accumulation[" + std::to_string(i) + "]"));
      }
    }
    return AtomicMeasure(std::move(atoms), tail, std::move(acc));
  }
  if (kind == "cantor") {
    only_keys(j, {"kind", "delta", "offset"}, where);
    const auto& d = field(j, "delta", where);
    CantorGeometry g = CantorGeometry::middle_thirds();
    if (d.is_string()) {
      if (d.get<std::string>() != "middle-thirds") throw InputError(where + ".delta: unknown preset");
    } else if (d.is_object()) {
      only_keys(d, {"ratio"}, where + ".delta");
      g = CantorGeometry::geometric(real(field(d, "ratio", where + ".delta"), where + ".delta.ratio"));
    } else if (d.is_array()) {
      std::vector<long double> deltas;
      for (std::size_t i = 0; i < d.size(); ++i) {
        deltas.push_back(real(d[i], where + ".delta[" + std::to_string(i) + "]"));
      }
      g = CantorGeometry::from_deltas(std::move(deltas));
    } else {
      throw InputError(where + ".delta: expected a preset, {\"ratio\"} or a list");
    }
    CantorMeasure m(std::move(g));
    if (j.contains("offset")) m = m.rotated(real(j["offset"], where + ".offset"));
    return m;
  }
  if (kind == "cdf") {
    only_keys(j, {"kind", "samples", "offset"}, where);
    std::vector<std::pair<double, double>> samples;
    const auto& s = field(j, "samples", where);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string w = where + ".samples[" + std::to_string(i) + "]";
      if (!s[i].is_array() || s[i].size() != 2) throw InputError(w + ": expected [t, value]");
      samples.emplace_back(real(s[i][0], w + "[0]"), real(s[i][1], w + "[1]"));
    }
    return CdfMeasure(std::move(samples), j.contains("offset") ? real(j["offset"], where + ".offset") : 0.0);
  }
  throw InputError(where + ".kind: expected \"atoms\", \"cantor\" or \"cdf\"");
}

/// Zeros CSV with header "re,im"; errors name the line and column.
inline std::vector<DiscPoint> zeros_from_csv(const std::string& text, const std::string& source) {
  std::vector<DiscPoint> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  auto fail = [&](std::size_t col, const std::string& msg) {
    throw InputError(source + ": line " + std::to_string(n) + ", column " + std::to_string(col) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "re,im") fail(1, "expected header \"re,im\"");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(line.size() + 1, "expected two fields");
    if (line.find(',', comma + 1) != std::string::npos) fail(line.find(',', comma + 1) + 1, "too many fields");
    const auto re = decimal(std::string_view(line).substr(0, comma));
    if (!re) fail(1, "not a decimal number");
    const auto im = decimal(std::string_view(line).substr(comma + 1));
    if (!im) fail(comma + 2, "not a decimal number");
    const auto z = DiscPoint::cartesian(*re, *im);
    if (!z.is_interior()) fail(1, "zero is not in the open unit disc");
    out.push_back(z);
  }
  if (!header) throw InputError(source + ": line 1, column 1: expected header \"re,im\"");
  return out;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string zeros_to_csv(const std::vector<DiscPoint>& zs) {
  std::string s = "re,im\n";
  for (const auto& z : zs) s += format_real(z.re()) + "," + format_real(z.im()) + "\n";
  return s;
}

/// Inner function: {"lambda": {"re", "im"}, "zeros_csv": path or inline text,
/// "zeros": {"kind": "radial", "angle", "exponent": "linear" | "square"}, "measure": {...}}.
/// Relative paths resolve against `base`.
inline InnerFunction inner_from_json(const Json& j, const std::filesystem::path& base,
                                     const std::string& where = "inner") {
  only_keys(j, {"lambda", "zeros_csv", "zeros", "measure"}, where);
  Complex lambda = 1.0;
  if (j.contains("lambda")) {
    only_keys(j["lambda"], {"re", "im"}, where + ".lambda");
    lambda = {real(field(j["lambda"], "re", where + ".lambda"), where + ".lambda.re"),
              real(field(j["lambda"], "im", where + ".lambda"), where + ".lambda.im")};
  }
  InnerFunction f = InnerFunction::constant(lambda);
  if (j.contains("zeros_csv")) {
    const std::string s = j["zeros_csv"].get<std::string>();
    std::vector<DiscPoint> zs;
    if (s.find('\n') != std::string::npos) {
      zs = zeros_from_csv(s, where + ".zeros_csv");
    } else {
      const auto p = base / s;
      zs = zeros_from_csv(read_file(p), p.string());
    }
    f = f * InnerFunction::blaschke(ZeroSequence::finite(std::move(zs)));
  }
  if (j.contains("zeros")) {
    const auto& z = j["zeros"];
    const std::string w = where + ".zeros";
    only_keys(z, {"kind", "angle", "exponent"}, w);
    if (field(z, "kind", w) != "radial") throw InputError(w + ".kind: expected \"radial\"");
    const std::string e = field(z, "exponent", w).get<std::string>();
    if (e != "linear" && e != "square") throw InputError(w + ".exponent: expected \"linear\" or \"square\"");
    const double angle = z.contains("angle") ? real(z["angle"], w + ".angle") : 0.0;
    f = f * InnerFunction::blaschke(ZeroSequence::generated(std::make_shared<RadialZeros>(
                angle, e == "linear" ? RadialZeros::Exponent::Linear : RadialZeros::Exponent::Square)));
  }
  if (j.contains("measure")) f = f * InnerFunction::singular(measure_from_json(j["measure"], where + ".measure"));
  return f;
}

/// JSON text with every real written to 17 significant digits; non-finite reals become null.
inline void dump(const Json& j, std::string& out, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        dump(v, out, indent + 2);
      }
      out += "\n" + close + "}";
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

inline std::string dump(const Json& j) {
  std::string s;
  dump(j, s);
  return s + "\n";
}

inline Json point_json(const DiscPoint& z) { return Json{{"re", z.re()}, {"im", z.im()}}; }

inline Json witness_json(const Witness& w) {
  return Json{{"z", point_json(w.z)}, {"depth", w.depth}, {"mod_theta", w.mod_theta}, {"mu_q", w.mu_q}};
}

inline Json report_json(const ClassificationReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["c_star"] = r.c_star;
  j["depth_trace"] = r.depth_trace;
  j["depth_max"] = r.depth_max;
  j["witnesses"] = Json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(witness_json(w));
  j["tests"] = Json::object();
  for (const auto& t : r.tests) {
    j["tests"][t.name] = Json{{"verdict", to_string(t.verdict)}, {"estimate", t.estimate}, {"trace", t.trace},
                              {"note", t.note}};
  }
  j["scanned"] = r.scanned;
  j["positive"] = r.positive;
  j["undecided"] = r.undecided;
  j["options"] = Json{{"depth", r.options.depth},
                      {"tol", r.options.tol},
                      {"margin", r.options.margin},
                      {"eval_tol", r.options.eval_tol},
                      {"grid_rotation", r.options.grid_rotation}};
  j["notes"] = r.notes;
  return j;
}

inline Json level_set_json(const LevelSetAnalysis& a) {
  std::size_t refined = 0;
  for (const auto& c : a.cells) refined += !c.path.empty();
  return Json{{"epsilon", a.epsilon},
              {"depth", a.depth},
              {"component_count", a.component_count},
              {"previous_count", a.previous_count},
              {"stabilized", a.stabilized},
              {"cells", a.cells.size()},
              {"refined_cells", refined},
              {"notes", a.notes}};
}

inline Json companion_json(const CompanionResult& r) {
  const auto zs = r.zeros.materialize(r.zeros.available().value_or(0));
  Json arcs = Json::array();
  for (const auto& a : r.chain.arcs) {
    arcs.push_back(Json{{"lo", wrap_positive(a.arc.lo())}, {"length", a.arc.length()}, {"depth", a.depth},
                        {"epsilon", a.epsilon}});
  }
  Json violations = Json::array();
  for (const auto& w : r.mechanism_violations) violations.push_back(witness_json(w));
  Json j;
  j["construction"] = Json{{"connector_order", "boundary order of arc left endpoints"},
                           {"step", 0.1},
                           {"chains", r.gamma.chains.size()},
                           {"arcs", arcs}};
  j["zero_count"] = zs.size();
  j["zeros_csv"] = zeros_to_csv(zs);
  j["diagnostics"] = Json{{"separation", r.separation.separation},
                          {"box_constant", r.separation.box_constant},
                          {"max_step_error", r.max_step_error},
                          {"tail_estimate", r.tail_estimate}};
  j["verification"] = Json{{"verified", r.verified()},
                           {"spacing_ok", r.spacing_ok},
                           {"separation_ok", r.separation_ok},
                           {"one_component_ok", r.one_component_ok},
                           {"mechanism_ok", r.mechanism_ok},
                           {"mechanism_violations", violations},
                           {"report_b", report_json(r.report_b)},
                           {"report_b_theta", report_json(r.report_b_theta)}};
  j["notes"] = r.notes;
  return j;
}

inline Json boundary_set_json(const BoundarySet& s) {
  Json parts = Json::array();
  for (const auto& c : s.components()) {
    if (const auto* p = std::get_if<BoundarySet::Points>(&c)) {
      parts.push_back(Json{{"kind", "points"}, {"angles", p->angles}});
    } else if (const auto* a = std::get_if<BoundarySet::Arcs>(&c)) {
      Json spans = Json::array();
      for (auto [lo, hi] : a->spans) spans.push_back(Json::array({lo, hi}));
      parts.push_back(Json{{"kind", "arcs"}, {"arcs", spans}});
    } else {
      const auto& g = *std::get<BoundarySet::Cantor>(c).geometry;
      Json deltas = Json::array();
      for (int n = 0; n <= 8; ++n) deltas.push_back(static_cast<double>(g.delta(n)));
      parts.push_back(Json{{"kind", "cantor"}, {"offset", g.offset()}, {"delta", deltas}});
    }
  }
  return parts;
}

}  // namespace onecomp::cli
