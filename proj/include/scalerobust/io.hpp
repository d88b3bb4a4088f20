#pragma once

// JSON / CSV serialization and the command-line spec mini-language:
//   distributions  triangle:Q | quad:Q,QP,R | curve:@file.json | pointmass:V
//   mixtures       w:r[,w:r...]

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scalerobust/certify.hpp"
#include "scalerobust/mechanisms.hpp"
#include "scalerobust/oracle.hpp"
#include "scalerobust/paradigms.hpp"
#include "scalerobust/revcurve.hpp"
#include "scalerobust/solver.hpp"
#include "scalerobust/symmetrize.hpp"

namespace scalerobust {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// --- curves ----------------------------------------------------------------

inline json curve_to_json(const RevenueCurve& c) {
  json verts = json::array();
  for (const Vertex& v : c.vertices()) verts.push_back({v.q, v.revenue});
  return {{"vertices", verts}};
}

inline RevenueCurve curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
    throw std::invalid_argument("curve json: expected {\"vertices\": [[q,R],...]}");
  }
  std::vector<Vertex> v;
  for (const json& p : j["vertices"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw std::invalid_argument("curve json: each vertex must be a [q,R] pair of numbers");
    }
    v.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return RevenueCurve(std::move(v));
}

inline std::string curve_to_csv(const RevenueCurve& c) {
  std::string out = "q,R\n";
  for (const Vertex& v : c.vertices()) out += format_double(v.q) + "," + format_double(v.revenue) + "\n";
  return out;
}

inline RevenueCurve curve_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("q,R", 0) != 0) {
    throw std::invalid_argument("curve csv: missing \"q,R\" header");
  }
  std::vector<Vertex> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("curve csv: malformed row '" + line + "'");
    v.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return RevenueCurve(std::move(v));
}

// --- mixtures --------------------------------------------------------------

inline json mixture_to_json(const MarkupMixture& m) {
  json atoms = json::array();
  for (const MarkupAtom& a : m.atoms()) atoms.push_back({{"w", a.weight}, {"r", a.ratio}});
  return {{"atoms", atoms}};
}

inline MarkupMixture mixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array()) {
    throw std::invalid_argument("mixture json: expected {\"atoms\": [{\"w\":..,\"r\":..}]}");
  }
  std::vector<MarkupAtom> atoms;
  for (const json& a : j["atoms"]) atoms.push_back({a.at("w").get<double>(), a.at("r").get<double>()});
  return MarkupMixture(std::move(atoms));
}

namespace detail {

inline double parse_number(std::string_view s, std::string_view what) {
  const std::string str(s);
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(str, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": '" + str + "' is not a number");
  }
  if (used != str.size()) throw std::invalid_argument(std::string(what) + ": '" + str + "' is not a number");
  return x;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// "w1:r1,w2:r2,..."; a bare "r" is shorthand for the single-ratio mechanism.
inline MarkupMixture parse_mixture(std::string_view spec) {
  if (spec.empty()) throw std::invalid_argument("mixture spec is empty");
  std::vector<MarkupAtom> atoms;
  for (std::string_view item : detail::split(spec, ',')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() == 1 && atoms.empty() && spec.find(',') == std::string_view::npos) {
      return MarkupMixture::single(detail::parse_number(parts[0], "mixture ratio"));
    }
    if (parts.size() != 2) throw std::invalid_argument("mixture spec: expected w:r, got '" + std::string(item) + "'");
    atoms.push_back({detail::parse_number(parts[0], "mixture weight"), detail::parse_number(parts[1], "mixture ratio")});
  }
  return MarkupMixture(std::move(atoms));
}

inline std::string mixture_spec(const MarkupMixture& m) {
  std::string out;
  for (const MarkupAtom& a : m.atoms()) {
    if (!out.empty()) out += ",";
    out += format_double(a.weight) + ":" + format_double(a.ratio);
  }
  return out;
}

// --- distributions ---------------------------------------------------------

struct DistributionSpec {
  enum class Kind { triangle, quad, curve, point_mass } kind;
  std::string text;
  std::optional<TriangleParams> triangle;
  std::optional<QuadParams> quad;
  std::optional<RevenueCurve> file_curve;
  double point_mass = 0.0;

  RevenueCurve curve() const {
    switch (kind) {
      case Kind::triangle: return curve_from_triangle(*triangle);
      case Kind::quad: return curve_from_quad(*quad);
      case Kind::curve: return *file_curve;
      case Kind::point_mass: return curve_from_point_mass(point_mass);
    }
    throw std::logic_error("unreachable");
  }
};

inline RevenueCurve load_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curve file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return curve_from_csv(text);
  try {
    return curve_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument("curve file '" + path + "': " + e.what());
  }
}

inline DistributionSpec parse_distribution(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("distribution spec '" + std::string(spec) +
                                "': expected triangle:Q, quad:Q,QP,R, curve:@file or pointmass:V");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  DistributionSpec d{};
  d.text = std::string(spec);
  if (kind == "triangle") {
    d.kind = DistributionSpec::Kind::triangle;
    d.triangle = TriangleParams(detail::parse_number(arg, "triangle quantile"));
  } else if (kind == "quad") {
    const auto p = detail::split(arg, ',');
    if (p.size() != 3) throw std::invalid_argument("quad spec: expected quad:Q,QP,R");
    d.kind = DistributionSpec::Kind::quad;
    d.quad = QuadParams(detail::parse_number(p[0], "quad q"), detail::parse_number(p[1], "quad q'"),
                        detail::parse_number(p[2], "quad r"));
  } else if (kind == "curve") {
    if (arg.empty() || arg[0] != '@') throw std::invalid_argument("curve spec: expected curve:@file.json");
    d.kind = DistributionSpec::Kind::curve;
    d.file_curve = load_curve_file(std::string(arg.substr(1)));
  } else if (kind == "pointmass") {
    d.kind = DistributionSpec::Kind::point_mass;
    d.point_mass = detail::parse_number(arg, "point mass value");
    curve_from_point_mass(d.point_mass);
  } else {
    throw std::invalid_argument("unknown distribution kind '" + std::string(kind) + "'");
  }
  return d;
}

// --- reports ---------------------------------------------------------------

inline json to_json(const Outcome& o) { return {{"alloc", o.alloc}, {"pay", o.pay}, {"revenue", o.revenue()}}; }

inline json to_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"std_err", e.std_err}, {"n", e.n}, {"seed", e.seed}};
}

inline json to_json(const EquilibriumSolution& s) {
  const SolveTolerances& t = s.tolerances;
  const EquilibriumChecks& c = s.checks;
  return {{"q_star", s.q_star},
          {"r_star", s.r_star},
          {"alpha_star", s.alpha_star},
          {"beta", s.beta},
          {"validated", s.validated},
          {"tolerances",
           {{"validation", t.validation},
            {"crossing_width", t.crossing_width},
            {"alpha_width", t.alpha_width},
            {"quantile_width", t.quantile_width},
            {"r_cap", t.r_cap},
            {"sweep_points", t.sweep_points}}},
          {"checks",
           {{"equalizer_gap", c.equalizer_gap},
            {"fixed_point_gap", c.fixed_point_gap},
            {"sweep_max", c.sweep_max},
            {"sweep_argmax", c.sweep_argmax},
            {"point_mass_apx", c.point_mass_apx}}}};
}

inline json to_json(const RegionReport& r) {
  json j = {{"region", r.name},
            {"statement", r.statement},
            {"bound", r.bound},
            {"epsilon", r.epsilon},
            {"base_cells", r.base_cells},
            {"cells_examined", r.cells_examined},
            {"cells_refined", r.cells_refined},
            {"min_cell_width", r.min_cell_width},
            {"grid_extreme", r.grid_extreme},
            {"grid_extreme_q", r.grid_extreme_q},
            {"tightest_margin", r.tightest_margin},
            {"tightest_slack", r.tightest_slack},
            {"verdict", r.certified ? "CERTIFIED" : "UNCERTIFIED"}};
  if (r.name == "b") j["grid_extreme_r"] = r.grid_extreme_r;
  if (r.name == "b") j["boundary_max"] = r.boundary_extreme;
  if (r.name == "c") j["tail_bound"] = r.boundary_extreme;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const CertificateReport& rep) {
  json regions = json::array();
  for (const RegionReport& r : rep.regions) regions.push_back(to_json(r));
  return {{"epsilon", rep.epsilon}, {"regions", regions}, {"certified", rep.all_certified()}};
}

inline json to_json(const ExtendedReal& x) { return x.infinite ? json("inf") : json(x.value); }

inline json to_json(const ParadigmRow& row) {
  return {{"mechanism", to_string(row.kind)},
          {"min_revenue", row.min_revenue},
          {"max_approximation", to_json(row.max_approximation)},
          {"max_regret", row.max_regret}};
}

inline json to_json(const InvarianceDefect& d) {
  return {{"alloc_defect", d.allocation},
          {"pay_defect", d.payment},
          {"alloc_bound", d.allocation_bound},
          {"pay_bound", d.payment_bound}};
}

}  // namespace scalerobust
